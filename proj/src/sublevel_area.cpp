// Area of the sublevel component {a <= E} containing the global minimizer.
//
// The grid is anchored so that the minimizer is a vertex. Vertices with
// a <= E are flood-filled from that vertex (4-neighbour, periodic on the full
// torus); every cell touching the component is split into four triangles
// around its centre and the area of {linear interpolant <= E} is added in
// closed form. The linear-interpolation error is O(h^2) with a smooth leading
// term, so combining n and 2n cells as (4 A_2n - A_n) / 3 removes it.
//
// Small components are handled by zooming: a coarse pass measures the
// component's extent and the window shrinks around the minimizer until the
// component spans a good fraction of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>

#include "bsq/symbols.hpp"

namespace bsq {

namespace {

// Fraction of a triangle where the linear interpolant of (a, b, c) is <= 0.
double triangle_fraction(double a, double b, double c) {
  const bool ia = a <= 0.0, ib = b <= 0.0, ic = c <= 0.0;
  const int inside = ia + ib + ic;
  if (inside == 3) return 1.0;
  if (inside == 0) return 0.0;
  if (inside == 1) {
    const double d0 = ia ? a : (ib ? b : c);
    const double d1 = ia ? b : a;
    const double d2 = ic ? b : c;
    return d0 * d0 / ((d0 - d1) * (d0 - d2));
  }
  const double d2 = !ia ? a : (!ib ? b : c);
  const double d0 = !ia ? b : a;
  const double d1 = !ic ? b : c;
  return 1.0 - d2 * d2 / ((d2 - d0) * (d2 - d1));
}

std::vector<double> axis_points(double origin, double h, int count) {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = origin + i * h;
  return v;
}

// Symbol values on a tensor grid from separable per-mode phase tables.
std::vector<double> sample_grid(const TrigSymbol& sym, const std::vector<double>& qs,
                                const std::vector<double>& ps) {
  return sym.eval_grid(qs, ps);
}

struct FloodResult {
  std::vector<std::uint8_t> inside;  // vertex membership, (nv x nv) row-major
  int min_di = 0, max_di = 0, min_dj = 0, max_dj = 0;
  bool touches_edge = false;
};

// Flood fill of {value <= E} from the centre vertex. On a periodic grid the
// vertex count per axis is n (index n wraps to 0); otherwise it is n + 1.
// Offsets di, dj are tracked unwrapped relative to the seed.
FloodResult flood(const std::vector<double>& vert, double E, int n, bool periodic) {
  const int nv = periodic ? n : n + 1;
  const int c = n / 2;
  FloodResult r;
  r.inside.assign(static_cast<std::size_t>(nv) * nv, 0);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(nv) * nv, 0);
  struct Node {
    int i, j, di, dj;
  };
  std::vector<Node> stack;
  stack.push_back({c, c, 0, 0});
  seen[static_cast<std::size_t>(c) * nv + c] = 1;
  const int di[4] = {1, -1, 0, 0};
  const int dj[4] = {0, 0, 1, -1};
  while (!stack.empty()) {
    const Node nd = stack.back();
    stack.pop_back();
    const std::size_t idx = static_cast<std::size_t>(nd.j) * nv + nd.i;
    if (vert[idx] > E) continue;
    r.inside[idx] = 1;
    r.min_di = std::min(r.min_di, nd.di);
    r.max_di = std::max(r.max_di, nd.di);
    r.min_dj = std::min(r.min_dj, nd.dj);
    r.max_dj = std::max(r.max_dj, nd.dj);
    for (int d = 0; d < 4; ++d) {
      int ni = nd.i + di[d], nj = nd.j + dj[d];
      if (periodic) {
        ni = ni < 0 ? ni + nv : (ni >= nv ? ni - nv : ni);
        nj = nj < 0 ? nj + nv : (nj >= nv ? nj - nv : nj);
      } else if (ni < 0 || nj < 0 || ni >= nv || nj >= nv) {
        r.touches_edge = true;
        continue;
      }
      auto& s = seen[static_cast<std::size_t>(nj) * nv + ni];
      if (s) continue;
      s = 1;
      stack.push_back({ni, nj, nd.di + di[d], nd.dj + dj[d]});
    }
  }
  return r;
}

}  // namespace

SublevelAreaCalculator::SublevelAreaCalculator(const TrigSymbol& sym,
                                               const SymplecticNormalization& norm,
                                               int resolution)
    : sym_(sym), norm_(norm), resolution_(resolution), min_(find_minimum(sym)) {
  if (resolution < 16) throw std::invalid_argument("area resolution must be at least 16");
  resolution_ += resolution_ % 2;
}

SublevelAreaCalculator::Grid SublevelAreaCalculator::make_grid(const Window& w, int n) const {
  const double hq = 2.0 * w.half_q / n, hp = 2.0 * w.half_p / n;
  const double q0 = min_.q - w.half_q, p0 = min_.p - w.half_p;
  const int nv = w.periodic ? n : n + 1;
  Grid g;
  g.n = n;
  g.periodic = w.periodic;
  g.cell_area = hq * hp;
  g.vert = sample_grid(sym_, axis_points(q0, hq, nv), axis_points(p0, hp, nv));
  g.centre = sample_grid(sym_, axis_points(q0 + 0.5 * hq, hq, n),
                         axis_points(p0 + 0.5 * hp, hp, n));
  return g;
}

const SublevelAreaCalculator::Grid& SublevelAreaCalculator::torus_grid(int n) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = torus_cache_.find(n);
  if (it == torus_cache_.end()) {
    it = torus_cache_.emplace(n, std::make_shared<const Grid>(make_grid(Window{}, n))).first;
  }
  return *it->second;
}

double SublevelAreaCalculator::lebesgue_area(double E, const Grid& g) {
  const int n = g.n;
  const int nv = g.periodic ? n : n + 1;
  const FloodResult fr = flood(g.vert, E, n, g.periodic);
  const auto& in = fr.inside;

  // Cell-index order keeps the summation order independent of the fill order.
  double covered = 0.0;
  for (int j = 0; j < n; ++j) {
    const int j1 = g.periodic && j + 1 == n ? 0 : j + 1;
    const std::size_t r0 = static_cast<std::size_t>(j) * nv;
    const std::size_t r1 = static_cast<std::size_t>(j1) * nv;
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const int i1 = g.periodic && i + 1 == n ? 0 : i + 1;
      const int cnt = in[r0 + i] + in[r0 + i1] + in[r1 + i] + in[r1 + i1];
      if (cnt == 0) continue;
      const double fc = g.centre[static_cast<std::size_t>(j) * n + i] - E;
      if (cnt == 4 && fc <= 0.0) {
        row += 4.0;
        continue;
      }
      // Corners outside the component count as outside even if a <= E there.
      auto val = [&](std::size_t idx) {
        const double v = g.vert[idx] - E;
        return in[idx] ? v : std::max(v, 1e-300);
      };
      const double f00 = val(r0 + i), f10 = val(r0 + i1);
      const double f01 = val(r1 + i), f11 = val(r1 + i1);
      row += triangle_fraction(f00, f10, fc) + triangle_fraction(f10, f11, fc) +
             triangle_fraction(f11, f01, fc) + triangle_fraction(f01, f00, fc);
    }
    covered += row;
  }
  return covered * 0.25 * g.cell_area;
}

SublevelAreaCalculator::Window SublevelAreaCalculator::locate(double E) const {
  const int n = std::min(resolution_, 256);
  Window w;
  for (int iter = 0; iter < 12; ++iter) {
    const double hq = 2.0 * w.half_q / n, hp = 2.0 * w.half_p / n;
    FloodResult fr;
    if (w.periodic) {
      fr = flood(torus_grid(n).vert, E, n, true);
    } else {
      const int nv = n + 1;
      const auto vert = sample_grid(sym_, axis_points(min_.q - w.half_q, hq, nv),
                                    axis_points(min_.p - w.half_p, hp, nv));
      fr = flood(vert, E, n, false);
    }
    const int ext_i = std::max(-fr.min_di, fr.max_di);
    const int ext_j = std::max(-fr.min_dj, fr.max_dj);
    if (fr.touches_edge) {
      w.half_q *= 2.0;
      w.half_p *= 2.0;
      if (w.half_q >= 0.25 || w.half_p >= 0.25) return Window{};
      continue;
    }
    if (w.periodic && (ext_i >= n / 2 - 4 || ext_j >= n / 2 - 4)) return w;
    const bool resolved = ext_i >= n / 8 && ext_j >= n / 8;
    if (resolved && !w.periodic) return w;
    Window next;
    next.periodic = false;
    next.half_q = (ext_i + 3) * hq;
    next.half_p = (ext_j + 3) * hp;
    if (next.half_q >= 0.25 || next.half_p >= 0.25) return Window{};
    w = next;
  }
  return w;
}

double SublevelAreaCalculator::area(double E) const {
  if (!(E > min_.value)) {
    throw std::domain_error("sublevel_area: E must exceed the minimum value " +
                            format_double(min_.value));
  }
  const Window w = locate(E);
  double coarse, fine;
  if (w.periodic) {
    coarse = lebesgue_area(E, torus_grid(resolution_));
    fine = lebesgue_area(E, torus_grid(2 * resolution_));
  } else {
    coarse = lebesgue_area(E, make_grid(w, resolution_));
    fine = lebesgue_area(E, make_grid(w, 2 * resolution_));
  }
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  return norm_.nu * std::clamp(extrapolated, 0.0, 1.0);
}

double sublevel_area(const TrigSymbol& sym, double E, const SymplecticNormalization& norm,
                     int resolution) {
  return SublevelAreaCalculator(sym, norm, resolution).area(E);
}

}  // namespace bsq
