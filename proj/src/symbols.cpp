#include "bsq/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace bsq {

namespace {

using Key = std::pair<int, int>;

std::map<Key, cplx> to_map(const std::vector<FourierMode>& modes, const char* what) {
  std::map<Key, cplx> out;
  for (const auto& md : modes) {
    if (!out.emplace(Key{md.m, md.n}, md.coeff).second) {
      throw std::invalid_argument(std::string(what) + ": duplicate mode (" +
                                  std::to_string(md.m) + ", " + std::to_string(md.n) + ")");
    }
  }
  return out;
}

std::vector<FourierMode> from_map(const std::map<Key, cplx>& m) {
  std::vector<FourierMode> out;
  for (const auto& [key, c] : m) {
    if (c != cplx{}) out.push_back({key.first, key.second, c});
  }
  return out;
}

// exp(2 pi i t) with t reduced to [0, 1) first.
cplx unit_phase(double t) {
  t -= std::floor(t);
  return std::polar(1.0, kTwoPi * t);
}

}  // namespace

double Gradient::norm() const { return std::hypot(dq, dp); }

std::array<double, 2> Hessian::eigenvalues() const {
  const double mean = 0.5 * (qq + pp);
  const double rad = std::hypot(0.5 * (qq - pp), qp);
  return {mean - rad, mean + rad};
}

SymplecticNormalization::SymplecticNormalization(double density) : nu(density) {
  if (!(density > 0.0)) throw std::invalid_argument("symplectic density must be positive");
}

std::vector<FourierMode> TrigSymbol::symmetrize(std::vector<FourierMode> modes, double tol,
                                                const char* what) {
  auto in = to_map(modes, what);
  std::map<Key, cplx> out;
  for (const auto& [key, c] : in) {
    const Key partner{-key.first, -key.second};
    if (out.count(key)) continue;
    auto it = in.find(partner);
    const cplx cp = it == in.end() ? cplx{} : it->second;
    const cplx sym = 0.5 * (c + std::conj(cp));
    if (std::abs(sym - c) > tol || std::abs(std::conj(sym) - cp) > tol) {
      throw std::invalid_argument(std::string(what) + ": mode (" + std::to_string(key.first) +
                                  ", " + std::to_string(key.second) +
                                  ") has no matching conjugate partner; symbol is not real");
    }
    if (key == partner) {
      out[key] = cplx(sym.real(), 0.0);
    } else {
      out[key] = sym;
      out[partner] = std::conj(sym);
    }
  }
  return from_map(out);
}

TrigSymbol TrigSymbol::from_modes(std::vector<FourierMode> principal,
                                  std::vector<FourierMode> subprincipal, double tol) {
  TrigSymbol s;
  s.modes_ = symmetrize(std::move(principal), tol, "principal symbol");
  s.sub_modes_ = symmetrize(std::move(subprincipal), tol, "subprincipal symbol");
  return s;
}

TrigSymbol TrigSymbol::from_half_modes(const std::vector<FourierMode>& half) {
  std::map<Key, cplx> acc;
  for (const auto& md : half) {
    acc[{md.m, md.n}] += md.coeff;
    acc[{-md.m, -md.n}] += std::conj(md.coeff);
  }
  TrigSymbol s;
  // Re-impose exact conjugate symmetry on the sums.
  for (auto& [key, c] : acc) {
    const Key partner{-key.first, -key.second};
    if (key == partner) c = cplx(c.real(), 0.0);
    else if (key > partner) c = std::conj(acc[partner]);
  }
  s.modes_ = from_map(acc);
  return s;
}

TrigSymbol TrigSymbol::harper() {
  return from_modes({{1, 0, 1.0}, {-1, 0, 1.0}, {0, 1, 1.0}, {0, -1, 1.0}});
}

TrigSymbol TrigSymbol::constant(double value) { return from_modes({{0, 0, value}}); }

TrigSymbol TrigSymbol::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open symbol file: " + path.string());
  return parse(in, path.string());
}

TrigSymbol TrigSymbol::parse(std::istream& in, const std::string& origin) {
  std::vector<FourierMode> modes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    FourierMode md;
    double re = 0.0, im = 0.0;
    std::string extra;
    if (!(ls >> md.m >> md.n >> re >> im) || (ls >> extra)) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": expected `m n re im`");
    }
    md.coeff = {re, im};
    modes.push_back(md);
  }
  try {
    return from_modes(std::move(modes));
  } catch (const std::invalid_argument& e) {
    throw InputError(origin + ": " + e.what());
  }
}

void TrigSymbol::save(std::ostream& out) const {
  out << "# m n re im\n";
  for (const auto& md : modes_) {
    out << md.m << ' ' << md.n << ' ' << format_double(md.coeff.real()) << ' '
        << format_double(md.coeff.imag()) << '\n';
  }
}

int TrigSymbol::degree() const {
  int d = 0;
  for (const auto& md : modes_) d = std::max({d, std::abs(md.m), std::abs(md.n)});
  return d;
}

double TrigSymbol::coefficient_l1() const {
  double s = 0.0;
  for (const auto& md : modes_) s += std::abs(md.coeff);
  return s;
}

cplx TrigSymbol::evaluate(const std::vector<FourierMode>& modes, double q, double p) {
  cplx acc{};
  for (const auto& md : modes) acc += md.coeff * unit_phase(md.m * q + md.n * p);
  return acc;
}

cplx TrigSymbol::eval_complex(double q, double p) const { return evaluate(modes_, q, p); }

double TrigSymbol::eval(double q, double p) const {
  const cplx v = evaluate(modes_, q, p);
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, coefficient_l1())) {
    throw std::domain_error("symbol evaluation has a non-negligible imaginary part");
  }
  return v.real();
}

double TrigSymbol::eval_sub(double q, double p) const { return evaluate(sub_modes_, q, p).real(); }

Gradient TrigSymbol::gradient(double q, double p) const {
  Gradient g;
  for (const auto& md : modes_) {
    const cplx t = md.coeff * unit_phase(md.m * q + md.n * p) * cplx(0.0, kTwoPi);
    g.dq += (t * static_cast<double>(md.m)).real();
    g.dp += (t * static_cast<double>(md.n)).real();
  }
  return g;
}

Hessian TrigSymbol::hessian(double q, double p) const {
  Hessian h;
  const double s = -kTwoPi * kTwoPi;
  for (const auto& md : modes_) {
    const double re = (md.coeff * unit_phase(md.m * q + md.n * p)).real() * s;
    h.qq += re * md.m * md.m;
    h.qp += re * md.m * md.n;
    h.pp += re * md.n * md.n;
  }
  return h;
}

std::vector<double> TrigSymbol::eval_grid(const std::vector<double>& qs,
                                          const std::vector<double>& ps) const {
  const std::size_t nq = qs.size(), np = ps.size();
  std::vector<double> out(nq * np, 0.0);
  std::vector<cplx> tq(nq), row(nq);
  for (const auto& md : modes_) {
    for (std::size_t i = 0; i < nq; ++i) tq[i] = md.coeff * unit_phase(md.m * qs[i]);
    for (std::size_t j = 0; j < np; ++j) {
      const cplx tp = unit_phase(md.n * ps[j]);
      double* dst = out.data() + j * nq;
      for (std::size_t i = 0; i < nq; ++i) {
        dst[i] += tq[i].real() * tp.real() - tq[i].imag() * tp.imag();
      }
    }
  }
  return out;
}

TrigSymbol TrigSymbol::plus(const TrigSymbol& other) const {
  auto merge = [](const std::vector<FourierMode>& a, const std::vector<FourierMode>& b) {
    std::map<Key, cplx> acc;
    for (const auto& md : a) acc[{md.m, md.n}] += md.coeff;
    for (const auto& md : b) acc[{md.m, md.n}] += md.coeff;
    return from_map(acc);
  };
  TrigSymbol s;
  s.modes_ = merge(modes_, other.modes_);
  s.sub_modes_ = merge(sub_modes_, other.sub_modes_);
  return s;
}

TrigSymbol TrigSymbol::scaled(double factor) const {
  TrigSymbol s = *this;
  for (auto& md : s.modes_) md.coeff *= factor;
  for (auto& md : s.sub_modes_) md.coeff *= factor;
  return s;
}

// ---------------------------------------------------------------------------
// Critical points

namespace {

double wrap01(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

double torus_distance(double q1, double p1, double q2, double p2) {
  auto d = [](double a, double b) {
    double t = std::fabs(wrap01(a) - wrap01(b));
    return std::min(t, 1.0 - t);
  };
  return std::hypot(d(q1, q2), d(p1, p2));
}

double gradient_scale(const TrigSymbol& sym) {
  return std::max(1.0, sym.coefficient_l1() * kTwoPi * std::max(1, sym.degree()));
}

}  // namespace

MinimumInfo find_minimum(const TrigSymbol& sym, const FindMinimumOptions& opts) {
  const int g = opts.grid;
  std::vector<double> axis(g);
  for (int i = 0; i < g; ++i) axis[i] = static_cast<double>(i) / g;
  const auto vals = sym.eval_grid(axis, axis);
  const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
  double q = axis[best % g], p = axis[best / g];

  const double scale = std::max(1.0, sym.coefficient_l1());
  double f = sym.eval(q, p);
  for (int it = 0; it < opts.max_newton_steps; ++it) {
    const Gradient gr = sym.gradient(q, p);
    if (gr.norm() < 1e-15 * gradient_scale(sym)) break;
    const Hessian h = sym.hessian(q, p);
    const auto ev = h.eigenvalues();
    double sq, sp;
    if (ev[0] > 0.0) {
      const double det = h.det();
      sq = -(h.pp * gr.dq - h.qp * gr.dp) / det;
      sp = -(-h.qp * gr.dq + h.qq * gr.dp) / det;
    } else {
      const double curv = std::max(std::fabs(ev[1]), scale * kTwoPi * kTwoPi);
      sq = -gr.dq / curv;
      sp = -gr.dp / curv;
    }
    // Damping: halve until the step does not go uphill.
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      const double qn = q + t * sq, pn = p + t * sp;
      const double fn = sym.eval(qn, pn);
      if (fn <= f + 1e-14 * scale || sym.gradient(qn, pn).norm() < gr.norm()) {
        q = qn;
        p = pn;
        f = fn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }

  MinimumInfo out;
  out.q = wrap01(q);
  out.p = wrap01(p);
  out.value = sym.eval(out.q, out.p);
  out.hessian = sym.hessian(out.q, out.p);
  out.gradient_norm = sym.gradient(out.q, out.p).norm();
  const auto ev = out.hessian.eigenvalues();
  out.nondegenerate = ev[0] > opts.degeneracy_threshold;
  return out;
}

std::vector<CriticalPoint> critical_points(const TrigSymbol& sym, int seeds) {
  std::vector<CriticalPoint> found;
  const double gscale = gradient_scale(sym);
  const double hthr = 1e-8;
  for (int j = 0; j < seeds; ++j) {
    for (int i = 0; i < seeds; ++i) {
      double q = (i + 0.5) / seeds, p = (j + 0.5) / seeds;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const Gradient gr = sym.gradient(q, p);
        if (gr.norm() < 1e-11 * gscale) {
          converged = true;
          break;
        }
        const Hessian h = sym.hessian(q, p);
        const double det = h.det();
        if (std::fabs(det) < 1e-300) break;
        double sq = -(h.pp * gr.dq - h.qp * gr.dp) / det;
        double sp = -(-h.qp * gr.dq + h.qq * gr.dp) / det;
        const double len = std::hypot(sq, sp);
        if (len > 0.1) {
          sq *= 0.1 / len;
          sp *= 0.1 / len;
        }
        q += sq;
        p += sp;
      }
      if (!converged) continue;
      q = wrap01(q);
      p = wrap01(p);
      const bool dup = std::any_of(found.begin(), found.end(), [&](const CriticalPoint& c) {
        return torus_distance(c.q, c.p, q, p) < 1e-7;
      });
      if (dup) continue;
      CriticalPoint cp{q, p, sym.eval(q, p), CriticalKind::degenerate};
      const auto ev = sym.hessian(q, p).eigenvalues();
      if (ev[0] > hthr) cp.kind = CriticalKind::minimum;
      else if (ev[1] < -hthr) cp.kind = CriticalKind::maximum;
      else if (ev[0] < -hthr && ev[1] > hthr) cp.kind = CriticalKind::saddle;
      found.push_back(cp);
    }
  }
  return found;
}

double separatrix_energy(const TrigSymbol& sym, int seeds) {
  const MinimumInfo mn = find_minimum(sym);
  const double tol = 1e-12 * std::max(1.0, sym.coefficient_l1());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& cp : critical_points(sym, seeds)) {
    if (cp.kind == CriticalKind::saddle && cp.value > mn.value + tol) {
      best = std::min(best, cp.value);
    }
  }
  return best;
}

double action_derivative_at_min(const TrigSymbol& sym, const SymplecticNormalization& norm) {
  const MinimumInfo mn = find_minimum(sym);
  if (!mn.nondegenerate) {
    throw std::domain_error("minimum is degenerate; c0'(E_min) is undefined");
  }
  return kTwoPi * norm.nu / std::sqrt(mn.hessian.det());
}

}  // namespace bsq
