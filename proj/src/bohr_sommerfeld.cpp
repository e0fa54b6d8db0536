#include "bsq/bohr_sommerfeld.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "bsq/parallel.hpp"
#include "bsq/torus_quant.hpp"

namespace bsq {

namespace {

// Cubic Hermite basis on [x0, x1].
struct HermitePiece {
  double x0, h, y0, y1, d0, d1;
  double value(double x) const {
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
  }
  double slope(double x) const {
    const double t = (x - x0) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y0 + (6 * t - 6 * t2) * y1) / h + (3 * t2 - 4 * t + 1) * d0 +
           (3 * t2 - 2 * t) * d1;
  }
};

}  // namespace

void ActionProfile::fit() {
  const std::size_t n = E_grid.size();
  if (n < 2 || c0.size() != n || f0.size() != n) {
    throw std::invalid_argument("action profile needs at least two samples");
  }
  x_.assign(1, E_min);
  y_.assign(1, 0.0);
  x_.insert(x_.end(), E_grid.begin(), E_grid.end());
  y_.insert(y_.end(), f0.begin(), f0.end());
  const std::size_t m = x_.size();
  std::vector<double> h(m - 1), delta(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
    if (!(h[i] > 0.0) || !(delta[i] > 0.0)) {
      throw ContractViolation("action profile: f0 not strictly increasing near E = " +
                              format_double(x_[i + 1]));
    }
  }
  d_.assign(m, 0.0);
  d_[0] = c0_prime_min / kTwoPi;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    d_[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
  }
  if (m >= 3) {
    const double h0 = h[m - 3], h1 = h[m - 2];
    d_[m - 1] = ((2 * h1 + h0) * delta[m - 2] - h1 * delta[m - 3]) / (h0 + h1);
  } else {
    d_[m - 1] = delta[m - 2];
  }
  // Hyman filter keeps every piece monotone.
  for (std::size_t i = 0; i < m; ++i) {
    double lim = std::numeric_limits<double>::infinity();
    if (i > 0) lim = std::min(lim, 3.0 * delta[i - 1]);
    if (i + 1 < m) lim = std::min(lim, 3.0 * delta[i]);
    d_[i] = std::clamp(d_[i], 0.0, lim);
  }
}

std::size_t ActionProfile::piece(double E) const {
  if (x_.empty()) throw std::logic_error("action profile used before fit()");
  if (!(E >= x_.front() && E <= x_.back())) {
    throw std::out_of_range("energy " + format_double(E) + " outside the action profile window [" +
                            format_double(x_.front()) + ", " + format_double(x_.back()) + "]");
  }
  const auto it = std::upper_bound(x_.begin(), x_.end(), E);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  i = std::clamp<std::size_t>(i, 1, x_.size() - 1);
  return i - 1;
}

double ActionProfile::f0_at(double E) const {
  const std::size_t i = piece(E);
  return HermitePiece{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], d_[i], d_[i + 1]}.value(E);
}

double ActionProfile::f0_prime_at(double E) const {
  const std::size_t i = piece(E);
  return HermitePiece{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], d_[i], d_[i + 1]}.slope(E);
}

double ActionProfile::g0(double target) const {
  if (x_.empty()) throw std::logic_error("action profile used before fit()");
  if (!(target >= 0.0 && target <= y_.back())) {
    throw std::out_of_range("target " + format_double(target) + " outside f0 range [0, " +
                            format_double(y_.back()) + "]");
  }
  auto it = std::lower_bound(y_.begin(), y_.end(), target);
  std::size_t i = static_cast<std::size_t>(it - y_.begin());
  if (i == 0) return x_.front();
  --i;
  const HermitePiece pc{x_[i], x_[i + 1] - x_[i], y_[i], y_[i + 1], d_[i], d_[i + 1]};
  double lo = x_[i], hi = x_[i + 1];
  // Bisection to a narrow bracket, then Newton kept inside it.
  for (int it2 = 0; it2 < 30; ++it2) {
    const double mid = 0.5 * (lo + hi);
    (pc.value(mid) < target ? lo : hi) = mid;
  }
  double E = 0.5 * (lo + hi);
  for (int it2 = 0; it2 < 50; ++it2) {
    const double r = pc.value(E) - target;
    if (r == 0.0) break;
    (r < 0.0 ? lo : hi) = E;
    const double s = pc.slope(E);
    double next = s > 0.0 ? E - r / s : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == E || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::fabs(E)) break;
    E = next;
  }
  const double defect = std::fabs(pc.value(E) - target);
  if (defect > 1e-12) {
    throw ContractViolation("g0 inversion defect " + format_double(defect) + " at target " +
                            format_double(target));
  }
  return E;
}

double ActionProfile::secant_c0_prime() const {
  if (E_grid.size() < 2) throw std::logic_error("secant needs two samples");
  return (c0[1] - c0[0]) / (E_grid[1] - E_grid[0]);
}

double default_e_cap(const TrigSymbol& sym) {
  const MinimumInfo mn = find_minimum(sym);
  const double sep = separatrix_energy(sym);
  if (std::isfinite(sep)) return 0.5 * (sep + mn.value);
  double top = mn.value;
  for (const auto& cp : critical_points(sym)) top = std::max(top, cp.value);
  return 0.5 * (top + mn.value);
}

ActionProfile build_action_profile(const TrigSymbol& sym, const SymplecticNormalization& norm,
                                   double E_cap, const ActionProfileOptions& opts) {
  if (opts.grid_size < 3) throw std::invalid_argument("action profile grid_size must be >= 3");
  const MinimumInfo mn = find_minimum(sym);
  if (!mn.nondegenerate) throw std::domain_error("action profile: minimum is degenerate");
  const double sep = separatrix_energy(sym);
  if (!(E_cap > mn.value) || !(E_cap < sep)) {
    throw std::invalid_argument("E_cap " + format_double(E_cap) + " must lie in (E_min, E_sep) = (" +
                                format_double(mn.value) + ", " + format_double(sep) + ")");
  }

  ActionProfile prof;
  prof.E_min = mn.value;
  prof.E_cap = E_cap;
  prof.c0_prime_min = action_derivative_at_min(sym, norm);
  const int N = opts.grid_size;
  prof.E_grid.resize(N);
  for (int i = 1; i <= N; ++i) {
    prof.E_grid[i - 1] = mn.value + (E_cap - mn.value) * (1.0 - std::cos(kPi * i / (2.0 * N)));
  }
  prof.E_grid.back() = E_cap;

  int res = opts.resolution;
  for (int attempt = 0; attempt < 2; ++attempt, res *= 2) {
    SublevelAreaCalculator calc(sym, norm, res);
    prof.resolution = calc.resolution();
    prof.c0 = parallel_map<double>(prof.E_grid.size(),
                                   [&](std::size_t i) { return calc.area(prof.E_grid[i]); });
    prof.f0.resize(N);
    for (int i = 0; i < N; ++i) prof.f0[i] = prof.c0[i] / kTwoPi;
    try {
      prof.fit();
    } catch (const ContractViolation&) {
      if (attempt == 1) throw;
      continue;
    }
    break;
  }

  // Bottom consistency: f0 - s (E - E_min) must be second order.
  const double s = prof.c0_prime_min / kTwoPi;
  const double curvature_scale = 10.0 * s / (E_cap - mn.value);
  for (int i = 0; i < std::min(3, N); ++i) {
    const double dE = prof.E_grid[i] - mn.value;
    const double dev = std::fabs(prof.f0[i] - s * dE);
    if (dev > curvature_scale * dE * dE + 1e-6 * prof.f0[i]) {
      throw ContractViolation("action profile: f0 inconsistent with c0'(E_min) at E = " +
                              format_double(prof.E_grid[i]) + " (deviation " + format_double(dev) +
                              ")");
    }
  }
  return prof;
}

double predict_one(const ActionProfile& profile, int k, int j, const SubprincipalAction& f1) {
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  if (j < 0) throw std::invalid_argument("j must be non-negative");
  const double target = (j + 0.5) / k;
  const double E0 = profile.g0(target);
  if (!f1) return E0;
  return E0 - f1(E0) / (k * profile.f0_prime_at(E0));
}

PredictionSet predict(std::shared_ptr<const ActionProfile> profile, int k,
                      const SubprincipalAction& f1) {
  if (!profile) throw std::invalid_argument("predict: missing action profile");
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  PredictionSet ps;
  ps.k = k;
  for (int j = 0; (j + 0.5) / k <= profile->f0_cap(); ++j) {
    ps.E_pred.push_back(predict_one(*profile, k, j, f1));
  }
  for (std::size_t j = 1; j < ps.E_pred.size(); ++j) {
    if (!(ps.E_pred[j] > ps.E_pred[j - 1])) {
      throw ContractViolation("predictions not strictly increasing at j = " + std::to_string(j));
    }
  }
  ps.source = std::move(profile);
  return ps;
}

double near_minimum_predict(const TrigSymbol& sym, const SymplecticNormalization& norm, int k,
                            int j, double a1_at_min) {
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  if (j < 0) throw std::invalid_argument("j must be non-negative");
  const MinimumInfo mn = find_minimum(sym);
  const double c0p = action_derivative_at_min(sym, norm);
  return mn.value + (a1_at_min + kTwoPi * (j + 0.5) / c0p) / k;
}

double VerificationReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : rows) m = std::max(m, r.residual);
  return m;
}

VerificationReport verify(const SpectrumResult& spectrum, const PredictionSet& predictions,
                          double E_cap, const std::vector<double>& count_levels) {
  if (spectrum.k && *spectrum.k != predictions.k) {
    throw std::invalid_argument("verify: spectrum has k = " + std::to_string(*spectrum.k) +
                                " but predictions have k = " + std::to_string(predictions.k));
  }
  VerificationReport rep;
  rep.k = predictions.k;
  rep.E_cap = E_cap;
  const auto& lam = spectrum.eigenvalues;
  const std::size_t n = std::min(lam.size(), predictions.size());
  const double unit_gap =
      predictions.source ? kTwoPi / predictions.source->c0_prime_min : kTwoPi;
  for (std::size_t j = 0; j < n; ++j) {
    const double E = predictions.E_pred[j];
    if (!(lam[j] <= E_cap || E <= E_cap)) continue;
    VerificationRow row;
    row.j = static_cast<int>(j);
    row.lambda = lam[j];
    row.E_pred = E;
    row.residual = std::fabs(lam[j] - E);
    if (j + 1 < lam.size()) row.gap_ratio = rep.k * (lam[j + 1] - lam[j]) / unit_gap;
    rep.rows.push_back(row);
  }
  double sum = 0.0;
  for (const auto& r : rep.rows) {
    if (!r.gap_ratio) continue;
    const double g = *r.gap_ratio;
    rep.gaps.min = rep.gaps.count ? std::min(rep.gaps.min, g) : g;
    rep.gaps.max = rep.gaps.count ? std::max(rep.gaps.max, g) : g;
    sum += g;
    ++rep.gaps.count;
  }
  if (rep.gaps.count) rep.gaps.mean = sum / static_cast<double>(rep.gaps.count);

  for (double E : count_levels) {
    if (!predictions.source) throw std::invalid_argument("verify: counting needs an action profile");
    CountCheck c;
    c.E = E;
    c.count = std::count_if(lam.begin(), lam.end(), [&](double l) { return l <= E; });
    c.expected = E <= predictions.source->E_min ? 0.0 : rep.k * predictions.source->f0_at(E);
    c.defect = std::fabs(static_cast<double>(c.count) - c.expected);
    rep.counts.push_back(c);
  }
  return rep;
}

void write_report_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  out << "k,j,lambda,E_pred,residual,gap_ratio\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      out << rep.k << ',' << r.j << ',' << format_double(r.lambda) << ',' << format_double(r.E_pred)
          << ',' << format_double(r.residual) << ',';
      if (r.gap_ratio) out << format_double(*r.gap_ratio);
      out << '\n';
    }
  }
}

std::vector<DecayExponent> fit_decay(const std::vector<int>& k_list,
                                     const std::vector<std::vector<double>>& residuals) {
  std::vector<DecayExponent> out;
  for (std::size_t j = 0; j < residuals.size(); ++j) {
    const auto& r = residuals[j];
    if (r.size() != k_list.size()) throw std::invalid_argument("fit_decay: size mismatch");
    DecayExponent d;
    d.j = static_cast<int>(j);
    d.residuals = r;
    d.machine_limited = std::any_of(r.begin(), r.end(), [](double v) { return !(v >= 1e-12); });
    if (!d.machine_limited) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const double m = static_cast<double>(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = std::log(static_cast<double>(k_list[i])), y = std::log(r[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      d.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      d.intercept = (sy - d.slope * sx) / m;
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<DecayExponent> decay_sweep(const TrigSymbol& sym, const SymplecticNormalization& norm,
                                       const std::vector<int>& k_list, int j_max,
                                       const DecaySweepOptions& opts) {
  if (k_list.size() < 3) throw std::invalid_argument("decay_sweep needs at least three k values");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (k_list[i] < 1) throw std::invalid_argument("k must be a positive integer");
    if (i && k_list[i] <= k_list[i - 1]) throw std::invalid_argument("k_list must be ascending");
  }
  if (j_max < 0) throw std::invalid_argument("j_max must be non-negative");
  if (opts.mode == PredictorMode::profile && !opts.profile) {
    throw std::invalid_argument("decay_sweep: profile mode needs an action profile");
  }
  if (2 * k_list.front() <= j_max) {
    throw std::invalid_argument("j_max exceeds the dimension at k = " + std::to_string(k_list.front()));
  }

  std::vector<std::vector<double>> lams = parallel_map<std::vector<double>>(
      k_list.size(), [&](std::size_t i) {
        const auto op = weyl_quantize(sym, QuantumTorusParams(k_list[i]));
        return eigh(op).eigenvalues;
      });

  const MinimumInfo mn = find_minimum(sym);
  const double c0p = action_derivative_at_min(sym, norm);
  std::vector<std::vector<double>> res(j_max + 1, std::vector<double>(k_list.size()));
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    const int k = k_list[i];
    for (int j = 0; j <= j_max; ++j) {
      double pred;
      if (opts.mode == PredictorMode::near_minimum) {
        pred = mn.value + (opts.a1_at_min + kTwoPi * (j + 0.5) / c0p) / k;
      } else {
        pred = predict_one(*opts.profile, k, j);
      }
      res[j][i] = std::fabs(lams[i][j] - pred);
    }
  }
  return fit_decay(k_list, res);
}

void write_sweep_csv(std::ostream& out, const std::vector<DecayExponent>& rows) {
  out << "j,slope,intercept\n";
  for (const auto& r : rows) {
    out << r.j << ',';
    if (r.machine_limited) {
      out << "machine-limited,";
    } else {
      out << format_double(r.slope) << ',' << format_double(r.intercept);
    }
    out << '\n';
  }
}

}  // namespace bsq
