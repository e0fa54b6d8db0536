#include "bsq/theta_sections.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace bsq {

namespace {

// Gaussian terms below 1e-15 of the peak are dropped: exp(-(pi/2k) x^2) < 1e-15.
double series_half_width(int k) { return std::sqrt(2.0 * k * std::log(1e15) / kPi); }

double normalization(int k) { return std::pow(4.0 * k, 0.25); }

void check_k(int k) {
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
}

// exp(2 pi i j / res) for j = 0..res-1.
std::vector<cplx> roots_of_unity(int res) {
  std::vector<cplx> r(res);
  for (int j = 0; j < res; ++j) r[j] = std::polar(1.0, kTwoPi * j / res);
  return r;
}

}  // namespace

double ThetaRelationResiduals::max() const { return std::max({lattice, clock, shift, cyclic}); }

cplx theta_section_internal(int k, int l, double q, double P) {
  check_k(k);
  const int d = 2 * k;
  l = ((l % d) + d) % d;
  const double X = series_half_width(k);
  const double centre = -2.0 * k * P;
  // n = l + d t with |n - centre| <= X
  const long t_lo = static_cast<long>(std::ceil((centre - X - l) / d));
  const long t_hi = static_cast<long>(std::floor((centre + X - l) / d));
  cplx acc{};
  for (long t = t_lo; t <= t_hi; ++t) {
    const double n = l + static_cast<double>(d) * t;
    const double g = std::exp(-(kPi / d) * (n - centre) * (n - centre));
    acc += g * std::polar(1.0, kTwoPi * std::fmod(n * q, 1.0));
  }
  return normalization(k) * std::polar(1.0, kTwoPi * k * q * P) * acc;
}

cplx theta_translate(int k, int l, double uq, double uP, double q, double P) {
  const double omega = 4.0 * kPi * (uq * P - uP * q);
  return std::polar(1.0, -0.5 * k * omega) * theta_section_internal(k, l, q + uq, P + uP);
}

ThetaRelationResiduals theta_relation_residuals(int k, int points) {
  check_k(k);
  const int d = 2 * k;
  const double step = 1.0 / d;
  std::mt19937_64 rng(0x5eed + k);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ThetaRelationResiduals r;
  for (int s = 0; s < points; ++s) {
    const double q = uni(rng), P = uni(rng);
    for (int l = 0; l < d; ++l) {
      const cplx v = theta_section_internal(k, l, q, P);
      const cplx w_l = std::polar(1.0, kPi * l / k);
      r.lattice = std::max({r.lattice, std::abs(theta_translate(k, l, 1.0, 0.0, q, P) - v),
                            std::abs(theta_translate(k, l, 0.0, 1.0, q, P) - v)});
      r.clock = std::max(r.clock, std::abs(theta_translate(k, l, step, 0.0, q, P) - w_l * v));
      r.shift = std::max(r.shift, std::abs(theta_translate(k, l, 0.0, step, q, P) -
                                           theta_section_internal(k, l + 1, q, P)));
      // 2k successive applications of T_{f/2k}.
      cplx phase = 1.0;
      double Pm = P;
      for (int m = 0; m < d; ++m) {
        phase *= std::polar(1.0, -0.5 * k * 4.0 * kPi * (-step * q));
        Pm += step;
      }
      const cplx cyc = phase * theta_section_internal(k, l, q, Pm);
      r.cyclic = std::max(r.cyclic, std::abs(cyc - v));
    }
  }
  return r;
}

ThetaBasis ThetaBasis::build(int k, int resolution) {
  check_k(k);
  if (k > 50) throw std::invalid_argument("theta basis is limited to k <= 50");
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  ThetaBasis b;
  b.k_ = k;
  b.resolution_ = resolution;
  b.cutoff_ = static_cast<int>(std::ceil(series_half_width(k)));
  b.residuals_ = theta_relation_residuals(k, 100);
  if (b.residuals_.max() > 1e-8) {
    throw ContractViolation("theta basis relations violated (residual " +
                            format_double(b.residuals_.max()) + ")");
  }

  const int d = 2 * k, res = resolution;
  const double c = normalization(k);
  const double X = series_half_width(k);
  const auto roots = roots_of_unity(res);
  b.values_.assign(d, std::vector<cplx>(static_cast<std::size_t>(res) * res));
  std::vector<cplx> row_phase(res);
  for (int j = 0; j < res; ++j) {
    const double p = static_cast<double>(j) / res;
    const double P = -p;
    for (int i = 0; i < res; ++i) row_phase[i] = c * std::polar(1.0, kTwoPi * k * (double(i) / res) * P);
    const double centre = 2.0 * k * p;
    const long n_lo = static_cast<long>(std::ceil(centre - X));
    const long n_hi = static_cast<long>(std::floor(centre + X));
    for (long n = n_lo; n <= n_hi; ++n) {
      const int l = static_cast<int>(((n % d) + d) % d);
      const double g = std::exp(-(kPi / d) * (n - centre) * (n - centre));
      const long nm = ((n % res) + res) % res;
      cplx* dst = b.values_[l].data() + static_cast<std::size_t>(j) * res;
      for (int i = 0; i < res; ++i) dst[i] += g * roots[(nm * i) % res];
    }
    for (int l = 0; l < d; ++l) {
      cplx* dst = b.values_[l].data() + static_cast<std::size_t>(j) * res;
      for (int i = 0; i < res; ++i) dst[i] *= row_phase[i];
    }
  }
  return b;
}

cplx ThetaBasis::section(int l, double q, double p) const {
  return theta_section_internal(k_, l, q, -p);
}

Eigen::MatrixXcd ThetaBasis::gram_matrix() const {
  const int d = dim();
  const std::size_t n = values_.front().size();
  Eigen::MatrixXcd G(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      cplx acc{};
      for (std::size_t i = 0; i < n; ++i) acc += std::conj(values_[a][i]) * values_[b][i];
      G(a, b) = acc / static_cast<double>(n);
      G(b, a) = std::conj(G(a, b));
    }
  }
  return G;
}

std::vector<double> eigenfunction_modulus(int k, const Eigen::VectorXcd& v, int resolution) {
  check_k(k);
  const int d = 2 * k, res = resolution;
  if (v.size() != d) {
    throw std::invalid_argument("eigenvector has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(d));
  }
  if (res < 2) throw std::invalid_argument("resolution must be at least 2");
  const double c = normalization(k);
  const double X = series_half_width(k);
  const auto roots = roots_of_unity(res);
  std::vector<double> field(static_cast<std::size_t>(res) * res, 0.0);
  std::vector<cplx> g;
  for (int j = 0; j < res; ++j) {
    const double centre = 2.0 * k * static_cast<double>(j) / res;
    const long n_lo = static_cast<long>(std::ceil(centre - X));
    const long n_hi = static_cast<long>(std::floor(centre + X));
    g.clear();
    for (long n = n_lo; n <= n_hi; ++n) {
      g.push_back(v[((n % d) + d) % d] * std::exp(-(kPi / d) * (n - centre) * (n - centre)));
    }
    // |sum_n g_n z^n| = |sum_t g_{n_lo + t} z^t| with z = exp(2 pi i q); Horner in z.
    for (int i = 0; i < res; ++i) {
      const cplx z = roots[i];
      cplx acc{};
      for (auto it = g.rbegin(); it != g.rend(); ++it) acc = acc * z + *it;
      field[static_cast<std::size_t>(j) * res + i] = c * std::abs(acc);
    }
  }
  return field;
}

std::vector<double> eigenfunction_modulus(const ThetaBasis& basis, const Eigen::VectorXcd& v) {
  if (v.size() != basis.dim()) {
    throw std::invalid_argument("eigenvector has " + std::to_string(v.size()) +
                                " entries, expected " + std::to_string(basis.dim()));
  }
  const std::size_t n = basis.values().front().size();
  std::vector<double> field(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc{};
    for (int l = 0; l < basis.dim(); ++l) acc += v[l] * basis.values()[l][i];
    field[i] = std::abs(acc);
  }
  return field;
}

double field_mass(const std::vector<double>& field, int resolution) {
  double s = 0.0;
  for (double f : field) s += f * f;
  return s / (static_cast<double>(resolution) * resolution);
}

double mass_concentration(const std::vector<double>& field, int resolution, const TrigSymbol& sym,
                          double E, double delta) {
  const int res = resolution;
  if (field.size() != static_cast<std::size_t>(res) * res) {
    throw std::invalid_argument("field size does not match the resolution");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be non-negative");
  double total = 0.0, inside = 0.0;
  std::size_t tube_points = 0;
  for (int j = 0; j < res; ++j) {
    const double p = static_cast<double>(j) / res;
    for (int i = 0; i < res; ++i) {
      const double q = static_cast<double>(i) / res;
      const double f = field[static_cast<std::size_t>(j) * res + i];
      const double m = f * f;
      total += m;
      if (std::fabs(sym.eval(q, p) - E) <= sym.gradient(q, p).norm() * delta) {
        inside += m;
        ++tube_points;
      }
    }
  }
  if (tube_points == 0) throw std::domain_error("mass_concentration: empty tube");
  if (!(total > 0.0)) throw std::domain_error("mass_concentration: zero field");
  return inside / total;
}

void write_field_csv(std::ostream& out, const std::vector<double>& field, int resolution) {
  out << "q,p,value\n";
  for (int j = 0; j < resolution; ++j) {
    const std::string p = format_double(static_cast<double>(j) / resolution);
    for (int i = 0; i < resolution; ++i) {
      out << format_double(static_cast<double>(i) / resolution) << ',' << p << ','
          << format_double(field[static_cast<std::size_t>(j) * resolution + i]) << '\n';
    }
  }
}

}  // namespace bsq
