#include "bsq/torus_quant.hpp"

#include <cmath>
#include <ostream>

namespace bsq {

QuantumTorusParams::QuantumTorusParams(int k_level) : k(k_level) {
  if (k_level < 1) throw std::invalid_argument("k must be a positive integer");
}

cplx QuantumTorusParams::w() const { return w_pow(1); }

cplx QuantumTorusParams::w_pow(long long e) const {
  const long long period = 2LL * k;
  long long r = e % period;
  if (r < 0) r += period;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == period) return {-1.0, 0.0};
  if (4 * r == period) return {0.0, 1.0};
  if (4 * r == 3 * period) return {0.0, -1.0};
  // Conjugate pairs w^r, w^{-r} come out as exact conjugates.
  if (r > k) return std::conj(w_pow(period - r));
  return std::polar(1.0, kPi * static_cast<double>(r) / k);
}

void TorusOperator::write_csv(std::ostream& out) const {
  out << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      const cplx v = matrix(r, c);
      if (v == cplx{}) continue;
      out << r << ',' << c << ',' << format_double(v.real()) << ',' << format_double(v.imag())
          << '\n';
    }
  }
}

TorusOperator clock(const QuantumTorusParams& params) {
  const int d = params.dim();
  TorusOperator op{params, Eigen::MatrixXcd::Zero(d, d), "clock"};
  for (int l = 0; l < d; ++l) op.matrix(l, l) = params.w_pow(l);
  return op;
}

TorusOperator shift(const QuantumTorusParams& params) {
  const int d = params.dim();
  TorusOperator op{params, Eigen::MatrixXcd::Zero(d, d), "shift"};
  for (int l = 0; l < d; ++l) op.matrix((l + 1) % d, l) = 1.0;
  return op;
}

TorusOperator weyl_quantize(const TrigSymbol& sym, const QuantumTorusParams& params,
                            std::optional<std::string> tag) {
  // Reject anything whose coefficients are not conjugate-symmetric.
  for (const auto& md : sym.modes()) {
    bool paired = false;
    for (const auto& other : sym.modes()) {
      if (other.m == -md.m && other.n == -md.n) {
        paired = std::abs(other.coeff - std::conj(md.coeff)) <= 1e-12 * (1.0 + std::abs(md.coeff));
        break;
      }
    }
    if (!paired) throw std::invalid_argument("weyl_quantize: symbol is not real");
  }

  const int d = params.dim();
  const long long four_k = 4LL * params.k;
  TorusOperator op{params, Eigen::MatrixXcd::Zero(d, d), std::move(tag)};
  for (const auto& md : sym.modes()) {
    // (w^{mn/2} L^m M^n)[l + m, l] = exp(i pi (mn + 2 n l) / (2k)).
    for (int l = 0; l < d; ++l) {
      long long e = (static_cast<long long>(md.m) * md.n + 2LL * md.n * l) % four_k;
      if (e < 0) e += four_k;
      cplx phase;
      if (e % 2 == 0) {
        phase = params.w_pow(e / 2);
      } else if (e > four_k / 2) {
        phase = std::conj(std::polar(1.0, kPi * static_cast<double>(four_k - e) / (2.0 * params.k)));
      } else {
        phase = std::polar(1.0, kPi * static_cast<double>(e) / (2.0 * params.k));
      }
      int row = (l + md.m) % d;
      if (row < 0) row += d;
      op.matrix(row, l) += md.coeff * phase;
    }
  }
  return op;
}

TorusOperator harper(const QuantumTorusParams& params) {
  const int d = params.dim();
  TorusOperator op{params, Eigen::MatrixXcd::Zero(d, d), "harper"};
  for (int l = 0; l < d; ++l) {
    op.matrix(l, l) += 2.0 * params.w_pow(l).real();
    op.matrix((l + 1) % d, l) += 1.0;
    op.matrix(l, (l + 1) % d) += 1.0;
  }
  return op;
}

}  // namespace bsq
