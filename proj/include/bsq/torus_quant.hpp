/*
 * torus_quant.hpp - the quantized torus at level k.
 *
 * The quantum space has dimension 2k with basis psi_0 .. psi_{2k-1}. The two
 * generators are the clock M = diag(w^l) and the cyclic shift
 * L psi_l = psi_{l+1}, with w = exp(i pi / k); they satisfy M L = w L M.
 * M quantizes exp(2 pi i p) and L quantizes exp(2 pi i q).
 *
 * A Fourier mode exp(2 pi i (m q + n p)) is sent to w^{mn/2} L^m M^n. The
 * half phase makes the image of the (-m,-n) mode the adjoint of the (m,n)
 * image, so real symbols give Hermitian matrices.
 */

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>

#include "bsq/common.hpp"
#include "bsq/symbols.hpp"

namespace bsq {

struct QuantumTorusParams {
  int k = 1;
  explicit QuantumTorusParams(int k_level);
  int dim() const { return 2 * k; }
  double hbar() const { return 1.0 / k; }
  cplx w() const;
  // w^e evaluated with the exponent reduced mod 2k, so it is an exact table entry.
  cplx w_pow(long long e) const;
};

struct TorusOperator {
  QuantumTorusParams params;
  Eigen::MatrixXcd matrix;
  std::optional<std::string> symbol_tag;

  // Dump of nonzero entries as `row,col,re,im` with a header line.
  void write_csv(std::ostream& out) const;
};

TorusOperator clock(const QuantumTorusParams& params);
TorusOperator shift(const QuantumTorusParams& params);

// Sum of c_{m,n} w^{mn/2} L^m M^n; throws std::invalid_argument if the symbol
// is not real.
TorusOperator weyl_quantize(const TrigSymbol& sym, const QuantumTorusParams& params,
                            std::optional<std::string> tag = std::nullopt);

// M + M* + L + L*: diagonal 2 cos(l pi / k), ones next to the diagonal and in
// the two corners. For k = 1 the off-diagonal contributions coincide and add.
TorusOperator harper(const QuantumTorusParams& params);

}  // namespace bsq
