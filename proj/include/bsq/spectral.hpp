// Dense Hermitian eigensolver with per-pair residual certificates.

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bsq/torus_quant.hpp"

namespace bsq {

struct SpectrumResult {
  std::vector<double> eigenvalues;             // ascending
  std::optional<Eigen::MatrixXcd> eigenvectors;  // columns, orthonormal
  std::vector<double> residuals;               // ||H v - lambda v||_2 per pair
  double hermiticity_defect = 0.0;             // max |H - H*| entry
  double max_entry = 0.0;                      // ||H||_max
  std::optional<int> k;                        // quantization level, if known

  std::size_t size() const { return eigenvalues.size(); }
  double residual_bound() const;  // 1e-10 * ||H||_max * dim
};

// Throws std::invalid_argument for an empty or non-square matrix, or when the
// Hermiticity defect exceeds 1e-10 ||H||_max. Throws ContractViolation if the
// residual or orthonormality certificate fails.
SpectrumResult eigh(const Eigen::MatrixXcd& h, bool want_vectors = false,
                    std::optional<int> k = std::nullopt);
SpectrumResult eigh(const TorusOperator& op, bool want_vectors = false);

double operator_norm(const Eigen::MatrixXcd& h);
double operator_norm(const TorusOperator& op);

// `k,j,lambda,residual` rows; spectra are emitted in the given order.
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumResult>& spectra);

}  // namespace bsq
