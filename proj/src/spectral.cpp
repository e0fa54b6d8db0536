#include "bsq/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>

namespace bsq {

double SpectrumResult::residual_bound() const {
  return 1e-10 * std::max(max_entry, 1e-300) * static_cast<double>(eigenvalues.size());
}

SpectrumResult eigh(const Eigen::MatrixXcd& h, bool want_vectors, std::optional<int> k) {
  if (h.rows() == 0 || h.cols() == 0) throw std::invalid_argument("eigh: empty matrix");
  if (h.rows() != h.cols()) throw std::invalid_argument("eigh: matrix is not square");
  const Eigen::Index n = h.rows();

  SpectrumResult out;
  out.k = k;
  out.max_entry = h.cwiseAbs().maxCoeff();
  out.hermiticity_defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (out.hermiticity_defect > 1e-10 * out.max_entry) {
    throw std::invalid_argument("eigh: matrix is not Hermitian (defect " +
                                format_double(out.hermiticity_defect) + ")");
  }
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());

  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  if (sym.imag().cwiseAbs().maxCoeff() == 0.0) {
    // Real symmetric input (Harper and friends): the real solver is several
    // times cheaper.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym.real());
    if (solver.info() != Eigen::Success) throw ContractViolation("eigh: solver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) throw ContractViolation("eigh: solver did not converge");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  out.eigenvalues.assign(values.data(), values.data() + n);
  const Eigen::MatrixXcd r = h * vectors - vectors * values.cast<cplx>().asDiagonal();
  out.residuals.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) out.residuals[j] = r.col(j).norm();

  const double bound = out.residual_bound();
  const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
  if (worst > bound) {
    throw ContractViolation("eigh: residual certificate failed (" + format_double(worst) +
                            " > " + format_double(bound) + ")");
  }
  const double ortho =
      (vectors.adjoint() * vectors - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho > 1e-10) {
    throw ContractViolation("eigh: eigenvectors not orthonormal (" + format_double(ortho) + ")");
  }
  if (!std::is_sorted(out.eigenvalues.begin(), out.eigenvalues.end())) {
    throw ContractViolation("eigh: eigenvalues not ascending");
  }
  if (want_vectors) out.eigenvectors = std::move(vectors);
  return out;
}

SpectrumResult eigh(const TorusOperator& op, bool want_vectors) {
  return eigh(op.matrix, want_vectors, op.params.k);
}

double operator_norm(const Eigen::MatrixXcd& h) {
  const auto s = eigh(h, false);
  return std::max(std::fabs(s.eigenvalues.front()), std::fabs(s.eigenvalues.back()));
}

double operator_norm(const TorusOperator& op) { return operator_norm(op.matrix); }

void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumResult>& spectra) {
  out << "k,j,lambda,residual\n";
  for (const auto& s : spectra) {
    const int k = s.k.value_or(0);
    for (std::size_t j = 0; j < s.size(); ++j) {
      out << k << ',' << j << ',' << format_double(s.eigenvalues[j]) << ','
          << format_double(s.residuals[j]) << '\n';
    }
  }
}

}  // namespace bsq
