/*
 * theta_sections.hpp - the invariant theta basis of the level-k quantum torus.
 *
 * Sections are handled in a unitary trivialization, so |value| is the
 * Hermitian-metric norm. In the chart (q, P) with P = -p the basis is
 *
 *   psi_l(q, P) = c exp(2 pi i k q P) sum_{n = l mod 2k} exp(-(pi/2k)(n + 2kP)^2 + 2 pi i n q),
 *
 * c = (4k)^{1/4}, and the lattice translations act by
 *
 *   (T_u s)(x) = exp(-(i k / 2) omega0(u, x)) s(x + u),  omega0(u, x) = 4 pi (u_q x_P - u_P x_q).
 *
 * With e = (1, 0) and f = (0, 1) in that chart: T_e = T_f = id,
 * T_{e/2k} psi_l = w^l psi_l and T_{f/2k} psi_l = psi_{l+1}, w = exp(i pi / k).
 * The flip P = -p makes the Toeplitz operators of exp(2 pi i p) and
 * exp(2 pi i q) positive multiples of the clock and shift matrices, so
 * eigenvectors from torus_quant expand directly in this basis.
 *
 * Public functions take the user chart (q, p) in [0,1)^2. Grids are
 * q_i = i / res, p_j = j / res, row-major with p as the slow index.
 */

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "bsq/common.hpp"
#include "bsq/symbols.hpp"

namespace bsq {

struct ThetaRelationResiduals {
  double lattice = 0.0;  // T_e and T_f against the identity
  double clock = 0.0;    // T_{e/2k} psi_l - w^l psi_l
  double shift = 0.0;    // T_{f/2k} psi_l - psi_{l+1}
  double cyclic = 0.0;   // (T_{f/2k})^{2k} psi_l - psi_l
  double max() const;
};

class ThetaBasis {
 public:
  // Evaluates all 2k sections on a resolution^2 grid and checks the defining
  // relations at 100 fixed pseudo-random points; throws ContractViolation if
  // any residual exceeds 1e-8. Requires 1 <= k <= 50.
  static ThetaBasis build(int k, int resolution = 512);

  int k() const { return k_; }
  int dim() const { return 2 * k_; }
  int resolution() const { return resolution_; }
  int series_cutoff() const { return cutoff_; }
  const ThetaRelationResiduals& residuals() const { return residuals_; }
  // Section values on the grid, values()[l][j * res + i].
  const std::vector<std::vector<cplx>>& values() const { return values_; }

  // Value of psi_l at a point of the user chart.
  cplx section(int l, double q, double p) const;

  // Grid quadrature (1/res^2) sum conj(psi_a) psi_b.
  Eigen::MatrixXcd gram_matrix() const;

 private:
  ThetaBasis() = default;
  int k_ = 1;
  int resolution_ = 0;
  int cutoff_ = 0;
  ThetaRelationResiduals residuals_;
  std::vector<std::vector<cplx>> values_;
};

// Point-wise value of psi_l in the (q, P) chart and the translation action;
// exposed for the relation checks.
cplx theta_section_internal(int k, int l, double q, double P);
cplx theta_translate(int k, int l, double uq, double uP, double q, double P);

// Residuals of the defining relations at `points` fixed pseudo-random points.
ThetaRelationResiduals theta_relation_residuals(int k, int points = 100);

// |sum_l v_l psi_l| on the res x res grid. Works for any k (no stored basis).
// Throws std::invalid_argument if v.size() != 2k.
std::vector<double> eigenfunction_modulus(int k, const Eigen::VectorXcd& v, int resolution);
// Same from a built basis.
std::vector<double> eigenfunction_modulus(const ThetaBasis& basis, const Eigen::VectorXcd& v);

// Grid mass (1/res^2) sum field^2.
double field_mass(const std::vector<double>& field, int resolution);

// Fraction of the grid mass of `field` on points with |a - E| <= |grad a| delta.
// The field is normalized to unit mass first. Throws std::domain_error if the
// tube contains no grid point or the field is zero.
double mass_concentration(const std::vector<double>& field, int resolution, const TrigSymbol& sym,
                          double E, double delta);

// `q,p,value` rows, p slow.
void write_field_csv(std::ostream& out, const std::vector<double>& field, int resolution);

}  // namespace bsq
