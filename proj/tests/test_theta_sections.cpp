#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bsq/spectral.hpp"
#include "bsq/theta_sections.hpp"
#include "bsq/torus_quant.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

// Direct series for psi_l at (q, p) of the user chart, written out from the
// closed form with P = -p.
cplx theta_oracle(int k, int l, double q, double p) {
  const double P = -p;
  const double c = std::pow(4.0 * k, 0.25);
  cplx acc = 0.0;
  for (int m = -40; m <= 40; ++m) {
    const double n = l + 2.0 * k * m;
    const double g = n + 2.0 * k * P;
    acc += std::exp(-(oracle::kPi / (2.0 * k)) * g * g) *
           std::polar(1.0, 2.0 * oracle::kPi * n * q);
  }
  return c * std::polar(1.0, 2.0 * oracle::kPi * k * q * P) * acc;
}

double gram_defect(const ThetaBasis& b) {
  const Eigen::MatrixXcd G = b.gram_matrix();
  return (G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

Eigen::VectorXcd nearest_eigenvector(int k, double E) {
  const auto s = eigh(harper(QuantumTorusParams(k)), true);
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) {
    if (std::fabs(s.eigenvalues[i] - E) < std::fabs(s.eigenvalues[best] - E)) best = i;
  }
  return s.eigenvectors->col(static_cast<Eigen::Index>(best));
}

}  // namespace

TEST_CASE("section values agree with the direct series") {
  const auto b = ThetaBasis::build(3, 32);
  CHECK(b.dim() == 6);
  for (int l = 0; l < 6; ++l) {
    for (auto [q, p] : {std::pair{0.1, 0.2}, {0.73, 0.41}, {0.5, 0.95}}) {
      CHECK(std::abs(b.section(l, q, p) - theta_oracle(3, l, q, p)) <= 1e-12);
    }
    CHECK(std::abs(b.values()[l][5 * 32 + 7] - theta_oracle(3, l, 7.0 / 32, 5.0 / 32)) <= 1e-12);
  }
}

TEST_CASE("clock and shift matrices act on the sections") {
  // In the user chart the half-lattice steps are q -> q + 1/2k and p -> p - 1/2k,
  // up to the Heisenberg phase; moduli must match exactly.
  const int k = 4;
  const double pi = oracle::kPi;
  for (int l = 0; l < 2 * k; ++l) {
    for (auto [q, p] : {std::pair{0.13, 0.31}, {0.62, 0.88}}) {
      const double P = -p;
      const cplx clock = std::polar(1.0, -0.5 * k * 4.0 * pi * (P / (2.0 * k))) *
                         theta_oracle(k, l, q + 1.0 / (2 * k), p);
      CHECK(std::abs(clock - std::polar(1.0, pi * l / k) * theta_oracle(k, l, q, p)) <= 1e-12);
      const double shifted = std::abs(theta_oracle(k, l, q, p - 1.0 / (2 * k)));
      CHECK(shifted == doctest::Approx(std::abs(theta_oracle(k, (l + 1) % (2 * k), q, p))).epsilon(1e-12));
    }
  }
}

TEST_CASE("defining relations") {
  for (int k : {1, 2, 7, 20, 50}) {
    const auto r = theta_relation_residuals(k);
    CHECK(r.lattice <= 1e-10);
    CHECK(r.clock <= 1e-10);
    CHECK(r.shift <= 1e-10);
    CHECK(r.cyclic <= 1e-9);
  }
  CHECK(ThetaBasis::build(5, 64).residuals().max() <= 1e-10);
}

TEST_CASE("gram matrix") {
  CHECK(gram_defect(ThetaBasis::build(1, 512)) <= 1e-6);
  CHECK(gram_defect(ThetaBasis::build(10, 512)) <= 1e-6);
  CHECK(gram_defect(ThetaBasis::build(20, 512)) <= 1e-6);
}

TEST_CASE("gram defect shrinks with resolution") {
  const double d8 = gram_defect(ThetaBasis::build(10, 8));
  const double d16 = gram_defect(ThetaBasis::build(10, 16));
  const double d32 = gram_defect(ThetaBasis::build(10, 32));
  CHECK(d16 <= 0.5 * d8);
  CHECK(d32 <= std::max(0.5 * d16, 1e-12));
}

TEST_CASE("single-section field") {
  const auto b = ThetaBasis::build(6, 256);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(12);
  v[0] = 1.0;
  const auto f = eigenfunction_modulus(b, v);
  CHECK(*std::max_element(f.begin(), f.end()) > 0.0);
  CHECK(field_mass(f, 256) == doctest::Approx(1.0).epsilon(1e-4));
  const auto g = eigenfunction_modulus(6, v, 256);
  for (std::size_t i = 0; i < f.size(); i += 97) CHECK(std::fabs(f[i] - g[i]) <= 1e-12);
  const auto z = eigenfunction_modulus(b, Eigen::VectorXcd::Zero(12));
  CHECK(*std::max_element(z.begin(), z.end()) == 0.0);
}

TEST_CASE("basis-free field matches the stored basis") {
  const auto b = ThetaBasis::build(9, 64);
  Eigen::VectorXcd v(18);
  for (int l = 0; l < 18; ++l) v[l] = std::polar(1.0 / (1 + l), 0.3 * l);
  const auto f = eigenfunction_modulus(b, v);
  const auto g = eigenfunction_modulus(9, v, 64);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::fabs(f[i] - g[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("ground state localizes at the minimum") {
  const int k = 20, res = 256;
  const auto f = eigenfunction_modulus(k, nearest_eigenvector(k, -4.0), res);
  const auto at = std::max_element(f.begin(), f.end()) - f.begin();
  const double q = static_cast<double>(at % res) / res, p = static_cast<double>(at / res) / res;
  CHECK(std::hypot(q - 0.5, p - 0.5) <= 0.1);
}

TEST_CASE("mass concentration") {
  const auto sym = TrigSymbol::harper();
  const int res = 128;
  const std::vector<double> uniform(res * res, 1.0);
  CHECK(mass_concentration(uniform, res, TrigSymbol::constant(1.0), 1.0, 0.0) == 1.0);
  // Only the two critical points with a != 0 fall outside a wide tube around a = 0.
  CHECK(mass_concentration(uniform, res, sym, 0.0, 1e6) == doctest::Approx(1.0 - 2.0 / (res * res)));
  CHECK_THROWS_AS(mass_concentration(uniform, res, sym, 100.0, 0.01), std::domain_error);
  CHECK_THROWS_AS(mass_concentration(std::vector<double>(res * res, 0.0), res, sym, 0.0, 0.1),
                  std::domain_error);
  CHECK_THROWS_AS(mass_concentration(uniform, 64, sym, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("eigenfunctions concentrate on the level set") {
  const auto sym = TrigSymbol::harper();
  const double E = sym.eval(0.7, 0.6);
  const int res = 512;
  std::vector<double> frac;
  for (int k : {50, 100, 200}) {
    frac.push_back(mass_concentration(eigenfunction_modulus(k, nearest_eigenvector(k, E), res), res,
                                      sym, E, 0.1));
  }
  CHECK(frac[1] >= 0.7);
  CHECK(frac[1] >= frac[0]);
  CHECK(frac[2] > frac[1]);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(ThetaBasis::build(51, 16), std::invalid_argument);
  CHECK_THROWS_AS(ThetaBasis::build(0, 16), std::invalid_argument);
  const auto b = ThetaBasis::build(2, 16);
  CHECK_THROWS_AS(eigenfunction_modulus(b, Eigen::VectorXcd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(eigenfunction_modulus(2, Eigen::VectorXcd::Zero(5), 16), std::invalid_argument);
}

TEST_CASE("field csv") {
  std::ostringstream os;
  write_field_csv(os, {1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(os.str() == "q,p,value\n0,0,1\n0.5,0,2\n0,0.5,3\n0.5,0.5,4\n");
}
