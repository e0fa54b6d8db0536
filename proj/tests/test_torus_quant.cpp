#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bsq/torus_quant.hpp"

using namespace bsq;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("clock and shift satisfy M L = w L M") {
  for (int k : {1, 2, 3, 7, 25}) {
    const QuantumTorusParams P(k);
    const auto M = clock(P).matrix, L = shift(P).matrix;
    CHECK(max_abs(M * L - P.w() * L * M) <= 1e-13);
    CHECK(max_abs(M.adjoint() * M - Eigen::MatrixXcd::Identity(P.dim(), P.dim())) <= 1e-14);
    CHECK(max_abs(L.adjoint() * L - Eigen::MatrixXcd::Identity(P.dim(), P.dim())) <= 0.0);
  }
}

TEST_CASE("w powers are exact at the quarter points and conjugate-symmetric") {
  const QuantumTorusParams P(6);
  CHECK(P.w_pow(0) == cplx(1.0, 0.0));
  CHECK(P.w_pow(6) == cplx(-1.0, 0.0));
  CHECK(P.w_pow(3) == cplx(0.0, 1.0));
  CHECK(P.w_pow(9) == cplx(0.0, -1.0));
  CHECK(P.w_pow(-1) == std::conj(P.w_pow(1)));
  CHECK(P.w_pow(13) == P.w_pow(1));
  CHECK(P.w_pow(5) + P.w_pow(-5) == cplx(2.0 * P.w_pow(5).real(), 0.0));
}

TEST_CASE("harper matrix entries") {
  const int k = 5;
  const auto H = harper(QuantumTorusParams(k)).matrix;
  const int d = 2 * k;
  for (int l = 0; l < d; ++l) {
    CHECK(H(l, l).real() == doctest::Approx(2.0 * std::cos(l * kPi / k)).epsilon(1e-15));
    CHECK(H((l + 1) % d, l) == cplx(1.0, 0.0));
    CHECK(H(l, (l + 1) % d) == cplx(1.0, 0.0));
  }
  CHECK(H(0, d - 1) == cplx(1.0, 0.0));
  CHECK(max_abs(H - H.adjoint()) == 0.0);
}

TEST_CASE("harper at k = 1 adds the coinciding off-diagonal entries") {
  const auto H = harper(QuantumTorusParams(1)).matrix;
  CHECK(H(0, 0) == cplx(2.0, 0.0));
  CHECK(H(1, 1) == cplx(-2.0, 0.0));
  CHECK(H(0, 1) == cplx(2.0, 0.0));
  CHECK(H(1, 0) == cplx(2.0, 0.0));
}

TEST_CASE("weyl quantization of the harper symbol equals M + M* + L + L*") {
  for (int k : {1, 2, 4, 9}) {
    const QuantumTorusParams P(k);
    const auto W = weyl_quantize(TrigSymbol::harper(), P).matrix;
    const auto M = clock(P).matrix, L = shift(P).matrix;
    CHECK(max_abs(W - (M + M.adjoint() + L + L.adjoint())) <= 1e-15);
    CHECK(max_abs(W - harper(P).matrix) <= 1e-15);
  }
}

TEST_CASE("weyl quantization maps the (m, n) mode to w^{mn/2} L^m M^n") {
  const int k = 4;
  const QuantumTorusParams P(k);
  const auto M = clock(P).matrix, L = shift(P).matrix;
  const int m = 2, n = 3;
  const cplx c(0.4, -0.7);
  const auto s = TrigSymbol::from_half_modes({{m, n, c}});
  const Eigen::MatrixXcd Lm = L * L, Mn = M * M * M;
  const Eigen::MatrixXcd term = std::polar(1.0, kPi * m * n / (2.0 * k)) * Lm * Mn;
  const Eigen::MatrixXcd ref = c * term + std::conj(c) * term.adjoint();
  CHECK(max_abs(weyl_quantize(s, P).matrix - ref) <= 1e-14);
}

TEST_CASE("real symbols give Hermitian matrices; non-real symbols are rejected") {
  const auto s = TrigSymbol::from_half_modes({{1, 2, {0.3, 0.9}}, {-3, 1, {1.1, 0.0}}, {0, 0, {0.5, 0.0}}});
  const auto W = weyl_quantize(s, QuantumTorusParams(7)).matrix;
  CHECK(max_abs(W - W.adjoint()) <= 1e-15);
  CHECK_THROWS_AS(QuantumTorusParams(0), std::invalid_argument);
}

TEST_CASE("operator csv lists nonzero entries with a header") {
  std::ostringstream os;
  harper(QuantumTorusParams(1)).write_csv(os);
  CHECK(os.str() == "row,col,re,im\n0,0,2,0\n1,0,2,0\n0,1,2,0\n1,1,-2,0\n");
}
