#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bsq/symbols.hpp"
#include "oracles.hpp"

using namespace bsq;

TEST_CASE("harper symbol evaluates to 2(cos 2 pi p + cos 2 pi q)") {
  const auto h = TrigSymbol::harper();
  for (double q : {0.0, 0.13, 0.5, 0.77}) {
    for (double p : {0.0, 0.31, 0.5, 0.9}) {
      const double ref = 2.0 * (std::cos(kTwoPi * p) + std::cos(kTwoPi * q));
      CHECK(std::fabs(h.eval(q, p) - ref) <= 1e-13);
      CHECK(std::fabs(h.eval(q + 1.0, p) - h.eval(q, p)) <= 1e-13);
      CHECK(std::fabs(h.eval(q, p + 1.0) - h.eval(q, p)) <= 1e-13);
      CHECK(std::fabs(h.eval_complex(q, p).imag()) <= 1e-13);
    }
  }
  CHECK(h.eval(0.5, 0.5) == doctest::Approx(-4.0).epsilon(1e-15));
  CHECK(h.degree() == 1);
  CHECK(h.coefficient_l1() == doctest::Approx(4.0));
}

TEST_CASE("strict builder rejects non-real input and duplicates") {
  CHECK_THROWS_AS(TrigSymbol::from_modes({{1, 0, {1.0, 0.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(TrigSymbol::from_modes({{1, 0, {1.0, 0.0}}, {-1, 0, {2.0, 0.0}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      TrigSymbol::from_modes({{1, 0, {1.0, 0.0}}, {1, 0, {1.0, 0.0}}, {-1, 0, {1.0, 0.0}}}),
      std::invalid_argument);
  CHECK_NOTHROW(TrigSymbol::from_modes({{1, 2, {0.5, 0.25}}, {-1, -2, {0.5, -0.25}}}));
}

TEST_CASE("half-mode builder produces twice the real part") {
  const auto s = TrigSymbol::from_half_modes({{1, 1, {0.5, 0.3}}});
  for (double q : {0.1, 0.4}) {
    for (double p : {0.2, 0.7}) {
      const double ph = kTwoPi * (q + p);
      CHECK(s.eval(q, p) == doctest::Approx(2.0 * (0.5 * std::cos(ph) - 0.3 * std::sin(ph))));
    }
  }
}

TEST_CASE("symbol text format round trips") {
  const auto s = TrigSymbol::from_half_modes({{1, 0, {1.0, 0.0}}, {2, -1, {0.25, -0.5}}});
  std::stringstream ss;
  s.save(ss);
  const auto t = TrigSymbol::parse(ss);
  REQUIRE(t.modes().size() == s.modes().size());
  for (std::size_t i = 0; i < s.modes().size(); ++i) {
    CHECK(t.modes()[i].m == s.modes()[i].m);
    CHECK(t.modes()[i].n == s.modes()[i].n);
    CHECK(t.modes()[i].coeff == s.modes()[i].coeff);
  }
  std::istringstream bad("1 0 1.0\n");
  CHECK_THROWS_AS(TrigSymbol::parse(bad), InputError);
  CHECK_THROWS_AS(TrigSymbol::load("/nonexistent/path.sym"), InputError);
}

TEST_CASE("gradient and hessian agree with finite differences") {
  const auto s = TrigSymbol::from_half_modes({{1, 0, {1.0, 0.2}}, {0, 1, {0.7, 0.0}}, {1, 1, {0.1, -0.3}}});
  const double q = 0.23, p = 0.61, h = 1e-5;
  const auto g = s.gradient(q, p);
  CHECK(g.dq == doctest::Approx((s.eval(q + h, p) - s.eval(q - h, p)) / (2 * h)).epsilon(1e-7));
  CHECK(g.dp == doctest::Approx((s.eval(q, p + h) - s.eval(q, p - h)) / (2 * h)).epsilon(1e-7));
  const auto H = s.hessian(q, p);
  const auto gq = [&](double qq, double pp) { return s.gradient(qq, pp).dq; };
  CHECK(H.qq == doctest::Approx((gq(q + h, p) - gq(q - h, p)) / (2 * h)).epsilon(1e-6));
  CHECK(H.qp == doctest::Approx((gq(q, p + h) - gq(q, p - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("harper minimum, hessian and separatrix") {
  const auto h = TrigSymbol::harper();
  const auto mn = find_minimum(h);
  CHECK(mn.nondegenerate);
  CHECK(std::fabs(mn.q - 0.5) <= 1e-10);
  CHECK(std::fabs(mn.p - 0.5) <= 1e-10);
  CHECK(mn.value == doctest::Approx(-4.0).epsilon(1e-14));
  const double c = 8.0 * kPi * kPi;
  CHECK(mn.hessian.qq == doctest::Approx(c));
  CHECK(mn.hessian.pp == doctest::Approx(c));
  CHECK(std::fabs(mn.hessian.qp) <= 1e-9);
  CHECK(separatrix_energy(h) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(action_derivative_at_min(h, SymplecticNormalization()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate minimum is reported") {
  // Independent of p, so the hessian is singular at the minimum.
  const auto s = TrigSymbol::from_half_modes({{1, 0, {1.0, 0.0}}});
  const auto mn = find_minimum(s);
  CHECK_FALSE(mn.nondegenerate);
  CHECK_THROWS_AS(action_derivative_at_min(s, SymplecticNormalization()), std::domain_error);
}

TEST_CASE("harper sublevel area against the Gauss-Legendre oracle") {
  const auto h = TrigSymbol::harper();
  SublevelAreaCalculator calc(h, SymplecticNormalization(), 256);
  for (double E : {-3.9999, -3.999, -3.9, -3.0, -2.0, -1.0, -0.5}) {
    const double ref = oracle::harper_area(E);
    CHECK(std::fabs(calc.area(E) - ref) <= 2e-6 * ref);
  }
  CHECK(calc.area(4.0) == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK_THROWS_AS(calc.area(-4.0), std::domain_error);
}

TEST_CASE("sublevel area of a tilted single-well symbol against grid counting") {
  // 2 cos 2 pi q + cos 2 pi p + 0.3 cos 2 pi (q + p): one minimum, no extra wells below E.
  const auto s = TrigSymbol::from_half_modes({{1, 0, {1.0, 0.0}}, {0, 1, {0.5, 0.0}}, {1, 1, {0.15, 0.0}}});
  const auto f = [&](double q, double p) { return s.eval(q, p); };
  const SymplecticNormalization nu(1.0);
  const double Emin = find_minimum(s).value;
  for (double dE : {0.5, 1.2}) {
    const double E = Emin + dE;
    const double ref = oracle::count_fraction(f, E, 4096);
    CHECK(std::fabs(sublevel_area(s, E, nu, 256) - ref) <= 2e-4 * std::max(ref, 0.05));
  }
}

TEST_CASE("secant of the area at the bottom matches the closed form") {
  const auto h = TrigSymbol::harper();
  SublevelAreaCalculator calc(h, SymplecticNormalization(), 256);
  const double secant = (calc.area(-4.0 + 1e-3) - calc.area(-4.0 + 5e-4)) / 5e-4;
  CHECK(secant == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("critical points of harper") {
  const auto cps = critical_points(TrigSymbol::harper());
  int mins = 0, saddles = 0, maxs = 0;
  for (const auto& c : cps) {
    mins += c.kind == CriticalKind::minimum;
    saddles += c.kind == CriticalKind::saddle;
    maxs += c.kind == CriticalKind::maximum;
  }
  CHECK(mins == 1);
  CHECK(saddles == 2);
  CHECK(maxs == 1);
}

TEST_CASE("normalization must be positive") {
  CHECK_THROWS_AS(SymplecticNormalization(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SymplecticNormalization(-1.0), std::invalid_argument);
}
