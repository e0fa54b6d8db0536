#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "bsq/bohr_sommerfeld.hpp"
#include "bsq/torus_quant.hpp"
#include "oracles.hpp"

using namespace bsq;

namespace {

std::shared_ptr<const ActionProfile> harper_profile() {
  static const auto prof = std::make_shared<const ActionProfile>(
      build_action_profile(TrigSymbol::harper(), SymplecticNormalization(), -0.5, {80, 256}));
  return prof;
}

const SpectrumResult& harper_spectrum(int k) {
  static std::map<int, SpectrumResult> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, eigh(harper(QuantumTorusParams(k)))).first;
  return it->second;
}

}  // namespace

TEST_CASE("profile basics") {
  const auto& p = *harper_profile();
  CHECK(p.E_min == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK(p.E_cap == -0.5);
  CHECK(p.c0_prime_min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.E_grid.size() == 80);
  CHECK(p.E_grid.back() == -0.5);
  for (std::size_t i = 1; i < p.E_grid.size(); ++i) {
    CHECK(p.E_grid[i] > p.E_grid[i - 1]);
    CHECK(p.f0[i] > p.f0[i - 1]);
  }
  CHECK(p.E_grid[1] - p.E_grid[0] < p.E_grid.back() - p.E_grid[p.E_grid.size() - 2]);
}

TEST_CASE("f0 near the bottom follows the harmonic approximation") {
  const double ref = (-3.99 + 4.0) / kTwoPi;
  CHECK(std::fabs(harper_profile()->f0_at(-3.99) - ref) <= 0.02 * ref);
}

TEST_CASE("profile samples and interpolant against the quadrature oracle") {
  const auto& p = *harper_profile();
  for (std::size_t i = 0; i < p.E_grid.size(); i += 7) {
    const double ref = oracle::harper_area(p.E_grid[i]) / kTwoPi;
    CHECK(std::fabs(p.f0[i] - ref) <= 3e-6 * ref);
  }
  for (double E : {-3.95, -3.5, -2.71828, -2.0, -1.1}) {
    const double ref = oracle::harper_area(E) / kTwoPi;
    CHECK(std::fabs(p.f0_at(E) - ref) <= 1e-5 * ref);
  }
  CHECK(p.f0_at(-4.0) == 0.0);
  CHECK_THROWS_AS(p.f0_at(-0.4), std::out_of_range);
  CHECK(p.secant_c0_prime() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("window preconditions") {
  const auto h = TrigSymbol::harper();
  CHECK_THROWS_AS(build_action_profile(h, SymplecticNormalization(), 0.1, {20, 64}), std::invalid_argument);
  CHECK_THROWS_AS(build_action_profile(h, SymplecticNormalization(), -4.5, {20, 64}), std::invalid_argument);
  CHECK(default_e_cap(h) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("predictions at k = 50") {
  const auto prof = harper_profile();
  const auto ps = predict(prof, 50);
  CHECK(std::fabs(ps.E_pred[0] - (-4.0 + kPi / 50.0)) <= 1.0 / (50.0 * 50.0));
  int expected = 0;
  while ((expected + 0.5) / 50.0 <= prof->f0_cap()) ++expected;
  CHECK(ps.size() == static_cast<std::size_t>(expected));
  for (std::size_t j = 0; j < ps.size(); ++j) {
    CHECK(std::fabs(prof->f0_at(ps.E_pred[j]) - (j + 0.5) / 50.0) <= 1e-12);
    if (j) CHECK(ps.E_pred[j] > ps.E_pred[j - 1]);
  }
  CHECK_THROWS_AS(predict_one(*prof, 50, 1000), std::out_of_range);
  CHECK_THROWS_AS(predict(prof, 0), std::invalid_argument);
}

TEST_CASE("first-order correction slot") {
  const auto& p = *harper_profile();
  const double base = predict_one(p, 40, 3);
  CHECK(predict_one(p, 40, 3, [](double) { return 0.0; }) == base);
  const double shifted = predict_one(p, 40, 3, [](double) { return 0.25; });
  CHECK(shifted == doctest::Approx(base - 0.25 / (40.0 * p.f0_prime_at(base))).epsilon(1e-14));
}

TEST_CASE("near-minimum formula") {
  const auto h = TrigSymbol::harper();
  const SymplecticNormalization nu;
  CHECK(near_minimum_predict(h, nu, 50, 0) == doctest::Approx(-4.0 + kPi / 50.0).epsilon(1e-14));
  CHECK(near_minimum_predict(h, nu, 50, 1) - near_minimum_predict(h, nu, 50, 0) ==
        doctest::Approx(kTwoPi / 50.0).epsilon(1e-12));
  // nu = 8 pi^2 makes c0'(E_min) = 2 pi.
  const SymplecticNormalization wide(8.0 * kPi * kPi);
  CHECK(action_derivative_at_min(h, wide) == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(near_minimum_predict(h, wide, 20, 0, 5.0) == doctest::Approx(-4.0 + (5.0 + 0.5) / 20.0).epsilon(1e-14));
}

TEST_CASE("verification report gating and layout") {
  const auto prof = harper_profile();
  const auto& sp = harper_spectrum(50);
  const auto ps = predict(prof, 50);
  const double cap = -2.0;
  const auto rep = verify(sp, ps, cap);
  for (const auto& r : rep.rows) CHECK((r.lambda <= cap || r.E_pred <= cap));
  std::size_t expect = 0;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    if (sp.eigenvalues[j] <= cap || ps.E_pred[j] <= cap) ++expect;
  }
  CHECK(rep.rows.size() == expect);
  std::ostringstream os;
  write_report_csv(os, {rep});
  CHECK(os.str().rfind("k,j,lambda,E_pred,residual,gap_ratio\n50,0,", 0) == 0);

  PredictionSet empty;
  empty.k = 50;
  CHECK(verify(sp, empty, cap).rows.empty());
  CHECK_THROWS_AS(verify(sp, predict(prof, 51), cap), std::invalid_argument);
}

TEST_CASE("gap ratios and counting at k = 500") {
  const auto prof = harper_profile();
  const auto& sp = harper_spectrum(500);
  const auto rep = verify(sp, predict(prof, 500), -2.0, {-2.0, -3.0});
  for (int j = 0; j <= 9; ++j) {
    REQUIRE(rep.rows[j].gap_ratio.has_value());
    CHECK(*rep.rows[j].gap_ratio >= 0.95);
    CHECK(*rep.rows[j].gap_ratio <= 1.05);
  }
  REQUIRE(rep.counts.size() == 2);
  for (const auto& c : rep.counts) CHECK(c.defect <= 2.0);
}

TEST_CASE("low eigenvalues are simple") {
  for (int k : {200, 500}) {
    const auto& s = harper_spectrum(k);
    for (std::size_t j = 0; j + 1 < s.size() && s.eigenvalues[j + 1] < -1.0; ++j) {
      CHECK(s.eigenvalues[j + 1] - s.eigenvalues[j] >= 0.5 * kTwoPi / k);
    }
  }
}

TEST_CASE("near-minimum residual decay") {
  const auto rows = decay_sweep(TrigSymbol::harper(), SymplecticNormalization(), {50, 100, 200, 400}, 9);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].slope <= -1.8);
  for (int j = 0; j <= 2; ++j) {
    CHECK(rows[j].residuals[3] <= rows[j].residuals[0] / 16.0 * 4.0);
  }
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().rfind("j,slope,intercept\n0,", 0) == 0);
}

TEST_CASE("full-predictor residual decay") {
  DecaySweepOptions o;
  o.mode = PredictorMode::profile;
  o.profile = harper_profile();
  const auto rows = decay_sweep(TrigSymbol::harper(), SymplecticNormalization(), {50, 100, 200, 400}, 3, o);
  for (const auto& r : rows) CHECK(r.slope <= -1.0);
}

TEST_CASE("synthetic spectrum on the predictions is machine-limited") {
  const auto prof = harper_profile();
  const std::vector<int> ks{20, 40, 80};
  std::vector<std::vector<double>> res(3, std::vector<double>(ks.size()));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto ps = predict(prof, ks[i]);
    SpectrumResult s;
    s.k = ks[i];
    s.eigenvalues = ps.E_pred;
    const auto rep = verify(s, ps, prof->E_cap);
    for (int j = 0; j < 3; ++j) {
      CHECK(rep.rows[j].residual <= 1e-12);
      res[j][i] = rep.rows[j].residual;
    }
  }
  for (const auto& d : fit_decay(ks, res)) CHECK(d.machine_limited);
  std::ostringstream os;
  write_sweep_csv(os, fit_decay(ks, res));
  CHECK(os.str().find("0,machine-limited,\n") != std::string::npos);
}

TEST_CASE("decay fit recovers a power law") {
  const std::vector<int> ks{10, 20, 40, 80};
  std::vector<std::vector<double>> r(1);
  for (int k : ks) r[0].push_back(3.0 * std::pow(k, -2.5));
  const auto d = fit_decay(ks, r);
  CHECK(d[0].slope == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(std::exp(d[0].intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(decay_sweep(TrigSymbol::harper(), SymplecticNormalization(), {10, 20}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(decay_sweep(TrigSymbol::harper(), SymplecticNormalization(), {10, 30, 20}, 1),
                  std::invalid_argument);
}
