// Bohr-Sommerfeld predictions near a nondegenerate minimum.
//
// The action profile tabulates c0(E), the symplectic area of the sublevel
// component around the minimum, on a window (E_min, E_cap]; f0 = c0 / 2 pi.
// Eigenvalue j at level k is predicted by inverting f0(E) = (j + 1/2) / k.

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "bsq/spectral.hpp"
#include "bsq/symbols.hpp"

namespace bsq {

struct ActionProfileOptions {
  int grid_size = 200;
  int resolution = 512;  // area quadrature cells per axis (doubled once on retry)
};

class ActionProfile {
 public:
  std::vector<double> E_grid;  // ascending, in (E_min, E_cap]
  std::vector<double> c0;
  std::vector<double> f0;
  double c0_prime_min = 0.0;
  double E_min = 0.0;
  double E_cap = 0.0;
  int resolution = 0;  // quadrature resolution actually used

  // Builds the monotone cubic through (E_min, 0) and the samples. Throws
  // ContractViolation if f0 is not strictly increasing.
  void fit();

  double f0_at(double E) const;        // std::out_of_range outside [E_min, E_cap]
  double f0_prime_at(double E) const;
  double f0_cap() const { return f0.back(); }
  // Inverse of f0: bisection on the bracketing piece, then Newton. Throws
  // std::out_of_range if target is not in [0, f0_cap()].
  double g0(double target) const;
  // (c0(E_2) - c0(E_1)) / (E_2 - E_1) over the two lowest samples.
  double secant_c0_prime() const;

 private:
  std::size_t piece(double E) const;
  std::vector<double> x_, y_, d_;  // interpolation nodes and slopes
};

// Default window top: midpoint of the minimum and the separatrix energy (or
// of the minimum and the maximum if there is no saddle).
double default_e_cap(const TrigSymbol& sym);

// Samples c0 on E_i = E_min + (E_cap - E_min)(1 - cos(pi i / 2N)), i = 1..N.
// Requires a nondegenerate minimum and E_min < E_cap < E_sep.
ActionProfile build_action_profile(const TrigSymbol& sym, const SymplecticNormalization& norm,
                                   double E_cap, const ActionProfileOptions& opts = {});

// Optional first-order correction: f(E, k) = f0(E) + f1(E) / k.
using SubprincipalAction = std::function<double(double)>;

struct PredictionSet {
  int k = 1;
  std::vector<double> E_pred;  // index j
  std::shared_ptr<const ActionProfile> source;
  std::size_t size() const { return E_pred.size(); }
};

// One prediction per j with (j + 1/2) / k <= f0(E_cap).
PredictionSet predict(std::shared_ptr<const ActionProfile> profile, int k,
                      const SubprincipalAction& f1 = {});
// Single level; std::out_of_range if the target lies outside the profile.
double predict_one(const ActionProfile& profile, int k, int j, const SubprincipalAction& f1 = {});

// E_min + (a1_at_min + 2 pi (j + 1/2) / c0'(E_min)) / k.
double near_minimum_predict(const TrigSymbol& sym, const SymplecticNormalization& norm, int k,
                            int j, double a1_at_min = 0.0);

struct VerificationRow {
  int j = 0;
  double lambda = 0.0;
  double E_pred = 0.0;
  double residual = 0.0;
  std::optional<double> gap_ratio;  // k (lambda_{j+1} - lambda_j) c0'(E_min) / 2 pi
};

struct CountCheck {
  double E = 0.0;
  long count = 0;
  double expected = 0.0;  // k f0(E)
  double defect = 0.0;
};

struct GapStats {
  std::size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct VerificationReport {
  int k = 1;
  double E_cap = 0.0;
  std::vector<VerificationRow> rows;
  GapStats gaps;
  std::vector<CountCheck> counts;
  double max_residual() const;
};

// Pairs lambda_j with E_pred_j whenever lambda_j <= E_cap or E_pred_j <= E_cap.
// Throws std::invalid_argument if the spectrum and the predictions disagree on k.
VerificationReport verify(const SpectrumResult& spectrum, const PredictionSet& predictions,
                          double E_cap, const std::vector<double>& count_levels = {});

// `k,j,lambda,E_pred,residual,gap_ratio`; a missing gap ratio is an empty field.
void write_report_csv(std::ostream& out, const std::vector<VerificationReport>& reports);

enum class PredictorMode { near_minimum, profile };

struct DecayExponent {
  int j = 0;
  bool machine_limited = false;  // some residual fell below 1e-12
  double slope = 0.0;            // least-squares fit of log r against log k
  double intercept = 0.0;
  std::vector<double> residuals;  // one per k
};

// Fits every row residuals[j] (one value per k) independently.
std::vector<DecayExponent> fit_decay(const std::vector<int>& k_list,
                                     const std::vector<std::vector<double>>& residuals);

struct DecaySweepOptions {
  PredictorMode mode = PredictorMode::near_minimum;
  double a1_at_min = 0.0;
  std::shared_ptr<const ActionProfile> profile;  // required in profile mode
};

// Residuals |lambda_k^(j) - prediction| for j = 0..j_max over an ascending
// k_list of at least three levels. Levels are diagonalized in parallel.
std::vector<DecayExponent> decay_sweep(const TrigSymbol& sym, const SymplecticNormalization& norm,
                                       const std::vector<int>& k_list, int j_max,
                                       const DecaySweepOptions& opts = {});

// `j,slope,intercept`; machine-limited rows carry the literal `machine-limited`
// in the slope column and an empty intercept.
void write_sweep_csv(std::ostream& out, const std::vector<DecayExponent>& rows);

}  // namespace bsq
