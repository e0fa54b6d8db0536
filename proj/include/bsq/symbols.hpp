/*
 * symbols.hpp - real trigonometric polynomials on the torus R^2 / Z^2.
 *
 *   a(q, p) = sum_{(m,n)} c_{m,n} exp(2 pi i (m q + n p)),   c_{-m,-n} = conj(c_{m,n})
 *
 * Coordinates (q, p) live in the fundamental domain [0,1)^2. The symplectic
 * form is omega = nu dp^dq; for the Harper example nu = 4 pi, so the whole
 * torus has symplectic area 4 pi.
 *
 * Besides evaluation and exact derivatives this module locates the global
 * minimum (grid scan + damped Newton), the lowest saddle value above it (the
 * separatrix energy) and the symplectic area of the sublevel component
 * {a <= E} containing the minimum.
 */

#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bsq/common.hpp"

namespace bsq {

struct FourierMode {
  int m = 0;  // frequency in q
  int n = 0;  // frequency in p
  cplx coeff{};
};

struct Gradient {
  double dq = 0.0;
  double dp = 0.0;
  double norm() const;
};

// Symmetric 2x2 matrix [[qq, qp], [qp, pp]].
struct Hessian {
  double qq = 0.0;
  double qp = 0.0;
  double pp = 0.0;
  double det() const { return qq * pp - qp * qp; }
  std::array<double, 2> eigenvalues() const;  // ascending
};

struct SymplecticNormalization {
  double nu = 4.0 * kPi;
  explicit SymplecticNormalization(double density = 4.0 * kPi);
};

class TrigSymbol {
 public:
  TrigSymbol() = default;

  // Strict builder: symmetrizes c_{m,n} <- (c_{m,n} + conj(c_{-m,-n})) / 2 and
  // rejects the input if that changes any coefficient by more than `tol`.
  // Duplicate (m, n) pairs are rejected.
  static TrigSymbol from_modes(std::vector<FourierMode> principal,
                               std::vector<FourierMode> subprincipal = {},
                               double tol = 1e-12);

  // Reality-enforcing builder: every mode (m, n, c) contributes
  // c e_{m,n} + conj(c) e_{-m,-n}, i.e. 2 Re(c e_{m,n}).
  static TrigSymbol from_half_modes(const std::vector<FourierMode>& half);

  // 2 (cos 2 pi p + cos 2 pi q)
  static TrigSymbol harper();
  static TrigSymbol constant(double value);

  // Plain-text file, one `m n re im` mode per line, `#` starts a comment line.
  static TrigSymbol load(const std::filesystem::path& path);
  static TrigSymbol parse(std::istream& in, const std::string& origin = "<stream>");
  void save(std::ostream& out) const;

  const std::vector<FourierMode>& modes() const { return modes_; }
  const std::vector<FourierMode>& sub_modes() const { return sub_modes_; }

  // Largest |m| or |n| over principal modes.
  int degree() const;
  // sum |c|, an upper bound for |a|.
  double coefficient_l1() const;

  // Real value; throws std::domain_error if the imaginary part exceeds 1e-10
  // (relative to max(1, coefficient_l1)).
  double eval(double q, double p) const;
  cplx eval_complex(double q, double p) const;
  double eval_sub(double q, double p) const;
  Gradient gradient(double q, double p) const;
  Hessian hessian(double q, double p) const;

  // Values on the tensor grid (qs x ps), row-major with p as the slow index:
  // out[j * qs.size() + i] = a(qs[i], ps[j]).
  std::vector<double> eval_grid(const std::vector<double>& qs, const std::vector<double>& ps) const;

  TrigSymbol plus(const TrigSymbol& other) const;
  TrigSymbol scaled(double factor) const;

 private:
  static std::vector<FourierMode> symmetrize(std::vector<FourierMode> modes, double tol,
                                             const char* what);
  static cplx evaluate(const std::vector<FourierMode>& modes, double q, double p);

  std::vector<FourierMode> modes_;      // sorted by (m, n), unique
  std::vector<FourierMode> sub_modes_;  // same layout
};

struct MinimumInfo {
  double q = 0.0;
  double p = 0.0;
  double value = 0.0;
  bool nondegenerate = false;
  Hessian hessian;
  double gradient_norm = 0.0;
};

struct FindMinimumOptions {
  int grid = 256;
  int max_newton_steps = 100;
  double degeneracy_threshold = 1e-8;
};

MinimumInfo find_minimum(const TrigSymbol& sym, const FindMinimumOptions& opts = {});

enum class CriticalKind { minimum, saddle, maximum, degenerate };

struct CriticalPoint {
  double q = 0.0;
  double p = 0.0;
  double value = 0.0;
  CriticalKind kind = CriticalKind::degenerate;
};

// Newton on the gradient from a seeds x seeds grid, deduplicated modulo Z^2.
std::vector<CriticalPoint> critical_points(const TrigSymbol& sym, int seeds = 64);

// Smallest saddle value above the global minimum; +inf if there is none.
double separatrix_energy(const TrigSymbol& sym, int seeds = 64);

// Symplectic area of the connected component of {a <= E} that contains the
// global minimizer. Requires E > E_min; for E at or above max a the component
// is the whole torus and the result is nu. Accuracy comes from a linear
// interpolant on a triangulated grid anchored at the minimizer, adaptive
// zoom on small components and Richardson extrapolation over n and 2n cells.
double sublevel_area(const TrigSymbol& sym, double E, const SymplecticNormalization& norm,
                     int resolution = 1024);

// Reusable form of sublevel_area for sweeps over E: the minimizer is found once.
class SublevelAreaCalculator {
 public:
  SublevelAreaCalculator(const TrigSymbol& sym, const SymplecticNormalization& norm,
                         int resolution = 1024);
  double area(double E) const;
  const MinimumInfo& minimum() const { return min_; }
  int resolution() const { return resolution_; }

 private:
  struct Window {
    double half_q = 0.5;
    double half_p = 0.5;
    bool periodic = true;
  };
  struct Grid {
    int n = 0;
    bool periodic = true;
    double cell_area = 0.0;
    std::vector<double> vert;    // corner values, row-major
    std::vector<double> centre;  // cell-centre values, n x n
  };
  Grid make_grid(const Window& w, int n) const;
  // Full-torus grids are shared by every energy that needs them.
  const Grid& torus_grid(int n) const;
  // Plain sublevel area (Lebesgue) of the component on the grid.
  static double lebesgue_area(double E, const Grid& g);
  Window locate(double E) const;

  TrigSymbol sym_;
  SymplecticNormalization norm_;
  int resolution_;
  MinimumInfo min_;
  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::shared_ptr<const Grid>> torus_cache_;
};

// c0'(E_min) = 2 pi nu / sqrt(det Hess a(m0)); throws on a degenerate minimum.
double action_derivative_at_min(const TrigSymbol& sym, const SymplecticNormalization& norm);

}  // namespace bsq
