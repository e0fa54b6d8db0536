// Toeplitz calculus on the Bargmann space of the plane, truncated to the first
// N + 1 basis vectors phi_0 .. phi_N.
//
// Symbols are polynomials in z, zbar whose coefficients are polynomials in
// hbar = 1/k; the symbol operations below are exact and formal in hbar. A
// monomial z^a zbar^b acts on the basis as
//
//   T[m, n] = delta_{m, n + a - b} (n + a)! / (sqrt(m! n!) k^{(a + b)/2}).

#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <tuple>
#include <vector>

#include "bsq/common.hpp"

namespace bsq {

class PolySymbol {
 public:
  using Key = std::tuple<int, int, int>;  // (hbar order, a, b)

  PolySymbol() = default;
  static PolySymbol monomial(int a, int b, cplx coeff = 1.0, int hbar_order = 0);
  static PolySymbol constant(cplx c) { return monomial(0, 0, c); }
  // x = (z + zbar) / sqrt 2 and xi = i (z - zbar) / sqrt 2.
  static PolySymbol x();
  static PolySymbol xi();

  // Lines `hbar_order a b re im`; `#` starts a comment line.
  static PolySymbol parse(std::istream& in, const std::string& origin = "<stream>");
  void save(std::ostream& out) const;

  void add(int hbar_order, int a, int b, cplx coeff);
  cplx coeff(int hbar_order, int a, int b) const;
  const std::map<Key, cplx>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  int hbar_degree() const;   // highest hbar order present (0 if empty)
  int lowest_order() const;  // lowest hbar order present (0 if empty)
  int degree() const;        // max a + b
  int band() const;          // max over terms of max(a, b)

  cplx eval(cplx z, double hbar) const;
  // Drops terms with |coeff| <= tol and hbar order above max_order.
  PolySymbol pruned(double tol = 0.0, int max_order = 1 << 30) const;

  PolySymbol operator+(const PolySymbol& o) const;
  PolySymbol operator-(const PolySymbol& o) const;
  PolySymbol operator*(const PolySymbol& o) const;  // pointwise product
  PolySymbol operator*(cplx c) const;
  // Multiplies by hbar^e.
  PolySymbol shifted(int e) const;

  PolySymbol d_z() const;
  PolySymbol d_zbar() const;
  PolySymbol laplacian() const;  // d_z d_zbar

 private:
  std::map<Key, cplx> terms_;
};

struct FockOperator {
  int k = 1;
  int N = 0;
  Eigen::MatrixXcd matrix;  // (N + 1) x (N + 1)
  int interior_band = 0;    // indices > N - interior_band are truncation-affected

  int interior_limit() const { return N - interior_band; }
  // Same schema as the torus operators: `row,col,re,im`.
  void write_csv(std::ostream& out) const;
};

FockOperator quantize_monomial(int a, int b, int k, int N);
// Sum of c hbar^order quantize_monomial(a, b) with hbar = 1/k.
FockOperator quantize(const PolySymbol& sym, int k, int N);
// diag((n + 1/2) / k)
FockOperator harmonic_oscillator(int k, int N);

// exp(hbar Delta) applied termwise; exact because Delta is nilpotent on polynomials.
PolySymbol covariant_from_contravariant(const PolySymbol& sym);
PolySymbol contravariant_from_covariant(const PolySymbol& sym);

// Contravariant symbol of the product: sum_l (-hbar)^l / l! d_z^l A d_zbar^l B.
PolySymbol compose_symbols(const PolySymbol& A, const PolySymbol& B);

// max |quantize(compose(A, B)) - quantize(A) quantize(B)| over row and column
// indices <= N - band(A) - band(B). Throws std::invalid_argument if N is below
// deg A + deg B + 2.
double verify_composition(const PolySymbol& A, const PolySymbol& B, int k, int N);

enum class SymbolDirection { to_normalized, from_normalized };

// (Id + hbar Delta / 2) or its inverse, truncated at hbar order max_order.
PolySymbol normalized_symbol(const PolySymbol& sym, SymbolDirection dir,
                             int max_order = 1 << 30);

// {f, g} = d_xi f d_x g - d_x f d_xi g = i (f_zbar g_z - f_z g_zbar).
PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g);

struct StarBracketResult {
  PolySymbol defect;                // sigma_norm(AB) - a0 b0 - (hbar / 2i) {a0, b0}
  std::vector<int> k_list;
  std::vector<double> magnitude;    // max |defect| over the sample points, per k
  std::vector<double> ratios;       // magnitude[i] / magnitude[i + 1]
  bool identically_zero() const { return defect.empty(); }
};

// a0 and b0 are normalized symbols without hbar dependence.
StarBracketResult star_bracket_check(const PolySymbol& a0, const PolySymbol& b0,
                                     const std::vector<int>& k_list);

}  // namespace bsq
