#include "bsq/fock_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace bsq {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// sum_{i=lo}^{hi} log(i / k), ascending.
double log_ratio_sum(int lo, int hi, double k) {
  double s = 0.0;
  for (int i = lo; i <= hi; ++i) s += std::log(i / k);
  return s;
}

// prod_{i=lo}^{hi} (i / k), ascending.
double ratio_product(int lo, int hi, double k) {
  double s = 1.0;
  for (int i = lo; i <= hi; ++i) s *= i / k;
  return s;
}

}  // namespace

PolySymbol PolySymbol::monomial(int a, int b, cplx coeff, int hbar_order) {
  PolySymbol s;
  s.add(hbar_order, a, b, coeff);
  return s;
}

PolySymbol PolySymbol::x() {
  const double r = 1.0 / std::sqrt(2.0);
  return monomial(1, 0, r) + monomial(0, 1, r);
}

PolySymbol PolySymbol::xi() {
  const double r = 1.0 / std::sqrt(2.0);
  return monomial(1, 0, cplx(0.0, r)) + monomial(0, 1, cplx(0.0, -r));
}

PolySymbol PolySymbol::parse(std::istream& in, const std::string& origin) {
  PolySymbol s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    int order, a, b;
    double re, im;
    if (!(ls >> order >> a >> b >> re >> im)) {
      throw InputError(origin + ":" + std::to_string(lineno) +
                       ": expected `hbar_order a b re im`");
    }
    std::string rest;
    if (ls >> rest) throw InputError(origin + ":" + std::to_string(lineno) + ": trailing text");
    if (order < 0 || a < 0 || b < 0) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": negative order or power");
    }
    if (s.terms_.count({order, a, b})) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": duplicate term");
    }
    s.add(order, a, b, {re, im});
  }
  return s;
}

void PolySymbol::save(std::ostream& out) const {
  out << "# hbar_order a b re im\n";
  for (const auto& [key, c] : terms_) {
    out << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key) << ' '
        << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
  }
}

void PolySymbol::add(int hbar_order, int a, int b, cplx coeff) {
  if (hbar_order < 0 || a < 0 || b < 0) {
    throw std::invalid_argument("PolySymbol: orders and powers must be non-negative");
  }
  if (coeff == cplx{}) return;
  auto& slot = terms_[{hbar_order, a, b}];
  slot += coeff;
  if (slot == cplx{}) terms_.erase({hbar_order, a, b});
}

cplx PolySymbol::coeff(int hbar_order, int a, int b) const {
  const auto it = terms_.find({hbar_order, a, b});
  return it == terms_.end() ? cplx{} : it->second;
}

int PolySymbol::hbar_degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, std::get<0>(key));
  return d;
}

int PolySymbol::lowest_order() const {
  return terms_.empty() ? 0 : std::get<0>(terms_.begin()->first);
}

int PolySymbol::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, std::get<1>(key) + std::get<2>(key));
  return d;
}

int PolySymbol::band() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max({d, std::get<1>(key), std::get<2>(key)});
  return d;
}

cplx PolySymbol::eval(cplx z, double hbar) const {
  cplx acc{};
  const cplx zb = std::conj(z);
  for (const auto& [key, c] : terms_) {
    const auto [o, a, b] = key;
    acc += c * std::pow(hbar, o) * std::pow(z, a) * std::pow(zb, b);
  }
  return acc;
}

PolySymbol PolySymbol::pruned(double tol, int max_order) const {
  PolySymbol s;
  for (const auto& [key, c] : terms_) {
    if (std::abs(c) > tol && std::get<0>(key) <= max_order) s.terms_.emplace(key, c);
  }
  return s;
}

PolySymbol PolySymbol::operator+(const PolySymbol& o) const {
  PolySymbol s = *this;
  for (const auto& [key, c] : o.terms_) s.add(std::get<0>(key), std::get<1>(key), std::get<2>(key), c);
  return s;
}

PolySymbol PolySymbol::operator-(const PolySymbol& o) const { return *this + o * cplx(-1.0); }

PolySymbol PolySymbol::operator*(const PolySymbol& o) const {
  PolySymbol s;
  for (const auto& [k1, c1] : terms_) {
    for (const auto& [k2, c2] : o.terms_) {
      s.add(std::get<0>(k1) + std::get<0>(k2), std::get<1>(k1) + std::get<1>(k2),
            std::get<2>(k1) + std::get<2>(k2), c1 * c2);
    }
  }
  return s;
}

PolySymbol PolySymbol::operator*(cplx c) const {
  PolySymbol s;
  for (const auto& [key, v] : terms_) s.add(std::get<0>(key), std::get<1>(key), std::get<2>(key), v * c);
  return s;
}

PolySymbol PolySymbol::shifted(int e) const {
  PolySymbol s;
  for (const auto& [key, v] : terms_) {
    s.add(std::get<0>(key) + e, std::get<1>(key), std::get<2>(key), v);
  }
  return s;
}

PolySymbol PolySymbol::d_z() const {
  PolySymbol s;
  for (const auto& [key, v] : terms_) {
    const auto [o, a, b] = key;
    if (a > 0) s.add(o, a - 1, b, v * static_cast<double>(a));
  }
  return s;
}

PolySymbol PolySymbol::d_zbar() const {
  PolySymbol s;
  for (const auto& [key, v] : terms_) {
    const auto [o, a, b] = key;
    if (b > 0) s.add(o, a, b - 1, v * static_cast<double>(b));
  }
  return s;
}

PolySymbol PolySymbol::laplacian() const { return d_z().d_zbar(); }

void FockOperator::write_csv(std::ostream& out) const {
  out << "row,col,re,im\n";
  for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      const cplx v = matrix(r, c);
      if (v == cplx{}) continue;
      out << r << ',' << c << ',' << format_double(v.real()) << ',' << format_double(v.imag())
          << '\n';
    }
  }
}

FockOperator quantize_monomial(int a, int b, int k, int N) {
  if (a < 0 || b < 0) throw std::invalid_argument("quantize_monomial: negative power");
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  if (N < a + b) throw std::invalid_argument("quantize_monomial: N must be at least a + b");
  FockOperator op{k, N, Eigen::MatrixXcd::Zero(N + 1, N + 1), std::max(a, b)};
  const double kd = k;
  for (int n = 0; n <= N; ++n) {
    const int m = n + a - b;
    if (m < 0 || m > N) continue;
    // (n+a)!/sqrt(m! n!) k^{-(a+b)/2} = sqrt(prod_{n<i<=n+a} i/k * prod_{m<i<=m+b} i/k).
    // Both partial sums run in ascending order so (a,b) and (b,a) round identically.
    double v;
    if (a + b <= 32) {
      v = std::sqrt(ratio_product(n + 1, n + a, kd) * ratio_product(m + 1, m + b, kd));
    } else {
      v = std::exp(0.5 * (log_ratio_sum(n + 1, n + a, kd) + log_ratio_sum(m + 1, m + b, kd)));
    }
    op.matrix(m, n) = v;
  }
  return op;
}

FockOperator quantize(const PolySymbol& sym, int k, int N) {
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  if (N < sym.degree()) throw std::invalid_argument("quantize: N must be at least the symbol degree");
  FockOperator op{k, N, Eigen::MatrixXcd::Zero(N + 1, N + 1), sym.band()};
  for (const auto& [key, c] : sym.terms()) {
    const auto [o, a, b] = key;
    op.matrix += (c * std::pow(1.0 / k, o)) * quantize_monomial(a, b, k, N).matrix;
  }
  return op;
}

FockOperator harmonic_oscillator(int k, int N) {
  if (k < 1) throw std::invalid_argument("k must be a positive integer");
  if (N < 0) throw std::invalid_argument("N must be non-negative");
  FockOperator op{k, N, Eigen::MatrixXcd::Zero(N + 1, N + 1), 1};
  for (int n = 0; n <= N; ++n) op.matrix(n, n) = (n + 0.5) / k;
  return op;
}

namespace {

// sum_l (sign hbar)^l / l! Delta^l sym
PolySymbol heat(const PolySymbol& sym, double sign) {
  PolySymbol out;
  PolySymbol term = sym;
  for (int l = 0; !term.empty(); ++l) {
    out = out + term.shifted(l) * cplx(std::pow(sign, l) / factorial(l));
    term = term.laplacian();
  }
  return out;
}

}  // namespace

PolySymbol covariant_from_contravariant(const PolySymbol& sym) { return heat(sym, 1.0); }

PolySymbol contravariant_from_covariant(const PolySymbol& sym) { return heat(sym, -1.0); }

PolySymbol compose_symbols(const PolySymbol& A, const PolySymbol& B) {
  PolySymbol out;
  PolySymbol da = A, db = B;
  for (int l = 0; !da.empty() && !db.empty(); ++l) {
    out = out + (da * db).shifted(l) * cplx(std::pow(-1.0, l) / factorial(l));
    da = da.d_z();
    db = db.d_zbar();
  }
  return out;
}

double verify_composition(const PolySymbol& A, const PolySymbol& B, int k, int N) {
  if (N < A.degree() + B.degree() + 2) {
    throw std::invalid_argument("verify_composition: N must be at least deg A + deg B + 2");
  }
  const PolySymbol C = compose_symbols(A, B);
  const Eigen::MatrixXcd lhs = quantize(C, k, N).matrix;
  const Eigen::MatrixXcd rhs = quantize(A, k, N).matrix * quantize(B, k, N).matrix;
  const int lim = N - A.band() - B.band();
  if (lim < 0) throw std::invalid_argument("verify_composition: empty interior");
  return (lhs - rhs).topLeftCorner(lim + 1, lim + 1).cwiseAbs().maxCoeff();
}

PolySymbol normalized_symbol(const PolySymbol& sym, SymbolDirection dir, int max_order) {
  if (dir == SymbolDirection::to_normalized) {
    return (sym + sym.laplacian().shifted(1) * cplx(0.5)).pruned(0.0, max_order);
  }
  // Neumann series of (Id + hbar Delta / 2)^{-1}; terminates on polynomials.
  PolySymbol out;
  PolySymbol term = sym;
  for (int l = 0; !term.empty(); ++l) {
    out = out + term;
    term = (term.laplacian().shifted(1) * cplx(-0.5)).pruned(0.0, max_order);
  }
  return out.pruned(0.0, max_order);
}

PolySymbol poisson_bracket(const PolySymbol& f, const PolySymbol& g) {
  return (f.d_zbar() * g.d_z() - f.d_z() * g.d_zbar()) * cplx(0.0, 1.0);
}

StarBracketResult star_bracket_check(const PolySymbol& a0, const PolySymbol& b0,
                                     const std::vector<int>& k_list) {
  if (a0.hbar_degree() != 0 || b0.hbar_degree() != 0) {
    throw std::invalid_argument("star_bracket_check: inputs must not depend on hbar");
  }
  const PolySymbol A = normalized_symbol(a0, SymbolDirection::from_normalized);
  const PolySymbol B = normalized_symbol(b0, SymbolDirection::from_normalized);
  const PolySymbol prod = normalized_symbol(compose_symbols(A, B), SymbolDirection::to_normalized);
  // hbar / 2i = -i hbar / 2
  const PolySymbol bracket = poisson_bracket(a0, b0).shifted(1) * cplx(0.0, -0.5);

  StarBracketResult r;
  r.defect = (prod - a0 * b0 - bracket).pruned(1e-14);
  r.k_list = k_list;
  const cplx pts[] = {{0.3, 0.2}, {-0.5, 0.7}, {1.1, -0.4}};
  for (int k : k_list) {
    if (k < 1) throw std::invalid_argument("k must be a positive integer");
    double m = 0.0;
    for (cplx z : pts) m = std::max(m, std::abs(r.defect.eval(z, 1.0 / k)));
    r.magnitude.push_back(m);
  }
  for (std::size_t i = 0; i + 1 < r.magnitude.size(); ++i) {
    r.ratios.push_back(r.magnitude[i] / r.magnitude[i + 1]);
  }
  return r;
}

}  // namespace bsq
