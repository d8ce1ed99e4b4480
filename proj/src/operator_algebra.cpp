#include "phasespace/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace {

const complex kI{0.0, 1.0};

std::string render_power(char var, unsigned power) {
  std::string s(1, var);
  if (power != 1) {
    s += "^" + std::to_string(power);
  }
  return s;
}

// Variables of one term in print order.
template <ExprKind Kind>
std::string render_variables(Monomial m) {
  std::vector<std::string> parts;
  if constexpr (Kind == ExprKind::Operator) {
    if (m.qpow > 0) parts.push_back(render_power('q', m.qpow));
    if (m.ppow > 0) parts.push_back(render_power('p', m.ppow));
  } else {
    if (m.ppow > 0) parts.push_back(render_power('p', m.ppow));
    if (m.qpow > 0) parts.push_back(render_power('q', m.qpow));
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

// Renders c * hbar^k * vars. `negative` receives the sign pulled out front.
std::string render_piece(complex c, std::size_t hbar_power, const std::string& vars, bool& negative) {
  std::vector<std::string> parts;
  negative = false;
  if (c.imag() == 0.0) {
    negative = c.real() < 0.0;
    const double mag = std::abs(c.real());
    if (mag != 1.0) parts.push_back(format_number(mag));
  } else if (c.real() == 0.0) {
    negative = c.imag() < 0.0;
    const double mag = std::abs(c.imag());
    if (mag != 1.0) parts.push_back(format_number(mag));
    parts.push_back("i");
  } else {
    const char* sign = c.imag() < 0.0 ? " - " : " + ";
    parts.push_back("(" + format_number(c.real()) + sign + format_number(std::abs(c.imag())) + " i)");
  }
  if (hbar_power == 1) {
    parts.push_back("hbar");
  } else if (hbar_power > 1) {
    parts.push_back("hbar^" + std::to_string(hbar_power));
  }
  if (!vars.empty()) parts.push_back(vars);
  if (parts.empty()) parts.push_back("1");

  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (unsigned j = 1; j <= k; ++j) {
    result = result * (n - k + j) / j;
  }
  return result;
}

std::uint64_t falling_factorial(unsigned n, unsigned r) {
  if (r > n) return 0;
  std::uint64_t result = 1;
  for (unsigned j = 0; j < r; ++j) {
    result *= (n - j);
  }
  return result;
}

template <ExprKind Kind>
Expression<Kind>::Expression(double hbar) : hbar_(hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw InvalidInput("hbar must be a positive finite number");
  }
}

template <ExprKind Kind>
Expression<Kind> Expression<Kind>::monomial(double hbar, unsigned qpow, unsigned ppow, HbarSeries coeff) {
  Expression e(hbar);
  e.add_term({qpow, ppow}, coeff);
  return e;
}

template <ExprKind Kind>
unsigned Expression<Kind>::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

template <ExprKind Kind>
HbarSeries Expression<Kind>::coefficient(Monomial m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? HbarSeries{} : it->second;
}

template <ExprKind Kind>
void Expression<Kind>::add_term(Monomial m, const HbarSeries& coeff) {
  if (coeff.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

template <ExprKind Kind>
void Expression<Kind>::check_hbar(const Expression& other) const {
  if (hbar_ != other.hbar_) {
    throw InvalidInput("hbar mismatch: " + format_number(hbar_) + " vs " + format_number(other.hbar_));
  }
}

template <ExprKind Kind>
Expression<Kind>& Expression<Kind>::operator+=(const Expression& other) {
  check_hbar(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

template <ExprKind Kind>
Expression<Kind>& Expression<Kind>::operator-=(const Expression& other) {
  check_hbar(other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

template <ExprKind Kind>
Expression<Kind>& Expression<Kind>::operator*=(const HbarSeries& scalar) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= scalar;
    it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

template <ExprKind Kind>
std::string Expression<Kind>::to_string() const {
  struct Piece {
    Monomial m;
    std::size_t hbar_power;
    complex c;
  };
  std::vector<Piece> pieces;
  for (const auto& [m, series] : terms_) {
    for (std::size_t k = 0; k < series.coefficients().size(); ++k) {
      if (series.coefficients()[k] != complex{}) pieces.push_back({m, k, series.coefficients()[k]});
    }
  }
  if (pieces.empty()) return "0";
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.m != b.m) return RenderOrder{}(a.m, b.m);
    return a.hbar_power < b.hbar_power;
  });

  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    bool negative = false;
    const std::string body = render_piece(pieces[i].c, pieces[i].hbar_power, render_variables<Kind>(pieces[i].m), negative);
    if (i == 0) {
      out += negative ? "- " + body : body;
    } else {
      out += negative ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

template class Expression<ExprKind::Operator>;
template class Expression<ExprKind::Symbol>;

namespace {

using TermMap = std::map<Monomial, HbarSeries>;

void accumulate(TermMap& target, Monomial m, const HbarSeries& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = target.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) target.erase(it);
  }
}

// Standard-ordered expansion of p^b q^c, one commutation at a time:
// p^b q^c = (p^{b-1} q^c) p - i hbar c (p^{b-1} q^{c-1}).
class Reorderer {
 public:
  const TermMap& expand(unsigned b, unsigned c) {
    const auto key = Monomial{c, b};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TermMap result;
    if (b == 0 || c == 0) {
      result.emplace(Monomial{c, b}, HbarSeries(1.0));
    } else {
      for (const auto& [m, coeff] : expand(b - 1, c)) {
        accumulate(result, {m.qpow, m.ppow + 1}, coeff);
      }
      const HbarSeries factor = HbarSeries::monomial(-kI * static_cast<double>(c), 1);
      for (const auto& [m, coeff] : expand(b - 1, c - 1)) {
        accumulate(result, m, coeff * factor);
      }
    }
    return memo_.emplace(key, std::move(result)).first->second;
  }

 private:
  std::map<Monomial, TermMap> memo_;
};

}  // namespace

OperatorExpr multiply(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.hbar() != b.hbar()) {
    throw InvalidInput("hbar mismatch in operator product: " + format_number(a.hbar()) + " vs " +
                       format_number(b.hbar()));
  }
  Reorderer reorder;
  OperatorExpr out(a.hbar());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      const HbarSeries c = ca * cb;
      // q^a p^b q^c p^d = q^a (p^b q^c) p^d
      for (const auto& [mm, cm] : reorder.expand(ma.ppow, mb.qpow)) {
        out.add_term({ma.qpow + mm.qpow, mm.ppow + mb.ppow}, c * cm);
      }
    }
  }
  return out;
}

OperatorExpr power(const OperatorExpr& a, unsigned exponent) {
  OperatorExpr result = OperatorExpr::identity(a.hbar());
  for (unsigned k = 0; k < exponent; ++k) result = multiply(result, a);
  return result;
}

PhaseSpaceSymbol operator*(const PhaseSpaceSymbol& a, const PhaseSpaceSymbol& b) {
  if (a.hbar() != b.hbar()) {
    throw InvalidInput("hbar mismatch in symbol product");
  }
  PhaseSpaceSymbol out(a.hbar());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      out.add_term({ma.qpow + mb.qpow, ma.ppow + mb.ppow}, ca * cb);
    }
  }
  return out;
}

PhaseSpaceSymbol power(const PhaseSpaceSymbol& a, unsigned exponent) {
  PhaseSpaceSymbol result = PhaseSpaceSymbol::identity(a.hbar());
  for (unsigned k = 0; k < exponent; ++k) result = result * a;
  return result;
}

std::map<Monomial, HbarSeries> anti_standard_terms(const OperatorExpr& op) {
  // q^m p^n = sum_k k! C(m,k) C(n,k) (i hbar)^k p^(n-k) q^(m-k)
  TermMap out;
  for (const auto& [m, c] : op.terms()) {
    const unsigned kmax = std::min(m.qpow, m.ppow);
    complex ih_pow{1.0, 0.0};
    for (unsigned k = 0; k <= kmax; ++k) {
      const double weight = static_cast<double>(binomial(m.qpow, k)) * static_cast<double>(falling_factorial(m.ppow, k));
      accumulate(out, {m.qpow - k, m.ppow - k}, (c * (ih_pow * weight)).shifted(k));
      ih_pow *= kI;
    }
  }
  return out;
}

namespace {

// Image of q^m p^n (coefficient 1) under the alpha map, with coefficient
// multiplier `c`.
void add_monomial_symbol(TermMap& out, Monomial m, const HbarSeries& c, complex step) {
  const unsigned rmax = std::min(m.qpow, m.ppow);
  complex step_pow{1.0, 0.0};
  for (unsigned r = 0; r <= rmax; ++r) {
    const double weight = static_cast<double>(binomial(m.qpow, r)) * static_cast<double>(falling_factorial(m.ppow, r));
    accumulate(out, {m.qpow - r, m.ppow - r}, (c * (step_pow * weight)).shifted(r));
    step_pow *= step;
  }
}

}  // namespace

PhaseSpaceSymbol alpha_symbol(const OperatorExpr& op, double alpha) {
  TermMap terms;
  const complex step = -kI * alpha;  // per power of hbar
  for (const auto& [m, c] : op.terms()) {
    add_monomial_symbol(terms, m, c, step);
  }
  PhaseSpaceSymbol out(op.hbar());
  for (const auto& [m, c] : terms) out.add_term(m, c);
  return out;
}

OperatorExpr alpha_quantize(const PhaseSpaceSymbol& sym, double alpha) {
  TermMap remaining(sym.terms().begin(), sym.terms().end());
  OperatorExpr out(sym.hbar());
  const complex step = -kI * alpha;
  while (!remaining.empty()) {
    // Highest-degree term; its image only touches strictly lower degrees
    // besides itself, so the leading coefficient is fixed.
    auto lead = std::min_element(remaining.begin(), remaining.end(),
                                 [](const auto& x, const auto& y) { return RenderOrder{}(x.first, y.first); });
    const Monomial m = lead->first;
    const HbarSeries c = lead->second;
    out.add_term(m, c);
    TermMap image;
    add_monomial_symbol(image, m, c, step);
    for (const auto& [mi, ci] : image) accumulate(remaining, mi, -ci);
    remaining.erase(m);  // leading coefficient cancels exactly; erase guards rounding
  }
  return out;
}

complex evaluate(const PhaseSpaceSymbol& sym, double q, double p) {
  complex acc{};
  for (const auto& [m, c] : sym.terms()) {
    acc += c.evaluate(sym.hbar()) * std::pow(q, m.qpow) * std::pow(p, m.ppow);
  }
  return acc;
}

Eigen::MatrixXcd matrix_representation(const OperatorExpr& op, std::size_t basis_size) {
  if (basis_size < 2) {
    throw InvalidInput("basis_size must be at least 2");
  }
  if (basis_size <= op.degree()) {
    throw InvalidInput("basis_size " + std::to_string(basis_size) + " too small for operator degree " +
                       std::to_string(op.degree()));
  }
  const auto n = static_cast<Eigen::Index>(basis_size);
  Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(n, n);  // a
  for (Eigen::Index k = 1; k < n; ++k) lower(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double scale = std::sqrt(op.hbar() / 2.0);
  const Eigen::MatrixXcd adag = lower.adjoint();
  const Eigen::MatrixXcd q = scale * (lower + adag);
  const Eigen::MatrixXcd p = kI * scale * (adag - lower);

  std::vector<Eigen::MatrixXcd> qpow{Eigen::MatrixXcd::Identity(n, n)};
  std::vector<Eigen::MatrixXcd> ppow{Eigen::MatrixXcd::Identity(n, n)};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [m, c] : op.terms()) {
    while (qpow.size() <= m.qpow) qpow.push_back(qpow.back() * q);
    while (ppow.size() <= m.ppow) ppow.push_back(ppow.back() * p);
    out += c.evaluate(op.hbar()) * (qpow[m.qpow] * ppow[m.ppow]);
  }
  return out;
}

}  // namespace phasespace
