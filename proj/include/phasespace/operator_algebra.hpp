#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "phasespace/hbar_series.hpp"

namespace phasespace {

/// Exponent pair of a monomial. For operators it denotes the standard-ordered
/// product q^qpow p^ppow (all q factors to the left); for phase-space symbols
/// the commuting product p^ppow q^qpow.
struct Monomial {
  unsigned qpow = 0;
  unsigned ppow = 0;

  unsigned degree() const { return qpow + ppow; }
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// Sort key for rendering: descending total degree, then descending qpow.
struct RenderOrder {
  bool operator()(const Monomial& a, const Monomial& b) const {
    if (a.degree() != b.degree()) return a.degree() > b.degree();
    return a.qpow > b.qpow;
  }
};

enum class ExprKind { Operator, Symbol };

/// Polynomial in q and p with hbar-series coefficients, kept in canonical
/// form: one entry per exponent pair, no zero coefficients.
///
/// `Expression<ExprKind::Operator>` is a non-commuting polynomial in q̂, p̂
/// stored in standard order; `Expression<ExprKind::Symbol>` is a commuting
/// c-number polynomial O(q, p). Both carry the numeric hbar they were built
/// with; mixing values with different hbar is rejected.
template <ExprKind Kind>
class Expression {
 public:
  using TermMap = std::map<Monomial, HbarSeries>;

  explicit Expression(double hbar);

  static Expression identity(double hbar) { return monomial(hbar, 0, 0); }
  static Expression position(double hbar) { return monomial(hbar, 1, 0); }
  static Expression momentum(double hbar) { return monomial(hbar, 0, 1); }
  static Expression monomial(double hbar, unsigned qpow, unsigned ppow, HbarSeries coeff = HbarSeries(1.0));

  double hbar() const { return hbar_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  /// Largest qpow + ppow present (0 for the zero expression).
  unsigned degree() const;
  /// Coefficient of a monomial; zero series if absent.
  HbarSeries coefficient(Monomial m) const;

  /// Adds coeff * monomial, dropping the entry if it cancels to zero.
  void add_term(Monomial m, const HbarSeries& coeff);

  Expression& operator+=(const Expression& other);
  Expression& operator-=(const Expression& other);
  Expression& operator*=(const HbarSeries& scalar);

  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  friend Expression operator*(Expression a, const HbarSeries& s) { return a *= s; }
  friend Expression operator*(const HbarSeries& s, Expression a) { return a *= s; }
  friend Expression operator*(Expression a, complex s) { return a *= HbarSeries(s); }
  friend Expression operator*(complex s, Expression a) { return a *= HbarSeries(s); }

  friend bool operator==(const Expression& a, const Expression& b) {
    return a.hbar_ == b.hbar_ && a.terms_ == b.terms_;
  }

  /// Stable text form, e.g. "q^2 p - 2 i hbar q" (operator) or
  /// "p q + 0.5 i hbar" (symbol). Each hbar power of a coefficient is printed
  /// as its own term.
  std::string to_string() const;

 private:
  void check_hbar(const Expression& other) const;

  double hbar_;
  TermMap terms_;
};

using OperatorExpr = Expression<ExprKind::Operator>;
using PhaseSpaceSymbol = Expression<ExprKind::Symbol>;

/// Non-commuting product a·b brought back to standard order with
/// [q̂, p̂] = i hbar. Throws InvalidInput if the hbar values differ.
OperatorExpr multiply(const OperatorExpr& a, const OperatorExpr& b);
inline OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) { return multiply(a, b); }
OperatorExpr power(const OperatorExpr& a, unsigned exponent);

/// Commuting product of symbols.
PhaseSpaceSymbol operator*(const PhaseSpaceSymbol& a, const PhaseSpaceSymbol& b);
PhaseSpaceSymbol power(const PhaseSpaceSymbol& a, unsigned exponent);

/// Coefficients of the same operator rewritten in anti-standard order: the
/// returned map keys read as p̂^ppow q̂^qpow.
std::map<Monomial, HbarSeries> anti_standard_terms(const OperatorExpr& op);

/// Phase-space symbol of `op` under the alpha ordering rule. Each q̂^m p̂^n maps
/// to sum_{r=0}^{min(m,n)} C(m,r) n!/(n-r)! (-i hbar alpha)^r p^(n-r) q^(m-r).
/// alpha = 0 gives the standard rule, alpha = -1/2 the Weyl rule and
/// alpha = -1 the anti-standard rule.
PhaseSpaceSymbol alpha_symbol(const OperatorExpr& op, double alpha);

/// Inverse of alpha_symbol, solved term by term from the highest degree down
/// (the map is unitriangular in the degree grading).
OperatorExpr alpha_quantize(const PhaseSpaceSymbol& sym, double alpha);

/// Numeric value of a symbol at (q, p).
complex evaluate(const PhaseSpaceSymbol& sym, double q, double p);

/// basis_size x basis_size matrix of `op` in the oscillator number basis
/// (m = omega = 1), q̂ = sqrt(hbar/2)(a + a†), p̂ = i sqrt(hbar/2)(a† - a).
/// Entries are exact on the leading block of size basis_size - degree(op).
Eigen::MatrixXcd matrix_representation(const OperatorExpr& op, std::size_t basis_size);

/// Exact binomial coefficient and falling factorial n!/(n-r)!.
std::uint64_t binomial(unsigned n, unsigned k);
std::uint64_t falling_factorial(unsigned n, unsigned r);

}  // namespace phasespace
