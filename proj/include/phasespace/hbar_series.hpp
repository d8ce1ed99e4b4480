#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace phasespace {

using complex = std::complex<double>;

/// Polynomial in hbar with complex coefficients: c_0 + c_1 hbar + c_2 hbar^2 + ...
///
/// Commutation produces explicit powers of hbar, so operator and symbol
/// coefficients keep them symbolic and only substitute the numeric value on
/// evaluation. Trailing zero coefficients are trimmed, which makes the
/// zero series the empty vector and equality exact.
class HbarSeries {
 public:
  HbarSeries() = default;
  HbarSeries(complex constant);  // NOLINT(google-explicit-constructor)
  HbarSeries(double constant) : HbarSeries(complex(constant, 0.0)) {}  // NOLINT

  /// c * hbar^power
  static HbarSeries monomial(complex c, std::size_t power);

  const std::vector<complex>& coefficients() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// Highest hbar power present; 0 for the zero series.
  std::size_t order() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  complex coefficient(std::size_t power) const {
    return power < coeffs_.size() ? coeffs_[power] : complex{};
  }

  complex evaluate(double hbar) const;

  HbarSeries& operator+=(const HbarSeries& other);
  HbarSeries& operator-=(const HbarSeries& other);
  HbarSeries& operator*=(complex scalar);
  HbarSeries& operator*=(const HbarSeries& other);

  /// Multiply by hbar^power.
  HbarSeries shifted(std::size_t power) const;

  friend HbarSeries operator+(HbarSeries a, const HbarSeries& b) { return a += b; }
  friend HbarSeries operator-(HbarSeries a, const HbarSeries& b) { return a -= b; }
  friend HbarSeries operator*(HbarSeries a, const HbarSeries& b) { return a *= b; }
  friend HbarSeries operator*(HbarSeries a, complex s) { return a *= s; }
  friend HbarSeries operator*(complex s, HbarSeries a) { return a *= s; }
  HbarSeries operator-() const { return *this * complex(-1.0, 0.0); }

  friend bool operator==(const HbarSeries& a, const HbarSeries& b) { return a.coeffs_ == b.coeffs_; }

  /// Largest |c_k| over all powers.
  double max_abs() const;

 private:
  void trim();
  std::vector<complex> coeffs_;
};

/// Shortest round-trip decimal text for a double ("0.5", "1e-07", "-2").
std::string format_number(double value);

}  // namespace phasespace
