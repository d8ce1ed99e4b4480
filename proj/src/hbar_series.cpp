#include "phasespace/hbar_series.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace phasespace {

HbarSeries::HbarSeries(complex constant) {
  if (constant != complex{}) {
    coeffs_.push_back(constant);
  }
}

HbarSeries HbarSeries::monomial(complex c, std::size_t power) {
  HbarSeries s;
  if (c != complex{}) {
    s.coeffs_.assign(power + 1, complex{});
    s.coeffs_[power] = c;
  }
  return s;
}

complex HbarSeries::evaluate(double hbar) const {
  complex acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * hbar + *it;
  }
  return acc;
}

HbarSeries& HbarSeries::operator+=(const HbarSeries& other) {
  if (other.coeffs_.size() > coeffs_.size()) {
    coeffs_.resize(other.coeffs_.size());
  }
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) {
    coeffs_[k] += other.coeffs_[k];
  }
  trim();
  return *this;
}

HbarSeries& HbarSeries::operator-=(const HbarSeries& other) {
  if (other.coeffs_.size() > coeffs_.size()) {
    coeffs_.resize(other.coeffs_.size());
  }
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) {
    coeffs_[k] -= other.coeffs_[k];
  }
  trim();
  return *this;
}

HbarSeries& HbarSeries::operator*=(complex scalar) {
  for (auto& c : coeffs_) {
    c *= scalar;
  }
  trim();
  return *this;
}

HbarSeries& HbarSeries::operator*=(const HbarSeries& other) {
  if (is_zero() || other.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<complex> out(coeffs_.size() + other.coeffs_.size() - 1);
  for (std::size_t a = 0; a < coeffs_.size(); ++a) {
    for (std::size_t b = 0; b < other.coeffs_.size(); ++b) {
      out[a + b] += coeffs_[a] * other.coeffs_[b];
    }
  }
  coeffs_ = std::move(out);
  trim();
  return *this;
}

HbarSeries HbarSeries::shifted(std::size_t power) const {
  HbarSeries s;
  if (!is_zero()) {
    s.coeffs_.assign(power, complex{});
    s.coeffs_.insert(s.coeffs_.end(), coeffs_.begin(), coeffs_.end());
  }
  return s;
}

double HbarSeries::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) {
    m = std::max(m, std::abs(c));
  }
  return m;
}

void HbarSeries::trim() {
  while (!coeffs_.empty() && coeffs_.back() == complex{}) {
    coeffs_.pop_back();
  }
}

std::string format_number(double value) {
  if (value == 0.0) {
    return "0";
  }
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    return "nan";
  }
  return std::string(buf.data(), end);
}

}  // namespace phasespace
