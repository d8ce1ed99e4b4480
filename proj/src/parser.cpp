#include "phasespace/parser.hpp"

#include <cctype>
#include <charconv>
#include <string>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace {

template <class Expr>
class Parser {
 public:
  Parser(std::string_view text, double hbar) : text_(text), hbar_(hbar) {}

  Expr parse() {
    Expr result = parse_expr();
    skip_space();
    if (pos_ != text_.size()) {
      fail(std::string("unexpected character '") + text_[pos_] + "'");
    }
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos_, message); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  Expr parse_expr() {
    skip_space();
    if (pos_ == text_.size()) fail("expected a term");
    bool negate = false;
    if (peek('+') || peek('-')) {
      negate = text_[pos_] == '-';
      ++pos_;
    }
    Expr acc = parse_term();
    if (negate) acc *= HbarSeries(-1.0);
    while (peek('+') || peek('-')) {
      const bool minus = text_[pos_] == '-';
      ++pos_;
      Expr t = parse_term();
      if (minus) {
        acc -= t;
      } else {
        acc += t;
      }
    }
    return acc;
  }

  bool starts_factor() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const char c = text_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'q' || c == 'p' ||
           c == 'i' || c == 'h';
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        acc = acc * parse_factor();
      } else if (starts_factor()) {
        acc = acc * parse_factor();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (peek('^')) {
      ++pos_;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '-') fail("negative exponent");
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      unsigned exponent = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
      if (ec != std::errc{} || exponent > 64) {
        pos_ = start;
        fail("exponent out of range");
      }
      return power(base, exponent);
    }
    return base;
  }

  Expr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected a factor");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (text_.substr(pos_, 4) == "hbar") {
      pos_ += 4;
      return Expr::monomial(hbar_, 0, 0, HbarSeries::monomial(1.0, 1));
    }
    if (c == 'q') {
      ++pos_;
      return Expr::position(hbar_);
    }
    if (c == 'p') {
      ++pos_;
      return Expr::momentum(hbar_);
    }
    if (c == 'i') {
      ++pos_;
      return Expr::monomial(hbar_, 0, 0, HbarSeries(complex(0.0, 1.0)));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return Expr::monomial(hbar_, 0, 0, HbarSeries(parse_number()));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return value;
  }

  std::string_view text_;
  double hbar_;
  std::size_t pos_ = 0;
};

}  // namespace

OperatorExpr parse_operator(std::string_view text, double hbar) {
  return Parser<OperatorExpr>(text, hbar).parse();
}

PhaseSpaceSymbol parse_symbol(std::string_view text, double hbar) {
  return Parser<PhaseSpaceSymbol>(text, hbar).parse();
}

}  // namespace phasespace
