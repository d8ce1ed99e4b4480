#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/operator_algebra.hpp"
#include "phasespace/parser.hpp"

using namespace phasespace;

namespace {

template <class Expr>
double max_coeff_diff(const Expr& a, const Expr& b) {
  double worst = 0.0;
  const Expr d = a - b;
  for (const auto& [m, c] : d.terms()) worst = std::max(worst, c.max_abs());
  return worst;
}

OperatorExpr random_operator(std::mt19937& rng, double hbar, unsigned max_degree) {
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  OperatorExpr op(hbar);
  for (unsigned m = 0; m <= max_degree; ++m) {
    for (unsigned n = 0; m + n <= max_degree; ++n) {
      op.add_term({m, n}, HbarSeries(complex(coeff(rng), coeff(rng))));
    }
  }
  return op;
}

}  // namespace

TEST_CASE("canonical commutator") {
  const auto q = OperatorExpr::position(1.0);
  const auto p = OperatorExpr::momentum(1.0);
  const OperatorExpr comm = q * p - p * q;
  CHECK(comm == OperatorExpr::monomial(1.0, 0, 0, HbarSeries::monomial(complex(0.0, 1.0), 1)));
  CHECK(comm.to_string() == "i hbar");
}

TEST_CASE("reordering p^n q^m matches the closed form") {
  // p^n q^m = sum_k k! C(n,k) C(m,k) (-i hbar)^k q^(m-k) p^(n-k)
  for (unsigned n = 0; n <= 4; ++n) {
    for (unsigned m = 0; m <= 4; ++m) {
      const OperatorExpr lhs = OperatorExpr::monomial(1.0, 0, n) * OperatorExpr::monomial(1.0, m, 0);
      OperatorExpr rhs(1.0);
      double fact = 1.0;
      for (unsigned k = 0; k <= std::min(m, n); ++k) {
        if (k > 0) fact *= k;
        const complex c = fact * static_cast<double>(binomial(n, k) * binomial(m, k)) *
                          std::pow(complex(0.0, -1.0), static_cast<int>(k));
        rhs.add_term({m - k, n - k}, HbarSeries::monomial(c, k));
      }
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("multiplication agrees with matrix products in the number basis") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_operator(rng, 0.7, 3);
    const auto b = random_operator(rng, 0.7, 2);
    const std::size_t k = 24;
    const auto ma = matrix_representation(a, k);
    const auto mb = matrix_representation(b, k);
    const auto mab = matrix_representation(a * b, k);
    const Eigen::Index block = 12;
    const Eigen::MatrixXcd prod = (ma * mb).topLeftCorner(block, block);
    CHECK((prod - mab.topLeftCorner(block, block)).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + prod.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("multiplication is associative and distributive") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_operator(rng, 1.0, 2);
    const auto b = random_operator(rng, 1.0, 2);
    const auto c = random_operator(rng, 1.0, 2);
    CHECK(max_coeff_diff((a * b) * c, a * (b * c)) < 1e-11);
    CHECK(max_coeff_diff(a * (b + c), a * b + a * c) < 1e-12);
  }
}

TEST_CASE("hbar mismatch is rejected") {
  CHECK_THROWS_AS(OperatorExpr::position(1.0) * OperatorExpr::momentum(2.0), InvalidInput);
  CHECK_THROWS_AS(OperatorExpr(0.0), InvalidInput);
  CHECK_THROWS_AS(OperatorExpr(-1.0), InvalidInput);
}

TEST_CASE("symbol of q p at the named orderings") {
  const auto qp = parse_operator("q p", 1.0);
  CHECK(alpha_symbol(qp, 0.0).to_string() == "p q");
  CHECK(alpha_symbol(qp, -0.5).to_string() == "p q + 0.5 i hbar");
  CHECK(alpha_symbol(qp, -1.0).to_string() == "p q + i hbar");
  CHECK(alpha_symbol(parse_operator("q^2", 1.0), 0.0).to_string() == "q^2");
  CHECK(alpha_symbol(parse_operator("q^2 p^2", 1.0), -0.5).to_string() == "p^2 q^2 + 2 i hbar p q - 0.5 hbar^2");
}

TEST_CASE("standard ordering gives p^n q^m exactly") {
  for (unsigned m = 0; m <= 4; ++m) {
    for (unsigned n = 0; n <= 4; ++n) {
      CHECK(alpha_symbol(OperatorExpr::monomial(1.3, m, n), 0.0) == PhaseSpaceSymbol::monomial(1.3, m, n));
    }
  }
}

TEST_CASE("anti-standard ordering agrees with the anti-standard rewrite") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto op = random_operator(rng, 1.0, 4);
    PhaseSpaceSymbol expected(1.0);
    for (const auto& [m, c] : anti_standard_terms(op)) expected.add_term(m, c);
    CHECK(max_coeff_diff(alpha_symbol(op, -1.0), expected) < 1e-12);
  }
}

TEST_CASE("Weyl symbol matches symmetrized products") {
  for (unsigned m = 0; m <= 3; ++m) {
    for (unsigned n = 0; n <= 3; ++n) {
      const auto op = OperatorExpr::monomial(1.0, m, n);
      const auto w = oracle::weyl_symbol(op);
      CHECK(max_coeff_diff(alpha_symbol(op, -0.5), w) < 1e-12);
    }
  }
}

TEST_CASE("symbols agree with the ordering integral") {
  const double hbar = 0.8;
  for (double alpha : {-1.0, -0.5, -0.25, 0.0, 0.5}) {
    for (unsigned m = 0; m <= 2; ++m) {
      for (unsigned n = 0; n <= 2; ++n) {
        const auto sym = alpha_symbol(OperatorExpr::monomial(hbar, m, n), alpha);
        const double q = 0.6;
        const double p = -1.2;
        const complex ref = oracle::ordering_integral(m, n, alpha, hbar, q, p);
        const complex got = evaluate(sym, q, p);
        CHECK(std::abs(ref - got) <= 1e-6 * std::max(1.0, std::abs(got)));
      }
    }
  }
}

TEST_CASE("alpha_symbol is linear") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = u(rng);
    const auto a = random_operator(rng, 1.0, 3);
    const auto b = random_operator(rng, 1.0, 3);
    const complex s(0.3, -1.7);
    const auto lhs = alpha_symbol(a * s + b, alpha);
    const auto rhs = alpha_symbol(a, alpha) * s + alpha_symbol(b, alpha);
    CHECK(max_coeff_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("quantize inverts symbol") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = u(rng);
    const auto op = random_operator(rng, 1.0, 6);
    CHECK(max_coeff_diff(alpha_quantize(alpha_symbol(op, alpha), alpha), op) < 1e-12);
    // Idempotence of the composite.
    const auto once = alpha_quantize(alpha_symbol(op, alpha), alpha);
    CHECK(max_coeff_diff(alpha_quantize(alpha_symbol(once, alpha), alpha), once) < 1e-12);
  }
}

TEST_CASE("matrix representation sanity") {
  const auto q = matrix_representation(OperatorExpr::position(1.0), 6);
  CHECK(std::abs(q(0, 1) - complex(std::sqrt(0.5), 0.0)) < 1e-15);
  const auto p = matrix_representation(OperatorExpr::momentum(1.0), 6);
  const Eigen::MatrixXcd comm = (q * p - p * q).topLeftCorner(5, 5);
  CHECK((comm - complex(0.0, 1.0) * Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(matrix_representation(OperatorExpr::position(1.0), 1), InvalidInput);
  CHECK_THROWS_AS(matrix_representation(OperatorExpr::monomial(1.0, 2, 2), 4), InvalidInput);
}

TEST_CASE("rendering") {
  CHECK(OperatorExpr(1.0).to_string() == "0");
  CHECK(parse_operator("p q", 1.0).to_string() == "q p - i hbar");
  CHECK(parse_operator("2 q^2 - 0.5 p + 3", 1.0).to_string() == "2 q^2 - 0.5 p + 3");
  CHECK(parse_symbol("q p", 1.0).to_string() == "p q");
  CHECK(parse_symbol("(1 + 2 i) q", 1.0).to_string() == "(1 + 2 i) q");
}

TEST_CASE("binomial and falling factorial") {
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(3, 5) == 0);
  CHECK(falling_factorial(5, 2) == 20);
  CHECK(falling_factorial(4, 0) == 1);
}
