#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/expectation.hpp"
#include "phasespace/parser.hpp"

using namespace phasespace;

namespace {

const UniformGrid kGrid = centered_grid(128, 0.15625);

DensityMatrix pure(const PositionState& psi) { return density_from_pure(psi); }

}  // namespace

TEST_CASE("Hilbert-space trace basics") {
  const auto rho0 = pure(oscillator_eigenstate(0, kGrid, 1.0));
  CHECK(std::abs(expect_hilbert(rho0, parse_operator("1", 1.0)) - 1.0) < 1e-10);
  CHECK(std::abs(expect_hilbert(rho0, parse_operator("q p", 1.0)) - std::complex<double>(0.0, 0.5)) < 1e-6);
  CHECK(std::abs(expect_hilbert(rho0, parse_operator("q^2", 1.0)) - 0.5) < 1e-10);
  const auto coh = pure(coherent_state(1.0, 2.0, kGrid, 1.0));
  CHECK(std::abs(expect_hilbert(coh, parse_operator("q", 1.0)) - 1.0) < 1e-6);
  CHECK(std::abs(expect_hilbert(coh, parse_operator("p", 1.0)) - 2.0) < 1e-6);
}

TEST_CASE("Hilbert-space trace matches number-basis matrices") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (double hbar : {1.0, 0.5}) {
    const UniformGrid grid = centered_grid(128, 0.15625 * std::sqrt(hbar));
    for (int trial = 0; trial < 4; ++trial) {
      const double q0 = u(rng) * std::sqrt(hbar);
      const double p0 = u(rng) * std::sqrt(hbar);
      const auto rho = pure(coherent_state(q0, p0, grid, hbar));
      const auto amps = oracle::coherent_amplitudes(q0, p0, hbar, 48);
      for (unsigned m = 0; m <= 3; ++m) {
        for (unsigned n = 0; m + n <= 4; ++n) {
          const auto op = OperatorExpr::monomial(hbar, m, n);
          const auto ref = oracle::number_basis_expectation(op, amps);
          CHECK(std::abs(expect_hilbert(rho, op) - ref) < 1e-8);
        }
      }
    }
  }
  for (int n = 0; n < 3; ++n) {
    const auto rho = pure(oscillator_eigenstate(static_cast<unsigned>(n), kGrid, 1.0));
    const auto op = parse_operator("q^2 p^2 + p q", 1.0);
    CHECK(std::abs(expect_hilbert(rho, op) - oracle::number_basis_expectation(op, oracle::number_state(n, 8))) < 1e-8);
  }
}

TEST_CASE("unresolved momentum powers are reported") {
  const auto coarse = centered_grid(32, 0.5);
  const auto rho = pure(coherent_state(0.0, 3.0, coarse, 1.0));
  CHECK_THROWS_AS(expect_hilbert(rho, parse_operator("p^6", 1.0)), ResolutionError);
  CHECK_THROWS_AS(expect_hilbert(rho, parse_operator("q", 2.0)), InvalidInput);
}

TEST_CASE("constant symbol pairs to one") {
  const auto rho = pure(coherent_state(0.5, -0.5, kGrid, 1.0));
  for (double alpha : {-1.0, -0.5, 0.0, 0.5}) {
    const auto field = compute_distribution(rho, alpha, kGrid);
    const auto one = PhaseSpaceSymbol::identity(1.0);
    for (Pairing p : {Pairing::Plain, Pairing::Conjugate, Pairing::Dual}) {
      CHECK(std::abs(expect_phase_space(field, one, p) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("Weyl point pairs every way") {
  const auto rho = pure(oscillator_eigenstate(0, kGrid, 1.0));
  const auto report = expectation_report(rho, parse_operator("q^2", 1.0), -0.5, kGrid);
  CHECK(std::abs(report.hilbert - 0.5) < 1e-6);
  CHECK(report.discrepancy_plain < 1e-6);
  CHECK(report.discrepancy_conjugate < 1e-6);
  CHECK(report.discrepancy_dual < 1e-6);
  // alpha = -1 - alpha here, so dual and plain are the same sum.
  CHECK(report.phase_dual == report.phase_plain);
}

TEST_CASE("standard order needs conjugation or the dual symbol") {
  const auto rho = pure(oscillator_eigenstate(0, kGrid, 1.0));
  const auto report = expectation_report(rho, parse_operator("q p", 1.0), 0.0, kGrid);
  CHECK(std::abs(report.hilbert - std::complex<double>(0.0, 0.5)) < 1e-6);
  CHECK(report.discrepancy_conjugate < 1e-6);
  CHECK(report.discrepancy_dual < 1e-6);
  CHECK(report.discrepancy_plain > 0.5);
  const auto certified = report.certified();
  CHECK(certified.size() == 2);

  const auto j = nlohmann::json::parse(report.to_json());
  CHECK(j.at("operator") == "q p");
  CHECK(j.at("certified").size() == 2);
  CHECK(j.at("hilbert").at(1).get<double>() == doctest::Approx(0.5));
  CHECK(j.at("discrepancies").contains("dual"));
}

TEST_CASE("dual and conjugate pairings reproduce the trace for every alpha") {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-1.5, 0.5);
  const auto rho = mix({{pure(oscillator_eigenstate(1, kGrid, 1.0)), 0.3},
                        {pure(coherent_state(0.7, -0.4, kGrid, 1.0)), 0.7}});
  const auto op = parse_operator("q^2 p + 0.5 p^3 - q", 1.0);
  const auto hilbert = expect_hilbert(rho, op);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = u(rng);
    const auto report = expectation_report(rho, op, alpha, kGrid);
    CHECK(std::abs(report.hilbert - hilbert) < 1e-14);
    CHECK(report.discrepancy_dual < 1e-6);
    CHECK(report.discrepancy_conjugate < 1e-6);
  }
}

TEST_CASE("pairings are linear") {
  const auto rho_a = pure(oscillator_eigenstate(0, kGrid, 1.0));
  const auto rho_b = pure(coherent_state(1.0, 1.0, kGrid, 1.0));
  const auto fa = compute_distribution(rho_a, 0.0, kGrid);
  const auto fb = compute_distribution(rho_b, 0.0, kGrid);
  auto fsum = fa;
  fsum.values = 0.25 * fa.values + 0.75 * fb.values;
  const auto s1 = parse_symbol("q p", 1.0);
  const auto s2 = parse_symbol("p^2 + 2 i q", 1.0);
  for (Pairing p : {Pairing::Plain, Pairing::Conjugate}) {
    const auto lhs = expect_phase_space(fsum, s1, p);
    const auto rhs = 0.25 * expect_phase_space(fa, s1, p) + 0.75 * expect_phase_space(fb, s1, p);
    CHECK(std::abs(lhs - rhs) < 1e-12);
    const auto combo = expect_phase_space(fa, s1 + s2 * std::complex<double>(2.0, 0.0), p);
    CHECK(std::abs(combo - (expect_phase_space(fa, s1, p) + 2.0 * expect_phase_space(fa, s2, p))) < 1e-12);
  }
}

TEST_CASE("mismatched inputs") {
  const auto rho = pure(oscillator_eigenstate(0, kGrid, 1.0));
  const auto field = compute_distribution(rho, 0.0, kGrid);
  CHECK_THROWS_AS(expect_phase_space(field, parse_symbol("q", 2.0), Pairing::Plain), InvalidInput);
  const auto other = pure(oscillator_eigenstate(0, centered_grid(128, 0.125), 1.0));
  CHECK_THROWS_AS(expectation_report(other, field, parse_operator("q", 1.0)), InvalidInput);
}
