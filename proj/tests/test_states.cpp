#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/states.hpp"

using namespace phasespace;

namespace {

const UniformGrid kGrid = centered_grid(128, 0.15625);

double mean_q(const PositionState& psi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < psi.grid.count; ++k) {
    acc += psi.grid.point(k) * std::norm(psi.samples[static_cast<Eigen::Index>(k)]);
  }
  return acc * psi.grid.step;
}

double mean_p(const MomentumState& phi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < phi.grid.count; ++k) {
    acc += phi.grid.point(k) * std::norm(phi.samples[static_cast<Eigen::Index>(k)]);
  }
  return acc * phi.grid.step;
}

}  // namespace

TEST_CASE("ground state is the analytic Gaussian") {
  for (double hbar : {0.5, 1.0, 2.0}) {
    const auto psi = oscillator_eigenstate(0, kGrid, hbar);
    double worst = 0.0;
    for (std::size_t k = 0; k < kGrid.count; ++k) {
      worst = std::max(worst, std::abs(psi.samples[static_cast<Eigen::Index>(k)] -
                                       oracle::gaussian_ground(kGrid.point(k), hbar)));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("eigenstates are normalized, orthogonal and have parity") {
  std::vector<PositionState> states;
  for (unsigned n = 0; n < 6; ++n) states.push_back(oscillator_eigenstate(n, kGrid, 1.0));
  for (unsigned a = 0; a < states.size(); ++a) {
    CHECK(std::abs(norm_squared(states[a]) - 1.0) < 1e-8);
    for (unsigned b = a + 1; b < states.size(); ++b) {
      const std::complex<double> overlap = states[a].samples.dot(states[b].samples) * kGrid.step;
      CHECK(std::abs(overlap) < 1e-10);
    }
  }
  // Point count/2 sits at q = 0, so q_k and q_{N-k} mirror each other.
  const auto& psi1 = states[1];
  for (std::size_t k = 1; k < kGrid.count; ++k) {
    CHECK(std::abs(psi1.samples[static_cast<Eigen::Index>(k)] +
                   psi1.samples[static_cast<Eigen::Index>(kGrid.count - k)]) < 1e-14);
  }
}

TEST_CASE("narrow grids are rejected") {
  CHECK_THROWS_AS(oscillator_eigenstate(0, centered_grid(32, 0.1), 1.0), DomainTruncation);
  CHECK_THROWS_AS(coherent_state(5.0, 0.0, centered_grid(64, 0.2), 1.0), DomainTruncation);
  CHECK_THROWS_AS(oscillator_eigenstate(0, kGrid, -1.0), InvalidInput);
}

TEST_CASE("coherent state moments") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double q0 = u(rng);
    const double p0 = u(rng);
    const auto psi = coherent_state(q0, p0, kGrid, 1.0);
    CHECK(std::abs(mean_q(psi) - q0) < 1e-8);
    CHECK(std::abs(mean_p(to_momentum(psi, kGrid)) - p0) < 1e-6);
  }
  const auto c0 = coherent_state(0.0, 0.0, kGrid, 1.0);
  CHECK((c0.samples - oscillator_eigenstate(0, kGrid, 1.0).samples).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("momentum transform") {
  const auto psi = oscillator_eigenstate(0, kGrid, 1.0);
  const auto phi = to_momentum(psi, kGrid);
  double worst = 0.0;
  for (std::size_t k = 0; k < kGrid.count; ++k) {
    worst = std::max(worst, std::abs(phi.samples[static_cast<Eigen::Index>(k)] -
                                     oracle::gaussian_ground(kGrid.point(k), 1.0)));
  }
  CHECK(worst < 1e-10);

  // Shift theorem: e^{i p0 q / hbar} psi_0 has phi_0 displaced by p0.
  const double p0 = 10 * kGrid.step;
  const auto shifted = to_momentum(coherent_state(0.0, p0, kGrid, 1.0), kGrid);
  for (std::size_t k = 10; k < kGrid.count; ++k) {
    CHECK(std::abs(shifted.samples[static_cast<Eigen::Index>(k)] - phi.samples[static_cast<Eigen::Index>(k - 10)]) <
          1e-10);
  }

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = coherent_state(u(rng), u(rng), kGrid, 1.0);
    const auto back = to_position(to_momentum(c, kGrid), kGrid);
    CHECK(std::abs(norm_squared(to_momentum(c, kGrid)) - 1.0) < 1e-8);
    CHECK((back.samples - c.samples).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("aliasing and truncation are detected") {
  // Target grid wider than pi hbar / dq.
  CHECK_THROWS_AS(to_momentum(oscillator_eigenstate(0, kGrid, 1.0), centered_grid(256, 0.2)), DomainTruncation);
  // Target grid that misses the momentum support.
  CHECK_THROWS_AS(to_momentum(coherent_state(0.0, 4.0, kGrid, 1.0), centered_grid(16, 0.25)), DomainTruncation);
}

TEST_CASE("pure density matrices") {
  const auto psi = coherent_state(0.5, -1.0, kGrid, 1.0);
  const auto rho = density_from_pure(psi);
  CHECK(std::abs(trace(rho) - 1.0) < 1e-12);
  CHECK(std::abs(purity(rho) - 1.0) < 1e-6);
  CHECK(hermiticity_error(rho) < 1e-15);
  const Eigen::VectorXd ev = spectrum(rho);
  CHECK(std::abs(ev[ev.size() - 1] - 1.0) < 1e-8);
  CHECK(std::abs(ev[ev.size() - 2]) < 1e-8);

  auto unnormalized = psi;
  unnormalized.samples *= 1.1;
  CHECK_THROWS_AS(density_from_pure(unnormalized), InvalidInput);
}

TEST_CASE("mixtures") {
  const auto rho0 = density_from_pure(oscillator_eigenstate(0, kGrid, 1.0));
  const auto rho1 = density_from_pure(oscillator_eigenstate(1, kGrid, 1.0));
  const auto half = mix({{rho0, 0.5}, {rho1, 0.5}});
  CHECK(std::abs(purity(half) - 0.5) < 1e-6);
  CHECK(std::abs(trace(half) - 1.0) < 1e-12);

  // Oscillator-basis projection is diag(1/2, 1/2).
  const auto& e0 = oscillator_eigenstate(0, kGrid, 1.0).samples;
  const auto& e1 = oscillator_eigenstate(1, kGrid, 1.0).samples;
  const double h = kGrid.step;
  CHECK(std::abs((e0.adjoint() * half.entries * e0)(0, 0) * h * h - 0.5) < 1e-10);
  CHECK(std::abs((e1.adjoint() * half.entries * e1)(0, 0) * h * h - 0.5) < 1e-10);
  CHECK(std::abs((e0.adjoint() * half.entries * e1)(0, 0) * h * h) < 1e-10);

  CHECK(mix({{rho0, 1.0}}).entries == rho0.entries);
  CHECK(mix({{rho0, 1.0}, {rho1, 0.0}}).entries == rho0.entries);
  CHECK_THROWS_AS(mix({{rho0, 0.6}, {rho1, 0.6}}), InvalidInput);
  CHECK_THROWS_AS(mix({{rho0, -0.5}, {rho1, 1.5}}), InvalidInput);
  const auto other = density_from_pure(oscillator_eigenstate(0, centered_grid(128, 0.125), 1.0));
  CHECK_THROWS_AS(mix({{rho0, 0.5}, {other, 0.5}}), InvalidInput);
}

TEST_CASE("grid refinement leaves moments unchanged") {
  const auto coarse = coherent_state(0.7, 1.1, centered_grid(128, 0.15625), 1.0);
  const auto fine = coherent_state(0.7, 1.1, centered_grid(256, 0.078125), 1.0);
  CHECK(std::abs(mean_q(coarse) - mean_q(fine)) < 1e-8);
  CHECK(std::abs(mean_p(to_momentum(coarse, centered_grid(128, 0.15625))) -
                 mean_p(to_momentum(fine, centered_grid(128, 0.15625)))) < 1e-8);
}
