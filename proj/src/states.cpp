#include "phasespace/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasespace/errors.hpp"
#include "phasespace/hbar_series.hpp"

namespace phasespace {

namespace {

void check_hbar(double hbar) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("hbar must be a positive finite number");
}

void check_edges(const Eigen::VectorXcd& samples, const char* what) {
  const double edge = edge_magnitude(samples);
  if (!(edge < kEdgeTolerance)) {
    throw DomainTruncation(std::string(what) + " does not decay inside the grid: |psi| = " + format_number(edge) +
                           " at the boundary");
  }
}

// Direct quadrature of f(y_j) = scale * sum_k g(x_k) exp(sign i y_j x_k / hbar) dx.
Eigen::VectorXcd fourier_quadrature(const Eigen::VectorXcd& g, const UniformGrid& from, const UniformGrid& to,
                                    double hbar, double sign) {
  const double scale = from.step / std::sqrt(2.0 * std::numbers::pi * hbar);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(to.count));
  for (std::size_t j = 0; j < to.count; ++j) {
    const double y = to.point(j);
    std::complex<double> acc{};
    for (std::size_t k = 0; k < from.count; ++k) {
      acc += g[static_cast<Eigen::Index>(k)] * std::polar(1.0, sign * y * from.point(k) / hbar);
    }
    out[static_cast<Eigen::Index>(j)] = scale * acc;
  }
  return out;
}

void check_transform_grids(const UniformGrid& from, const UniformGrid& to, double hbar) {
  from.validate(kMinTransformCount);
  to.validate(kMinTransformCount);
  const double alias_limit = std::numbers::pi * hbar / from.step;
  if (to.extent() > alias_limit * (1.0 + 1e-12)) {
    throw DomainTruncation("target grid extent " + format_number(to.extent()) + " exceeds the alias limit " +
                           format_number(alias_limit));
  }
}

void check_mass(double before, double after) {
  if (std::abs(after / before - 1.0) > 1e-6) {
    throw DomainTruncation("transform lost norm: " + format_number(before) + " -> " + format_number(after) +
                           " (tail outside the target grid)");
  }
}

}  // namespace

double edge_magnitude(const Eigen::VectorXcd& samples) {
  if (samples.size() == 0) return 0.0;
  return std::max(std::abs(samples[0]), std::abs(samples[samples.size() - 1]));
}

double norm_squared(const PositionState& psi) { return psi.samples.squaredNorm() * psi.grid.step; }
double norm_squared(const MomentumState& phi) { return phi.samples.squaredNorm() * phi.grid.step; }

PositionState normalized(PositionState psi) {
  const double n = norm_squared(psi);
  if (!(n > 0.0)) throw InvalidInput("cannot normalize a zero state");
  psi.samples /= std::sqrt(n);
  return psi;
}

PositionState oscillator_eigenstate(unsigned n, const UniformGrid& grid, double hbar) {
  check_hbar(hbar);
  grid.validate(2);
  const auto count = static_cast<Eigen::Index>(grid.count);
  Eigen::VectorXcd samples(count);
  const double ground = std::pow(1.0 / (std::numbers::pi * hbar), 0.25);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double q = grid.point(static_cast<std::size_t>(k));
    // Normalized Hermite-function recurrence in x = q / sqrt(hbar).
    double prev = 0.0;
    double cur = ground * std::exp(-q * q / (2.0 * hbar));
    for (unsigned j = 1; j <= n; ++j) {
      const double next = std::sqrt(2.0 / (hbar * j)) * q * cur - std::sqrt((j - 1.0) / j) * prev;
      prev = cur;
      cur = next;
    }
    samples[k] = cur;
  }
  check_edges(samples, "oscillator eigenstate");
  return normalized(PositionState{grid, std::move(samples), hbar});
}

PositionState coherent_state(double q0, double p0, const UniformGrid& grid, double hbar) {
  check_hbar(hbar);
  grid.validate(2);
  if (!std::isfinite(q0) || !std::isfinite(p0)) throw InvalidInput("coherent state centre must be finite");
  const auto count = static_cast<Eigen::Index>(grid.count);
  Eigen::VectorXcd samples(count);
  const double amp = std::pow(1.0 / (std::numbers::pi * hbar), 0.25);
  for (Eigen::Index k = 0; k < count; ++k) {
    const double q = grid.point(static_cast<std::size_t>(k));
    samples[k] = amp * std::exp(-(q - q0) * (q - q0) / (2.0 * hbar)) * std::polar(1.0, p0 * q / hbar);
  }
  check_edges(samples, "coherent state");
  return normalized(PositionState{grid, std::move(samples), hbar});
}

MomentumState to_momentum(const PositionState& psi, const UniformGrid& pgrid) {
  check_transform_grids(psi.grid, pgrid, psi.hbar);
  MomentumState phi{pgrid, fourier_quadrature(psi.samples, psi.grid, pgrid, psi.hbar, -1.0), psi.hbar};
  check_mass(norm_squared(psi), norm_squared(phi));
  return phi;
}

PositionState to_position(const MomentumState& phi, const UniformGrid& qgrid) {
  check_transform_grids(phi.grid, qgrid, phi.hbar);
  PositionState psi{qgrid, fourier_quadrature(phi.samples, phi.grid, qgrid, phi.hbar, +1.0), phi.hbar};
  check_mass(norm_squared(phi), norm_squared(psi));
  return psi;
}

DensityMatrix density_from_pure(const PositionState& psi) {
  check_hbar(psi.hbar);
  if (psi.samples.size() != static_cast<Eigen::Index>(psi.grid.count)) {
    throw InvalidInput("state sample count does not match its grid");
  }
  const double n = norm_squared(psi);
  if (std::abs(n - 1.0) > 1e-8) {
    throw InvalidInput("state is not normalized (norm^2 = " + format_number(n) + ")");
  }
  return DensityMatrix{psi.grid, psi.samples * psi.samples.adjoint(), psi.hbar};
}

DensityMatrix mix(const std::vector<std::pair<DensityMatrix, double>>& states) {
  if (states.empty()) throw InvalidInput("mix needs at least one state");
  const auto& first = states.front().first;
  double total = 0.0;
  for (const auto& [rho, w] : states) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("mixture weights must be non-negative");
    if (!(rho.grid == first.grid)) throw InvalidInput("mixture components live on different grids");
    if (rho.hbar != first.hbar) throw InvalidInput("mixture components have different hbar");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidInput("mixture weights sum to " + format_number(total) + ", expected 1");
  }
  DensityMatrix out{first.grid, Eigen::MatrixXcd::Zero(first.entries.rows(), first.entries.cols()), first.hbar};
  for (const auto& [rho, w] : states) {
    out.entries += w * rho.entries;
  }
  return out;
}

std::complex<double> trace(const DensityMatrix& rho) { return rho.entries.trace() * rho.grid.step; }

double purity(const DensityMatrix& rho) {
  return (rho.entries * rho.entries).trace().real() * rho.grid.step * rho.grid.step;
}

double hermiticity_error(const DensityMatrix& rho) {
  return (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
}

Eigen::VectorXd spectrum(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries * rho.grid.step, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

}  // namespace phasespace
