#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "phasespace/grid.hpp"

namespace phasespace {

/// Wavefunction samples psi(q_k) on a position grid.
struct PositionState {
  UniformGrid grid;
  Eigen::VectorXcd samples;
  double hbar = 1.0;
};

/// Wavefunction samples phi(p_k) on a momentum grid.
struct MomentumState {
  UniformGrid grid;
  Eigen::VectorXcd samples;
  double hbar = 1.0;
};

/// Density-matrix kernel rho(q_i, q_j) on a position grid; the trace is
/// sum_k rho(q_k, q_k) * step.
struct DensityMatrix {
  UniformGrid grid;
  Eigen::MatrixXcd entries;
  double hbar = 1.0;
};

/// sum |psi_k|^2 * step
double norm_squared(const PositionState& psi);
double norm_squared(const MomentumState& phi);
PositionState normalized(PositionState psi);

/// Largest |psi| at either end of the grid.
double edge_magnitude(const Eigen::VectorXcd& samples);

/// Required decay at the grid ends for reference states.
inline constexpr double kEdgeTolerance = 1e-10;

/// Hermite-Gaussian oscillator eigenstate psi_n (m = omega = 1).
/// Throws DomainTruncation if |psi_n| >= 1e-10 at a grid end.
PositionState oscillator_eigenstate(unsigned n, const UniformGrid& grid, double hbar);

/// (1/(pi hbar))^{1/4} exp(-(q - q0)^2 / 2 hbar + i p0 q / hbar).
PositionState coherent_state(double q0, double p0, const UniformGrid& grid, double hbar);

/// phi(p) = (2 pi hbar)^{-1/2} sum_k psi(q_k) exp(-i p q_k / hbar) dq.
/// Throws DomainTruncation when pgrid reaches past the alias limit
/// pi hbar / dq or misses more than 1e-6 of the norm.
MomentumState to_momentum(const PositionState& psi, const UniformGrid& pgrid);

/// Inverse transform onto a position grid (same checks with roles swapped).
PositionState to_position(const MomentumState& phi, const UniformGrid& qgrid);

/// rho = |psi><psi|. Throws InvalidInput unless psi is normalized to 1e-8.
DensityMatrix density_from_pure(const PositionState& psi);

/// Convex combination. Weights must be non-negative and sum to 1 within
/// 1e-12; all matrices must share grid and hbar.
DensityMatrix mix(const std::vector<std::pair<DensityMatrix, double>>& states);

std::complex<double> trace(const DensityMatrix& rho);
/// Tr(rho^2) with quadrature weights.
double purity(const DensityMatrix& rho);
/// max |rho_ij - conj(rho_ji)|
double hermiticity_error(const DensityMatrix& rho);
/// Eigenvalues of the discretized operator (entries * step), ascending.
Eigen::VectorXd spectrum(const DensityMatrix& rho);

}  // namespace phasespace
