#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "phasespace/grid.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

/// Complex samples of P_alpha(q_i, p_j), rows indexed by q and columns by p.
struct DistributionField {
  UniformGrid qgrid;
  UniformGrid pgrid;
  Eigen::MatrixXcd values;
  double alpha = 0.0;
  double hbar = 1.0;
};

/// psi(q) and phi(p) pair whose product builds chi = psi phi* exp(-i p q / hbar).
struct SeparableSolution {
  PositionState psi;
  MomentumState phi;
  double hbar = 1.0;
};

/// P_alpha(q, p) = (1 / 2 pi hbar) int <q + alpha z| rho |q + (alpha + 1) z> exp(i p z / hbar) dz.
///
/// The z integral runs over z_k = k dq, |k| < N. Each diagonal rho(x, x + z_k)
/// is moved by alpha z_k with band-limited (Fourier) interpolation and zero
/// padding outside the grid, then summed against exp(i p_j z_k / hbar).
/// Throws ConfigurationError when pgrid reaches past pi hbar / dq.
///
/// For alpha outside [-1, 0] both arguments lie on the same side of q, so
/// near the grid ends the sum reads rho past the grid (as zero). The grid
/// then needs room beyond the state's support for the marginals to hold.
DistributionField compute_distribution(const DensityMatrix& rho, double alpha, const UniformGrid& pgrid);

/// Same distribution through the unitary-shift form
/// <q| e^{i p̂ alpha z / hbar} rho e^{-i p̂ alpha z / hbar} |q + z>: the two
/// translation operators act as phases on the momentum representation of rho,
/// after which the (q, q + z) entries are read back. Agrees with
/// compute_distribution to interpolation accuracy for band-limited rho.
DistributionField compute_distribution_shifted(const DensityMatrix& rho, double alpha, const UniformGrid& pgrid);

/// Wigner function; the alpha = -1/2 member.
DistributionField wigner(const DensityMatrix& rho, const UniformGrid& pgrid);

/// Complex standard-order distribution chi; the alpha = 0 member.
DistributionField sn_distribution(const DensityMatrix& rho, const UniformGrid& pgrid);

/// values[i][j] = psi(q_i) conj(phi(p_j)) exp(-i p_j q_i / hbar) / sqrt(2 pi hbar).
/// Integrates to <psi|to_position(phi)>, i.e. to 1 when phi = to_momentum(psi).
DistributionField assemble_separable(const SeparableSolution& sol, const UniformGrid& qgrid,
                                     const UniformGrid& pgrid);

struct Marginals {
  Eigen::VectorXd position;  // dp * sum_j values[i][j]
  Eigen::VectorXd momentum;  // dq * sum_i values[i][j]
  double max_imag_residue = 0.0;
};

Marginals marginals(const DistributionField& field);

/// dq dp * sum of all values.
std::complex<double> normalization(const DistributionField& field);

/// Largest |Im| over the field.
double max_imag(const DistributionField& field);

struct Centroid {
  double q = 0.0;
  double p = 0.0;
};

/// Real parts of <q> and <p> from the field, divided by its normalization.
Centroid centroid(const DistributionField& field);

/// <q^2> - <q>^2 from the position marginal.
double position_variance(const DistributionField& field);

}  // namespace phasespace
