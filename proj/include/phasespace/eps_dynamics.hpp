#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "phasespace/distributions.hpp"
#include "phasespace/grid.hpp"
#include "phasespace/operator_algebra.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

/// coeff * q^qpow * p^ppow with commuting q, p.
struct PolyTerm {
  double coeff = 0.0;
  unsigned qpow = 0;
  unsigned ppow = 0;
};

/// Real c-number polynomial H(q, p).
struct HamiltonianPolynomial {
  std::vector<PolyTerm> terms;
  double hbar = 1.0;

  /// Takes the symbol's coefficients at its numeric hbar. Throws InvalidInput
  /// if any coefficient has an imaginary part above 1e-14 of its size.
  static HamiltonianPolynomial from_symbol(const PhaseSpaceSymbol& sym);

  unsigned degree() const;
  double evaluate(double q, double p) const;
  /// Same polynomial with like terms merged and zero terms dropped.
  HamiltonianPolynomial simplified() const;
};

/// scalar * coefficient(q, p) * d^dq_order/dq * d^dp_order/dp; exactly one of
/// the two orders is non-zero.
struct GeneratorTerm {
  std::vector<PolyTerm> coefficient;
  unsigned dq_order = 0;
  unsigned dp_order = 0;
  std::complex<double> scalar;
};

struct EPSGenerator {
  std::vector<GeneratorTerm> terms;
  double hbar = 1.0;
};

/// chi(q, p, t) on the field grids.
struct ChiField {
  DistributionField field;
  double time = 0.0;
};

/// H(p + pi_q, q) - H(p, q + pi_p) expanded as
/// sum_{n=1}^{deg H} (-i hbar)^n / n! [d^nH/dp^n d^n/dq^n - d^nH/dq^n d^n/dp^n].
EPSGenerator build_generator(const HamiltonianPolynomial& h);

/// Largest |chi| on the outer rows and columns relative to max |chi|.
double boundary_ratio(const ChiField& chi);

/// Required boundary decay for apply_generator.
inline constexpr double kChiDecayTolerance = 1e-8;

/// dchi/dt = (generator chi) / (i hbar), with spectral derivatives along both
/// axes. Throws DomainTruncation when boundary_ratio exceeds 1e-8.
ChiField apply_generator(const EPSGenerator& g, const ChiField& chi);

/// chi = psi(q) conj(phi(p)) exp(-i p q / hbar) / sqrt(2 pi hbar) with
/// phi = to_momentum(psi, pgrid), at time 0.
ChiField initial_chi(const PositionState& psi, const UniformGrid& pgrid);

/// Estimated spectral radius of the discretized dchi/dt operator on the given
/// grids (power iteration from a fixed seed).
double spectral_radius(const EPSGenerator& g, const UniformGrid& qgrid, const UniformGrid& pgrid);

/// Largest stable RK4 step for a given spectral radius.
double stable_step(double spectral_radius);

struct StepRecord {
  std::size_t step = 0;
  double time = 0.0;
  std::complex<double> normalization;  // dq dp sum chi
  double l2_norm = 0.0;                // sqrt(dq dp sum |chi|^2)
};

struct EvolveOptions {
  /// Called at step 0, every `stride` steps and at the last step. 0 disables.
  std::size_t stride = 0;
  std::function<void(const ChiField&, std::size_t step)> on_snapshot;
};

struct EvolveResult {
  ChiField chi;
  std::vector<StepRecord> log;  // one record per step, including step 0
  double spectral_radius = 0.0;
  double dt_limit = 0.0;
};

/// Classical RK4 with step dt for `steps` steps. Throws StabilityError when
/// dt exceeds the estimated limit or when the L2 norm grows more than 10x.
/// Backward runs use the negated Hamiltonian with a positive dt.
EvolveResult evolve(const ChiField& chi0, const HamiltonianPolynomial& h, double dt, std::size_t steps,
                    const EvolveOptions& options = {});

/// Solves i hbar dpsi/dt = H(-i hbar d/dq, q) psi on psi0.grid and
/// i hbar dphi/dt = H(p, i hbar d/dp) phi on pgrid, starting from
/// phi0 = to_momentum(psi0, pgrid), exactly for t = steps * dt through the
/// eigendecomposition of the grid Hamiltonians. Throws
/// UnsupportedHamiltonian unless H = T(p) + V(q).
SeparableSolution separable_evolution(const PositionState& psi0, const HamiltonianPolynomial& h,
                                      const UniformGrid& pgrid, double dt, std::size_t steps);

}  // namespace phasespace
