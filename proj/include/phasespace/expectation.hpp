#pragma once

#include <complex>
#include <string>
#include <vector>

#include "phasespace/distributions.hpp"
#include "phasespace/operator_algebra.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

/// How a distribution is paired with a symbol in a phase-space average.
enum class Pairing {
  Plain,      ///< dq dp sum P_alpha * O_alpha
  Conjugate,  ///< dq dp sum conj(P_alpha) * O_alpha
  Dual,       ///< plain pairing with the symbol built at alpha' = -1 - alpha
};

const char* to_string(Pairing pairing);

/// Tr(rho O) with q̂ as multiplication and p̂ as spectral differentiation on
/// the density-matrix grid. Throws ResolutionError when the spectrum of
/// p̂^n rho carries more than 1e-6 of its weight in the top frequency band.
std::complex<double> expect_hilbert(const DensityMatrix& rho, const OperatorExpr& op);

/// Phase-space average. The caller supplies the symbol built at the alpha
/// the pairing expects: field.alpha for Plain and Conjugate, -1 - field.alpha
/// for Dual.
std::complex<double> expect_phase_space(const DistributionField& field, const PhaseSpaceSymbol& sym, Pairing pairing);

struct ExpectationReport {
  double alpha = 0.0;
  std::string operator_text;
  std::complex<double> hilbert;
  std::complex<double> phase_plain;
  std::complex<double> phase_conjugate;
  std::complex<double> phase_dual;
  double discrepancy_plain = 0.0;
  double discrepancy_conjugate = 0.0;
  double discrepancy_dual = 0.0;
  double tolerance = 0.0;

  /// Pairings whose discrepancy is within `tolerance`.
  std::vector<Pairing> certified() const;
  /// JSON text: {alpha, operator, hilbert: [re, im], pairings: {...},
  /// discrepancies: {...}, tolerance, certified: [...]}.
  std::string to_json() const;
};

/// Default certification tolerance for reports.
inline constexpr double kCertifyTolerance = 1e-5;

/// Computes P_alpha on `pgrid` and evaluates all three pairings against the
/// Hilbert-space trace.
ExpectationReport expectation_report(const DensityMatrix& rho, const OperatorExpr& op, double alpha,
                                     const UniformGrid& pgrid, double tolerance = kCertifyTolerance);

/// Same, reusing a field already computed from `rho`.
ExpectationReport expectation_report(const DensityMatrix& rho, const DistributionField& field, const OperatorExpr& op,
                                     double tolerance = kCertifyTolerance);

}  // namespace phasespace
