#include "phasespace/expectation.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <numbers>

#include "phasespace/errors.hpp"
#include "phasespace/fourier.hpp"
#include "phasespace/hbar_series.hpp"

namespace phasespace {

namespace {

using Index = Eigen::Index;

// Relative weight allowed in the outer quarter of the spectrum.
constexpr double kSpectralTail = 1e-6;

// Powers x^k of every grid point, k in [0, max_power].
Eigen::MatrixXd power_table(const UniformGrid& grid, unsigned max_power) {
  Eigen::MatrixXd table(static_cast<Index>(grid.count), max_power + 1);
  for (std::size_t i = 0; i < grid.count; ++i) {
    double v = 1.0;
    for (unsigned k = 0; k <= max_power; ++k) {
      table(static_cast<Index>(i), k) = v;
      v *= grid.point(i);
    }
  }
  return table;
}

}  // namespace

const char* to_string(Pairing pairing) {
  switch (pairing) {
    case Pairing::Plain:
      return "plain";
    case Pairing::Conjugate:
      return "conjugate";
    case Pairing::Dual:
      return "dual";
  }
  return "unknown";
}

std::complex<double> expect_hilbert(const DensityMatrix& rho, const OperatorExpr& op) {
  if (rho.hbar != op.hbar()) throw InvalidInput("operator and density matrix carry different hbar");
  rho.grid.validate(kMinTransformCount);
  const std::size_t n = rho.grid.count;
  const auto ni = static_cast<Index>(n);
  if (rho.entries.rows() != ni || rho.entries.cols() != ni) {
    throw InvalidInput("density matrix shape does not match its grid");
  }

  // Column spectra of rho along its first (ket) argument. Eigen is
  // column-major, so each column is contiguous.
  Eigen::MatrixXcd spectrum = rho.entries;
  FftPlan(n, FftDirection::Forward, n, 1, n).execute(spectrum.data());
  const FftPlan backward(n, FftDirection::Backward, n, 1, n);

  Eigen::VectorXd momentum(ni);
  Eigen::Array<bool, Eigen::Dynamic, 1> outer(ni);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * rho.grid.step);
  for (std::size_t f = 0; f < n; ++f) {
    const long sf = signed_frequency(f, n);
    const bool nyquist = 2 * static_cast<std::size_t>(std::abs(sf)) == n;
    momentum[static_cast<Index>(f)] = nyquist ? 0.0 : rho.hbar * dk * static_cast<double>(sf);
    outer[static_cast<Index>(f)] = 8 * static_cast<std::size_t>(std::abs(sf)) > 3 * n;
  }

  std::map<unsigned, Eigen::VectorXcd> diagonal_by_ppow;  // diag of p̂^n rho
  unsigned max_q = 0;
  for (const auto& [m, c] : op.terms()) {
    max_q = std::max(max_q, m.qpow);
    if (diagonal_by_ppow.count(m.ppow) != 0) continue;
    Eigen::MatrixXcd work = spectrum;
    double total = 0.0;
    double tail = 0.0;
    for (Index f = 0; f < ni; ++f) {
      const double factor = std::pow(momentum[f], static_cast<double>(m.ppow));
      work.row(f) *= factor;
      const double w = work.row(f).squaredNorm();
      total += w;
      if (outer[f]) tail += w;
    }
    if (total > 0.0 && std::sqrt(tail / total) > kSpectralTail) {
      throw ResolutionError("p^" + std::to_string(m.ppow) + " is not resolved on this grid (spectral tail " +
                            format_number(std::sqrt(tail / total)) + ")");
    }
    backward.execute(work.data());
    diagonal_by_ppow.emplace(m.ppow, work.diagonal() / static_cast<double>(n));
  }

  const Eigen::MatrixXd qpow = power_table(rho.grid, max_q);
  std::complex<double> acc{};
  for (const auto& [m, c] : op.terms()) {
    const Eigen::VectorXcd& diag = diagonal_by_ppow.at(m.ppow);
    std::complex<double> term{};
    for (Index i = 0; i < ni; ++i) term += qpow(i, m.qpow) * diag[i];
    acc += c.evaluate(op.hbar()) * term;
  }
  return acc * rho.grid.step;
}

std::complex<double> expect_phase_space(const DistributionField& field, const PhaseSpaceSymbol& sym, Pairing pairing) {
  if (field.hbar != sym.hbar()) throw InvalidInput("symbol and field carry different hbar");
  const auto nq = static_cast<Index>(field.qgrid.count);
  const auto np = static_cast<Index>(field.pgrid.count);
  if (field.values.rows() != nq || field.values.cols() != np) {
    throw InvalidInput("field shape does not match its grids");
  }
  unsigned max_q = 0;
  unsigned max_p = 0;
  for (const auto& [m, c] : sym.terms()) {
    max_q = std::max(max_q, m.qpow);
    max_p = std::max(max_p, m.ppow);
  }
  const Eigen::MatrixXd qpow = power_table(field.qgrid, max_q);
  const Eigen::MatrixXd ppow = power_table(field.pgrid, max_p);

  Eigen::MatrixXcd symbol_grid = Eigen::MatrixXcd::Zero(nq, np);
  for (const auto& [m, c] : sym.terms()) {
    symbol_grid += c.evaluate(sym.hbar()) * (qpow.col(m.qpow) * ppow.col(m.ppow).transpose()).cast<std::complex<double>>();
  }
  const std::complex<double> sum = pairing == Pairing::Conjugate
                                       ? field.values.conjugate().cwiseProduct(symbol_grid).sum()
                                       : field.values.cwiseProduct(symbol_grid).sum();
  return sum * field.qgrid.step * field.pgrid.step;
}

std::vector<Pairing> ExpectationReport::certified() const {
  std::vector<Pairing> out;
  if (discrepancy_plain <= tolerance) out.push_back(Pairing::Plain);
  if (discrepancy_conjugate <= tolerance) out.push_back(Pairing::Conjugate);
  if (discrepancy_dual <= tolerance) out.push_back(Pairing::Dual);
  return out;
}

std::string ExpectationReport::to_json() const {
  auto pair = [](std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); };
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["operator"] = operator_text;
  j["hilbert"] = pair(hilbert);
  j["pairings"] = {{"plain", pair(phase_plain)}, {"conjugate", pair(phase_conjugate)}, {"dual", pair(phase_dual)}};
  j["discrepancies"] = {
      {"plain", discrepancy_plain}, {"conjugate", discrepancy_conjugate}, {"dual", discrepancy_dual}};
  j["tolerance"] = tolerance;
  auto names = nlohmann::json::array();
  for (Pairing p : certified()) names.push_back(to_string(p));
  j["certified"] = names;
  return j.dump(2);
}

ExpectationReport expectation_report(const DensityMatrix& rho, const DistributionField& field, const OperatorExpr& op,
                                     double tolerance) {
  if (!(field.qgrid == rho.grid) || field.hbar != rho.hbar) {
    throw InvalidInput("field was not computed from this density matrix grid");
  }
  ExpectationReport report;
  report.alpha = field.alpha;
  report.operator_text = op.to_string();
  report.tolerance = tolerance;
  report.hilbert = expect_hilbert(rho, op);
  const PhaseSpaceSymbol own = alpha_symbol(op, field.alpha);
  const PhaseSpaceSymbol dual = alpha_symbol(op, -1.0 - field.alpha);
  report.phase_plain = expect_phase_space(field, own, Pairing::Plain);
  report.phase_conjugate = expect_phase_space(field, own, Pairing::Conjugate);
  report.phase_dual = expect_phase_space(field, dual, Pairing::Dual);
  report.discrepancy_plain = std::abs(report.phase_plain - report.hilbert);
  report.discrepancy_conjugate = std::abs(report.phase_conjugate - report.hilbert);
  report.discrepancy_dual = std::abs(report.phase_dual - report.hilbert);
  return report;
}

ExpectationReport expectation_report(const DensityMatrix& rho, const OperatorExpr& op, double alpha,
                                     const UniformGrid& pgrid, double tolerance) {
  return expectation_report(rho, compute_distribution(rho, alpha, pgrid), op, tolerance);
}

}  // namespace phasespace
