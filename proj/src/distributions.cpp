#include "phasespace/distributions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasespace/errors.hpp"
#include "phasespace/fourier.hpp"
#include "phasespace/hbar_series.hpp"

namespace phasespace {

namespace {

using Index = Eigen::Index;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_inputs(const DensityMatrix& rho, const UniformGrid& pgrid) {
  rho.grid.validate(kMinTransformCount);
  pgrid.validate(kMinTransformCount);
  const auto n = static_cast<Index>(rho.grid.count);
  if (rho.entries.rows() != n || rho.entries.cols() != n) {
    throw InvalidInput("density matrix shape does not match its grid");
  }
  if (!(rho.hbar > 0.0)) throw InvalidInput("hbar must be positive");
  const double limit = std::numbers::pi * rho.hbar / rho.grid.step;
  if (pgrid.extent() > limit * (1.0 + 1e-12)) {
    throw ConfigurationError("momentum grid extent " + format_number(pgrid.extent()) +
                             " exceeds the z-grid resolution limit pi*hbar/dq = " + format_number(limit));
  }
}

// Padded FFT length for shifts of up to |alpha| (N - 1) points.
std::size_t padded_length(std::size_t n, double alpha) {
  return next_power_of_two(static_cast<std::size_t>(std::ceil((1.0 + std::abs(alpha)) * static_cast<double>(n))));
}

bool is_integer(double s) { return s == std::round(s); }

// True when the fractional grid position lies inside [0, n - 1].
bool inside(double x, std::size_t n) { return x >= 0.0 && x <= static_cast<double>(n - 1); }

// Sums the sheared samples against the momentum kernel:
// P(q_i, p_j) = dq / (2 pi hbar) sum_k sheared(i, k) exp(i p_j z_k / hbar).
DistributionField fourier_sum(const Eigen::MatrixXcd& sheared, const DensityMatrix& rho, double alpha,
                              const UniformGrid& pgrid) {
  const auto n = static_cast<Index>(rho.grid.count);
  const Index nz = 2 * n - 1;
  const auto m = static_cast<Index>(pgrid.count);
  Eigen::MatrixXcd kernel(nz, m);
  for (Index k = 0; k < nz; ++k) {
    const double z = static_cast<double>(k - (n - 1)) * rho.grid.step;
    for (Index j = 0; j < m; ++j) {
      kernel(k, j) = std::polar(1.0, pgrid.point(static_cast<std::size_t>(j)) * z / rho.hbar);
    }
  }
  DistributionField field{rho.grid, pgrid, Eigen::MatrixXcd(n, m), alpha, rho.hbar};
  field.values.noalias() = sheared * kernel;
  field.values *= rho.grid.step / (kTwoPi * rho.hbar);
  return field;
}

}  // namespace

DistributionField compute_distribution(const DensityMatrix& rho, double alpha, const UniformGrid& pgrid) {
  check_inputs(rho, pgrid);
  if (!std::isfinite(alpha)) throw InvalidInput("alpha must be finite");
  const std::size_t n = rho.grid.count;
  const std::size_t len = padded_length(n, alpha);
  const FftPlan forward(len, FftDirection::Forward);
  const FftPlan backward(len, FftDirection::Backward);

  // sheared(i, k + n - 1) = rho(q_i + alpha z_k, q_i + (alpha + 1) z_k)
  Eigen::MatrixXcd sheared = Eigen::MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(2 * n - 1));
  std::vector<std::complex<double>> diag(len);
  const auto ni = static_cast<long>(n);
  for (long k = -(ni - 1); k <= ni - 1; ++k) {
    const double shift = alpha * static_cast<double>(k);
    const Index col = k + ni - 1;
    // Diagonal d(x) = rho(x, x + k), zero where x + k leaves the grid.
    const long lo = std::max(0L, -k);
    const long hi = std::min(ni, ni - k);
    if (is_integer(shift)) {
      const auto s = static_cast<long>(shift);
      for (long i = 0; i < ni; ++i) {
        const long x = i + s;
        if (x >= lo && x < hi) sheared(i, col) = rho.entries(x, x + k);
      }
      continue;
    }
    std::fill(diag.begin(), diag.end(), std::complex<double>{});
    for (long x = lo; x < hi; ++x) diag[static_cast<std::size_t>(x)] = rho.entries(x, x + k);
    forward.execute(diag.data());
    for (std::size_t f = 0; f < len; ++f) {
      const double freq = static_cast<double>(signed_frequency(f, len));
      diag[f] *= std::polar(1.0 / static_cast<double>(len), kTwoPi * freq * shift / static_cast<double>(len));
    }
    backward.execute(diag.data());
    for (long i = 0; i < ni; ++i) {
      const double x = static_cast<double>(i) + shift;
      if (inside(x, n) && inside(x + static_cast<double>(k), n)) sheared(i, col) = diag[static_cast<std::size_t>(i)];
    }
  }
  return fourier_sum(sheared, rho, alpha, pgrid);
}

DistributionField compute_distribution_shifted(const DensityMatrix& rho, double alpha, const UniformGrid& pgrid) {
  check_inputs(rho, pgrid);
  if (!std::isfinite(alpha)) throw InvalidInput("alpha must be finite");
  const std::size_t n = rho.grid.count;
  const std::size_t len = padded_length(n, alpha);
  const auto L = static_cast<long>(len);
  const auto ni = static_cast<long>(n);

  // Momentum representation of rho on the padded box: row transform then
  // column transform of the zero-padded kernel.
  std::vector<std::complex<double>> spec(len * len);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      spec[x * len + y] = rho.entries(static_cast<Index>(x), static_cast<Index>(y));
    }
  }
  FftPlan(len, FftDirection::Forward, len, 1, len).execute(spec.data());
  FftPlan(len, FftDirection::Forward, len, len, 1).execute(spec.data());

  // Frequencies in signed order so that f1 + f2 is the true (unfolded) sum.
  std::vector<long> freq(len);
  for (std::size_t f = 0; f < len; ++f) freq[f] = signed_frequency(f, len);

  const FftPlan backward(len, FftDirection::Backward);
  Eigen::MatrixXcd sheared = Eigen::MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(2 * n - 1));
  std::vector<std::complex<double>> diagonal_sum(2 * len);
  std::vector<std::complex<double>> folded(len);
  std::vector<std::complex<double>> column_phase(len);
  const double inv_area = 1.0 / (static_cast<double>(len) * static_cast<double>(len));

  for (long k = -(ni - 1); k <= ni - 1; ++k) {
    const double shift = alpha * static_cast<double>(k);
    // Reading entry (x, x + k) contributes exp(2 pi i f2 k / L) per column frequency.
    for (std::size_t f2 = 0; f2 < len; ++f2) {
      column_phase[f2] = std::polar(1.0, kTwoPi * static_cast<double>(freq[f2] * k) / static_cast<double>(L));
    }
    std::fill(diagonal_sum.begin(), diagonal_sum.end(), std::complex<double>{});
    for (std::size_t f1 = 0; f1 < len; ++f1) {
      const std::complex<double>* row = &spec[f1 * len];
      for (std::size_t f2 = 0; f2 < len; ++f2) {
        diagonal_sum[static_cast<std::size_t>(freq[f1] + freq[f2] + L)] += row[f2] * column_phase[f2];
      }
    }
    // e^{i p̂ a / hbar} rho e^{-i p̂ a / hbar} multiplies each component by the
    // phase of the summed frequency; fold back to L bins afterwards.
    std::fill(folded.begin(), folded.end(), std::complex<double>{});
    for (long c = -L; c < L; ++c) {
      const auto& value = diagonal_sum[static_cast<std::size_t>(c + L)];
      if (value == std::complex<double>{}) continue;
      folded[static_cast<std::size_t>(((c % L) + L) % L)] +=
          value * std::polar(inv_area, kTwoPi * static_cast<double>(c) * shift / static_cast<double>(L));
    }
    backward.execute(folded.data());
    const Index col = k + ni - 1;
    for (long i = 0; i < ni; ++i) {
      const double x = static_cast<double>(i) + shift;
      if (inside(x, n) && inside(x + static_cast<double>(k), n)) sheared(i, col) = folded[static_cast<std::size_t>(i)];
    }
  }
  return fourier_sum(sheared, rho, alpha, pgrid);
}

DistributionField wigner(const DensityMatrix& rho, const UniformGrid& pgrid) {
  return compute_distribution(rho, -0.5, pgrid);
}

DistributionField sn_distribution(const DensityMatrix& rho, const UniformGrid& pgrid) {
  return compute_distribution(rho, 0.0, pgrid);
}

DistributionField assemble_separable(const SeparableSolution& sol, const UniformGrid& qgrid, const UniformGrid& pgrid) {
  if (!(sol.psi.grid == qgrid) || !(sol.phi.grid == pgrid)) {
    throw InvalidInput("separable solution grids do not match the requested field grids");
  }
  if (sol.psi.hbar != sol.hbar || sol.phi.hbar != sol.hbar) {
    throw InvalidInput("separable solution components carry different hbar");
  }
  const auto nq = static_cast<Index>(qgrid.count);
  const auto np = static_cast<Index>(pgrid.count);
  const double scale = 1.0 / std::sqrt(kTwoPi * sol.hbar);
  DistributionField field{qgrid, pgrid, Eigen::MatrixXcd(nq, np), 0.0, sol.hbar};
  for (Index i = 0; i < nq; ++i) {
    const double q = qgrid.point(static_cast<std::size_t>(i));
    for (Index j = 0; j < np; ++j) {
      const double p = pgrid.point(static_cast<std::size_t>(j));
      field.values(i, j) = scale * sol.psi.samples[i] * std::conj(sol.phi.samples[j]) * std::polar(1.0, -p * q / sol.hbar);
    }
  }
  return field;
}

Marginals marginals(const DistributionField& field) {
  const Eigen::VectorXcd pos = field.values.rowwise().sum() * field.pgrid.step;
  const Eigen::VectorXcd mom = field.values.colwise().sum().transpose() * field.qgrid.step;
  Marginals out;
  out.position = pos.real();
  out.momentum = mom.real();
  out.max_imag_residue = std::max(pos.imag().cwiseAbs().maxCoeff(), mom.imag().cwiseAbs().maxCoeff());
  return out;
}

std::complex<double> normalization(const DistributionField& field) {
  return field.values.sum() * field.qgrid.step * field.pgrid.step;
}

double max_imag(const DistributionField& field) { return field.values.imag().cwiseAbs().maxCoeff(); }

Centroid centroid(const DistributionField& field) {
  std::complex<double> mq{};
  std::complex<double> mp{};
  for (Index i = 0; i < field.values.rows(); ++i) {
    const double q = field.qgrid.point(static_cast<std::size_t>(i));
    for (Index j = 0; j < field.values.cols(); ++j) {
      const double p = field.pgrid.point(static_cast<std::size_t>(j));
      mq += q * field.values(i, j);
      mp += p * field.values(i, j);
    }
  }
  const double area = field.qgrid.step * field.pgrid.step;
  const double norm = normalization(field).real();
  return Centroid{(mq * area).real() / norm, (mp * area).real() / norm};
}

double position_variance(const DistributionField& field) {
  const Eigen::VectorXd density = marginals(field).position;
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (Index i = 0; i < density.size(); ++i) {
    const double q = field.qgrid.point(static_cast<std::size_t>(i));
    m0 += density[i];
    m1 += q * density[i];
    m2 += q * q * density[i];
  }
  m1 /= m0;
  m2 /= m0;
  return m2 - m1 * m1;
}

}  // namespace phasespace
