#include "phasespace/eps_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "phasespace/errors.hpp"
#include "phasespace/fourier.hpp"
#include "phasespace/hbar_series.hpp"

namespace phasespace {

namespace {

using Index = Eigen::Index;
using cplx = std::complex<double>;

double factorial(unsigned n) {
  double f = 1.0;
  for (unsigned k = 2; k <= n; ++k) f *= k;
  return f;
}

double eval_poly(const std::vector<PolyTerm>& terms, double q, double p) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coeff * std::pow(q, t.qpow) * std::pow(p, t.ppow);
  return acc;
}

// n-th partial derivative in q (wrt_q) or p.
std::vector<PolyTerm> derivative(const std::vector<PolyTerm>& terms, unsigned n, bool wrt_q) {
  std::vector<PolyTerm> out;
  for (const auto& t : terms) {
    const unsigned k = wrt_q ? t.qpow : t.ppow;
    if (k < n) continue;
    PolyTerm d = t;
    d.coeff *= static_cast<double>(falling_factorial(k, n));
    (wrt_q ? d.qpow : d.ppow) -= n;
    out.push_back(d);
  }
  return out;
}

// Wavenumbers 2 pi f / (N step) in FFT bin order.
Eigen::VectorXd wavenumbers(const UniformGrid& grid) {
  Eigen::VectorXd k(static_cast<Index>(grid.count));
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(grid.count) * grid.step);
  for (std::size_t f = 0; f < grid.count; ++f) {
    k[static_cast<Index>(f)] = dk * static_cast<double>(signed_frequency(f, grid.count));
  }
  return k;
}

// (i k)^order per bin divided by N; odd orders drop the Nyquist bin.
Eigen::VectorXcd derivative_factors(const UniformGrid& grid, unsigned order) {
  const Eigen::VectorXd k = wavenumbers(grid);
  const std::size_t n = grid.count;
  Eigen::VectorXcd out(k.size());
  for (Index f = 0; f < k.size(); ++f) {
    const bool nyquist = n % 2 == 0 && static_cast<std::size_t>(f) == n / 2;
    out[f] = (nyquist && order % 2 == 1) ? cplx{} : std::pow(cplx(0.0, k[f]), static_cast<int>(order)) / static_cast<double>(n);
  }
  return out;
}

// Discretized chi -> (generator chi) / (i hbar) on fixed grids.
class Rhs {
 public:
  Rhs(const EPSGenerator& g, const UniformGrid& qgrid, const UniformGrid& pgrid)
      : nq_(qgrid.count),
        np_(pgrid.count),
        q_forward_(nq_, FftDirection::Forward, np_, 1, nq_),
        q_backward_(nq_, FftDirection::Backward, np_, 1, nq_),
        p_forward_(np_, FftDirection::Forward, nq_, nq_, 1),
        p_backward_(np_, FftDirection::Backward, nq_, nq_, 1) {
    const cplx to_rate = 1.0 / cplx(0.0, g.hbar);
    for (const auto& term : g.terms) {
      const bool along_q = term.dq_order > 0;
      const unsigned order = along_q ? term.dq_order : term.dp_order;
      Eigen::MatrixXcd coeff(static_cast<Index>(nq_), static_cast<Index>(np_));
      for (Index i = 0; i < coeff.rows(); ++i) {
        for (Index j = 0; j < coeff.cols(); ++j) {
          coeff(i, j) = term.scalar * to_rate *
                        eval_poly(term.coefficient, qgrid.point(static_cast<std::size_t>(i)),
                                  pgrid.point(static_cast<std::size_t>(j)));
        }
      }
      auto& group = along_q ? q_terms_ : p_terms_;
      auto it = group.find(order);
      if (it == group.end()) {
        group.emplace(order, Group{derivative_factors(along_q ? qgrid : pgrid, order), std::move(coeff)});
      } else {
        it->second.coeff += coeff;
      }
    }
  }

  bool empty() const { return q_terms_.empty() && p_terms_.empty(); }

  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& chi) const {
    Eigen::MatrixXcd out(chi.rows(), chi.cols());
    apply(chi, out);
    return out;
  }

  // out = rhs(chi); out must not alias chi.
  void apply(const Eigen::MatrixXcd& chi, Eigen::MatrixXcd& out) const {
    out.setZero(chi.rows(), chi.cols());
    if (!q_terms_.empty()) {
      spec_ = chi;
      q_forward_.execute(spec_.data());
      for (const auto& [order, group] : q_terms_) {
        work_.noalias() = group.factors.asDiagonal() * spec_;
        q_backward_.execute(work_.data());
        out += group.coeff.cwiseProduct(work_);
      }
    }
    if (!p_terms_.empty()) {
      spec_ = chi;
      p_forward_.execute(spec_.data());
      for (const auto& [order, group] : p_terms_) {
        work_.noalias() = spec_ * group.factors.asDiagonal();
        p_backward_.execute(work_.data());
        out += group.coeff.cwiseProduct(work_);
      }
    }
  }

 private:
  struct Group {
    Eigen::VectorXcd factors;
    Eigen::MatrixXcd coeff;
  };
  std::size_t nq_;
  std::size_t np_;
  FftPlan q_forward_;
  FftPlan q_backward_;
  FftPlan p_forward_;
  FftPlan p_backward_;
  std::map<unsigned, Group> q_terms_;
  std::map<unsigned, Group> p_terms_;
  mutable Eigen::MatrixXcd spec_;
  mutable Eigen::MatrixXcd work_;
};

void check_field(const ChiField& chi) {
  const auto& f = chi.field;
  f.qgrid.validate(kMinTransformCount);
  f.pgrid.validate(kMinTransformCount);
  if (f.values.rows() != static_cast<Index>(f.qgrid.count) || f.values.cols() != static_cast<Index>(f.pgrid.count)) {
    throw InvalidInput("field shape does not match its grids");
  }
  if (!f.values.allFinite()) throw InvalidInput("field contains non-finite values");
}

void check_decay(const ChiField& chi) {
  const double ratio = boundary_ratio(chi);
  if (ratio > kChiDecayTolerance) {
    throw DomainTruncation("chi does not decay at the grid boundary (relative edge value " + format_number(ratio) +
                           ")");
  }
}

double l2_norm(const DistributionField& f) { return std::sqrt(f.values.squaredNorm() * f.qgrid.step * f.pgrid.step); }

double spectral_radius(const Rhs& rhs, std::size_t nq, std::size_t np) {
  if (rhs.empty()) return 0.0;
  std::mt19937 rng(20240613);
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd x(static_cast<Index>(nq), static_cast<Index>(np));
  for (Index k = 0; k < x.size(); ++k) x.data()[k] = cplx(normal(rng), normal(rng));
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::MatrixXcd y = rhs(x);
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    estimate = n;
    x = y / n;
  }
  return estimate;
}

// Dense unitary DFT matrix F(f, j) = exp(-2 pi i f j / N) / sqrt(N).
Eigen::MatrixXcd dft_matrix(std::size_t n) {
  Eigen::MatrixXcd f(static_cast<Index>(n), static_cast<Index>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((a * b) % n) / static_cast<double>(n);
      f(static_cast<Index>(a), static_cast<Index>(b)) = std::polar(scale, angle);
    }
  }
  return f;
}

// exp(-i t (diag(local) + F^+ diag(spectral) F) / hbar) applied to v.
Eigen::VectorXcd propagate(const Eigen::VectorXd& local, const Eigen::VectorXd& spectral, const Eigen::VectorXcd& v,
                           double t, double hbar) {
  const auto n = static_cast<std::size_t>(v.size());
  const bool has_local = local.cwiseAbs().maxCoeff() > 0.0;
  const bool has_spectral = spectral.cwiseAbs().maxCoeff() > 0.0;
  auto phases = [&](const Eigen::VectorXd& energies) {
    Eigen::VectorXcd out(energies.size());
    for (Index k = 0; k < energies.size(); ++k) out[k] = std::polar(1.0, -energies[k] * t / hbar);
    return out;
  };
  if (!has_spectral) return phases(local).cwiseProduct(v);
  const Eigen::MatrixXcd f = dft_matrix(n);
  if (!has_local) return f.adjoint() * phases(spectral).cwiseProduct(f * v);
  Eigen::MatrixXcd h = f.adjoint() * spectral.cast<cplx>().asDiagonal() * f;
  h.diagonal() += local.cast<cplx>();
  h = 0.5 * (h + h.adjoint()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::MatrixXcd& basis = solver.eigenvectors();
  return basis * phases(solver.eigenvalues()).cwiseProduct(basis.adjoint() * v);
}

}  // namespace

HamiltonianPolynomial HamiltonianPolynomial::from_symbol(const PhaseSpaceSymbol& sym) {
  HamiltonianPolynomial h;
  h.hbar = sym.hbar();
  for (const auto& [m, c] : sym.terms()) {
    const cplx v = c.evaluate(sym.hbar());
    if (std::abs(v.imag()) > 1e-14 * std::max(1.0, std::abs(v))) {
      throw InvalidInput("Hamiltonian coefficients must be real (term q^" + std::to_string(m.qpow) + " p^" +
                         std::to_string(m.ppow) + ")");
    }
    h.terms.push_back(PolyTerm{v.real(), m.qpow, m.ppow});
  }
  return h;
}

unsigned HamiltonianPolynomial::degree() const {
  unsigned d = 0;
  for (const auto& t : terms) {
    if (t.coeff != 0.0) d = std::max(d, t.qpow + t.ppow);
  }
  return d;
}

double HamiltonianPolynomial::evaluate(double q, double p) const { return eval_poly(terms, q, p); }

HamiltonianPolynomial HamiltonianPolynomial::simplified() const {
  std::map<std::pair<unsigned, unsigned>, double> merged;
  for (const auto& t : terms) merged[{t.qpow, t.ppow}] += t.coeff;
  HamiltonianPolynomial out;
  out.hbar = hbar;
  for (const auto& [key, c] : merged) {
    if (c != 0.0) out.terms.push_back(PolyTerm{c, key.first, key.second});
  }
  return out;
}

EPSGenerator build_generator(const HamiltonianPolynomial& h) {
  if (!(h.hbar > 0.0)) throw InvalidInput("hbar must be positive");
  const HamiltonianPolynomial poly = h.simplified();
  EPSGenerator g;
  g.hbar = poly.hbar;
  const unsigned deg = poly.degree();
  for (unsigned n = 1; n <= deg; ++n) {
    const cplx scalar = std::pow(cplx(0.0, -poly.hbar), static_cast<int>(n)) / factorial(n);
    auto dp = derivative(poly.terms, n, false);
    if (!dp.empty()) g.terms.push_back(GeneratorTerm{std::move(dp), n, 0, scalar});
    auto dq = derivative(poly.terms, n, true);
    if (!dq.empty()) g.terms.push_back(GeneratorTerm{std::move(dq), 0, n, -scalar});
  }
  return g;
}

double boundary_ratio(const ChiField& chi) {
  const auto& v = chi.field.values;
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return 0.0;
  const double edge = std::max({v.row(0).cwiseAbs().maxCoeff(), v.row(v.rows() - 1).cwiseAbs().maxCoeff(),
                                v.col(0).cwiseAbs().maxCoeff(), v.col(v.cols() - 1).cwiseAbs().maxCoeff()});
  return edge / peak;
}

ChiField apply_generator(const EPSGenerator& g, const ChiField& chi) {
  check_field(chi);
  if (chi.field.hbar != g.hbar) throw InvalidInput("generator and field carry different hbar");
  check_decay(chi);
  const Rhs rhs(g, chi.field.qgrid, chi.field.pgrid);
  ChiField out = chi;
  out.field.values = rhs(chi.field.values);
  return out;
}

ChiField initial_chi(const PositionState& psi, const UniformGrid& pgrid) {
  const SeparableSolution sol{psi, to_momentum(psi, pgrid), psi.hbar};
  return ChiField{assemble_separable(sol, psi.grid, pgrid), 0.0};
}

double spectral_radius(const EPSGenerator& g, const UniformGrid& qgrid, const UniformGrid& pgrid) {
  qgrid.validate(kMinTransformCount);
  pgrid.validate(kMinTransformCount);
  return spectral_radius(Rhs(g, qgrid, pgrid), qgrid.count, pgrid.count);
}

double stable_step(double radius) {
  // The RK4 stability region reaches 2 sqrt(2) along the imaginary axis.
  return radius > 0.0 ? 2.8 / radius : std::numeric_limits<double>::infinity();
}

EvolveResult evolve(const ChiField& chi0, const HamiltonianPolynomial& h, double dt, std::size_t steps,
                    const EvolveOptions& options) {
  check_field(chi0);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be a positive finite number");
  if (h.hbar != chi0.field.hbar) throw InvalidInput("Hamiltonian and field carry different hbar");
  const EPSGenerator g = build_generator(h);
  const auto& qgrid = chi0.field.qgrid;
  const auto& pgrid = chi0.field.pgrid;
  const Rhs rhs(g, qgrid, pgrid);

  EvolveResult result;
  result.spectral_radius = spectral_radius(rhs, qgrid.count, pgrid.count);
  result.dt_limit = stable_step(result.spectral_radius);
  if (dt > result.dt_limit) {
    throw StabilityError("dt = " + format_number(dt) + " exceeds the RK4 stability limit " +
                             format_number(result.dt_limit) + " (spectral radius " +
                             format_number(result.spectral_radius) + ")",
                         dt, 0.9 * result.dt_limit);
  }
  check_decay(chi0);

  ChiField chi = chi0;
  const double area = qgrid.step * pgrid.step;
  const double norm0 = l2_norm(chi.field);
  auto record = [&](std::size_t step) {
    result.log.push_back(StepRecord{step, chi.time, chi.field.values.sum() * area, l2_norm(chi.field)});
  };
  auto snapshot = [&](std::size_t step) {
    if (options.stride == 0 || !options.on_snapshot) return;
    if (step % options.stride == 0 || step == steps) options.on_snapshot(chi, step);
  };
  record(0);
  snapshot(0);

  Eigen::MatrixXcd& y = chi.field.values;
  Eigen::MatrixXcd k1, k2, k3, k4, stage;
  for (std::size_t s = 1; s <= steps; ++s) {
    if (!rhs.empty()) {
      rhs.apply(y, k1);
      stage = y + 0.5 * dt * k1;
      rhs.apply(stage, k2);
      stage = y + 0.5 * dt * k2;
      rhs.apply(stage, k3);
      stage = y + dt * k3;
      rhs.apply(stage, k4);
      y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    chi.time = chi0.time + static_cast<double>(s) * dt;
    record(s);
    const double norm = result.log.back().l2_norm;
    if (!std::isfinite(norm) || norm > 10.0 * norm0) {
      throw StabilityError("field norm grew from " + format_number(norm0) + " to " + format_number(norm) +
                               " at step " + std::to_string(s) + " with dt = " + format_number(dt),
                           dt, 0.5 * dt);
    }
    snapshot(s);
  }
  result.chi = std::move(chi);
  return result;
}

SeparableSolution separable_evolution(const PositionState& psi0, const HamiltonianPolynomial& h,
                                      const UniformGrid& pgrid, double dt, std::size_t steps) {
  if (h.hbar != psi0.hbar) throw InvalidInput("Hamiltonian and state carry different hbar");
  if (!std::isfinite(dt)) throw InvalidInput("dt must be finite");
  std::vector<PolyTerm> kinetic;
  std::vector<PolyTerm> potential;
  for (const auto& t : h.simplified().terms) {
    if (t.qpow > 0 && t.ppow > 0) {
      throw UnsupportedHamiltonian("separable evolution needs H = T(p) + V(q); found a q^" + std::to_string(t.qpow) +
                                   " p^" + std::to_string(t.ppow) + " term");
    }
    (t.qpow == 0 ? kinetic : potential).push_back(t);
  }
  const double hbar = psi0.hbar;
  const double t = dt * static_cast<double>(steps);
  const MomentumState phi0 = to_momentum(psi0, pgrid);

  auto on_points = [](const std::vector<PolyTerm>& poly, const UniformGrid& grid, bool is_q) {
    Eigen::VectorXd v(static_cast<Index>(grid.count));
    for (std::size_t k = 0; k < grid.count; ++k) {
      const double x = grid.point(k);
      v[static_cast<Index>(k)] = is_q ? eval_poly(poly, x, 0.0) : eval_poly(poly, 0.0, x);
    }
    return v;
  };
  auto on_modes = [](const std::vector<PolyTerm>& poly, const UniformGrid& grid, double scale, bool is_q) {
    const Eigen::VectorXd k = wavenumbers(grid);
    Eigen::VectorXd v(k.size());
    for (Index f = 0; f < k.size(); ++f) {
      const double x = scale * k[f];
      v[f] = is_q ? eval_poly(poly, x, 0.0) : eval_poly(poly, 0.0, x);
    }
    return v;
  };

  // q representation: p̂ = -i hbar d/dq acts as hbar k on Fourier modes.
  const Eigen::VectorXcd psi =
      propagate(on_points(potential, psi0.grid, true), on_modes(kinetic, psi0.grid, hbar, false), psi0.samples, t, hbar);
  // p representation: q̂ = i hbar d/dp acts as -hbar k.
  const Eigen::VectorXcd phi =
      propagate(on_points(kinetic, pgrid, false), on_modes(potential, pgrid, -hbar, true), phi0.samples, t, hbar);
  return SeparableSolution{PositionState{psi0.grid, psi, hbar}, MomentumState{pgrid, phi, hbar}, hbar};
}

}  // namespace phasespace
