#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <utility>

#include "phasespace/distributions.hpp"
#include "phasespace/eps_dynamics.hpp"
#include "phasespace/errors.hpp"
#include "phasespace/expectation.hpp"
#include "phasespace/io.hpp"
#include "phasespace/parser.hpp"
#include "phasespace/states.hpp"

namespace phasespace::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Raised when a computed result violates a documented invariant.
class InvariantFailure : public Error {
 public:
  using Error::Error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v)) {
    throw InvalidInput(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v < 0 || v != std::floor(v) || v > 1e12) {
    throw InvalidInput(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "hbar") cfg.hbar = parse_real(key, value);
  else if (key == "alpha") cfg.alpha = parse_real(key, value);
  else if (key == "state") cfg.state = value;
  else if (key == "op") cfg.op = value;
  else if (key == "out") cfg.out = value;
  else if (key == "ham") cfg.ham = value;
  else if (key == "dt") cfg.dt = parse_real(key, value);
  else if (key == "steps") cfg.steps = parse_count(key, value);
  else if (key == "stride") cfg.stride = parse_count(key, value);
  else if (key == "q.count") cfg.q.count = parse_count(key, value);
  else if (key == "q.min") cfg.q.minimum = parse_real(key, value);
  else if (key == "q.step") cfg.q.step = parse_real(key, value);
  else if (key == "p.count") cfg.p.count = parse_count(key, value);
  else if (key == "p.min") cfg.p.minimum = parse_real(key, value);
  else if (key == "p.step") cfg.p.step = parse_real(key, value);
  else throw InvalidInput("unknown configuration key '" + key + "'");
}

void validate(const RunConfig& cfg) {
  if (!(cfg.hbar > 0.0) || !std::isfinite(cfg.hbar)) throw InvalidInput("hbar must be a positive finite number");
  if (!std::isfinite(cfg.alpha)) throw InvalidInput("alpha must be finite");
  for (const auto* g : {&cfg.q, &cfg.p}) {
    if (!is_power_of_two(g->count)) {
      throw InvalidInput("grid count " + std::to_string(g->count) + " is not a power of two");
    }
    g->grid().validate(kMinTransformCount);
  }
  if (cfg.dt && (!(*cfg.dt > 0.0) || !std::isfinite(*cfg.dt))) throw InvalidInput("dt must be positive");
}

// "oscillator:N", "coherent:Q0,P0" or "file:PATH".
PositionState resolve_state(const RunConfig& cfg) {
  const auto colon = cfg.state.find(':');
  if (colon == std::string::npos) throw InvalidInput("state spec '" + cfg.state + "' has no kind prefix");
  const std::string kind = cfg.state.substr(0, colon);
  const std::string arg = cfg.state.substr(colon + 1);
  if (kind == "oscillator") {
    return oscillator_eigenstate(static_cast<unsigned>(parse_count("state", trim(arg))), cfg.q.grid(), cfg.hbar);
  }
  if (kind == "coherent") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) throw InvalidInput("coherent state needs Q0,P0");
    return coherent_state(parse_real("state", trim(arg.substr(0, comma))),
                          parse_real("state", trim(arg.substr(comma + 1))), cfg.q.grid(), cfg.hbar);
  }
  if (kind == "file") return read_position_state_csv(arg, cfg.hbar);
  throw InvalidInput("unknown state kind '" + kind + "'");
}

ojson complex_json(std::complex<double> z) { return ojson::array({z.real(), z.imag()}); }

ojson grid_json(const UniformGrid& g) { return ojson{{"count", g.count}, {"minimum", g.minimum}, {"step", g.step}}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InvalidInput("cannot write " + path.string());
}

void prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw InvalidInput("cannot create output directory " + cfg.out.string());
}

std::string describe(std::complex<double> z) {
  std::ostringstream s;
  s << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return s.str();
}

int cmd_symbol(const RunConfig& cfg, std::ostream& out) {
  if (cfg.op.empty()) throw InvalidInput("symbol needs --op");
  const OperatorExpr op = parse_operator(cfg.op, cfg.hbar);
  const PhaseSpaceSymbol sym = alpha_symbol(op, cfg.alpha);
  std::vector<std::pair<Monomial, HbarSeries>> terms(sym.terms().begin(), sym.terms().end());
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return RenderOrder{}(a.first, b.first); });
  ojson j;
  j["alpha"] = cfg.alpha;
  j["hbar"] = cfg.hbar;
  j["operator"] = op.to_string();
  j["symbol"] = sym.to_string();
  j["terms"] = ojson::array();
  for (const auto& [m, c] : terms) {
    ojson powers = ojson::array();
    for (const auto& v : c.coefficients()) powers.push_back(complex_json(v));
    j["terms"].push_back(ojson{{"qpow", m.qpow}, {"ppow", m.ppow}, {"hbar_coefficients", powers},
                               {"value", complex_json(c.evaluate(cfg.hbar))}});
  }
  prepare_out(cfg);
  write_text(cfg.out / "symbol.json", j.dump(2) + "\n");
  out << sym.to_string() << "\n";
  return kOk;
}

int cmd_distribution(const RunConfig& cfg, std::ostream& out) {
  const PositionState psi = resolve_state(cfg);
  const DensityMatrix rho = density_from_pure(psi);
  const DistributionField field = compute_distribution(rho, cfg.alpha, cfg.p.grid());
  const Marginals marg = marginals(field);
  const std::complex<double> norm = normalization(field);
  const double imag = max_imag(field);
  const double min_re = field.values.real().minCoeff();
  const double min_marginal = std::min(marg.position.minCoeff(), marg.momentum.minCoeff());

  std::vector<std::pair<std::string, bool>> checks = {
      {"normalization", std::abs(norm.real() - 1.0) < 1e-6 && std::abs(norm.imag()) < 1e-8},
      {"marginal-reality", marg.max_imag_residue < 1e-6},
      {"marginal-positivity", min_marginal > -1e-8},
  };
  if (cfg.alpha == -0.5) checks.emplace_back("wigner-reality", imag < 1e-8);

  prepare_out(cfg);
  write_field(cfg.out / "distribution.csv", field, FieldMetadata{std::nullopt, cfg.to_json()});

  out << std::setprecision(12);
  out << "alpha            " << cfg.alpha << "\n";
  out << "normalization    " << describe(norm) << "\n";
  out << "max |Im|         " << imag << "\n";
  out << "min Re           " << min_re << "\n";
  out << "marginal |Im|    " << marg.max_imag_residue << "\n";
  std::string failed;
  for (const auto& [name, ok] : checks) {
    out << "check " << std::left << std::setw(20) << name << (ok ? "ok" : "FAILED") << "\n";
    if (!ok && failed.empty()) failed = name;
  }
  if (!failed.empty()) throw InvariantFailure("invariant failed: " + failed);
  return kOk;
}

int cmd_expect(const RunConfig& cfg, std::ostream& out) {
  if (cfg.op.empty()) throw InvalidInput("expect needs --op");
  const OperatorExpr op = parse_operator(cfg.op, cfg.hbar);
  const DensityMatrix rho = density_from_pure(resolve_state(cfg));
  const ExpectationReport report = expectation_report(rho, op, cfg.alpha, cfg.p.grid());
  prepare_out(cfg);
  write_text(cfg.out / "expectation.json", report.to_json() + "\n");

  const auto certified = report.certified();
  auto mark = [&](Pairing p) { return std::find(certified.begin(), certified.end(), p) != certified.end() ? "yes" : "no"; };
  out << std::setprecision(12);
  out << "operator   " << report.operator_text << "\n";
  out << "alpha      " << report.alpha << "\n";
  out << "hilbert    " << describe(report.hilbert) << "\n";
  out << std::left << std::setw(11) << "pairing" << std::setw(36) << "value" << std::setw(16) << "discrepancy"
      << "certified\n";
  const std::tuple<Pairing, std::complex<double>, double> rows[] = {
      {Pairing::Plain, report.phase_plain, report.discrepancy_plain},
      {Pairing::Conjugate, report.phase_conjugate, report.discrepancy_conjugate},
      {Pairing::Dual, report.phase_dual, report.discrepancy_dual},
  };
  for (const auto& [p, value, d] : rows) {
    std::ostringstream disc;
    disc << std::setprecision(3) << d;
    out << std::setw(11) << to_string(p) << std::setw(36) << describe(value) << std::setw(16) << disc.str()
        << mark(p) << "\n";
  }
  return kOk;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  if (cfg.ham.empty()) throw InvalidInput("evolve needs --ham");
  if (cfg.steps > 0 && !cfg.dt) throw InvalidInput("evolve needs --dt when steps > 0");
  const HamiltonianPolynomial h = HamiltonianPolynomial::from_symbol(parse_symbol(cfg.ham, cfg.hbar));
  const PositionState psi = resolve_state(cfg);
  const ChiField chi0 = initial_chi(psi, cfg.p.grid());
  const std::string run_json = cfg.to_json();

  ojson snapshots = ojson::array();
  bool prepared = false;
  auto write_snapshot = [&](const ChiField& chi, std::size_t step) {
    if (!prepared) {
      prepare_out(cfg);
      prepared = true;
    }
    char name[64];
    std::snprintf(name, sizeof name, "snapshot_%06zu.csv", step);
    write_field(cfg.out / name, chi.field, FieldMetadata{chi.time, run_json});
    const Centroid c = centroid(chi.field);
    snapshots.push_back(ojson{{"step", step},
                              {"time", chi.time},
                              {"file", name},
                              {"centroid_q", c.q},
                              {"centroid_p", c.p},
                              {"variance_q", position_variance(chi.field)},
                              {"normalization", complex_json(normalization(chi.field))}});
  };

  ojson summary;
  summary["run"] = ojson::parse(run_json);
  EvolveResult result;
  if (cfg.steps == 0) {
    write_snapshot(chi0, 0);
    result.chi = chi0;
    result.log.push_back(StepRecord{0, chi0.time, normalization(chi0.field),
                                    std::sqrt(chi0.field.values.squaredNorm() * chi0.field.qgrid.step *
                                              chi0.field.pgrid.step)});
  } else {
    EvolveOptions options;
    options.stride = cfg.stride == 0 ? cfg.steps : cfg.stride;
    options.on_snapshot = write_snapshot;
    result = evolve(chi0, h, *cfg.dt, cfg.steps, options);
    summary["spectral_radius"] = result.spectral_radius;
    summary["dt_limit"] = result.dt_limit;
  }
  summary["final_time"] = result.chi.time;
  summary["snapshots"] = snapshots;
  ojson log{{"step", ojson::array()}, {"time", ojson::array()}, {"normalization_re", ojson::array()},
            {"normalization_im", ojson::array()}, {"l2_norm", ojson::array()}};
  for (const auto& r : result.log) {
    log["step"].push_back(r.step);
    log["time"].push_back(r.time);
    log["normalization_re"].push_back(r.normalization.real());
    log["normalization_im"].push_back(r.normalization.imag());
    log["l2_norm"].push_back(r.l2_norm);
  }
  summary["norm_drift"] = log;
  write_text(cfg.out / "evolve_summary.json", summary.dump(2) + "\n");

  const Centroid first = centroid(chi0.field);
  const Centroid last = centroid(result.chi.field);
  out << std::setprecision(12);
  out << "steps            " << cfg.steps << "\n";
  out << "final time       " << result.chi.time << "\n";
  out << "centroid start   (" << first.q << ", " << first.p << ")\n";
  out << "centroid end     (" << last.q << ", " << last.p << ")\n";
  out << "normalization    " << describe(normalization(result.chi.field)) << "\n";
  out << "snapshots        " << snapshots.size() << "\n";
  return kOk;
}

}  // namespace

UniformGrid GridSpec::grid() const {
  if (minimum) return UniformGrid{count, *minimum, step};
  return centered_grid(count, step);
}

std::string RunConfig::to_json() const {
  ojson j;
  j["hbar"] = hbar;
  j["alpha"] = alpha;
  j["qgrid"] = grid_json(q.grid());
  j["pgrid"] = grid_json(p.grid());
  j["state"] = state;
  j["op"] = op;
  j["ham"] = ham;
  j["dt"] = dt ? ojson(*dt) : ojson(nullptr);
  j["steps"] = steps;
  j["stride"] = stride;
  return j.dump();
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const InvalidInput& e) {
      throw InvalidInput(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase-space distributions, ordering rules and extended phase-space dynamics"};
  app.name(args.empty() ? "phasespace" : args.front());
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> flags = {
      {"alpha", {}}, {"hbar", {}},    {"op", {}},      {"state", {}},  {"out", {}},     {"ham", {}},
      {"dt", {}},    {"steps", {}},   {"stride", {}},  {"q-count", {}}, {"q-min", {}},  {"q-step", {}},
      {"p-count", {}}, {"p-min", {}}, {"p-step", {}},
  };
  app.add_option("--config", config_path, "flat key = value file; flags override it");
  for (auto& [name, value] : flags) app.add_option("--" + name, value);

  app.add_subcommand("symbol", "print the alpha-ordering symbol of --op");
  app.add_subcommand("distribution", "compute P_alpha for --state");
  app.add_subcommand("expect", "compare phase-space pairings with the Hilbert-space trace");
  app.add_subcommand("evolve", "propagate chi under --ham");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    RunConfig cfg;
    if (config_path) cfg = load_config(*config_path, cfg);
    for (const auto& [name, value] : flags) {
      if (!value) continue;
      std::string key = name;
      if (key.size() > 2 && key[1] == '-') key[1] = '.';  // q-count -> q.count
      set_key(cfg, key, *value);
    }
    validate(cfg);
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "symbol") return cmd_symbol(cfg, out);
    if (command == "distribution") return cmd_distribution(cfg, out);
    if (command == "expect") return cmd_expect(cfg, out);
    return cmd_evolve(cfg, out);
  } catch (const StabilityError& e) {
    err << "error: " << e.what() << "\nsuggested dt: " << std::setprecision(17) << e.suggested_dt() << "\n";
    return kInstability;
  } catch (const InvariantFailure& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace phasespace::cli
