#include "phasespace/io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "phasespace/errors.hpp"

namespace phasespace {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Index = Eigen::Index;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw InvalidInput("failed writing " + path.string());
}

class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FileFormatError("cannot open " + path.string());
  }

  void expect_header(const std::string& header) {
    std::string line;
    if (!next_line(line) || line != header) {
      fail("expected header '" + header + "'");
    }
  }

  // Next data row split on commas; false at end of file.
  bool row(std::vector<double>& fields, std::size_t width) {
    std::string line;
    while (next_line(line)) {
      if (line.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(parse(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (fields.size() != width) {
        fail("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FileFormatError(path_.string() + ":" + std::to_string(line_no_) + ": " + what);
  }

 private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  double parse(const std::string& text) const {
    if (text.empty()) fail("empty field");
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
      fail("invalid number '" + text + "'");
    }
    return v;
  }

  fs::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

template <class State>
void write_state(const fs::path& path, const State& s, const char* axis) {
  auto out = open_out(path);
  out << axis << ",re,im\n";
  for (std::size_t k = 0; k < s.grid.count; ++k) {
    const auto v = s.samples[static_cast<Index>(k)];
    out << num(s.grid.point(k)) << ',' << num(v.real()) << ',' << num(v.imag()) << '\n';
  }
  finish(out, path);
}

template <class State>
State read_state(const fs::path& path, double hbar, const char* axis) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidInput("hbar must be a positive finite number");
  CsvReader reader(path);
  reader.expect_header(std::string(axis) + ",re,im");
  std::vector<double> xs;
  std::vector<std::complex<double>> values;
  std::vector<double> row;
  while (reader.row(row, 3)) {
    xs.push_back(row[0]);
    values.emplace_back(row[1], row[2]);
  }
  if (xs.size() < 2) throw FileFormatError(path.string() + ": need at least two samples");
  UniformGrid grid{xs.size(), xs.front(), (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1)};
  if (!(grid.step > 0.0)) throw FileFormatError(path.string() + ": abscissae must increase");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (std::abs(xs[k] - grid.point(k)) > 1e-9 * grid.step) {
      throw FileFormatError(path.string() + ":" + std::to_string(k + 2) + ": grid is not uniform");
    }
  }
  State s{grid, Eigen::VectorXcd(static_cast<Index>(values.size())), hbar};
  for (std::size_t k = 0; k < values.size(); ++k) s.samples[static_cast<Index>(k)] = values[k];
  return s;
}

json grid_json(const UniformGrid& g) { return json{{"count", g.count}, {"minimum", g.minimum}, {"step", g.step}}; }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileFormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FileFormatError(path.string() + ": " + e.what());
  }
}

template <class T>
T field_of(const json& j, const char* key, const fs::path& path) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FileFormatError(path.string() + ": missing or invalid '" + key + "'");
  }
}

UniformGrid grid_from(const json& j, const fs::path& path) {
  UniformGrid g{field_of<std::size_t>(j, "count", path), field_of<double>(j, "minimum", path),
                field_of<double>(j, "step", path)};
  try {
    g.validate(1);
  } catch (const InvalidInput& e) {
    throw FileFormatError(path.string() + ": " + e.what());
  }
  return g;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace

void write_state_csv(const fs::path& path, const PositionState& psi) { write_state(path, psi, "q"); }
void write_state_csv(const fs::path& path, const MomentumState& phi) { write_state(path, phi, "p"); }

PositionState read_position_state_csv(const fs::path& path, double hbar) {
  return read_state<PositionState>(path, hbar, "q");
}

MomentumState read_momentum_state_csv(const fs::path& path, double hbar) {
  return read_state<MomentumState>(path, hbar, "p");
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

void write_density(const fs::path& csv, const DensityMatrix& rho) {
  auto out = open_out(csv);
  out << "i,j,re,im\n";
  for (Index i = 0; i < rho.entries.rows(); ++i) {
    for (Index j = 0; j < rho.entries.cols(); ++j) {
      out << i << ',' << j << ',' << num(rho.entries(i, j).real()) << ',' << num(rho.entries(i, j).imag()) << '\n';
    }
  }
  finish(out, csv);
  json meta = grid_json(rho.grid);
  meta["hbar"] = rho.hbar;
  write_json(sidecar_path(csv), meta);
}

DensityMatrix read_density(const fs::path& csv) {
  const fs::path side = sidecar_path(csv);
  const json meta = read_json(side);
  DensityMatrix rho{grid_from(meta, side), {}, field_of<double>(meta, "hbar", side)};
  const auto n = static_cast<Index>(rho.grid.count);
  rho.entries = Eigen::MatrixXcd::Zero(n, n);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  CsvReader reader(csv);
  reader.expect_header("i,j,re,im");
  std::vector<double> row;
  Index filled = 0;
  while (reader.row(row, 4)) {
    const double i = row[0];
    const double j = row[1];
    if (i != std::floor(i) || j != std::floor(j) || i < 0 || j < 0 || i >= static_cast<double>(n) ||
        j >= static_cast<double>(n)) {
      reader.fail("index out of range");
    }
    const auto ii = static_cast<Index>(i);
    const auto jj = static_cast<Index>(j);
    if (seen(ii, jj)) reader.fail("duplicate entry");
    seen(ii, jj) = true;
    rho.entries(ii, jj) = {row[2], row[3]};
    ++filled;
  }
  if (filled != n * n) throw FileFormatError(csv.string() + ": expected " + std::to_string(n * n) + " entries");
  return rho;
}

void write_field(const fs::path& csv, const DistributionField& field, const FieldMetadata& meta) {
  auto out = open_out(csv);
  out << "q,p,re,im\n";
  for (std::size_t i = 0; i < field.qgrid.count; ++i) {
    const std::string q = num(field.qgrid.point(i));
    for (std::size_t j = 0; j < field.pgrid.count; ++j) {
      const auto v = field.values(static_cast<Index>(i), static_cast<Index>(j));
      out << q << ',' << num(field.pgrid.point(j)) << ',' << num(v.real()) << ',' << num(v.imag()) << '\n';
    }
  }
  finish(out, csv);
  nlohmann::ordered_json side;
  side["alpha"] = field.alpha;
  side["hbar"] = field.hbar;
  side["qgrid"] = grid_json(field.qgrid);
  side["pgrid"] = grid_json(field.pgrid);
  if (meta.time) side["time"] = *meta.time;
  if (!meta.run_json.empty()) side["run"] = json::parse(meta.run_json);
  auto js = open_out(sidecar_path(csv));
  js << side.dump(2) << '\n';
  finish(js, sidecar_path(csv));
}

LoadedField read_field(const fs::path& csv) {
  const fs::path side = sidecar_path(csv);
  const json meta = read_json(side);
  LoadedField out;
  auto& f = out.field;
  f.alpha = field_of<double>(meta, "alpha", side);
  f.hbar = field_of<double>(meta, "hbar", side);
  if (!meta.contains("qgrid") || !meta.contains("pgrid")) throw FileFormatError(side.string() + ": missing grids");
  f.qgrid = grid_from(meta["qgrid"], side);
  f.pgrid = grid_from(meta["pgrid"], side);
  if (meta.contains("time")) out.time = field_of<double>(meta, "time", side);
  const auto nq = static_cast<Index>(f.qgrid.count);
  const auto np = static_cast<Index>(f.pgrid.count);
  f.values.resize(nq, np);
  CsvReader reader(csv);
  reader.expect_header("q,p,re,im");
  std::vector<double> row;
  Index k = 0;
  while (reader.row(row, 4)) {
    if (k >= nq * np) reader.fail("more rows than the grids allow");
    const Index i = k / np;
    const Index j = k % np;
    const double dq = std::abs(row[0] - f.qgrid.point(static_cast<std::size_t>(i)));
    const double dp = std::abs(row[1] - f.pgrid.point(static_cast<std::size_t>(j)));
    if (dq > 1e-9 * f.qgrid.step || dp > 1e-9 * f.pgrid.step) reader.fail("coordinates do not match the sidecar grids");
    f.values(i, j) = {row[2], row[3]};
    ++k;
  }
  if (k != nq * np) throw FileFormatError(csv.string() + ": expected " + std::to_string(nq * np) + " rows");
  return out;
}

}  // namespace phasespace
