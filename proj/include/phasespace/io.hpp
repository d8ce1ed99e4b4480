#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "phasespace/distributions.hpp"
#include "phasespace/states.hpp"

namespace phasespace {

// Every reader throws FileFormatError with the file name and line number on
// malformed input. Numbers are written with 17 significant digits so a write
// followed by a read reproduces the samples bit for bit.

/// CSV with header `q,re,im`.
void write_state_csv(const std::filesystem::path& path, const PositionState& psi);
/// CSV with header `p,re,im`.
void write_state_csv(const std::filesystem::path& path, const MomentumState& phi);

/// Reads a `q,re,im` file. The abscissae must form a uniform grid (relative
/// deviation below 1e-9 of the step).
PositionState read_position_state_csv(const std::filesystem::path& path, double hbar);
MomentumState read_momentum_state_csv(const std::filesystem::path& path, double hbar);

/// The JSON sidecar of `foo.csv` is `foo.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// CSV `i,j,re,im` plus sidecar {count, minimum, step, hbar}.
void write_density(const std::filesystem::path& csv, const DensityMatrix& rho);
DensityMatrix read_density(const std::filesystem::path& csv);

/// Extra sidecar content for field files.
struct FieldMetadata {
  std::optional<double> time;
  /// JSON object text echoed under "run"; empty for none.
  std::string run_json;
};

/// CSV `q,p,re,im` (q slowest) plus sidecar {alpha, hbar, qgrid, pgrid[, time][, run]}.
void write_field(const std::filesystem::path& csv, const DistributionField& field, const FieldMetadata& meta = {});

struct LoadedField {
  DistributionField field;
  std::optional<double> time;
};

LoadedField read_field(const std::filesystem::path& csv);

}  // namespace phasespace
