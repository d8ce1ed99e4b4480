#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phasespace/grid.hpp"

namespace phasespace::cli {

enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kInputError = 2,
  kInvariantFailure = 3,
  kInstability = 4,
};

inline constexpr std::size_t kDefaultCount = 128;
inline constexpr double kDefaultStep = 0.15625;

/// Grid settings; a missing minimum centres the grid on zero.
struct GridSpec {
  std::size_t count = kDefaultCount;
  double step = kDefaultStep;
  std::optional<double> minimum;

  UniformGrid grid() const;
};

struct RunConfig {
  double hbar = 1.0;
  double alpha = -0.5;
  GridSpec q;
  GridSpec p;
  std::string state = "oscillator:0";
  std::string op;
  std::string ham;
  std::optional<double> dt;
  std::size_t steps = 0;
  std::size_t stride = 0;  // 0: first and last snapshot only
  std::filesystem::path out = ".";

  /// Flat JSON object echoing every field.
  std::string to_json() const;
};

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
/// Throws InvalidInput on unknown keys or bad values.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Entry point shared by the executable and the tests. argv[0] is the
/// program name; the first positional argument is the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasespace::cli
