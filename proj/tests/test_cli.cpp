#include <doctest.h>
#include <json.hpp>

#include <cli.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phasespace/operator_algebra.hpp"
#include "phasespace/parser.hpp"

using namespace phasespace;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "phasespace");
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "phasespace_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("symbol command") {
  const auto dir = fresh_dir("symbol");
  auto r = invoke({"symbol", "--op", "q p", "--alpha", "0", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "p q\n");
  r = invoke({"symbol", "--op", "q p", "--alpha", "-0.5", "--out", dir.string()});
  CHECK(r.out == "p q + 0.5 i hbar\n");
  r = invoke({"symbol", "--op", "q^2 p^2", "--alpha", "0.25", "--out", dir.string()});
  CHECK(r.out == alpha_symbol(parse_operator("q^2 p^2", 1.0), 0.25).to_string() + "\n");

  const auto j = nlohmann::json::parse(slurp(dir / "symbol.json"));
  CHECK(j.at("alpha") == 0.25);
  CHECK(j.at("operator") == "q^2 p^2");
  CHECK(j.at("terms").size() == 3);
}

TEST_CASE("input errors exit with 2") {
  const auto dir = fresh_dir("errors");
  auto r = invoke({"symbol", "--op", "q^-1", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("position 2") != std::string::npos);
  CHECK(invoke({"symbol", "--op", "q", "--hbar", "-1", "--out", dir.string()}).code == 2);
  CHECK(invoke({"distribution", "--q-count", "100", "--out", dir.string()}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"symbol", "--bogus", "1"}).code == 2);
  CHECK(invoke({"distribution", "--state", "squeezed:1", "--out", dir.string()}).code == 2);

  std::ofstream(dir / "bad.csv") << "q,re,im\n0,1,0\n0.5,oops,0\n";
  r = invoke({"distribution", "--state", "file:" + (dir / "bad.csv").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.csv:3") != std::string::npos);
}

TEST_CASE("failed distribution checks exit with 3") {
  const auto dir = fresh_dir("invariant");
  const auto r = invoke({"distribution", "--state", "coherent:0,3", "--p-count", "16", "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.out.find("check normalization       FAILED") != std::string::npos);
}

TEST_CASE("distribution command") {
  const auto dir = fresh_dir("distribution");
  const auto r = invoke({"distribution", "--state", "oscillator:1", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("min Re           -0.3183098") != std::string::npos);
  CHECK(r.out.find("wigner-reality      ok") != std::string::npos);
  CHECK(fs::exists(dir / "distribution.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "distribution.json"));
  CHECK(j.at("run").at("state") == "oscillator:1");
}

TEST_CASE("expect command") {
  const auto dir = fresh_dir("expect");
  const auto r =
      invoke({"expect", "--state", "coherent:1,2", "--op", "p", "--alpha", "0", "--out", dir.string()});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "expectation.json"));
  CHECK(j.at("hilbert").at(0).get<double>() == doctest::Approx(2.0));
  CHECK(j.at("certified").size() == 3);
  CHECK(invoke({"expect", "--out", dir.string()}).code == 2);
}

TEST_CASE("config file with flag overrides") {
  const auto dir = fresh_dir("config");
  std::ofstream(dir / "run.cfg") << "# symbol run\nop = q p\nalpha = 0   # standard\nhbar = 2\n";
  auto r = invoke({"symbol", "--config", (dir / "run.cfg").string(), "--out", dir.string()});
  CHECK(r.out == "p q\n");
  r = invoke({"symbol", "--config", (dir / "run.cfg").string(), "--alpha", "-1", "--out", dir.string()});
  CHECK(r.out == "p q + i hbar\n");
  const auto j = nlohmann::json::parse(slurp(dir / "symbol.json"));
  CHECK(j.at("hbar") == 2.0);

  std::ofstream(dir / "bad.cfg") << "op = q\ncolour = blue\n";
  r = invoke({"symbol", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("bad.cfg:2") != std::string::npos);
}

TEST_CASE("evolve command") {
  const auto dir = fresh_dir("evolve");
  const std::vector<std::string> base = {"evolve", "--state", "coherent:1,0", "--ham", "0.5 p^2 + 0.5 q^2",
                                         "--q-count", "64", "--q-step", "0.3125", "--p-count", "64",
                                         "--p-step", "0.3125", "--out", dir.string()};
  auto args = base;
  for (const char* extra : {"--dt", "0.01", "--steps", "20", "--stride", "10"}) args.emplace_back(extra);
  auto r = invoke(args);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "snapshot_000000.csv"));
  CHECK(fs::exists(dir / "snapshot_000010.csv"));
  CHECK(fs::exists(dir / "snapshot_000020.json"));
  const auto summary_text = slurp(dir / "evolve_summary.json");
  const auto summary = nlohmann::json::parse(summary_text);
  CHECK(summary.at("snapshots").size() == 3);
  CHECK(summary.at("final_time").get<double>() == doctest::Approx(0.2));
  CHECK(summary.at("norm_drift").at("step").size() == 21);

  // Same inputs, same bytes.
  invoke(args);
  CHECK(slurp(dir / "evolve_summary.json") == summary_text);

  // No steps: the initial field comes back as the only snapshot.
  const auto echo_dir = fresh_dir("evolve_echo");
  args = base;
  args.back() = echo_dir.string();
  for (const char* extra : {"--dt", "0.01", "--steps", "0"}) args.emplace_back(extra);
  r = invoke(args);
  CHECK(r.code == 0);
  const auto echo = nlohmann::json::parse(slurp(echo_dir / "evolve_summary.json"));
  CHECK(echo.at("snapshots").size() == 1);

  args = base;
  for (const char* extra : {"--dt", "1", "--steps", "5"}) args.emplace_back(extra);
  r = invoke(args);
  CHECK(r.code == 4);
  CHECK(r.err.find("suggested dt") != std::string::npos);
}
