#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kndirac/radial_solver.hpp"

namespace kn::cli {

enum class Task { horizons, tetrad_check, dirac_verify, angular, radial, asymptotics };

const char* to_string(Task t);
Task task_from_string(const std::string& s);

inline constexpr int exit_ok = 0;
inline constexpr int exit_verification = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

// message starts with the offending field path, e.g. "modes[1].k: ..."
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Task task = Task::horizons;
  SpacetimeParams params{1.0, 0.6, 0.3};
  std::vector<ModeParams> modes{ModeParams{0.45, 0.5, 0.2, 1.0}};
  std::uint64_t seed = 1;
  double tol = 1e-10;
  std::string out = "kndirac-out";
  Branch branch = Branch::exterior;
  std::optional<double> rstar_min, rstar_max;
  double rstar_step = 0.0;  // 0: span / 2000
  bool inward = false;      // radial: start at rstar_max
  int points = 100;         // verification tasks
  int param_sets = 10;      // tetrad-check: temporal-minor grids
  int N = 64;               // angular basis size per component
  int count = 8;            // angular eigenpairs per mode
  int per_decade = 40;      // asymptotics on the exterior
  Vec2c x0{1.0, cplx(0.4, 0.3)};
  unsigned threads = 0;     // 0: hardware concurrency
};

// JSON text -> config on top of `base`; unknown keys are errors
RunConfig parse_config(const std::string& text, RunConfig base = {});
void validate(const RunConfig& c);

// runs one task, writes its files under c.out, returns the exit code
int run(const RunConfig& c, std::ostream& log);

// full command line: subcommand, --config, flag overrides
int main(int argc, char** argv);

// shortest text that parses back to the same double
std::string format_double(double v);

}  // namespace kn::cli
