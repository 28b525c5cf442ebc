#pragma once

// The command implementations behind the noonsim executable. Each one takes a
// resolved ScenarioConfig and returns the text it would write, so the
// executable only handles argument parsing, files and exit codes.

#include <string>
#include <vector>

#include "noonsim/io.hpp"

namespace noonsim {

// Environment variable naming the directory for outputs without an explicit path.
inline constexpr const char* kOutputDirEnv = "NOONSIM_OUTPUT_DIR";

// Resolves config.output, falling back to <$NOONSIM_OUTPUT_DIR or .>/<fallback_name>.
std::string resolve_output_path(const ScenarioConfig& config, const std::string& fallback_name);

// Ideal curves come from the circuits, multimode ones from the overlap model.
FringeSeries compute_curve(const ScenarioConfig& config);

// counts/s per unit curve value actually used for simulation.
double resolved_rate_scale(const ScenarioConfig& config, const FringeSeries& curve);

FringeFile run_fringe(const ScenarioConfig& config);
CountsFile run_counts(const ScenarioConfig& config);
FitResult run_fit(const ScenarioConfig& config, const CountsFile& counts);

// Rebuilds a config from the key=value lines echoed into an output header.
ScenarioConfig config_from_header(const std::vector<std::string>& comments);

struct ReproduceCheck {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string reference;  // measured figure the value is compared against, if any
  bool pass = false;
};

struct ReproduceReport {
  std::vector<ReproduceCheck> checks;
  bool all_pass() const;
  std::string table() const;
};

ReproduceReport run_reproduce();

}  // namespace noonsim
