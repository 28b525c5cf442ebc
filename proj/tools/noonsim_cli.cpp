// noonsim: fringe scans, simulated counts, fits and the reproduction report.
//
// Exit status: 0 success, 1 reproduce check failed, 2 invalid input,
// 3 numerical failure.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "noonsim/commands.hpp"

namespace {

using noonsim::ScenarioConfig;

struct Overrides {
  std::string config_file;
  std::string from_file;
  std::vector<std::pair<std::string, std::string>> values;  // in command-line order
};

void add_config_options(CLI::App* cmd, Overrides& ov, const std::vector<std::string>& keys) {
  cmd->add_option("--config", ov.config_file, "key=value scenario file");
  for (const auto& key : keys) {
    std::string names = "--" + key;
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != key) names += ",--" + dashed;
    cmd->add_option_function<std::string>(
        names, [&ov, key](const std::string& v) { ov.values.emplace_back(key, v); },
        "overrides " + key);
  }
}

// defaults <- header of --from file <- --config file <- flags
ScenarioConfig resolve(const Overrides& ov) {
  ScenarioConfig config;
  if (!ov.from_file.empty()) {
    const auto text = noonsim::read_file(ov.from_file);
    std::vector<std::string> comments;
    try {
      comments = noonsim::parse_counts_csv(text).comments;
    } catch (const noonsim::ValidationError&) {
      comments = noonsim::parse_fringe_csv(text).comments;
    }
    config = noonsim::config_from_header(comments);
    config.output.clear();
  }
  if (!ov.config_file.empty())
    noonsim::apply_config_text(config, noonsim::read_file(ov.config_file), ov.config_file);
  for (const auto& [key, value] : ov.values) {
    try {
      noonsim::set_config_value(config, key, value);
    } catch (const noonsim::ValidationError& e) {
      throw noonsim::ValidationError("--" + key + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

const std::vector<std::string> kScenarioKeys{
    "scheme",  "model",   "phase_start", "phase_stop",    "points",     "sigma_p",
    "sigma_f", "delay_h", "delay_v",     "center_offset", "quad_nodes", "e_over_a",
    "v1",      "output"};
const std::vector<std::string> kCountKeys{"rate_scale", "peak_counts", "duration", "bg_rate",
                                          "seed"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three-photon de Broglie wavelength projection simulator"};
  app.require_subcommand(1);

  Overrides fringe_ov, counts_ov, fit_ov;
  std::string reproduce_json;

  auto* fringe = app.add_subcommand("fringe", "write a fringe scan CSV");
  add_config_options(fringe, fringe_ov, kScenarioKeys);
  fringe->add_option("--from", fringe_ov.from_file, "reuse the configuration echoed in a CSV header");

  auto* counts = app.add_subcommand("counts", "simulate photon counts along a fringe scan");
  auto count_keys = kScenarioKeys;
  count_keys.insert(count_keys.end(), kCountKeys.begin(), kCountKeys.end());
  add_config_options(counts, counts_ov, count_keys);
  counts->add_option("--from", counts_ov.from_file, "reuse the configuration echoed in a CSV header");

  auto* fit = app.add_subcommand("fit", "fit a counts CSV to the harmonic fringe model");
  add_config_options(fit, fit_ov, {"input", "harmonics", "scheme", "output"});

  auto* reproduce = app.add_subcommand("reproduce", "check the headline numbers");
  reproduce->add_option("--json", reproduce_json, "also write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fringe) {
      const auto config = resolve(fringe_ov);
      const auto path = noonsim::resolve_output_path(config, "fringe.csv");
      noonsim::write_file(path, noonsim::write_fringe_csv(noonsim::run_fringe(config)));
      std::cout << "wrote " << path << "\n";
    } else if (*counts) {
      const auto config = resolve(counts_ov);
      const auto path = noonsim::resolve_output_path(config, "counts.csv");
      noonsim::write_file(path, noonsim::write_counts_csv(noonsim::run_counts(config)));
      std::cout << "wrote " << path << "\n";
    } else if (*fit) {
      const auto config = resolve(fit_ov);
      if (config.input.empty()) throw noonsim::ValidationError("--input: counts CSV required");
      const auto data = noonsim::parse_counts_csv(noonsim::read_file(config.input));
      const auto result = noonsim::run_fit(config, data);
      const auto path = noonsim::resolve_output_path(config, "fit.json");
      noonsim::write_file(path, noonsim::fit_report_json(result));
      std::cout << noonsim::fit_report_table(result) << "wrote " << path << "\n";
    } else if (*reproduce) {
      const auto report = noonsim::run_reproduce();
      std::cout << report.table();
      if (!reproduce_json.empty()) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& c : report.checks)
          j.push_back({{"name", c.name},
                       {"value", c.value},
                       {"expected", c.expected},
                       {"tolerance", c.tolerance},
                       {"reference", c.reference},
                       {"pass", c.pass}});
        noonsim::write_file(reproduce_json, j.dump(2) + "\n");
      }
      return report.all_pass() ? 0 : 1;
    }
  } catch (const noonsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const noonsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
