#pragma once

// Scenario configuration (flat key=value text) and the CSV/JSON formats
// written by the command-line tool.

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "noonsim/experiment.hpp"
#include "noonsim/spectral.hpp"

namespace noonsim {

enum class CurveModel { kIdeal, kMultimode };

struct ScenarioConfig {
  SchemeKind scheme = SchemeKind::kAsymmetricBs;
  CurveModel model = CurveModel::kIdeal;

  double phase_start = 0.0;
  double phase_stop = 2.0 * std::numbers::pi;
  int points = 25;

  // Multimode curves take either a spectral model or direct overlaps.
  std::optional<double> sigma_p, sigma_f;
  double delay_h = 0.0, delay_v = 0.0, center_offset = 0.0;
  int quad_nodes = 48;
  std::optional<double> e_over_a;
  double v1 = 1.0;

  // Signal scale: rate_scale in counts/s per unit curve value, or peak_counts
  // (mean background-free counts at the fringe maximum). Not both.
  std::optional<double> rate_scale, peak_counts;
  double duration = 100.0;
  double bg_rate = 1.2;
  std::uint64_t seed = 1;

  std::vector<int> harmonics;  // empty: scheme default
  std::string input;
  std::string output;

  bool has_spectral() const { return sigma_p || sigma_f; }
  bool has_direct() const { return e_over_a.has_value(); }

  // Throws ValidationError naming the offending field.
  void validate() const;
  std::vector<int> fit_harmonics() const;
  std::vector<double> grid() const;
  SpectralModel spectral_model() const;

  // key=value lines covering every resolved field, in a fixed order.
  std::vector<std::string> to_lines() const;
};

// Applies `key=value` to `config`; throws ValidationError naming the key.
void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value);

// Parses a key=value file body ('#' comments, blank lines allowed). Errors
// carry "<source>:<line>:" prefixes.
void apply_config_text(ScenarioConfig& config, const std::string& text,
                       const std::string& source = "config");

std::vector<std::string> config_keys();

// Shortest round-trip decimal form.
std::string format_double(double v);
double parse_double(const std::string& text, const std::string& what);

inline constexpr const char* kCountsHeader = "phase_rad,duration_s,raw_counts,background_counts";
inline constexpr const char* kFringeHeader = "phase_rad,value";

struct CountsFile {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<CountRecord> records;
};

std::string write_counts_csv(const CountsFile& file);
// Throws ValidationError with the 1-based line number of a malformed row.
CountsFile parse_counts_csv(const std::string& text);

struct FringeFile {
  std::vector<std::string> comments;
  std::vector<double> phases;
  std::vector<double> values;
};

std::string write_fringe_csv(const FringeFile& file);
FringeFile parse_fringe_csv(const std::string& text);

// {P40, V3, V1, phi0, chi2, dof, covariance:{parameters, matrix}}
std::string fit_report_json(const FitResult& fit);
std::string fit_report_table(const FitResult& fit);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace noonsim
