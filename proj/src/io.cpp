#include "noonsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace noonsim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

int parse_int(const std::string& text, const std::string& what) {
  int v = 0;
  const auto t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ValidationError(what + ": expected an integer, got '" + text + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const auto t = trim(text);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ValidationError(what + ": expected a non-negative integer, got '" + text + "'");
  return v;
}

std::vector<int> parse_harmonics(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text, ',')) {
    if (trim(part).empty()) continue;
    out.push_back(parse_int(part, "harmonics"));
  }
  return out;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

// ---------------------------------------------------------------------------
// Numbers

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf, p);
}

double parse_double(const std::string& text, const std::string& what) {
  const auto t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ValidationError(what + ": expected a number, got '" + text + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Config

std::vector<std::string> config_keys() {
  return {"scheme",    "model",       "phase_start", "phase_stop", "points",
          "sigma_p",   "sigma_f",     "delay_h",     "delay_v",    "center_offset",
          "quad_nodes", "e_over_a",   "v1",          "rate_scale", "peak_counts",
          "duration",  "bg_rate",     "seed",        "harmonics",  "input",
          "output"};
}

void set_config_value(ScenarioConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  auto optional_number = [&](std::optional<double>& slot) {
    if (value.empty())
      slot.reset();
    else
      slot = parse_double(value, key);
  };
  if (key == "scheme") {
    c.scheme = scheme_from_string(value);
  } else if (key == "model") {
    if (value == "ideal")
      c.model = CurveModel::kIdeal;
    else if (value == "multimode")
      c.model = CurveModel::kMultimode;
    else
      throw ValidationError("model: expected ideal or multimode, got '" + value + "'");
  } else if (key == "phase_start") {
    c.phase_start = parse_double(value, key);
  } else if (key == "phase_stop") {
    c.phase_stop = parse_double(value, key);
  } else if (key == "points") {
    c.points = parse_int(value, key);
  } else if (key == "sigma_p") {
    optional_number(c.sigma_p);
  } else if (key == "sigma_f") {
    optional_number(c.sigma_f);
  } else if (key == "delay_h") {
    c.delay_h = parse_double(value, key);
  } else if (key == "delay_v") {
    c.delay_v = parse_double(value, key);
  } else if (key == "center_offset") {
    c.center_offset = parse_double(value, key);
  } else if (key == "quad_nodes") {
    c.quad_nodes = parse_int(value, key);
  } else if (key == "e_over_a") {
    optional_number(c.e_over_a);
  } else if (key == "v1") {
    c.v1 = parse_double(value, key);
  } else if (key == "rate_scale") {
    optional_number(c.rate_scale);
  } else if (key == "peak_counts") {
    optional_number(c.peak_counts);
  } else if (key == "duration") {
    c.duration = parse_double(value, key);
  } else if (key == "bg_rate") {
    c.bg_rate = parse_double(value, key);
  } else if (key == "seed") {
    c.seed = parse_u64(value, key);
  } else if (key == "harmonics") {
    c.harmonics = parse_harmonics(value);
  } else if (key == "input") {
    c.input = value;
  } else if (key == "output") {
    c.output = value;
  } else {
    throw ValidationError("unknown key '" + key + "'");
  }
}

void apply_config_text(ScenarioConfig& config, const std::string& text,
                       const std::string& source) {
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(i + 1) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(where + "expected key=value, got '" + line + "'");
    try {
      set_config_value(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
}

void ScenarioConfig::validate() const {
  if (points < 2) throw ValidationError("points: need at least 2 phase points");
  if (!std::isfinite(phase_start) || !std::isfinite(phase_stop) || !(phase_stop > phase_start))
    throw ValidationError("phase_stop: must exceed phase_start");
  if (model == CurveModel::kMultimode) {
    if (has_spectral() == has_direct())
      throw ValidationError(
          "model=multimode: supply exactly one of spectral parameters (sigma_p, sigma_f) "
          "or e_over_a");
    if (has_spectral()) {
      if (!sigma_p || !sigma_f)
        throw ValidationError("sigma_p/sigma_f: both bandwidths are required");
      if (!(*sigma_p > 0.0)) throw ValidationError("sigma_p: must be positive");
      if (!(*sigma_f > 0.0)) throw ValidationError("sigma_f: must be positive");
      if (quad_nodes < 2) throw ValidationError("quad_nodes: need at least 2");
    } else if (!(*e_over_a >= -1.0 && *e_over_a <= 1.0)) {
      throw ValidationError("e_over_a: must lie in [-1, 1]");
    }
  } else if (has_spectral() || has_direct()) {
    throw ValidationError("model=ideal takes no spectral parameters or e_over_a");
  }
  if (!(v1 >= 0.0 && v1 <= 1.0)) throw ValidationError("v1: must lie in [0, 1]");
  if (rate_scale && peak_counts)
    throw ValidationError("rate_scale/peak_counts: give one signal scale, not both");
  if (rate_scale && !(*rate_scale >= 0.0)) throw ValidationError("rate_scale: must be >= 0");
  if (peak_counts && !(*peak_counts >= 0.0)) throw ValidationError("peak_counts: must be >= 0");
  if (!(duration >= 0.0)) throw ValidationError("duration: must be >= 0");
  if (!(bg_rate >= 0.0)) throw ValidationError("bg_rate: must be >= 0");
  for (int h : harmonics)
    if (h != 1 && h != 3) throw ValidationError("harmonics: must be drawn from {1, 3}");
}

std::vector<int> ScenarioConfig::fit_harmonics() const {
  if (!harmonics.empty()) return harmonics;
  return scheme == SchemeKind::kAsymmetricBs ? std::vector<int>{1, 3} : std::vector<int>{3};
}

std::vector<double> ScenarioConfig::grid() const {
  return phase_grid(phase_start, phase_stop, points);
}

SpectralModel ScenarioConfig::spectral_model() const {
  SpectralModel m;
  m.pump_bandwidth = sigma_p.value_or(1.0);
  m.filter_bandwidth = sigma_f.value_or(1.0);
  m.delay_h = delay_h;
  m.delay_v = delay_v;
  m.center_offset = center_offset;
  return m;
}

std::vector<std::string> ScenarioConfig::to_lines() const {
  std::string harm;
  for (std::size_t k = 0; k < harmonics.size(); ++k)
    harm += (k ? "," : "") + std::to_string(harmonics[k]);
  return {
      "scheme=" + to_string(scheme),
      std::string("model=") + (model == CurveModel::kIdeal ? "ideal" : "multimode"),
      "phase_start=" + format_double(phase_start),
      "phase_stop=" + format_double(phase_stop),
      "points=" + std::to_string(points),
      "sigma_p=" + opt(sigma_p),
      "sigma_f=" + opt(sigma_f),
      "delay_h=" + format_double(delay_h),
      "delay_v=" + format_double(delay_v),
      "center_offset=" + format_double(center_offset),
      "quad_nodes=" + std::to_string(quad_nodes),
      "e_over_a=" + opt(e_over_a),
      "v1=" + format_double(v1),
      "rate_scale=" + opt(rate_scale),
      "peak_counts=" + opt(peak_counts),
      "duration=" + format_double(duration),
      "bg_rate=" + format_double(bg_rate),
      "seed=" + std::to_string(seed),
      "harmonics=" + harm,
  };
}

// ---------------------------------------------------------------------------
// CSV

std::string write_counts_csv(const CountsFile& file) {
  std::string out;
  for (const auto& c : file.comments) out += "# " + c + "\n";
  out += kCountsHeader;
  out += "\n";
  for (const auto& r : file.records) {
    out += format_double(r.phase) + "," + format_double(r.duration) + "," +
           std::to_string(r.raw_counts) + "," + format_double(r.background_estimate) + "\n";
  }
  return out;
}

CountsFile parse_counts_csv(const std::string& text) {
  CountsFile file;
  const auto lines = lines_of(text);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string row = "row " + std::to_string(i + 1);
    const std::string& line = lines[i];
    if (!header_seen && line.rfind("#", 0) == 0) {
      file.comments.push_back(line.rfind("# ", 0) == 0 ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kCountsHeader)
        throw ValidationError(row + ": expected header '" + std::string(kCountsHeader) + "'");
      header_seen = true;
      continue;
    }
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 4)
      throw ValidationError(row + ": expected 4 fields, found " + std::to_string(fields.size()));
    CountRecord r;
    try {
      r.phase = parse_double(fields[0], "phase_rad");
      r.duration = parse_double(fields[1], "duration_s");
      const auto t = trim(fields[2]);
      std::int64_t n = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
      if (ec != std::errc() || p != t.data() + t.size() || t.empty() || n < 0)
        throw ValidationError("raw_counts: expected a non-negative integer, got '" + fields[2] + "'");
      r.raw_counts = n;
      r.background_estimate = parse_double(fields[3], "background_counts");
    } catch (const ValidationError& e) {
      throw ValidationError(row + ": " + e.what());
    }
    if (!(r.duration >= 0.0)) throw ValidationError(row + ": duration_s must be non-negative");
    file.records.push_back(r);
  }
  if (!header_seen) throw ValidationError("counts file has no header row");
  return file;
}

std::string write_fringe_csv(const FringeFile& file) {
  std::string out;
  for (const auto& c : file.comments) out += "# " + c + "\n";
  out += kFringeHeader;
  out += "\n";
  for (std::size_t k = 0; k < file.phases.size(); ++k)
    out += format_double(file.phases[k]) + "," + format_double(file.values[k]) + "\n";
  return out;
}

FringeFile parse_fringe_csv(const std::string& text) {
  FringeFile file;
  const auto lines = lines_of(text);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string row = "row " + std::to_string(i + 1);
    const std::string& line = lines[i];
    if (!header_seen && line.rfind("#", 0) == 0) {
      file.comments.push_back(line.rfind("# ", 0) == 0 ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kFringeHeader)
        throw ValidationError(row + ": expected header '" + std::string(kFringeHeader) + "'");
      header_seen = true;
      continue;
    }
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2)
      throw ValidationError(row + ": expected 2 fields, found " + std::to_string(fields.size()));
    try {
      file.phases.push_back(parse_double(fields[0], "phase_rad"));
      file.values.push_back(parse_double(fields[1], "value"));
    } catch (const ValidationError& e) {
      throw ValidationError(row + ": " + e.what());
    }
  }
  if (!header_seen) throw ValidationError("fringe file has no header row");
  return file;
}

// ---------------------------------------------------------------------------
// Fit report

std::string fit_report_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["P40"] = fit.P40;
  j["V3"] = fit.V3;
  j["V1"] = fit.V1;
  j["phi0"] = fit.phi0;
  j["chi2"] = fit.chi2;
  j["dof"] = fit.dof;
  nlohmann::ordered_json cov;
  cov["parameters"] = fit.parameter_names;
  auto matrix = nlohmann::json::array();
  for (Eigen::Index i = 0; i < fit.covariance.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < fit.covariance.cols(); ++k) row.push_back(fit.covariance(i, k));
    matrix.push_back(row);
  }
  cov["matrix"] = matrix;
  j["covariance"] = cov;
  return j.dump(2) + "\n";
}

std::string fit_report_table(const FitResult& fit) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "param" << std::right << std::setw(16) << "value"
     << std::setw(16) << "sigma" << "\n";
  for (std::size_t k = 0; k < fit.parameter_names.size(); ++k) {
    const auto& name = fit.parameter_names[k];
    const double value = name == "P40" ? fit.P40
                         : name == "V3" ? fit.V3
                         : name == "V1" ? fit.V1
                                        : fit.phi0;
    os << std::left << std::setw(8) << name << std::right << std::setw(16)
       << std::setprecision(8) << value << std::setw(16) << fit.sigma(name) << "\n";
  }
  os << "chi2 = " << std::setprecision(6) << fit.chi2 << " for " << fit.dof << " dof\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
  if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace noonsim
