#include "noonsim/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <set>
#include <sstream>

namespace noonsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Peak counts used when neither rate_scale nor peak_counts is configured.
constexpr double kDefaultPeakCounts = 184.0;

OverlapIntegrals curve_overlaps(const ScenarioConfig& config) {
  OverlapIntegrals ov;
  if (config.has_direct()) {
    ov = OverlapIntegrals::from_ratio(*config.e_over_a, config.v1);
  } else {
    QuadratureSpec q;
    q.nodes = config.quad_nodes;
    ov = overlap_integrals(config.spectral_model(), q);
    ov.v1 = config.v1;
  }
  ov.validate();
  return ov;
}

std::vector<std::string> header_lines(const std::string& command, const ScenarioConfig& config) {
  std::vector<std::string> lines{"noonsim " + command};
  for (auto& l : config.to_lines()) lines.push_back(std::move(l));
  return lines;
}

}  // namespace

std::string resolve_output_path(const ScenarioConfig& config, const std::string& fallback_name) {
  if (!config.output.empty()) return config.output;
  const char* dir = std::getenv(kOutputDirEnv);
  std::filesystem::path base = (dir && *dir) ? dir : ".";
  return (base / fallback_name).string();
}

FringeSeries compute_curve(const ScenarioConfig& config) {
  config.validate();
  const auto grid = config.grid();
  if (config.model == CurveModel::kIdeal)
    return config.scheme == SchemeKind::kAsymmetricBs ? asym_fringe(grid) : noon_fringe(grid);

  const OverlapIntegrals ov = curve_overlaps(config);
  FringeSeries f;
  f.metadata = {to_string(config.scheme), "P4 (A = " + format_double(ov.A) + ")", std::nullopt};
  for (double phi : grid) {
    f.phases.push_back(phi);
    f.values.push_back(p4(config.scheme, phi, ov));
  }
  return f;
}

double resolved_rate_scale(const ScenarioConfig& config, const FringeSeries& curve) {
  if (config.rate_scale) return *config.rate_scale;
  const double peak = config.peak_counts.value_or(kDefaultPeakCounts);
  const double top = curve.max_value();
  if (top <= 0.0 || config.duration <= 0.0) return 0.0;
  return peak / (top * config.duration);
}

FringeFile run_fringe(const ScenarioConfig& config) {
  const FringeSeries curve = compute_curve(config);
  FringeFile file;
  file.comments = header_lines("fringe", config);
  file.comments.push_back("normalization=" + curve.metadata.normalization);
  file.phases = curve.phases;
  file.values = curve.values;
  return file;
}

CountsFile run_counts(const ScenarioConfig& config) {
  const FringeSeries curve = compute_curve(config);
  const double rate = resolved_rate_scale(config, curve);
  CountsFile file;
  file.comments = header_lines("counts", config);
  file.comments.push_back("rng=" + std::string(kRngName));
  file.comments.push_back("resolved_rate_scale=" + format_double(rate));
  file.records = simulate_counts(curve, rate, config.duration, config.bg_rate, config.seed);
  return file;
}

FitResult run_fit(const ScenarioConfig& config, const CountsFile& counts) {
  for (int h : config.harmonics)
    if (h != 1 && h != 3) throw ValidationError("harmonics: must be drawn from {1, 3}");
  return fit_fringe(counts.records, config.fit_harmonics());
}

ScenarioConfig config_from_header(const std::vector<std::string>& comments) {
  const auto keys = config_keys();
  const std::set<std::string> known(keys.begin(), keys.end());
  ScenarioConfig config;
  bool any = false;
  for (const auto& line : comments) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    if (!known.count(key)) continue;
    set_config_value(config, key, line.substr(eq + 1));
    any = true;
  }
  if (!any) throw ValidationError("file header carries no configuration");
  return config;
}

// ---------------------------------------------------------------------------
// reproduce

bool ReproduceReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ReproduceReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(6) << "" << std::setw(28) << "quantity" << std::right
     << std::setw(16) << "value" << std::setw(16) << "expected" << std::setw(10) << "tol"
     << "  reference\n";
  for (const auto& c : checks) {
    os << std::left << std::setw(6) << (c.pass ? "PASS" : "FAIL") << std::setw(28) << c.name
       << std::right << std::setprecision(10) << std::setw(16) << c.value << std::setw(16)
       << c.expected << std::setprecision(2) << std::setw(10) << c.tolerance << "  "
       << c.reference << "\n";
  }
  os << (all_pass() ? "all checks passed\n" : "some checks FAILED\n");
  return os.str();
}

ReproduceReport run_reproduce() {
  ReproduceReport report;
  auto check = [&](std::string name, double value, double expected, double tol,
                   std::string reference = {}) {
    const bool pass = std::abs(value - expected) <= tol;
    report.checks.push_back({std::move(name), value, expected, tol, std::move(reference), pass});
  };
  auto check_below = [&](std::string name, double value, double bound) {
    report.checks.push_back({std::move(name), value, 0.0, bound, {}, std::abs(value) < bound});
  };

  // Two photons meet one at an asymmetric splitter.
  {
    const ModeLabel a = H("a"), b = H("b");
    const auto bs = make_beamsplitter(1.0 / 3.0, a, b);
    const auto out = apply_transform(PureState::basis({a, b}, {{a, 2}, {b, 1}}), bs);
    // Terms listed as |3,0>, |0,3>, |2,1>, |1,2>.
    const int first[4] = {3, 0, 2, 1};
    const double expected[4] = {std::sqrt(2.0) / 3.0, 2.0 / 3.0, -std::sqrt(3.0) / 3.0, 0.0};
    for (int k = 0; k < 4; ++k) {
      const std::string ket = "|" + std::to_string(first[k]) + "," + std::to_string(3 - first[k]) + ">";
      const Complex amp = out.amplitude({{a, first[k]}, {b, 3 - first[k]}});
      check("bs " + ket + " amplitude", amp.real(), expected[k], 1e-12);
      check_below("bs " + ket + " imag", std::abs(amp.imag()), 1e-12);
    }
  }

  // Ideal asymmetric-scheme fringe.
  {
    const auto grid = phase_grid(0.0, 2.0 * kPi, 25);
    const auto f = asym_fringe(grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, std::abs(f.values[k] - 32.0 / 81.0 * (1.0 + std::cos(3.0 * grid[k]))));
    const std::vector<double> extrema{0.0, kPi / 3.0};
    const auto ext = asym_fringe(extrema);
    check("asym fringe max", ext.values[0], 64.0 / 81.0, 1e-10);
    check("asym fringe min", ext.values[1], 0.0, 1e-10);
    check_below("asym fringe shape residual", worst, 1e-10);
  }

  // Multimode visibilities at E/A = 0.86, v1 = 0.96.
  {
    const auto ov = OverlapIntegrals::from_ratio(0.86, 0.96);
    const auto s1 = visibilities(ov, SchemeKind::kAsymmetricBs);
    const auto s2 = visibilities(ov, SchemeKind::kNoonProjection);
    check("asym V3 (E/A=0.86,v1=0.96)", s1.v3, 0.836, 0.010, "0.85 fitted");
    check("asym V1 (E/A=0.86,v1=0.96)", s1.v1, 0.052, 0.005, "0.05 fitted");
    check("noon V3 (E/A=0.86,v1=0.96)", s2.v3, 0.841, 0.010, "0.85 predicted, 0.84 observed");
    const auto ideal = OverlapIntegrals::from_ratio(1.0, 1.0);
    check("asym V3 (E=A)", visibilities(ideal, SchemeKind::kAsymmetricBs).v3, 1.0, 1e-12);
    check("asym V1 (E=A)", visibilities(ideal, SchemeKind::kAsymmetricBs).v1, 0.0, 1e-12);
  }

  // Phase-averaged rate ratio between the schemes.
  {
    const double r = rate_ratio(OverlapIntegrals::from_ratio(1.0, 1.0));
    check("rate ratio (E=A)", r, 1152.0 / 243.0, 1e-9);
    check("rate ratio vs measured", r, 4.8, 0.1, "4.8");
  }

  // NOON-scheme harmonic purity from the permutation engine.
  {
    // The engine carries the spectral overlaps only, so compare at v1 = 1.
    const auto ov = OverlapIntegrals::from_ratio(0.86, 1.0);
    const auto grid = phase_grid(0.0, 2.0 * kPi, 25);
    std::vector<double> values;
    for (double phi : grid)
      values.push_back(permutation_overlap_p4(
          scheme_coefficients(SchemeKind::kNoonProjection, phi), ov));
    const auto h = harmonic_magnitudes(values, 3);
    check_below("noon V1 (engine)", h[1] / h[0], 1e-10);
    check_below("noon cos 2phi (engine)", h[2] / h[0], 1e-10);
    check("noon V3 (engine)", h[3] / h[0], visibilities(ov, SchemeKind::kNoonProjection).v3, 1e-9);
  }

  // The heralded |2,1> never passes the NOON projector.
  check_below("noon projection of |2,1>", noon_projection_prob_circuit(heralded_input()), 1e-12);

  return report;
}

}  // namespace noonsim
