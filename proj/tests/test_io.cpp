#include "doctest.h"

#include <cmath>
#include <algorithm>
#include <cstring>
#include <random>

#include "json.hpp"
#include "noonsim/commands.hpp"

using namespace noonsim;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

ScenarioConfig multimode(SchemeKind scheme) {
  ScenarioConfig c;
  c.scheme = scheme;
  c.model = CurveModel::kMultimode;
  c.e_over_a = 0.86;
  c.v1 = 0.96;
  return c;
}

}  // namespace

TEST_CASE("doubles survive formatting bit for bit") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 2000; ++k) {
    const double x = k % 3 == 0 ? u(rng) : std::ldexp(u(rng), static_cast<int>(k % 200) - 100);
    const double y = parse_double(format_double(x), "x");
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK_THROWS_AS(parse_double("1.5x", "x"), ValidationError);
  CHECK_THROWS_AS(parse_double("", "x"), ValidationError);
}

TEST_CASE("counts files round-trip byte for byte") {
  ScenarioConfig c = multimode(SchemeKind::kAsymmetricBs);
  c.seed = 314;
  const auto file = run_counts(c);
  const std::string text = write_counts_csv(file);
  const auto parsed = parse_counts_csv(text);
  CHECK(parsed.records == file.records);
  CHECK(parsed.comments == file.comments);
  CHECK(write_counts_csv(parsed) == text);
  CHECK(text.find(std::string(kCountsHeader) + "\n") != std::string::npos);
}

TEST_CASE("fringe files round-trip byte for byte") {
  const auto file = run_fringe(ScenarioConfig{});
  const std::string text = write_fringe_csv(file);
  const auto parsed = parse_fringe_csv(text);
  CHECK(parsed.values == file.values);
  CHECK(write_fringe_csv(parsed) == text);
}

TEST_CASE("malformed CSV rows are reported by number") {
  const std::string good = "# x\nphase_rad,duration_s,raw_counts,background_counts\n0,100,5,120\n";
  CHECK_NOTHROW(parse_counts_csv(good));
  CHECK(error_of([&] { parse_counts_csv(good + "0.5,100,7\n"); }).find("row 4") != std::string::npos);
  CHECK(error_of([&] { parse_counts_csv(good + "0.5,100,7.5,120\n"); }).find("row 4") != std::string::npos);
  CHECK(error_of([&] { parse_counts_csv(good + "0.5,100,-1,120\n"); }).find("row 4") != std::string::npos);
  CHECK(error_of([&] { parse_counts_csv(good + "abc,100,1,120\n"); }).find("phase_rad") != std::string::npos);
  CHECK(error_of([&] { parse_counts_csv("# x\nphase,duration\n"); }).find("row 2") != std::string::npos);
  CHECK_THROWS_AS(parse_counts_csv("# only comments\n"), ValidationError);
  CHECK(error_of([&] { parse_fringe_csv("phase_rad,value\n1,2,3\n"); }).find("row 2") != std::string::npos);
}

TEST_CASE("config text parsing and diagnostics") {
  ScenarioConfig c;
  apply_config_text(c, "# scenario\nscheme = noon\n\npoints=40\nseed=9\n", "cfg");
  CHECK(c.scheme == SchemeKind::kNoonProjection);
  CHECK(c.points == 40);
  CHECK(c.seed == 9);
  CHECK(error_of([&] { apply_config_text(c, "points=3\nfoo=1\n", "cfg"); }).find("cfg:2:") != std::string::npos);
  CHECK(error_of([&] { apply_config_text(c, "points\n", "cfg"); }).find("cfg:1:") != std::string::npos);
  CHECK(error_of([&] { apply_config_text(c, "points=two\n", "cfg"); }).find("points") != std::string::npos);

  // later assignments (command-line overrides) win
  set_config_value(c, "points", "12");
  CHECK(c.points == 12);
}

TEST_CASE("config validation") {
  auto invalid = [](auto edit) {
    ScenarioConfig c;
    edit(c);
    return error_of([&] { c.validate(); });
  };
  CHECK(invalid([](ScenarioConfig&) {}).empty());
  CHECK(invalid([](ScenarioConfig& c) { c.points = 1; }).find("points") != std::string::npos);
  CHECK(invalid([](ScenarioConfig& c) { c.phase_stop = c.phase_start; }).find("phase_stop") != std::string::npos);
  CHECK(!invalid([](ScenarioConfig& c) { c.model = CurveModel::kMultimode; }).empty());
  CHECK(!invalid([](ScenarioConfig& c) {
          c = multimode(SchemeKind::kAsymmetricBs);
          c.sigma_p = 1.0;
          c.sigma_f = 1.0;
        }).empty());
  CHECK(invalid([](ScenarioConfig& c) {
          c.model = CurveModel::kMultimode;
          c.sigma_p = 1.0;
          c.sigma_f = -1.0;
        }).find("sigma_f") != std::string::npos);
  CHECK(!invalid([](ScenarioConfig& c) { c.e_over_a = 0.5; }).empty());
  CHECK(!invalid([](ScenarioConfig& c) {
          c.rate_scale = 1.0;
          c.peak_counts = 184.0;
        }).empty());
  CHECK(!invalid([](ScenarioConfig& c) { c.harmonics = {2}; }).empty());
}

TEST_CASE("fringe command outputs") {
  ScenarioConfig c;
  const auto f = run_fringe(c);
  REQUIRE(f.values.size() == 25);
  double top = 0.0;
  for (double v : f.values) top = std::max(top, v);
  CHECK(std::abs(top - 64.0 / 81.0) < 1e-12);

  const auto noon = run_fringe(multimode(SchemeKind::kNoonProjection));
  std::vector<double> var(noon.values.size(), 1.0);
  const auto fit = fit_series(noon.phases, noon.values, var, {3});
  CHECK(std::abs(fit.V3 - 0.84) <= 0.01);

  c.points = 0;
  CHECK_THROWS_AS(run_fringe(c), ValidationError);
}

TEST_CASE("spectral scenarios run through the quadrature") {
  ScenarioConfig c;
  c.model = CurveModel::kMultimode;
  c.sigma_p = 1.0;
  c.sigma_f = 1.0;
  const auto f = run_fringe(c);
  const double r = std::sqrt(3.0) / 2.0;
  const auto ov = OverlapIntegrals::from_ratio(r);
  // Curves are normalized to the quadrature's A, so compare shapes.
  CHECK(f.values[1] / f.values[0] == doctest::Approx(p4_asym(f.phases[1], ov) / p4_asym(0.0, ov)).epsilon(1e-9));
  c.quad_nodes = 3;
  CHECK_THROWS_AS(run_fringe(c), NumericalError);
}

TEST_CASE("counts command at default scale") {
  ScenarioConfig c = multimode(SchemeKind::kAsymmetricBs);
  const auto file = run_counts(c);
  REQUIRE(file.records.size() == 25);
  for (const auto& r : file.records) CHECK(r.background_estimate == doctest::Approx(120.0));
  CHECK(resolved_rate_scale(c, compute_curve(c)) * compute_curve(c).max_value() * 100.0 ==
        doctest::Approx(184.0));
  CHECK(write_counts_csv(run_counts(c)) == write_counts_csv(file));

  c.duration = 0.0;
  for (const auto& r : run_counts(c).records) CHECK(r.raw_counts == 0);
}

TEST_CASE("output headers regenerate the same file") {
  ScenarioConfig c = multimode(SchemeKind::kNoonProjection);
  c.seed = 77;
  c.phase_stop = 5.5;
  c.points = 31;
  c.peak_counts = 250.0;
  const std::string text = write_counts_csv(run_counts(c));
  const auto again = config_from_header(parse_counts_csv(text).comments);
  CHECK(write_counts_csv(run_counts(again)) == text);

  ScenarioConfig s;
  s.model = CurveModel::kMultimode;
  s.sigma_p = 0.8;
  s.sigma_f = 1.1;
  s.delay_h = 0.3;
  const std::string ftext = write_fringe_csv(run_fringe(s));
  CHECK(write_fringe_csv(run_fringe(config_from_header(parse_fringe_csv(ftext).comments))) == ftext);
  CHECK_THROWS_AS(config_from_header({"nothing here"}), ValidationError);
}

TEST_CASE("fit command and its JSON report") {
  ScenarioConfig c = multimode(SchemeKind::kAsymmetricBs);
  c.seed = 5;
  const auto counts = parse_counts_csv(write_counts_csv(run_counts(c)));
  const auto fit = run_fit(c, counts);
  const double injected = visibilities(OverlapIntegrals::from_ratio(0.86, 0.96), c.scheme).v3;
  CHECK(std::abs(fit.V3 - injected) < 3.0 * fit.sigma("V3"));
  CHECK(std::abs(fit.V3 - 0.85) < 3.0 * fit.sigma("V3"));

  const auto j = nlohmann::json::parse(fit_report_json(fit));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"P40", "V1", "V3", "chi2", "covariance", "dof", "phi0"});
  CHECK(j["dof"] == 20);
  CHECK(j["covariance"]["matrix"].size() == 4);
  CHECK(fit_report_table(fit).find("V3") != std::string::npos);

  c.harmonics = {3};
  CHECK(run_fit(c, counts).dof == 22);
}

TEST_CASE("reproduce report passes") {
  const auto r = run_reproduce();
  CHECK(r.all_pass());
  CHECK(r.table().find("FAIL") == std::string::npos);
}
