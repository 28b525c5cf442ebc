// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "noonsim/commands.hpp"
#include "oracles.hpp"

using namespace noonsim;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// |DFT_h| * 2/N (h > 0) of uniformly spaced samples over one period.
double harmonic(const std::vector<double>& v, int h) {
  std::complex<double> s{};
  const double n = static_cast<double>(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * std::polar(1.0, -2.0 * kPi * h * k / n);
  return std::abs(s) * (h == 0 ? 1.0 : 2.0) / n;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int number, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  std::printf("%s criterion %d: %s (%.2fs)%s\n", out.pass ? "PASS" : "FAIL", number, title.c_str(),
              seconds_since(t0), out.detail.str().c_str());
  std::fflush(stdout);
  if (!out.pass) ++failures;
}

}  // namespace

int main() {
  criterion(1, "two-photon-plus-one amplitudes at T = 1/3", [](Outcome& o) {
    const ModeLabel c = H("c"), d = H("d");
    const auto in = PureState::basis({c, d}, {{c, 2}, {d, 1}});
    const auto bs = make_beamsplitter(1.0 / 3.0, c, d);
    apply_transform(in, bs);  // warm-up
    const auto t0 = Clock::now();
    const auto out = apply_transform(in, bs);
    const double elapsed = seconds_since(t0);
    const std::pair<FockVector, double> expected[] = {
        {{{c, 3}}, std::sqrt(2.0) / 3.0},
        {{{d, 3}}, 2.0 / 3.0},
        {{{c, 2}, {d, 1}}, -std::sqrt(3.0) / 3.0},
        {{{c, 1}, {d, 2}}, 0.0},
    };
    double worst = 0.0;
    for (const auto& [fock, amp] : expected) worst = std::max(worst, std::abs(out.amplitude(fock) - amp));
    o.detail << " max amplitude error " << worst << ", " << elapsed * 1e3 << " ms";
    o.require(worst <= 1e-12, "amplitudes within 1e-12");
    o.require(elapsed < 1e-3, "runtime < 1 ms");
  });

  criterion(2, "ideal asymmetric fringe (32/81)(1 + cos 3phi)", [](Outcome& o) {
    const auto grid = phase_grid(0.0, 2.0 * kPi, 25);
    const auto f = asym_fringe(grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst, std::abs(f.values[k] - 32.0 / 81.0 * (1.0 + std::cos(3.0 * grid[k]))));
    double stray = 0.0;
    for (int h = 1; h <= 12; ++h)
      if (h != 3) stray = std::max(stray, harmonic(f.values, h));
    o.detail << " pointwise error " << worst << ", largest non-(0,3) harmonic " << stray
             << ", DC " << harmonic(f.values, 0) << ", 3phi " << harmonic(f.values, 3);
    o.require(worst <= 1e-10, "pointwise within 1e-10");
    o.require(stray <= 1e-10, "only DC and 3phi above 1e-10");
    o.require(harmonic(f.values, 0) > 1e-10 && harmonic(f.values, 3) > 1e-10, "DC and 3phi present");
  });

  criterion(3, "NOON projection", [](Outcome& o) {
    const double p21 = noon_projection_prob(heralded_input());
    const double p21_circuit = noon_projection_prob_circuit(heralded_input());
    o.require(p21 == 0.0, "P3(|2,1>) = 0 exactly");
    o.require(p21_circuit < 1e-15, "circuit P3(|2,1>) = 0");

    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::pair<FockVector, Complex>> terms;
      for (int h = 0; h <= 3; ++h)
        terms.emplace_back(FockVector{{H("in"), h}, {V("in"), 3 - h}}, Complex(nd(rng), nd(rng)));
      const PureState s({H("in"), V("in")}, terms);
      // <NOON_3|s> = (c30 - c03)/sqrt 2
      const Complex overlap = (s.amplitude({{H("in"), 3}}) - s.amplitude({{V("in"), 3}})) / std::sqrt(2.0);
      worst = std::max(worst, std::abs(noon_projection_prob_circuit(s) - std::norm(overlap) / 18.0));
    }
    o.require(worst <= 1e-10, "circuit vs overlap within 1e-10");

    const std::vector<double> ext{0.0, kPi / 3.0};
    const auto f = noon_fringe(ext);
    const auto scan = noon_fringe(phase_grid(0.0, 2.0 * kPi, 60));
    double lo = 1.0, hi = 0.0;
    for (double v : scan.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.detail << " P3(|2,1>) " << p21 << ", circuit/overlap error " << worst << ", extrema {"
             << lo << ", " << hi << "}";
    o.require(std::abs(f.values[0] - 1.0 / 24.0) <= 1e-10 && std::abs(f.values[1]) <= 1e-10,
              "fringe extrema {0, 1/24}");
    o.require(std::abs(hi - 1.0 / 24.0) <= 1e-10 && std::abs(lo) <= 1e-10, "scan extrema {0, 1/24}");
  });

  criterion(4, "visibilities at E/A = 0.86, v1 = 0.96", [](Outcome& o) {
    const auto ov = OverlapIntegrals::from_ratio(0.86, 0.96);
    const auto s1 = visibilities(ov, SchemeKind::kAsymmetricBs);
    const auto s2 = visibilities(ov, SchemeKind::kNoonProjection);
    o.detail << " asym V3 " << s1.v3 << " (reference 0.85), V1 " << s1.v1
             << " (reference 0.05), noon V3 " << s2.v3 << " (reference 0.85/0.84)";
    o.require(std::abs(s1.v3 - 0.836) <= 0.010, "asym V3 0.836 +- 0.010");
    o.require(std::abs(s1.v1 - 0.052) <= 0.005, "asym V1 0.052 +- 0.005");
    o.require(std::abs(s2.v3 - 0.841) <= 0.010, "noon V3 0.841 +- 0.010");
    const auto ideal = visibilities(OverlapIntegrals::from_ratio(1.0, 1.0), SchemeKind::kAsymmetricBs);
    o.require(std::abs(ideal.v3 - 1.0) <= 1e-12 && std::abs(ideal.v1) <= 1e-12, "E = A recovers V3 = 1, V1 = 0");
  });

  criterion(5, "phase-averaged rate ratio", [](Outcome& o) {
    const double r = rate_ratio(OverlapIntegrals::from_ratio(1.0, 1.0));
    o.detail << " ratio " << r << " vs 1152/243 = " << 1152.0 / 243.0 << ", reference 4.8";
    o.require(std::abs(r - 1152.0 / 243.0) <= 1e-9, "equals 1152/243 within 1e-9");
    o.require(std::abs(r - 4.8) <= 0.1, "within 0.1 of 4.8");
  });

  criterion(6, "permutation engine vs four-dimensional spectral integration", [](Outcome& o) {
    const oracle::Gaussian settings[] = {{1.0, 1.0, 0.0, 0.0}, {0.8, 1.0, 0.6, 0.0}, {1.3, 0.9, 0.4, -0.3}};
    double worst = 0.0;
    for (const auto& g : settings) {
      const auto t0 = Clock::now();
      SpectralModel m;
      m.pump_bandwidth = g.sigma_p;
      m.filter_bandwidth = g.sigma_f;
      m.delay_h = g.delay_h;
      m.delay_v = g.delay_v;
      const auto ov = overlap_integrals(m);
      const double step = 0.3 * std::min(g.sigma_p, g.sigma_f);
      const double half = 6.5 * g.sigma_f;
      for (double phi : {0.0, 1.1}) {
        for (auto scheme : {SchemeKind::kAsymmetricBs, SchemeKind::kNoonProjection}) {
          const auto coeffs = scheme_coefficients(scheme, phi);
          std::vector<oracle::Group> groups;
          for (const auto& grp : coeffs.groups) groups.push_back({grp.weight, grp.terms});
          const double ref = oracle::grid_p4(g, coeffs.prefactor, groups, step, half);
          worst = std::max(worst, std::abs(permutation_overlap_p4(coeffs, ov) - ref) / ref);
        }
        const double pair = oracle::grid_p4_asym_pair_form(g, phi, step, half);
        const double engine = permutation_overlap_p4(scheme_coefficients(SchemeKind::kAsymmetricBs, phi), ov);
        worst = std::max(worst, std::abs(engine - pair) / pair);
      }
      const double elapsed = seconds_since(t0);
      o.detail << " setting(" << g.sigma_p << "," << g.sigma_f << "," << g.delay_h << ","
               << g.delay_v << ") " << elapsed << "s;";
      o.require(elapsed < 60.0, "each setting < 60 s");
    }
    o.detail << " worst relative error " << worst;
    o.require(worst <= 1e-6, "relative agreement within 1e-6");
  });

  criterion(7, "NOON-scheme harmonic cancellation", [](Outcome& o) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto grid = phase_grid(0.0, 2.0 * kPi, 25);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
      OverlapIntegrals ov;
      ov.A = 0.05 + 2.0 * u(rng);
      ov.E = (2.0 * u(rng) - 1.0) * ov.A;
      std::vector<double> v;
      for (double phi : grid)
        v.push_back(permutation_overlap_p4(scheme_coefficients(SchemeKind::kNoonProjection, phi), ov));
      worst = std::max({worst, harmonic(v, 1), harmonic(v, 2)});
    }
    o.detail << " largest cos phi / cos 2phi magnitude " << worst;
    o.require(worst < 1e-10, "below 1e-10");
  });

  criterion(8, "counting and fit ensemble at default statistics", [](Outcome& o) {
    const auto t0 = Clock::now();
    for (auto scheme : {SchemeKind::kAsymmetricBs, SchemeKind::kNoonProjection}) {
      ScenarioConfig c;
      c.scheme = scheme;
      c.model = CurveModel::kMultimode;
      c.e_over_a = 0.86;
      c.v1 = 0.96;
      c.peak_counts = 184.0;
      c.duration = 100.0;
      c.bg_rate = 1.2;
      const auto curve = compute_curve(c);
      const double rate = resolved_rate_scale(c, curve);
      const double injected = visibilities(OverlapIntegrals::from_ratio(0.86, 0.96), scheme).v3;
      const int seeds = 500;
      double s = 0.0, s2 = 0.0, chi = 0.0;
      int dof = 0;
      for (int seed = 1; seed <= seeds; ++seed) {
        const auto f = fit_fringe(simulate_counts(curve, rate, c.duration, c.bg_rate, seed),
                                  c.fit_harmonics());
        s += f.V3;
        s2 += f.V3 * f.V3;
        chi += f.chi2;
        dof = f.dof;
      }
      const double mean = s / seeds;
      const double se = std::sqrt((s2 / seeds - mean * mean) * seeds / (seeds - 1.0) / seeds);
      const double mean_chi = chi / seeds;
      o.detail << " " << to_string(scheme) << ": V3 bias " << mean - injected << " (SE " << se
               << "), mean chi2 " << mean_chi << " / dof " << dof << ";";
      o.require(std::abs(mean - injected) < 2.0 * se, to_string(scheme) + " |bias| < 2 SE");
      o.require(std::abs(mean_chi - dof) <= 0.1 * dof, to_string(scheme) + " mean chi2 within 10% of dof");
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 30.0, "runtime < 30 s");
  });

  criterion(9, "seeded count files are byte-identical", [](Outcome& o) {
    ScenarioConfig c;
    c.seed = 20240611;
    const std::string a = write_counts_csv(run_counts(c));
    const std::string b = write_counts_csv(run_counts(c));
    c.seed += 1;
    const std::string other = write_counts_csv(run_counts(c));
    o.require(a == b, "same seed, same bytes");
    o.require(a != other, "different seed, different counts");
    o.require(write_counts_csv(parse_counts_csv(a)) == a, "parse and rewrite preserves bytes");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
