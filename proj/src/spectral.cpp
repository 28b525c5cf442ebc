#include "noonsim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "noonsim/quadrature.hpp"

namespace noonsim {

namespace {

constexpr double kPi = std::numbers::pi;

Complex gaussian_phi(const SpectralModel& m, double w1, double w2) {
  const double c = m.center_offset;
  const double d1 = w1 - c, d2 = w2 - c;
  const double sp2 = m.pump_bandwidth * m.pump_bandwidth;
  const double sf2 = m.filter_bandwidth * m.filter_bandwidth;
  const double env = std::exp(-(d1 + d2) * (d1 + d2) / (4.0 * sp2) - d1 * d1 / (4.0 * sf2) -
                              d2 * d2 / (4.0 * sf2));
  return env * std::polar(1.0, w1 * m.delay_h + w2 * m.delay_v);
}

struct RawOverlaps {
  double A;
  Complex E;
};

RawOverlaps integrate(const SpectralModel& model, int nodes) {
  const GaussHermiteRule rule = gauss_hermite(nodes);
  const double scale = std::sqrt(2.0) * model.filter_bandwidth;
  Eigen::VectorXd w(nodes);
  std::vector<double> omega(nodes);
  for (int i = 0; i < nodes; ++i) {
    omega[i] = model.center_offset + scale * rule.nodes[i];
    w[i] = scale * rule.unweighted[i];
  }
  Eigen::MatrixXcd phi(nodes, nodes);
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) phi(i, j) = phi_value(model, omega[i], omega[j]);

  // A = (int |phi|^2)^2
  double pair = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) pair += w[i] * w[j] * std::norm(phi(i, j));

  // E = sum_{i,k} w_i w_k B_ik C_ik with
  //   B_ik = sum_j w_j phi*(i,j) phi(k,j),  C_ik = sum_l w_l phi*(k,l) phi(i,l).
  const Eigen::MatrixXcd b = phi.conjugate() * w.asDiagonal() * phi.transpose();
  const Eigen::MatrixXcd c = phi * w.asDiagonal() * phi.adjoint();
  Complex e{};
  for (int i = 0; i < nodes; ++i)
    for (int k = 0; k < nodes; ++k) e += w[i] * w[k] * b(i, k) * c(i, k);
  return {pair * pair, e};
}

double rel_change(double a, double b) {
  const double denom = std::max(std::abs(a), std::abs(b));
  return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

}  // namespace

void SpectralModel::validate() const {
  if (!(pump_bandwidth > 0.0) || !std::isfinite(pump_bandwidth))
    throw ValidationError("pump bandwidth must be positive");
  if (!(filter_bandwidth > 0.0) || !std::isfinite(filter_bandwidth))
    throw ValidationError("filter bandwidth must be positive");
  if (!std::isfinite(delay_h) || !std::isfinite(delay_v) || !std::isfinite(center_offset))
    throw ValidationError("spectral model parameters must be finite");
}

Complex phi_value(const SpectralModel& model, double w1, double w2) {
  if (!model.symmetrized) return gaussian_phi(model, w1, w2);
  return 0.5 * (gaussian_phi(model, w1, w2) + gaussian_phi(model, w2, w1));
}

OverlapIntegrals OverlapIntegrals::from_ratio(double e_over_a, double v1) {
  OverlapIntegrals ov;
  ov.A = 1.0;
  ov.E = e_over_a;
  ov.v1 = v1;
  ov.validate();
  return ov;
}

void OverlapIntegrals::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) throw ValidationError("overlap A must be positive");
  if (!std::isfinite(E) || std::abs(E) > A * (1.0 + 1e-12))
    throw ValidationError("overlap E must satisfy |E| <= A");
  if (!(v1 >= 0.0 && v1 <= 1.0)) throw ValidationError("v1 must lie in [0, 1]");
}

OverlapIntegrals overlap_integrals(const SpectralModel& model, const QuadratureSpec& quadrature) {
  model.validate();
  if (quadrature.nodes < 2) throw ValidationError("quadrature needs at least two nodes");
  RawOverlaps raw = integrate(model, quadrature.nodes);
  double delta = 0.0;
  if (quadrature.check_convergence) {
    const RawOverlaps fine = integrate(model, 2 * quadrature.nodes);
    delta = std::max(rel_change(raw.A, fine.A), rel_change(raw.E.real(), fine.E.real()));
    if (!(delta <= quadrature.convergence_tolerance)) {
      std::ostringstream os;
      os << "overlap quadrature did not converge: doubling " << quadrature.nodes
         << " nodes changed A/E by " << delta << " (relative)";
      throw NumericalError(os.str());
    }
    raw = fine;
  }
  OverlapIntegrals ov;
  ov.A = raw.A;
  ov.E = raw.E.real();
  ov.E_imag_residue = std::abs(raw.E.imag());
  ov.convergence_delta = delta;
  return ov;
}

// ---------------------------------------------------------------------------
// Closed forms

Visibilities visibilities(const OverlapIntegrals& ov, SchemeKind scheme) {
  ov.validate();
  const double a = ov.A, e = ov.E, v = ov.v1;
  if (scheme == SchemeKind::kAsymmetricBs) {
    const double d = 17.0 * a + 7.0 * e;
    return {v * v * v * 8.0 * (a + 2.0 * e) / d, v * 9.0 * (a - e) / d};
  }
  return {v * v * v * (a + 2.0 * e) / (2.0 * a + e), 0.0};
}

double p4_asym(double phase, const OverlapIntegrals& ov) {
  const Visibilities vis = visibilities(ov, SchemeKind::kAsymmetricBs);
  return 2.0 * (17.0 * ov.A + 7.0 * ov.E) / 243.0 *
         (1.0 + vis.v3 * std::cos(3.0 * phase) + vis.v1 * std::cos(phase));
}

double p4_noon(double phase, const OverlapIntegrals& ov) {
  const Visibilities vis = visibilities(ov, SchemeKind::kNoonProjection);
  return (2.0 * ov.A + ov.E) / 72.0 * (1.0 + vis.v3 * std::cos(3.0 * phase));
}

double p4(SchemeKind scheme, double phase, const OverlapIntegrals& ov) {
  return scheme == SchemeKind::kAsymmetricBs ? p4_asym(phase, ov) : p4_noon(phase, ov);
}

// ---------------------------------------------------------------------------
// Permutation-pairing engine

AsymAmplitudes asym_amplitudes(double phase) {
  const Complex u = std::polar(1.0, phase);
  const Complex rho1 = std::sqrt(2.0) * (1.0 + u) / 3.0;
  return {(1.0 - 2.0 * u) / 3.0, (u - 2.0) / 3.0, rho1, -rho1};
}

std::array<Complex, 3> noon_amplitudes(double phase) {
  auto e = [](double x) { return std::polar(1.0, x); };
  const double t = 2.0 * kPi / 3.0;
  const Complex base = 1.0 + e(3.0 * phase);
  return {base + 2.0 * e(2.0 * phase + t) + 2.0 * e(phase + 2.0 * t),
          base + 2.0 * e(2.0 * phase + 2.0 * t) + 2.0 * e(phase + t),
          base + 2.0 * e(2.0 * phase) + 2.0 * e(phase)};
}

SchemeCoefficients scheme_coefficients(SchemeKind scheme, double phase) {
  SchemeCoefficients c;
  c.scheme = scheme;
  c.phase = phase;
  if (scheme == SchemeKind::kAsymmetricBs) {
    const AsymAmplitudes a = asym_amplitudes(phase);
    c.prefactor = 0.5;
    c.groups = {
        {a.tau1 * a.tau2 * a.rho2, {{1, 2, 3, 4}, {2, 1, 3, 4}, {1, 3, 2, 4}, {3, 1, 2, 4}}},
        {a.rho1 * a.rho2 * a.rho2, {{2, 3, 1, 4}, {3, 2, 1, 4}}},
    };
  } else {
    const auto a = noon_amplitudes(phase);
    c.prefactor = 1.0 / std::sqrt(12.0 * 12.0 * 12.0);
    c.groups = {
        {a[0], {{1, 2, 3, 4}, {2, 1, 3, 4}}},
        {a[1], {{1, 3, 2, 4}, {3, 1, 2, 4}}},
        {a[2], {{2, 3, 1, 4}, {3, 2, 1, 4}}},
    };
  }
  return c;
}

namespace {

// The perfect matching of detectors {1..4} induced by a term, as the partner
// of detector 1 (three possible matchings).
int matching_of(const PairingTerm& t) {
  const int a = t[0], c = t[2], b = t[1], d = t[3];
  if (a == 1) return c;
  if (c == 1) return a;
  if (b == 1) return d;
  return b;
}

void validate_term(const PairingTerm& t) {
  std::set<int> seen(t.begin(), t.end());
  if (seen != std::set<int>{1, 2, 3, 4})
    throw ValidationError("pairing term must be a permutation of detector times 1..4");
}

}  // namespace

double permutation_overlap_p4(const SchemeCoefficients& coeffs, const OverlapIntegrals& ov) {
  ov.validate();
  if (coeffs.groups.empty()) throw ValidationError("scheme coefficients hold no groups");
  std::vector<std::vector<int>> matchings;
  for (const auto& g : coeffs.groups) {
    if (g.terms.empty()) throw ValidationError("permutation group without terms");
    std::vector<int> m;
    for (const auto& t : g.terms) {
      validate_term(t);
      m.push_back(matching_of(t));
    }
    matchings.push_back(std::move(m));
  }
  Complex total{};
  const std::size_t n = coeffs.groups.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      double overlap = 0.0;
      for (int s : matchings[k])
        for (int t : matchings[l]) overlap += (s == t) ? ov.A : ov.E;
      total += coeffs.groups[k].weight * std::conj(coeffs.groups[l].weight) * overlap;
    }
  }
  return coeffs.prefactor * coeffs.prefactor * total.real();
}

double rate_ratio(const OverlapIntegrals& ov) {
  ov.validate();
  // Rates are trigonometric polynomials of degree 3; 12 uniform samples
  // average them exactly.
  constexpr int kSamples = 12;
  double asym = 0.0, noon = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double phi = 2.0 * kPi * k / kSamples;
    asym += permutation_overlap_p4(scheme_coefficients(SchemeKind::kAsymmetricBs, phi), ov);
    noon += permutation_overlap_p4(scheme_coefficients(SchemeKind::kNoonProjection, phi), ov);
  }
  if (!(noon > 0.0)) throw NumericalError("NOON-scheme rate vanished");
  return asym / noon;
}

// ---------------------------------------------------------------------------
// Inversions of the scheme-1 visibilities

double ratio_from_v3(double v3) { return (17.0 * v3 - 8.0) / (16.0 - 7.0 * v3); }

double ratio_from_v1(double v1) { return (9.0 - 17.0 * v1) / (9.0 + 7.0 * v1); }

OverlapSolution solve_overlaps(double v3, double v1) {
  if (!(v3 > 0.0 && v3 <= 1.0) || !(v1 >= 0.0 && v1 < 1.0))
    throw ValidationError("visibilities must satisfy 0 < V3 <= 1 and 0 <= V1 < 1");
  if (v1 == 0.0) return {1.0, std::cbrt(v3)};
  // v1 from the V1 equation, substituted into the V3 equation; the residual
  // is increasing in r on [0, 1).
  auto mismatch_at = [&](double r) {
    const double vs = v1 * (17.0 + 7.0 * r) / (9.0 * (1.0 - r));
    return vs * vs * vs * 8.0 * (1.0 + 2.0 * r) / (17.0 + 7.0 * r) - v3;
  };
  double lo = 0.0, hi = 1.0 - 1e-12;
  if (mismatch_at(lo) > 0.0)
    throw NumericalError("no E/A in [0,1) reproduces the given visibilities");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mismatch_at(mid) > 0.0 ? hi : lo) = mid;
  }
  const double r = 0.5 * (lo + hi);
  const double vs = v1 * (17.0 + 7.0 * r) / (9.0 * (1.0 - r));
  if (vs > 1.0) throw NumericalError("visibilities imply a single-photon visibility above 1");
  return {r, vs};
}

}  // namespace noonsim
