#pragma once

// Multimode model of the two-crystal down-conversion source.
//
// Two identical pairs with joint spectral amplitude phi(w1, w2) feed either
// projection scheme. The four-fold coincidence rate reduces to two quartic
// functionals of phi:
//   A = int |phi(w1,w2) phi(w1',w2')|^2
//   E = int phi*(w1,w2) phi*(w1',w2') phi(w1',w2) phi(w1,w2')
// with E/A the indistinguishability of the two pairs.

#include <array>
#include <complex>
#include <vector>

#include "noonsim/schemes.hpp"

namespace noonsim {

struct SpectralModel {
  double pump_bandwidth = 1.0;    // sigma_p, angular frequency
  double filter_bandwidth = 1.0;  // sigma_f, angular frequency
  double center_offset = 0.0;     // filter centre, detuning from the degenerate frequency
  double delay_h = 0.0;           // time
  double delay_v = 0.0;           // time
  bool symmetrized = true;
  Complex pump_scale{1.0, 0.0};   // overall rate scale only

  void validate() const;
};

// Gaussian pump envelope times Gaussian filters times the delay phases,
// optionally symmetrized as [phi(w1,w2) + phi(w2,w1)]/2.
Complex phi_value(const SpectralModel& model, double w1, double w2);

struct QuadratureSpec {
  int nodes = 48;
  // Re-run with 2*nodes and fail when A or E move by more than this (relative).
  double convergence_tolerance = 1e-6;
  bool check_convergence = true;
};

struct OverlapIntegrals {
  double A = 1.0;
  double E = 1.0;
  double v1 = 1.0;  // single-photon visibility factor for spatial mismatch
  double E_imag_residue = 0.0;
  double convergence_delta = 0.0;  // relative change under node doubling

  static OverlapIntegrals from_ratio(double e_over_a, double v1 = 1.0);
  double ratio() const { return E / A; }
  // Throws ValidationError unless A > 0, |E| <= A and v1 in [0, 1].
  void validate() const;
};

// Tensor-product Gauss-Hermite quadrature in detuning coordinates; returns
// the values from the doubled grid when the convergence check is enabled.
OverlapIntegrals overlap_integrals(const SpectralModel& model,
                                   const QuadratureSpec& quadrature = {});

struct Visibilities {
  double v3 = 0.0;
  double v1 = 0.0;
};

Visibilities visibilities(const OverlapIntegrals& ov, SchemeKind scheme);

// 2(17A+7E)/243 [1 + V3 cos 3phi + V1 cos phi]
double p4_asym(double phase, const OverlapIntegrals& ov);
// (2A+E)/72 [1 + V3 cos 3phi]
double p4_noon(double phase, const OverlapIntegrals& ov);
double p4(SchemeKind scheme, double phase, const OverlapIntegrals& ov);

// Detector field weights of the asymmetric scheme.
struct AsymAmplitudes {
  Complex tau1, tau2, rho1, rho2;
};
AsymAmplitudes asym_amplitudes(double phase);

// a1, a2, a3 of the NOON projection scheme.
std::array<Complex, 3> noon_amplitudes(double phase);

// One term G(t_a, t_b, t_c, t_d) = g(t_a, t_c) g(t_b, t_d): the first pair
// lands on detectors a and c, the second pair on b and d (times 1..4, with 4
// the herald).
using PairingTerm = std::array<int, 4>;

struct PermutationGroup {
  Complex weight;
  std::vector<PairingTerm> terms;
};

struct SchemeCoefficients {
  SchemeKind scheme = SchemeKind::kAsymmetricBs;
  double phase = 0.0;
  double prefactor = 1.0;
  std::vector<PermutationGroup> groups;
};

SchemeCoefficients scheme_coefficients(SchemeKind scheme, double phase);

// P4 = prefactor^2 sum_{k,l} w_k conj(w_l) sum_{s in k, t in l} overlap(s, t),
// overlap = A when s and t pair the four detectors identically, E otherwise.
// Uses the spectral overlaps only (v1 plays no role here).
double permutation_overlap_p4(const SchemeCoefficients& coeffs, const OverlapIntegrals& ov);

// Ratio of the phase-averaged asymmetric-scheme rate to the NOON-scheme rate.
double rate_ratio(const OverlapIntegrals& ov);

// Joint solve of the scheme-1 visibility pair (V3, V1) for (E/A, v1).
struct OverlapSolution {
  double e_over_a = 1.0;
  double v1 = 1.0;
};
OverlapSolution solve_overlaps(double v3, double v1);

// E/A implied by one scheme-1 visibility alone, with v1 = 1.
double ratio_from_v3(double v3);
double ratio_from_v1(double v1);

}  // namespace noonsim
