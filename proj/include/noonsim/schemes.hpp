#pragma once

// The two three-photon projection schemes built from fock-core elements:
// the asymmetric beam-splitter interferometer (realized with wave plates and
// a polarizing splitter) and the NOON-state projection (equal three-way split,
// stepped phases, 135-degree polarizers).

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noonsim/fock.hpp"

namespace noonsim {

enum class SchemeKind { kAsymmetricBs, kNoonProjection };

std::string to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

// arccos(1/sqrt 3): rotation realizing T = 1/3.
inline const double kAsymRotation = std::acos(1.0 / std::sqrt(3.0));
inline constexpr double kNoonPreRotation = std::numbers::pi / 4.0;

struct SchemeConfig {
  SchemeKind kind = SchemeKind::kAsymmetricBs;
  double phase = 0.0;
  double rotation = kAsymRotation;

  static SchemeConfig defaults(SchemeKind kind, double phase = 0.0);
};

struct FringeMetadata {
  std::string scheme;
  std::string normalization;
  // Set when a wavelength is known; path difference = phase * wavelength / 2pi.
  std::optional<double> wavelength;
};

struct FringeSeries {
  std::vector<double> phases;
  std::vector<double> values;
  FringeMetadata metadata;

  double max_value() const;
  std::vector<double> path_differences() const;
};

// Uniform grid of `points` phases on [start, stop).
std::vector<double> phase_grid(double start, double stop, int points);

// A transform chain over a fixed mode set plus the detector arrangement.
struct SchemeCircuit {
  std::vector<ModeLabel> modes;
  std::vector<ModeTransform> chain;
  DetectorWiring wiring;

  ModeTransform composed() const;
  PureState run(const PureState& input) const;
};

// |2_H, 1_V> on the input path, the heralded three-photon state.
PureState heralded_input();
PureState input_state(const FockVector& fock);

inline const std::string kInputPath = "in";

// rotation(alpha) -> phase(phi on V) -> rotation(alpha) -> PBS.
// Detector A sits on the transmitted H port; B and C share the reflected
// V port through a balanced fan-out.
SchemeCircuit build_asym_scheme(double phase, double rotation = kAsymRotation);

// The single-photon (e) and two-photon (f) output modes of the asymmetric scheme.
ModeLabel asym_single_mode();
ModeLabel asym_pair_mode();

// P3(1_e, 2_f) at each grid phase, evaluated through the circuit.
FringeSeries asym_fringe(std::span<const double> grid, double rotation = kAsymRotation);

// (1/18) |<NOON_3|state>|^2 with NOON_3 = (|3_H,0_V> - |0_H,3_V>)/sqrt 2
// over the input path.
double noon_projection_prob(const PureState& state);

// The same quantity evaluated through the explicit projection circuit.
double noon_projection_prob_circuit(const PureState& state);

PureState noon3_state();

// pre-rotation -> phase(phi on V) -> symmetric 1->3 splitter -> arm phases
// {0, 2pi/3, 4pi/3} on V -> per-arm 135-degree polarizer -> A, B, C.
SchemeCircuit build_noon_scheme(double phase, double pre_rotation = kNoonPreRotation);

// Projection circuit alone (splitter onwards), shared by both entry points.
SchemeCircuit build_noon_projector();

// Real orthogonal 3x3 splitter whose first column is uniform 1/sqrt 3,
// completed by Gram-Schmidt on the standard basis.
Eigen::Matrix3d tritter_matrix();

FringeSeries noon_fringe(std::span<const double> grid,
                         double pre_rotation = kNoonPreRotation);

// Magnitudes of the discrete Fourier harmonics 0..max_harmonic of samples on
// a uniform grid covering whole periods.
std::vector<double> harmonic_magnitudes(std::span<const double> values, int max_harmonic);

}  // namespace noonsim
