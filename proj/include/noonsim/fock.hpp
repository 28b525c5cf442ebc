#pragma once

// Multi-photon Fock states in passive linear-optical networks.
//
// Conventions: a ModeTransform holds the Heisenberg matrix M acting on
// annihilation operators, b_i = sum_j M_ij a_j (rows are output modes,
// columns input modes, both indexed by the same mode list). Creation
// operators of the input then map as a_j^dagger -> sum_i M_ij b_i^dagger.

#include <complex>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/errors.hpp"

namespace noonsim {

using Complex = std::complex<double>;

inline constexpr double kUnitarityTolerance = 1e-10;

enum class Polarization { H, V };

struct ModeLabel {
  std::string path;
  Polarization pol = Polarization::H;

  auto operator<=>(const ModeLabel&) const = default;
  bool operator==(const ModeLabel&) const = default;

  std::string str() const;
};

inline ModeLabel H(std::string path) { return {std::move(path), Polarization::H}; }
inline ModeLabel V(std::string path) { return {std::move(path), Polarization::V}; }

// Sorted, duplicate-free list of modes.
std::vector<ModeLabel> canonical_modes(std::vector<ModeLabel> modes);

// Occupation numbers keyed by mode. Modes with zero photons may be omitted.
class FockVector {
 public:
  FockVector() = default;
  FockVector(std::initializer_list<std::pair<const ModeLabel, int>> counts);
  explicit FockVector(std::map<ModeLabel, int> counts);

  int count(const ModeLabel& mode) const;
  int total() const;
  const std::map<ModeLabel, int>& counts() const { return counts_; }

  std::string str() const;

 private:
  std::map<ModeLabel, int> counts_;
};

// Occupation vector aligned with a PureState's mode list.
using Occupation = std::vector<int>;

class PureState {
 public:
  using Terms = std::map<Occupation, Complex>;

  // Normalizes the supplied amplitudes; all terms must share one photon number.
  PureState(std::vector<ModeLabel> modes,
            std::vector<std::pair<FockVector, Complex>> terms);

  static PureState basis(std::vector<ModeLabel> modes, const FockVector& fock);

  // Internal constructor over aligned occupations; normalizes and records drift.
  static PureState from_occupations(std::vector<ModeLabel> modes, Terms terms);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Terms& terms() const { return terms_; }
  int photon_number() const { return photon_number_; }

  // |1 - norm| before the last renormalization.
  double norm_drift() const { return norm_drift_; }

  Complex amplitude(const FockVector& fock) const;
  FockVector fock(const Occupation& occ) const;
  Occupation occupation(const FockVector& fock) const;
  double norm_squared() const;

  // Global phase applied to every amplitude.
  PureState with_phase(double radians) const;

 private:
  PureState() = default;
  void normalize();

  std::vector<ModeLabel> modes_;
  Terms terms_;
  int photon_number_ = 0;
  double norm_drift_ = 0.0;
};

class ModeTransform {
 public:
  ModeTransform(std::vector<ModeLabel> modes, Eigen::MatrixXcd matrix,
                std::string description = {});

  static ModeTransform identity(std::vector<ModeLabel> modes);

  const std::vector<ModeLabel>& modes() const { return modes_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const std::string& description() const { return description_; }

  // max |(M M^dagger - I)_ij|
  double unitarity_deviation() const;
  bool is_unitary(double tol = kUnitarityTolerance) const {
    return unitarity_deviation() <= tol;
  }

  // Same transform acting as identity on the extra modes.
  ModeTransform embedded(const std::vector<ModeLabel>& modes) const;

  // `this` first, then `next`. Mode list is the union of both.
  ModeTransform then(const ModeTransform& next) const;

  Complex element(const ModeLabel& out, const ModeLabel& in) const;
  int index_of(const ModeLabel& mode) const;

 private:
  std::vector<ModeLabel> modes_;
  Eigen::MatrixXcd matrix_;
  std::string description_;
};

enum class BeamSplitterConvention {
  // rows (sqrt T, sqrt R; -sqrt R, sqrt T): minus sign on the reflected
  // amplitude of the first input.
  kAsymmetricSign,
  // rows (sqrt T, i sqrt R; i sqrt R, sqrt T)
  kSymmetricPhase,
  // rows (sqrt T, sqrt R; sqrt R, -sqrt T)
  kReflectionSign,
};

ModeTransform make_beamsplitter(
    double transmissivity, const ModeLabel& first, const ModeLabel& second,
    BeamSplitterConvention convention = BeamSplitterConvention::kAsymmetricSign);

// Wave-plate rotation on the (H, V) pair of one path:
// a_H -> cos(a) a + sin(a) b, a_V -> cos(a) b - sin(a) a, with a, b the
// rotated modes (stored back in the H and V slots).
ModeTransform make_polarization_rotation(double angle, const std::string& path);

ModeTransform make_phase_shift(double phase, std::span<const ModeLabel> targets);

// Polarizing splitter: H of `path` is transmitted, V of `path` is exchanged
// with V of `reflected_path`.
ModeTransform make_polarizing_splitter(const std::string& path,
                                       const std::string& reflected_path);

// Output modes of `t` are t.modes(). The state's modes must all be present in t.
PureState apply_transform(const PureState& state, const ModeTransform& t);

// Applies each element of `chain` in order.
PureState apply_chain(const PureState& state, std::span<const ModeTransform> chain);

// <a|b>, conjugate-linear in a.
Complex inner_product(const PureState& a, const PureState& b);

double mode_pattern_probability(const PureState& state, const FockVector& pattern);

// Normally ordered moment <prod_m a_m^dagger^k_m a_m^k_m> for the counts k_m of
// `pattern`. When the pattern holds every photon this is prod(k_m!) times the
// pattern probability.
double correlation_moment(const PureState& state, const FockVector& pattern);

struct Detector {
  std::string name;
  std::vector<ModeLabel> modes;
  // Fraction of each mode's photons routed to this detector.
  std::vector<double> split;
  bool number_resolving = true;
};

struct DetectorWiring {
  std::vector<Detector> detectors;
  std::map<std::string, int> pattern;

  // Adds detectors that share `mode` through a balanced fan-out.
  void add_balanced_fanout(const std::vector<std::string>& names,
                           const ModeLabel& mode, bool number_resolving = false);
  void add_detector(const std::string& name, const ModeLabel& mode,
                    bool number_resolving = false);

  // Throws ValidationError when splitting ratios of a mode do not sum to 1
  // or the pattern names an unknown detector.
  void validate() const;
  int required_total() const;
};

// Modes not covered by any detector must be empty for an event to count.
// Non-number-resolving detectors register "at least k" for k >= 1.
double detector_coincidence_probability(const PureState& state,
                                        const DetectorWiring& wiring);

// Permanent of a square complex matrix (Ryser with Gray-code updates).
Complex permanent(const Eigen::MatrixXcd& m);

}  // namespace noonsim
