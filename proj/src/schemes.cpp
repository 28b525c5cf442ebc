#include "noonsim/schemes.hpp"

#include <array>

namespace noonsim {

namespace {

constexpr double kPi = std::numbers::pi;

const std::array<std::string, 3> kArmPaths{"in", "b", "c"};
const std::array<std::string, 3> kDumpPaths{"dump_a", "dump_b", "dump_c"};
const std::string kReflectedPath = "out";

std::vector<ModeLabel> both_pols(std::span<const std::string> paths) {
  std::vector<ModeLabel> modes;
  for (const auto& p : paths) {
    modes.push_back(H(p));
    modes.push_back(V(p));
  }
  return canonical_modes(std::move(modes));
}

SchemeCircuit finish(std::vector<ModeLabel> modes, std::vector<ModeTransform> chain,
                     DetectorWiring wiring) {
  SchemeCircuit c;
  c.modes = canonical_modes(std::move(modes));
  for (auto& t : chain) c.chain.push_back(t.embedded(c.modes));
  c.wiring = std::move(wiring);
  c.wiring.validate();
  return c;
}

}  // namespace

std::string to_string(SchemeKind kind) {
  return kind == SchemeKind::kAsymmetricBs ? "asym" : "noon";
}

SchemeKind scheme_from_string(const std::string& name) {
  if (name == "asym") return SchemeKind::kAsymmetricBs;
  if (name == "noon") return SchemeKind::kNoonProjection;
  throw ValidationError("unknown scheme '" + name + "' (expected asym or noon)");
}

SchemeConfig SchemeConfig::defaults(SchemeKind kind, double phase) {
  return {kind, phase,
          kind == SchemeKind::kAsymmetricBs ? kAsymRotation : kNoonPreRotation};
}

double FringeSeries::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

std::vector<double> FringeSeries::path_differences() const {
  if (!metadata.wavelength) throw ValidationError("fringe series carries no wavelength");
  std::vector<double> out;
  out.reserve(phases.size());
  for (double p : phases) out.push_back(p * *metadata.wavelength / (2.0 * kPi));
  return out;
}

std::vector<double> phase_grid(double start, double stop, int points) {
  if (points < 1) throw ValidationError("phase grid needs at least one point");
  if (!(stop > start)) throw ValidationError("phase grid needs stop > start");
  std::vector<double> grid(points);
  const double step = (stop - start) / points;
  for (int k = 0; k < points; ++k) grid[k] = start + k * step;
  return grid;
}

ModeTransform SchemeCircuit::composed() const {
  ModeTransform total = ModeTransform::identity(modes);
  for (const auto& t : chain) total = total.then(t);
  return total;
}

PureState SchemeCircuit::run(const PureState& input) const {
  // Lift the input onto the circuit's full mode set.
  const auto lifted = ModeTransform::identity(modes);
  return apply_chain(apply_transform(input, lifted), chain);
}

PureState input_state(const FockVector& fock) {
  return PureState::basis({H(kInputPath), V(kInputPath)}, fock);
}

PureState heralded_input() {
  return input_state({{H(kInputPath), 2}, {V(kInputPath), 1}});
}

// ---------------------------------------------------------------------------
// Asymmetric beam-splitter scheme

ModeLabel asym_single_mode() { return H(kInputPath); }
ModeLabel asym_pair_mode() { return V(kReflectedPath); }

SchemeCircuit build_asym_scheme(double phase, double rotation) {
  const std::array<std::string, 2> paths{kInputPath, kReflectedPath};
  const ModeLabel v_in = V(kInputPath);
  std::vector<ModeTransform> chain{
      make_polarization_rotation(rotation, kInputPath),
      make_phase_shift(phase, std::span(&v_in, 1)),
      make_polarization_rotation(rotation, kInputPath),
      make_polarizing_splitter(kInputPath, kReflectedPath),
  };
  DetectorWiring wiring;
  wiring.add_detector("A", asym_single_mode());
  wiring.add_balanced_fanout({"B", "C"}, asym_pair_mode());
  wiring.pattern = {{"A", 1}, {"B", 1}, {"C", 1}};
  return finish(both_pols(paths), std::move(chain), std::move(wiring));
}

FringeSeries asym_fringe(std::span<const double> grid, double rotation) {
  if (grid.empty()) throw ValidationError("fringe grid is empty");
  FringeSeries f;
  f.metadata = {"asym", "<e+ f+^2 f^2 e>", std::nullopt};
  const PureState in = heralded_input();
  const FockVector pattern{{asym_single_mode(), 1}, {asym_pair_mode(), 2}};
  for (double phi : grid) {
    const PureState out = build_asym_scheme(phi, rotation).run(in);
    f.phases.push_back(phi);
    f.values.push_back(correlation_moment(out, pattern));
  }
  return f;
}

// ---------------------------------------------------------------------------
// NOON projection scheme

PureState noon3_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return PureState({H(kInputPath), V(kInputPath)},
                   {{FockVector{{H(kInputPath), 3}}, s},
                    {FockVector{{V(kInputPath), 3}}, -s}});
}

double noon_projection_prob(const PureState& state) {
  if (state.photon_number() != 3)
    throw PhotonNumberError("NOON_3 projection needs a three-photon state");
  const PureState noon = noon3_state();
  if (state.modes() != noon.modes())
    throw ValidationError("NOON_3 projection expects a state over the input (H, V) modes");
  return std::norm(inner_product(noon, state)) / 18.0;
}

Eigen::Matrix3d tritter_matrix() {
  std::array<Eigen::Vector3d, 3> rows;
  rows[0] = Eigen::Vector3d::Constant(1.0 / std::sqrt(3.0));
  int filled = 1;
  for (int k = 0; k < 3 && filled < 3; ++k) {
    Eigen::Vector3d v = Eigen::Vector3d::Unit(k);
    for (int j = 0; j < filled; ++j) v -= rows[j].dot(v) * rows[j];
    if (v.norm() < 1e-8) continue;
    rows[filled++] = v.normalized();
  }
  Eigen::Matrix3d q;
  for (int i = 0; i < 3; ++i) q.row(i) = rows[i].transpose();
  // Columns are creation-operator images: input arm 0 spreads uniformly.
  return q.transpose();
}

SchemeCircuit build_noon_projector() {
  std::vector<std::string> paths(kArmPaths.begin(), kArmPaths.end());
  paths.insert(paths.end(), kDumpPaths.begin(), kDumpPaths.end());

  const Eigen::Matrix3d t = tritter_matrix();
  std::vector<ModeLabel> split_modes;
  for (const auto& p : kArmPaths) split_modes.push_back(H(p));
  for (const auto& p : kArmPaths) split_modes.push_back(V(p));
  Eigen::MatrixXcd split = Eigen::MatrixXcd::Zero(6, 6);
  split.topLeftCorner(3, 3) = t.cast<Complex>();
  split.bottomRightCorner(3, 3) = t.cast<Complex>();

  std::vector<ModeTransform> chain{ModeTransform(split_modes, split, "1->3 splitter")};
  for (int k = 0; k < 3; ++k) {
    const ModeLabel v = V(kArmPaths[k]);
    chain.push_back(make_phase_shift(2.0 * kPi * k / 3.0, std::span(&v, 1)));
  }
  // 135-degree polarizer: rotate so the H slot carries (H - V)/sqrt 2, then
  // let a PBS send the orthogonal component to a discarded path.
  for (int k = 0; k < 3; ++k) {
    chain.push_back(make_polarization_rotation(kPi / 4.0, kArmPaths[k]));
    chain.push_back(make_polarizing_splitter(kArmPaths[k], kDumpPaths[k]));
  }

  DetectorWiring wiring;
  const std::array<std::string, 3> names{"A", "B", "C"};
  for (int k = 0; k < 3; ++k) {
    wiring.add_detector(names[k], H(kArmPaths[k]));
    wiring.pattern[names[k]] = 1;
  }
  return finish(both_pols(paths), std::move(chain), std::move(wiring));
}

SchemeCircuit build_noon_scheme(double phase, double pre_rotation) {
  SchemeCircuit projector = build_noon_projector();
  const ModeLabel v_in = V(kInputPath);
  std::vector<ModeTransform> chain{
      make_polarization_rotation(pre_rotation, kInputPath).embedded(projector.modes),
      make_phase_shift(phase, std::span(&v_in, 1)).embedded(projector.modes),
  };
  for (auto& t : projector.chain) chain.push_back(std::move(t));
  projector.chain = std::move(chain);
  return projector;
}

double noon_projection_prob_circuit(const PureState& state) {
  if (state.photon_number() != 3)
    throw PhotonNumberError("NOON_3 projection needs a three-photon state");
  const SchemeCircuit c = build_noon_projector();
  return detector_coincidence_probability(c.run(state), c.wiring);
}

FringeSeries noon_fringe(std::span<const double> grid, double pre_rotation) {
  if (grid.empty()) throw ValidationError("fringe grid is empty");
  FringeSeries f;
  f.metadata = {"noon", "P(A,B,C)", std::nullopt};
  const PureState in = heralded_input();
  for (double phi : grid) {
    const SchemeCircuit c = build_noon_scheme(phi, pre_rotation);
    f.phases.push_back(phi);
    f.values.push_back(detector_coincidence_probability(c.run(in), c.wiring));
  }
  return f;
}

std::vector<double> harmonic_magnitudes(std::span<const double> values, int max_harmonic) {
  const auto n = values.size();
  if (n == 0) throw ValidationError("no samples for harmonic decomposition");
  std::vector<double> out;
  for (int h = 0; h <= max_harmonic; ++h) {
    Complex s{};
    for (std::size_t k = 0; k < n; ++k)
      s += values[k] * std::polar(1.0, -2.0 * kPi * h * static_cast<double>(k) / n);
    const double scale = (h == 0 ? 1.0 : 2.0) / static_cast<double>(n);
    out.push_back(std::abs(s) * scale);
  }
  return out;
}

}  // namespace noonsim
