#include "noonsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace noonsim {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// All occupations of `photons` over `modes` slots, lexicographic order.
std::vector<Occupation> compositions(int photons, int modes) {
  std::vector<Occupation> out;
  Occupation occ(modes, 0);
  std::function<void(int, int)> rec = [&](int slot, int left) {
    if (slot == modes - 1) {
      occ[slot] = left;
      out.push_back(occ);
      return;
    }
    for (int k = left; k >= 0; --k) {
      occ[slot] = k;
      rec(slot + 1, left - k);
    }
  };
  if (modes > 0) rec(0, photons);
  return out;
}

std::vector<int> expand_indices(const Occupation& occ) {
  std::vector<int> idx;
  for (int m = 0; m < static_cast<int>(occ.size()); ++m)
    for (int k = 0; k < occ[m]; ++k) idx.push_back(m);
  return idx;
}

double occupation_factorials(const Occupation& occ) {
  double f = 1.0;
  for (int n : occ) f *= factorial(n);
  return f;
}

const char* pol_name(Polarization p) { return p == Polarization::H ? "H" : "V"; }

}  // namespace

std::string ModeLabel::str() const { return path + ":" + pol_name(pol); }

std::vector<ModeLabel> canonical_modes(std::vector<ModeLabel> modes) {
  std::sort(modes.begin(), modes.end());
  modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
  return modes;
}

// ---------------------------------------------------------------------------
// FockVector

FockVector::FockVector(std::initializer_list<std::pair<const ModeLabel, int>> counts)
    : FockVector(std::map<ModeLabel, int>(counts)) {}

FockVector::FockVector(std::map<ModeLabel, int> counts) : counts_(std::move(counts)) {
  for (auto it = counts_.begin(); it != counts_.end();) {
    if (it->second < 0)
      throw ValidationError("negative occupation for mode " + it->first.str());
    if (it->second == 0)
      it = counts_.erase(it);
    else
      ++it;
  }
}

int FockVector::count(const ModeLabel& mode) const {
  auto it = counts_.find(mode);
  return it == counts_.end() ? 0 : it->second;
}

int FockVector::total() const {
  int n = 0;
  for (const auto& [mode, c] : counts_) n += c;
  return n;
}

std::string FockVector::str() const {
  std::ostringstream os;
  os << "|";
  bool first = true;
  for (const auto& [mode, c] : counts_) {
    if (!first) os << ",";
    os << c << "_" << mode.str();
    first = false;
  }
  os << ">";
  return os.str();
}

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(std::vector<ModeLabel> modes,
                     std::vector<std::pair<FockVector, Complex>> terms) {
  modes_ = canonical_modes(std::move(modes));
  if (modes_.empty()) throw ValidationError("a state needs at least one mode");
  if (terms.empty()) throw ValidationError("a state needs at least one term");
  photon_number_ = terms.front().first.total();
  for (const auto& [fock, amp] : terms) {
    if (fock.total() != photon_number_)
      throw PhotonNumberError("terms of a pure state must share one photon number");
    terms_[occupation(fock)] += amp;
  }
  normalize();
}

PureState PureState::basis(std::vector<ModeLabel> modes, const FockVector& fock) {
  return PureState(std::move(modes), {{fock, Complex{1.0, 0.0}}});
}

PureState PureState::from_occupations(std::vector<ModeLabel> modes, Terms terms) {
  PureState s;
  s.modes_ = std::move(modes);
  if (s.modes_ != canonical_modes(s.modes_))
    throw ValidationError("mode list must be sorted and duplicate-free");
  if (terms.empty()) throw ValidationError("a state needs at least one term");
  s.photon_number_ =
      std::accumulate(terms.begin()->first.begin(), terms.begin()->first.end(), 0);
  for (const auto& [occ, amp] : terms) {
    if (occ.size() != s.modes_.size())
      throw ValidationError("occupation length does not match mode count");
    if (std::accumulate(occ.begin(), occ.end(), 0) != s.photon_number_)
      throw PhotonNumberError("terms of a pure state must share one photon number");
  }
  s.terms_ = std::move(terms);
  s.normalize();
  return s;
}

void PureState::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0)) throw ValidationError("state has zero norm");
  const double n = std::sqrt(n2);
  norm_drift_ = std::abs(1.0 - n);
  for (auto& [occ, amp] : terms_) amp /= n;
}

double PureState::norm_squared() const {
  double s = 0.0;
  for (const auto& [occ, amp] : terms_) s += std::norm(amp);
  return s;
}

Occupation PureState::occupation(const FockVector& fock) const {
  Occupation occ(modes_.size(), 0);
  for (const auto& [mode, c] : fock.counts()) {
    auto it = std::lower_bound(modes_.begin(), modes_.end(), mode);
    if (it == modes_.end() || *it != mode)
      throw ValidationError("unknown mode label " + mode.str());
    occ[it - modes_.begin()] = c;
  }
  return occ;
}

FockVector PureState::fock(const Occupation& occ) const {
  std::map<ModeLabel, int> counts;
  for (std::size_t i = 0; i < occ.size(); ++i)
    if (occ[i] > 0) counts[modes_[i]] = occ[i];
  return FockVector(std::move(counts));
}

Complex PureState::amplitude(const FockVector& fock) const {
  auto it = terms_.find(occupation(fock));
  return it == terms_.end() ? Complex{} : it->second;
}

PureState PureState::with_phase(double radians) const {
  PureState s = *this;
  const Complex f = std::polar(1.0, radians);
  for (auto& [occ, amp] : s.terms_) amp *= f;
  return s;
}

// ---------------------------------------------------------------------------
// ModeTransform

ModeTransform::ModeTransform(std::vector<ModeLabel> modes, Eigen::MatrixXcd matrix,
                             std::string description)
    : modes_(std::move(modes)), matrix_(std::move(matrix)),
      description_(std::move(description)) {
  if (modes_.empty()) throw ValidationError("a transform needs at least one mode");
  if (canonical_modes(modes_).size() != modes_.size())
    throw ValidationError("duplicate mode label in transform");
  const auto n = static_cast<Eigen::Index>(modes_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw ValidationError("transform matrix must be square over its mode list");
  // Store over the canonical mode order.
  std::vector<int> order(modes_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return modes_[a] < modes_[b]; });
  Eigen::MatrixXcd sorted(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sorted(i, j) = matrix_(order[i], order[j]);
  std::vector<ModeLabel> sorted_modes;
  for (int k : order) sorted_modes.push_back(modes_[k]);
  modes_ = std::move(sorted_modes);
  matrix_ = std::move(sorted);
}

ModeTransform ModeTransform::identity(std::vector<ModeLabel> modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  return ModeTransform(std::move(modes), Eigen::MatrixXcd::Identity(n, n), "identity");
}

double ModeTransform::unitarity_deviation() const {
  const auto n = matrix_.rows();
  return (matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

int ModeTransform::index_of(const ModeLabel& mode) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), mode);
  if (it == modes_.end() || *it != mode) return -1;
  return static_cast<int>(it - modes_.begin());
}

Complex ModeTransform::element(const ModeLabel& out, const ModeLabel& in) const {
  const int i = index_of(out), j = index_of(in);
  if (i < 0 || j < 0) throw ValidationError("unknown mode label in transform lookup");
  return matrix_(i, j);
}

ModeTransform ModeTransform::embedded(const std::vector<ModeLabel>& modes) const {
  std::vector<ModeLabel> all = modes_;
  all.insert(all.end(), modes.begin(), modes.end());
  all = canonical_modes(std::move(all));
  const auto n = static_cast<Eigen::Index>(all.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  std::vector<Eigen::Index> pos(modes_.size());
  for (std::size_t k = 0; k < modes_.size(); ++k)
    pos[k] = std::lower_bound(all.begin(), all.end(), modes_[k]) - all.begin();
  for (std::size_t i = 0; i < modes_.size(); ++i)
    for (std::size_t j = 0; j < modes_.size(); ++j)
      m(pos[i], pos[j]) = matrix_(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j));
  return ModeTransform(std::move(all), std::move(m), description_);
}

ModeTransform ModeTransform::then(const ModeTransform& next) const {
  const ModeTransform a = embedded(next.modes_);
  const ModeTransform b = next.embedded(modes_);
  std::string desc = description_.empty() ? next.description_
                     : next.description_.empty()
                         ? description_
                         : description_ + " -> " + next.description_;
  return ModeTransform(a.modes_, b.matrix_ * a.matrix_, std::move(desc));
}

// ---------------------------------------------------------------------------
// Constructors

ModeTransform make_beamsplitter(double transmissivity, const ModeLabel& first,
                                const ModeLabel& second,
                                BeamSplitterConvention convention) {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0))
    throw ValidationError("beam-splitter transmissivity must lie in [0, 1]");
  if (first == second) throw ValidationError("beam splitter needs two distinct modes");
  const double t = std::sqrt(transmissivity);
  const double r = std::sqrt(1.0 - transmissivity);
  Eigen::Matrix2cd m;
  switch (convention) {
    case BeamSplitterConvention::kAsymmetricSign:
      m << t, r, -r, t;
      break;
    case BeamSplitterConvention::kSymmetricPhase:
      m << t, Complex(0, r), Complex(0, r), t;
      break;
    case BeamSplitterConvention::kReflectionSign:
      m << t, r, r, -t;
      break;
  }
  std::ostringstream desc;
  desc << "BS(T=" << transmissivity << ")";
  return ModeTransform({first, second}, m, desc.str());
}

ModeTransform make_polarization_rotation(double angle, const std::string& path) {
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2cd m;
  // Columns are the images of the H and V creation operators.
  m << c, -s, s, c;
  std::ostringstream desc;
  desc << "rotate[" << path << "](" << angle << ")";
  return ModeTransform({H(path), V(path)}, m, desc.str());
}

ModeTransform make_phase_shift(double phase, std::span<const ModeLabel> targets) {
  if (targets.empty()) throw ValidationError("phase shift needs at least one target mode");
  std::vector<ModeLabel> modes(targets.begin(), targets.end());
  if (canonical_modes(modes).size() != modes.size())
    throw ValidationError("duplicate target mode in phase shift");
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) * std::polar(1.0, phase);
  std::ostringstream desc;
  desc << "phase(" << phase << ")";
  return ModeTransform(std::move(modes), std::move(m), desc.str());
}

ModeTransform make_polarizing_splitter(const std::string& path,
                                       const std::string& reflected_path) {
  if (path == reflected_path) throw ValidationError("PBS needs two distinct paths");
  // Modes in canonical order are sorted by path, then H < V.
  std::vector<ModeLabel> modes{H(path), V(path), H(reflected_path), V(reflected_path)};
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1.0;  // H(path) transmitted
  m(2, 2) = 1.0;  // H(reflected) transmitted
  m(1, 3) = 1.0;  // V(reflected) -> V(path)
  m(3, 1) = 1.0;  // V(path) -> V(reflected)
  return ModeTransform(std::move(modes), m, "PBS[" + path + "|" + reflected_path + "]");
}

// ---------------------------------------------------------------------------
// Evolution

Complex permanent(const Eigen::MatrixXcd& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw ValidationError("permanent needs a square matrix");
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  // Ryser: perm = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} m_ij
  std::vector<Complex> row_sums(n, Complex{});
  Complex total{};
  const unsigned long subsets = 1UL << n;
  unsigned long gray_prev = 0;
  for (unsigned long k = 1; k < subsets; ++k) {
    const unsigned long gray = k ^ (k >> 1);
    const unsigned long diff = gray ^ gray_prev;
    const int j = __builtin_ctzl(diff);
    const double sign_add = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) row_sums[i] += sign_add * m(i, j);
    Complex prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    const int size = __builtin_popcountl(gray);
    total += ((size % 2) ? -1.0 : 1.0) * prod;
    gray_prev = gray;
  }
  return (n % 2 ? -1.0 : 1.0) * total;
}

PureState apply_transform(const PureState& state, const ModeTransform& t) {
  const double dev = t.unitarity_deviation();
  if (dev > kUnitarityTolerance) {
    std::ostringstream os;
    os << "transform '" << t.description() << "' is not unitary: max |MM^+ - I| = " << dev;
    throw UnitarityError(os.str(), dev);
  }
  const auto& out_modes = t.modes();
  std::vector<int> slot(state.modes().size());
  for (std::size_t k = 0; k < state.modes().size(); ++k) {
    slot[k] = t.index_of(state.modes()[k]);
    if (slot[k] < 0)
      throw ValidationError("state mode " + state.modes()[k].str() +
                            " is not covered by transform '" + t.description() + "'");
  }

  const int n = state.photon_number();
  const auto outputs = compositions(n, static_cast<int>(out_modes.size()));
  std::vector<std::vector<int>> out_rows;
  std::vector<double> out_norm;
  for (const auto& m : outputs) {
    out_rows.push_back(expand_indices(m));
    out_norm.push_back(occupation_factorials(m));
  }

  std::vector<Complex> amps(outputs.size(), Complex{});
  Eigen::MatrixXcd sub(n, n);
  for (const auto& [occ, amp] : state.terms()) {
    Occupation in(out_modes.size(), 0);
    for (std::size_t k = 0; k < occ.size(); ++k) in[slot[k]] = occ[k];
    const auto cols = expand_indices(in);
    const double in_norm = occupation_factorials(in);
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      const auto& rows = out_rows[o];
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) sub(a, b) = t.matrix()(rows[a], cols[b]);
      amps[o] += amp * permanent(sub) / std::sqrt(in_norm * out_norm[o]);
    }
  }

  PureState::Terms terms;
  for (std::size_t o = 0; o < outputs.size(); ++o)
    if (std::abs(amps[o]) > 0.0) terms.emplace(outputs[o], amps[o]);
  return PureState::from_occupations(out_modes, std::move(terms));
}

PureState apply_chain(const PureState& state, std::span<const ModeTransform> chain) {
  PureState s = state;
  for (const auto& t : chain) s = apply_transform(s, t);
  return s;
}

Complex inner_product(const PureState& a, const PureState& b) {
  if (a.modes() != b.modes())
    throw ValidationError("inner product of states over different mode sets");
  if (a.photon_number() != b.photon_number()) return Complex{};
  Complex s{};
  for (const auto& [occ, amp] : a.terms()) {
    auto it = b.terms().find(occ);
    if (it != b.terms().end()) s += std::conj(amp) * it->second;
  }
  return s;
}

double mode_pattern_probability(const PureState& state, const FockVector& pattern) {
  if (pattern.total() != state.photon_number())
    throw PhotonNumberError("pattern holds " + std::to_string(pattern.total()) +
                            " photons but the state holds " +
                            std::to_string(state.photon_number()));
  return std::norm(state.amplitude(pattern));
}

double correlation_moment(const PureState& state, const FockVector& pattern) {
  const Occupation k = state.occupation(pattern);
  double total = 0.0;
  for (const auto& [occ, amp] : state.terms()) {
    double falling = 1.0;
    for (std::size_t m = 0; m < occ.size() && falling > 0.0; ++m)
      for (int j = 0; j < k[m]; ++j) falling *= occ[m] - j;
    total += falling * std::norm(amp);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Detectors

void DetectorWiring::add_detector(const std::string& name, const ModeLabel& mode,
                                  bool number_resolving) {
  detectors.push_back({name, {mode}, {1.0}, number_resolving});
}

void DetectorWiring::add_balanced_fanout(const std::vector<std::string>& names,
                                         const ModeLabel& mode, bool number_resolving) {
  if (names.empty()) throw ValidationError("fan-out needs at least one detector");
  const double share = 1.0 / static_cast<double>(names.size());
  for (const auto& name : names) detectors.push_back({name, {mode}, {share}, number_resolving});
}

void DetectorWiring::validate() const {
  std::map<ModeLabel, double> fed;
  std::set<std::string> names;
  for (const auto& d : detectors) {
    if (!names.insert(d.name).second)
      throw ValidationError("duplicate detector name " + d.name);
    if (d.modes.size() != d.split.size())
      throw ValidationError("detector " + d.name + ": one splitting ratio per mode required");
    for (std::size_t k = 0; k < d.modes.size(); ++k) {
      if (d.split[k] < 0.0 || d.split[k] > 1.0)
        throw ValidationError("detector " + d.name + ": splitting ratio outside [0,1]");
      fed[d.modes[k]] += d.split[k];
    }
  }
  for (const auto& [mode, total] : fed)
    if (std::abs(total - 1.0) > 1e-12)
      throw ValidationError("splitting ratios feeding mode " + mode.str() + " sum to " +
                            std::to_string(total));
  for (const auto& [name, count] : pattern) {
    if (!names.count(name)) throw ValidationError("pattern names unknown detector " + name);
    if (count < 0) throw ValidationError("negative required count for detector " + name);
  }
  for (const auto& name : names)
    if (!pattern.count(name))
      throw ValidationError("pattern has no required count for detector " + name);
}

int DetectorWiring::required_total() const {
  int n = 0;
  for (const auto& [name, count] : pattern) n += count;
  return n;
}

double detector_coincidence_probability(const PureState& state,
                                        const DetectorWiring& wiring) {
  wiring.validate();
  if (wiring.required_total() != state.photon_number())
    throw PhotonNumberError("detector pattern requires " +
                            std::to_string(wiring.required_total()) +
                            " photons but the state holds " +
                            std::to_string(state.photon_number()));

  const auto& modes = state.modes();
  const std::size_t nd = wiring.detectors.size();
  // For every state mode, the (detector, ratio) branches it feeds.
  std::vector<std::vector<std::pair<std::size_t, double>>> branches(modes.size());
  for (std::size_t d = 0; d < nd; ++d) {
    const auto& det = wiring.detectors[d];
    for (std::size_t k = 0; k < det.modes.size(); ++k) {
      auto it = std::lower_bound(modes.begin(), modes.end(), det.modes[k]);
      if (it == modes.end() || *it != det.modes[k])
        throw ValidationError("detector " + det.name + " watches mode " +
                              det.modes[k].str() + " absent from the state");
      branches[it - modes.begin()].emplace_back(d, det.split[k]);
    }
  }
  std::vector<int> required(nd);
  for (std::size_t d = 0; d < nd; ++d)
    required[d] = wiring.pattern.at(wiring.detectors[d].name);

  auto accepted = [&](const std::vector<int>& counts) {
    for (std::size_t d = 0; d < nd; ++d) {
      const bool resolving = wiring.detectors[d].number_resolving;
      if (resolving || required[d] == 0) {
        if (counts[d] != required[d]) return false;
      } else if (counts[d] < required[d]) {
        return false;
      }
    }
    return true;
  };

  double total = 0.0;
  std::vector<int> counts(nd, 0);
  for (const auto& [occ, amp] : state.terms()) {
    const double p = std::norm(amp);
    if (p == 0.0) continue;
    bool lost = false;
    for (std::size_t m = 0; m < occ.size(); ++m)
      if (occ[m] > 0 && branches[m].empty()) lost = true;
    if (lost) continue;

    // Photons of mode m are split over its branches with multinomial weight
    // n!/prod(k_b!) prod(ratio_b^k_b); `left` photons remain for branches b...
    std::function<void(std::size_t, std::size_t, int, double)> rec =
        [&](std::size_t m, std::size_t b, int left, double w) {
          if (m == occ.size()) {
            if (accepted(counts)) total += p * w;
            return;
          }
          if (occ[m] == 0) {
            rec(m + 1, 0, m + 1 < occ.size() ? occ[m + 1] : 0, w);
            return;
          }
          const auto& br = branches[m];
          const auto [det, ratio] = br[b];
          const int lo = (b + 1 == br.size()) ? left : 0;
          for (int k = lo; k <= left; ++k) {
            counts[det] += k;
            const double wk = w * std::pow(ratio, k) / factorial(k);
            if (b + 1 == br.size()) {
              rec(m + 1, 0, m + 1 < occ.size() ? occ[m + 1] : 0, wk * factorial(occ[m]));
            } else {
              rec(m, b + 1, left - k, wk);
            }
            counts[det] -= k;
          }
        };
    rec(0, 0, occ.empty() ? 0 : occ[0], 1.0);
  }
  return total;
}

}  // namespace noonsim
