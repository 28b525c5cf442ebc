#pragma once

// Photon-counting simulation of fringe scans and the harmonic least-squares
// fit used to extract P40, V3, V1 and phi0.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noonsim/schemes.hpp"

namespace noonsim {

// Recorded in output metadata so runs can be regenerated.
inline constexpr const char* kRngName = "mt19937_64/splitmix64-substream/ptrs-poisson";

struct CountRecord {
  double phase = 0.0;                // radians
  double duration = 0.0;             // seconds
  std::int64_t raw_counts = 0;
  double background_estimate = 0.0;  // counts

  bool operator==(const CountRecord&) const = default;
};

// Deterministic Poisson sampler on a 64-bit seeded stream. Uses inversion by
// multiplication below mean 10 and transformed rejection (PTRS) above.
class PoissonSampler {
 public:
  explicit PoissonSampler(std::uint64_t seed);
  std::int64_t operator()(double mean);
  double uniform();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
// Sub-seed for point `index` of a scan seeded with `seed`.
std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index);

// Counts at each phase ~ Poisson((rate_scale * value + bg_rate) * duration).
std::vector<CountRecord> simulate_counts(const FringeSeries& curve, double rate_scale,
                                         double duration, double bg_rate,
                                         std::uint64_t seed);

struct CorrectedSeries {
  std::vector<double> phases;
  std::vector<double> values;     // raw - background, may be negative
  std::vector<double> variances;  // raw counts, floored at 1
};

CorrectedSeries subtract_background(std::span<const CountRecord> records);

struct FitResult {
  double P40 = 0.0;
  double V3 = 0.0;
  double V1 = 0.0;
  double phi0 = 0.0;
  double chi2 = 0.0;
  int dof = 0;
  std::vector<int> harmonics;
  // Covariance over parameter_names (P40, then V_k per harmonic, then phi0).
  std::vector<std::string> parameter_names;
  Eigen::MatrixXd covariance;
  // Linear coefficients (a0, a_k, b_k ...) and their covariance.
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd coefficient_covariance;
  Eigen::VectorXd residuals;

  double sigma(const std::string& parameter) const;
};

// Least squares on {1, cos k phi, sin k phi : k in harmonics}, harmonics a
// non-empty subset of {1, 3}. Coefficients are ordinary least squares;
// chi2 and the covariance use the supplied variances.
FitResult fit_series(std::span<const double> phases, std::span<const double> values,
                     std::span<const double> variances, std::vector<int> harmonics);

FitResult fit_fringe(std::span<const CountRecord> records, std::vector<int> harmonics);

}  // namespace noonsim
