#include "noonsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace noonsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

PoissonSampler::PoissonSampler(std::uint64_t seed) : engine_(seed) {}

double PoissonSampler::uniform() {
  // 53 random mantissa bits in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::int64_t PoissonSampler::operator()(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw ValidationError("Poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0))
      return static_cast<std::int64_t>(k);
  }
}

std::vector<CountRecord> simulate_counts(const FringeSeries& curve, double rate_scale,
                                         double duration, double bg_rate,
                                         std::uint64_t seed) {
  if (curve.phases.size() != curve.values.size())
    throw ValidationError("fringe series phases and values differ in length");
  if (!(rate_scale >= 0.0)) throw ValidationError("rate scale must be non-negative");
  if (!(duration >= 0.0)) throw ValidationError("duration must be non-negative");
  if (!(bg_rate >= 0.0)) throw ValidationError("background rate must be non-negative");
  std::vector<CountRecord> out;
  out.reserve(curve.phases.size());
  for (std::size_t k = 0; k < curve.phases.size(); ++k) {
    if (curve.values[k] < 0.0) throw ValidationError("fringe values must be non-negative");
    PoissonSampler draw(point_seed(seed, k));
    const double mean = (rate_scale * curve.values[k] + bg_rate) * duration;
    out.push_back({curve.phases[k], duration, draw(mean), bg_rate * duration});
  }
  return out;
}

CorrectedSeries subtract_background(std::span<const CountRecord> records) {
  CorrectedSeries s;
  for (const auto& r : records) {
    if (r.raw_counts < 0) throw ValidationError("raw counts must be non-negative");
    s.phases.push_back(r.phase);
    s.values.push_back(static_cast<double>(r.raw_counts) - r.background_estimate);
    s.variances.push_back(std::max<double>(1.0, static_cast<double>(r.raw_counts)));
  }
  return s;
}

double FitResult::sigma(const std::string& parameter) const {
  for (std::size_t k = 0; k < parameter_names.size(); ++k)
    if (parameter_names[k] == parameter) {
      const auto i = static_cast<Eigen::Index>(k);
      return std::sqrt(covariance(i, i));
    }
  throw ValidationError("fit has no parameter " + parameter);
}

FitResult fit_series(std::span<const double> phases, std::span<const double> values,
                     std::span<const double> variances, std::vector<int> harmonics) {
  std::sort(harmonics.begin(), harmonics.end());
  harmonics.erase(std::unique(harmonics.begin(), harmonics.end()), harmonics.end());
  if (harmonics.empty()) throw ValidationError("fit needs at least one harmonic");
  for (int h : harmonics)
    if (h != 1 && h != 3) throw ValidationError("harmonics must be drawn from {1, 3}");
  const auto n = static_cast<Eigen::Index>(phases.size());
  if (values.size() != phases.size() || variances.size() != phases.size())
    throw ValidationError("fit inputs differ in length");
  const auto p = static_cast<Eigen::Index>(1 + 2 * harmonics.size());
  if (n < p)
    throw ValidationError("fit needs at least " + std::to_string(p) + " points");

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n), var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(variances[i] > 0.0)) throw ValidationError("fit variances must be positive");
    x(i, 0) = 1.0;
    for (std::size_t k = 0; k < harmonics.size(); ++k) {
      const auto col = static_cast<Eigen::Index>(1 + 2 * k);
      x(i, col) = std::cos(harmonics[k] * phases[i]);
      x(i, col + 1) = std::sin(harmonics[k] * phases[i]);
    }
    y[i] = values[i];
    var[i] = variances[i];
  }

  const Eigen::MatrixXd normal = x.transpose() * x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p)
    throw NumericalError("singular design matrix: phase grid cannot resolve the requested harmonics");
  const Eigen::MatrixXd normal_inv = normal.inverse();

  FitResult r;
  r.harmonics = harmonics;
  r.coefficients = qr.solve(y);
  r.residuals = y - x * r.coefficients;
  r.coefficient_covariance =
      normal_inv * x.transpose() * var.asDiagonal() * x * normal_inv;
  r.chi2 = (r.residuals.array().square() / var.array()).sum();
  r.dof = static_cast<int>(n - p);

  const double a0 = r.coefficients[0];
  if (a0 == 0.0) throw NumericalError("fitted mean level is zero; visibilities undefined");
  r.P40 = a0;

  // Derived parameters and their Jacobian with respect to the coefficients.
  std::vector<std::string> names{"P40"};
  std::vector<Eigen::VectorXd> grads;
  Eigen::VectorXd g0 = Eigen::VectorXd::Zero(p);
  g0[0] = 1.0;
  grads.push_back(g0);
  int phase_harmonic = harmonics.back();
  Eigen::Index phase_col = 0;
  for (std::size_t k = 0; k < harmonics.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(1 + 2 * k);
    const double ak = r.coefficients[col], bk = r.coefficients[col + 1];
    const double c = std::hypot(ak, bk);
    const double vis = c / a0;
    (harmonics[k] == 3 ? r.V3 : r.V1) = vis;
    names.push_back(harmonics[k] == 3 ? "V3" : "V1");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
    g[0] = -c / (a0 * a0);
    if (c > 0.0) {
      g[col] = ak / (c * a0);
      g[col + 1] = bk / (c * a0);
    }
    grads.push_back(g);
    if (harmonics[k] == phase_harmonic) phase_col = col;
  }
  {
    // a cos(k phi) + b sin(k phi) = C cos(k (phi + phi0))
    const double ak = r.coefficients[phase_col], bk = r.coefficients[phase_col + 1];
    const double c2 = ak * ak + bk * bk;
    r.phi0 = std::atan2(-bk, ak) / phase_harmonic;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
    if (c2 > 0.0) {
      g[phase_col] = bk / c2 / phase_harmonic;
      g[phase_col + 1] = -ak / c2 / phase_harmonic;
    }
    names.push_back("phi0");
    grads.push_back(g);
  }
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(grads.size()), p);
  for (std::size_t i = 0; i < grads.size(); ++i)
    jac.row(static_cast<Eigen::Index>(i)) = grads[i].transpose();
  r.covariance = jac * r.coefficient_covariance * jac.transpose();
  r.parameter_names = std::move(names);
  return r;
}

FitResult fit_fringe(std::span<const CountRecord> records, std::vector<int> harmonics) {
  const CorrectedSeries s = subtract_background(records);
  return fit_series(s.phases, s.values, s.variances, std::move(harmonics));
}

}  // namespace noonsim
