#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace mcmc_lab {

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
};

inline MomentSummary sample_moments(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_moments needs at least two values");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  return {mean, m2 / static_cast<double>(n - 1)};
}

/// Standard error of the mean of g(x_t) for a correlated series, from the
/// spread of `n_batches` non-overlapping batch means.
template <class F>
double batch_means_standard_error(std::span<const double> xs, std::size_t n_batches, F g) {
  if (n_batches < 2 || xs.size() < 2 * n_batches) {
    throw std::invalid_argument("batch_means_standard_error: series too short");
  }
  const std::size_t len = xs.size() / n_batches;
  double mean_of_means = 0.0, m2 = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += g(xs[i]);
    const double bm = s / static_cast<double>(len);
    const double delta = bm - mean_of_means;
    mean_of_means += delta / static_cast<double>(b + 1);
    m2 += delta * (bm - mean_of_means);
  }
  const double var_batch = m2 / static_cast<double>(n_batches - 1);
  return std::sqrt(var_batch / static_cast<double>(n_batches));
}

inline double batch_means_standard_error(std::span<const double> xs, std::size_t n_batches) {
  return batch_means_standard_error(xs, n_batches, [](double x) { return x; });
}

}  // namespace mcmc_lab
