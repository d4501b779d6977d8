// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#include "hybridsync/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridsync::sim {

double RunStats::max_abs_ns() const { return std::max(std::abs(min_ns), std::abs(max_ns)); }

RunStats compute_stats(std::span<const double> samples, int histogram_bins) {
  if (samples.size() < 2) throw std::invalid_argument("compute_stats: need at least 2 samples");
  if (histogram_bins < 1) throw std::invalid_argument("compute_stats: histogram_bins must be >= 1");
  RunStats s;
  s.n_samples = static_cast<long long>(samples.size());
  // Welford keeps the variance accurate for large, biased samples.
  double mean = 0.0, m2 = 0.0;
  long long k = 0;
  s.min_ns = samples.front();
  s.max_ns = samples.front();
  for (double x : samples) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
    s.min_ns = std::min(s.min_ns, x);
    s.max_ns = std::max(s.max_ns, x);
  }
  s.mu_ns = mean;
  s.sigma_ns = std::sqrt(m2 / static_cast<double>(k - 1));
  s.mu_plus_3sigma_ns = std::abs(s.mu_ns) + 3.0 * s.sigma_ns;

  const int bins = s.max_ns > s.min_ns ? histogram_bins : 1;
  const double width = s.max_ns > s.min_ns ? (s.max_ns - s.min_ns) / bins : 1.0;
  const double lo = s.max_ns > s.min_ns ? s.min_ns : s.min_ns - 0.5;
  s.histogram.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b) s.histogram.edges[static_cast<std::size_t>(b)] = lo + b * width;
  s.histogram.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double x : samples) {
    auto b = static_cast<long long>(std::floor((x - lo) / width));
    b = std::clamp<long long>(b, 0, bins - 1);
    ++s.histogram.counts[static_cast<std::size_t>(b)];
  }
  return s;
}

}  // namespace hybridsync::sim

namespace hybridsync::stats {

double kolmogorov_pvalue(double statistic, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_pvalue(d, samples.size())};
}

}  // namespace hybridsync::stats
