// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hybridsync Authors

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hybridsync::sim {

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 entries
  std::vector<long long> counts;
};

struct RunStats {
  double mu_ns = 0.0;
  double sigma_ns = 0.0;  // n - 1 denominator
  double mu_plus_3sigma_ns = 0.0;  // |mu| + 3 sigma
  double min_ns = 0.0;
  double max_ns = 0.0;
  long long n_samples = 0;
  Histogram histogram;
  std::vector<RunStats> per_replica;

  double max_abs_ns() const;
};

inline constexpr int kDefaultHistogramBins = 50;

/// Throws std::invalid_argument for fewer than two samples.
RunStats compute_stats(std::span<const double> samples, int histogram_bins = kDefaultHistogramBins);

}  // namespace hybridsync::sim

namespace hybridsync::stats {

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution (Stephens' small-n correction).
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

double kolmogorov_pvalue(double statistic, std::size_t n);

}  // namespace hybridsync::stats
