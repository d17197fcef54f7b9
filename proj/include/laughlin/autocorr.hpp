#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace laughlin {

struct AutocorrResult {
  double tau = 1.0;   // integrated autocorrelation time
  int window = 0;     // number of pair sums used
  bool defined = true;  // false for degenerate (zero-variance) series
};

// Integrated autocorrelation time via Geyer's initial monotone sequence:
// pair the autocovariances, keep while positive, enforce monotone decrease.
// tau multiplies the naive variance of the series mean.
inline AutocorrResult integrated_autocorrelation(std::span<const double> series) {
  const int n = static_cast<int>(series.size());
  if (n < 1000) throw std::invalid_argument("series too short for autocorrelation estimate");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= n;

  auto gamma = [&](int lag) {
    double s = 0.0;
    for (int i = 0; i + lag < n; ++i) s += (series[i] - mean) * (series[i + lag] - mean);
    return s / n;
  };

  const double g0 = gamma(0);
  if (!(g0 > 0.0)) return {.tau = 0.0, .window = 0, .defined = false};

  AutocorrResult result;
  double sum = -g0;  // tau * g0 = -g0 + 2 * sum of monotone pair sums
  double prev_pair = std::numeric_limits<double>::infinity();
  const int max_pairs = (n / 2 - 1) / 2;
  for (int m = 0; m < max_pairs; ++m) {
    double pair = gamma(2 * m) + gamma(2 * m + 1);
    if (pair <= 0.0) break;
    if (pair > prev_pair) pair = prev_pair;
    prev_pair = pair;
    sum += 2.0 * pair;
    ++result.window;
  }
  result.tau = sum / g0;
  return result;
}

}  // namespace laughlin
