#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "laughlin/minimize.hpp"
#include "laughlin/parallel.hpp"
#include "laughlin/plasma.hpp"
#include "laughlin/tf.hpp"

namespace laughlin {

// ---------------------------------------------------------------------------
// Exclusion rule on minimizing configurations: no point may lie inside the
// screening region generated by any K others. K = 1 is exactly the pairwise
// distance bound 1/sqrt(pi) (the single-nucleus region is that disk); for
// K >= 2 the combinatorial quantifier is sampled by the tight clusters grown
// greedily from each point, which monotonicity makes the binding cases.
// ---------------------------------------------------------------------------

struct ExclusionSettings {
  int grid_cells_min = 96;
  double h_target = 0.047;       // about 24 cells across the unit-area disk
  double pairwise_slack = 0.02;  // geometric slack for approximate minimizers
  TfSettings tf{};
};

struct ExclusionViolation {
  int k = 0;
  std::vector<int> cluster;  // indices generating the region
  int violator = -1;         // index of the point found inside
  double margin = 0.0;       // depth of the violation
};

struct ExclusionReport {
  double min_pairwise = 0.0;
  double pairwise_bound = 0.0;  // 1/sqrt(pi)
  double slack = 0.0;
  int clusters_tested = 0;
  std::vector<ExclusionViolation> violations;
  bool pass() const { return violations.empty(); }
};

namespace detail {

inline GridSpec cluster_grid(const NucleiSet& nuclei, const ExclusionSettings& settings) {
  const double pad = 2.0 * std::sqrt(nuclei.k() / M_PI);
  double lo_x = nuclei.positions[0].x, hi_x = lo_x, lo_y = nuclei.positions[0].y, hi_y = lo_y;
  for (const Vec2& p : nuclei.positions) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double width = std::max(hi_x - lo_x, hi_y - lo_y) + 2.0 * pad;
  int n = static_cast<int>(std::ceil(width / settings.h_target));
  n = std::max(settings.grid_cells_min, ((n + 15) / 16) * 16);
  return auto_grid(nuclei, n, pad);
}

}  // namespace detail

inline ExclusionReport exclusion_check(std::span<const Vec2> pts, int k_max,
                                       const ExclusionSettings& settings = {}, int n_threads = 1) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  const int n = static_cast<int>(pts.size());
  ExclusionReport report;
  report.pairwise_bound = 1.0 / std::sqrt(M_PI);
  report.slack = settings.pairwise_slack;
  report.min_pairwise = min_pairwise_distance(pts);

  // K = 1: exhaustive pairwise check
  const double limit = (1.0 - settings.pairwise_slack) * report.pairwise_bound;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = dist(pts[i], pts[j]);
      if (d < limit)
        report.violations.push_back({1, {i}, j, report.pairwise_bound - d});
    }

  // K >= 2: greedy nearest clusters, deduplicated
  std::set<std::vector<int>> clusters;
  for (int k = 2; k <= std::min(k_max, n - 1); ++k) {
    for (int start = 0; start < n; ++start) {
      std::vector<int> cluster{start};
      std::vector<bool> in_cluster(n, false);
      in_cluster[start] = true;
      while (static_cast<int>(cluster.size()) < k) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) {
          if (in_cluster[j]) continue;
          for (int m : cluster) {
            const double d = dist(pts[j], pts[m]);
            if (d < best_d) {
              best_d = d;
              best = j;
            }
          }
        }
        cluster.push_back(best);
        in_cluster[best] = true;
      }
      std::sort(cluster.begin(), cluster.end());
      clusters.insert(cluster);
    }
  }

  std::vector<std::vector<int>> cluster_list(clusters.begin(), clusters.end());
  report.clusters_tested = static_cast<int>(cluster_list.size());
  std::vector<std::vector<ExclusionViolation>> found(cluster_list.size());

  parallel_for(static_cast<int>(cluster_list.size()), n_threads, [&](int ci) {
    const auto& cluster = cluster_list[ci];
    NucleiSet nuclei;
    for (int m : cluster) nuclei.positions.push_back(pts[m]);
    const GridSpec spec = detail::cluster_grid(nuclei, settings);
    const TfSolution sol = tf_solve(nuclei, spec, settings.tf);
    for (int j = 0; j < n; ++j) {
      if (std::find(cluster.begin(), cluster.end(), j) != cluster.end()) continue;
      if (sol.region.contains_eroded(pts[j])) {
        double depth = std::numeric_limits<double>::infinity();
        for (const auto& loop : sol.region.boundary)
          for (const Vec2& v : loop) depth = std::min(depth, dist(v, pts[j]));
        found[ci].push_back(
            {static_cast<int>(cluster.size()), cluster, j, std::isfinite(depth) ? depth : 0.0});
      }
    }
  });
  for (const auto& f : found)
    report.violations.insert(report.violations.end(), f.begin(), f.end());
  return report;
}

// ---------------------------------------------------------------------------
// Boundary-descent mechanism: with all other particles fixed, the energy of a
// probe particle placed anywhere strictly inside the screening region of a
// subset exceeds its minimum over the region boundary. The decomposition
// G = Phi + R makes this visible: Phi is the TF potential of the subset
// (positive inside, zero on the boundary) and R attains its minimum on the
// boundary because its parts are harmonic or superharmonic inside.
// ---------------------------------------------------------------------------

struct BoundaryDescentReport {
  double g_probe = 0.0;
  double g_boundary_min = 0.0;
  double descent_margin = 0.0;  // g_probe - g_boundary_min, > 0 on pass
  double phi_probe = 0.0;
  double phi_boundary_max_abs = 0.0;
  int boundary_points = 0;
  bool pass = false;
};

namespace detail {

// Evenly spaced samples along the traced region boundary.
inline std::vector<Vec2> sample_boundary(const ScreeningRegion& region, int min_points) {
  double total_len = 0.0;
  for (const auto& loop : region.boundary) {
    for (size_t i = 0; i < loop.size(); ++i)
      total_len += dist(loop[i], loop[(i + 1) % loop.size()]);
  }
  if (total_len <= 0.0) throw std::invalid_argument("region has no traced boundary");
  std::vector<Vec2> samples;
  for (const auto& loop : region.boundary) {
    double loop_len = 0.0;
    for (size_t i = 0; i < loop.size(); ++i) loop_len += dist(loop[i], loop[(i + 1) % loop.size()]);
    const int count = std::max(8, static_cast<int>(std::ceil(min_points * loop_len / total_len)));
    const double spacing = loop_len / count;
    double next_at = 0.0, walked = 0.0;
    for (size_t i = 0; i < loop.size() && static_cast<int>(samples.size()) < count + 8; ++i) {
      const Vec2 a = loop[i], b = loop[(i + 1) % loop.size()];
      const double seg = dist(a, b);
      while (next_at <= walked + seg && seg > 0.0) {
        const double t = (next_at - walked) / seg;
        samples.push_back(a + (b - a) * t);
        next_at += spacing;
      }
      walked += seg;
    }
  }
  return samples;
}

}  // namespace detail

inline BoundaryDescentReport verify_boundary_descent(std::span<const Vec2> config,
                                                     std::span<const int> subset, Vec2 probe,
                                                     std::optional<int> probe_index,
                                                     const ExternalField& w,
                                                     const TfSolution& tf) {
  for (int s : subset) {
    if (s < 0 || s >= static_cast<int>(config.size()))
      throw std::invalid_argument("subset index out of range");
    if (probe_index && *probe_index == s)
      throw std::invalid_argument("subset must exclude the probe's own index");
  }
  if (!tf.region.contains(probe))
    throw std::invalid_argument("probe must lie strictly inside the screening region");

  // x-dependent part of the scaled Hamiltonian with the probe particle at x
  auto g_at = [&](Vec2 x) {
    double e = 0.5 * M_PI * norm2(x);
    for (size_t j = 0; j < config.size(); ++j) {
      if (probe_index && static_cast<int>(j) == *probe_index) continue;
      const double d2 = dist2(x, config[j]);
      if (d2 == 0.0) return std::numeric_limits<double>::infinity();
      e -= 0.5 * std::log(d2);
    }
    return e + w.single_value(x);
  };

  BoundaryDescentReport report;
  const auto samples = detail::sample_boundary(tf.region, 64);
  report.boundary_points = static_cast<int>(samples.size());
  if (report.boundary_points < 64)
    throw std::invalid_argument("too few boundary samples for descent check");

  report.g_probe = g_at(probe);
  report.phi_probe = phi_at(tf, probe);
  report.g_boundary_min = std::numeric_limits<double>::infinity();
  for (const Vec2& b : samples) {
    report.g_boundary_min = std::min(report.g_boundary_min, g_at(b));
    report.phi_boundary_max_abs = std::max(report.phi_boundary_max_abs, std::abs(phi_at(tf, b)));
  }
  report.descent_margin = report.g_probe - report.g_boundary_min;
  report.pass = report.g_boundary_min < report.g_probe && report.phi_probe > 0.0;
  return report;
}

}  // namespace laughlin
