#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "laughlin/geometry.hpp"
#include "laughlin/params.hpp"

namespace laughlin {

// Square uniform grid over scaled sampling coordinates, centered on the
// droplet. Cell (i, j) covers [lo + i h, lo + (i+1) h) x [lo + j h, ...).
struct HistGrid {
  Vec2 center{0.0, 0.0};
  double half_extent = 1.0;
  int n_cells = 128;  // per axis
  double cell = 0.0;  // derived: 2 * half_extent / n_cells

  static HistGrid for_params(const PlasmaParams& p, int n_across_droplet = 128,
                             double extent_factor = 1.625) {
    // default cell size: droplet diameter / 128, grid padded past the edge
    HistGrid g;
    const double r = p.droplet_radius_scaled;
    g.cell = 2.0 * r / n_across_droplet;
    g.half_extent = extent_factor * r;
    g.n_cells = static_cast<int>(std::ceil(2.0 * g.half_extent / g.cell));
    g.half_extent = 0.5 * g.n_cells * g.cell;  // snap so cells tile exactly
    return g;
  }

  int size() const { return n_cells * n_cells; }
  bool in_grid(Vec2 z) const {
    return std::abs(z.x - center.x) < half_extent && std::abs(z.y - center.y) < half_extent;
  }
  int cell_index(Vec2 z) const {  // caller checks in_grid
    const int i = static_cast<int>((z.x - center.x + half_extent) / cell);
    const int j = static_cast<int>((z.y - center.y + half_extent) / cell);
    return j * n_cells + i;
  }
  Vec2 cell_center(int idx) const {
    const int i = idx % n_cells, j = idx / n_cells;
    return {center.x - half_extent + (i + 0.5) * cell, center.y - half_extent + (j + 0.5) * cell};
  }
  bool operator==(const HistGrid&) const = default;
};

// Raw deposit counts from a single chain.
struct ChainHistogram {
  HistGrid grid;
  std::vector<double> counts;
  std::int64_t deposits = 0;  // all recorded particle positions
  std::int64_t in_grid = 0;   // positions that landed inside the grid

  explicit ChainHistogram(const HistGrid& g) : grid(g), counts(g.size(), 0.0) {}

  void deposit(Vec2 z) {
    ++deposits;
    if (grid.in_grid(z)) {
      ++in_grid;
      counts[grid.cell_index(z)] += 1.0;
    }
  }

  // Normalized density estimate: integrates to exactly 1 over the grid.
  std::vector<double> density() const {
    std::vector<double> d(counts.size(), 0.0);
    if (in_grid == 0) return d;
    const double norm = 1.0 / (static_cast<double>(in_grid) * grid.cell * grid.cell);
    for (size_t k = 0; k < counts.size(); ++k) d[k] = counts[k] * norm;
    return d;
  }
};

// Estimate of the scaled one-particle probability density with per-cell
// standard errors from the spread between independent chains.
struct DensityHistogram {
  HistGrid grid;
  int n_chains = 0;
  std::vector<double> density;                   // mean over chains
  std::vector<double> stderr_;                   // standard error of that mean
  std::vector<std::vector<double>> chain_density;  // per-chain normalized estimates
  std::int64_t total_deposits = 0;
  std::int64_t in_grid_deposits = 0;

  double clipped_fraction() const {
    if (total_deposits == 0) return 0.0;
    return 1.0 - static_cast<double>(in_grid_deposits) / static_cast<double>(total_deposits);
  }

  static DensityHistogram merge(std::span<const ChainHistogram> chains) {
    if (chains.empty()) throw std::invalid_argument("no chains to merge");
    DensityHistogram h;
    h.grid = chains[0].grid;
    h.n_chains = static_cast<int>(chains.size());
    for (const auto& c : chains) {
      if (!(c.grid == h.grid)) throw std::invalid_argument("chain histograms on different grids");
      h.chain_density.push_back(c.density());
      h.total_deposits += c.deposits;
      h.in_grid_deposits += c.in_grid;
    }
    const int m = h.grid.size();
    h.density.assign(m, 0.0);
    h.stderr_.assign(m, 0.0);
    for (int k = 0; k < m; ++k) {
      double mean = 0.0;
      for (const auto& cd : h.chain_density) mean += cd[k];
      mean /= h.n_chains;
      h.density[k] = mean;
      if (h.n_chains > 1) {
        double var = 0.0;
        for (const auto& cd : h.chain_density) var += (cd[k] - mean) * (cd[k] - mean);
        var /= (h.n_chains - 1);
        h.stderr_[k] = std::sqrt(var / h.n_chains);
      }
    }
    return h;
  }

  struct RadialBin {
    double radius;  // bin center
    double density;
    double stderr_;
  };

  // Ring averages about the grid center; ring width equals the cell size.
  std::vector<RadialBin> radial_profile() const {
    const double h = grid.cell;
    const int n_rings = static_cast<int>(std::floor(grid.half_extent / h));
    std::vector<std::vector<int>> ring_cells(n_rings);
    for (int k = 0; k < grid.size(); ++k) {
      const double r = dist(grid.cell_center(k), grid.center);
      const int ring = static_cast<int>(r / h);
      if (ring < n_rings) ring_cells[ring].push_back(k);
    }
    std::vector<RadialBin> out;
    for (int ring = 0; ring < n_rings; ++ring) {
      if (ring_cells[ring].empty()) continue;
      RadialBin bin{(ring + 0.5) * h, 0.0, 0.0};
      std::vector<double> per_chain(n_chains, 0.0);
      for (int c = 0; c < n_chains; ++c) {
        double s = 0.0;
        for (int k : ring_cells[ring]) s += chain_density[c][k];
        per_chain[c] = s / ring_cells[ring].size();
      }
      double mean = 0.0;
      for (double v : per_chain) mean += v;
      mean /= n_chains;
      bin.density = mean;
      if (n_chains > 1) {
        double var = 0.0;
        for (double v : per_chain) var += (v - mean) * (v - mean);
        var /= (n_chains - 1);
        bin.stderr_ = std::sqrt(var / n_chains);
      }
      out.push_back(bin);
    }
    return out;
  }
};

// Disk-averaged density versus the incompressibility bound 1/(pi * ell).
struct DiskAverage {
  Vec2 center;
  double radius = 0.0;     // scaled coordinates
  double mean = 0.0;       // average density over the disk
  double stderr_ = 0.0;    // inter-chain standard error of the mean
  double bound = 0.0;      // 1 / (pi * ell)
  bool exceeds = false;    // mean - 2 stderr > bound
};

// Tiles the droplet (|z - center| <= sqrt(ell) + 2 r_disk) with overlapping
// disks of scaled radius N^(alpha - 1/2) on a half-radius lattice.
inline std::vector<DiskAverage> disk_averages(const DensityHistogram& hist,
                                              const PlasmaParams& params, double alpha) {
  const double r_disk = std::pow(static_cast<double>(params.n_particles), alpha - 0.5);
  const double h = hist.grid.cell;
  if (r_disk < 2.0 * h) throw std::invalid_argument("resolution too coarse for disk averages");

  const double bound = 1.0 / (M_PI * params.ell);
  const double reach = params.droplet_radius_scaled + 2.0 * r_disk;
  const double pitch = 0.5 * r_disk;

  std::vector<DiskAverage> out;
  const int m = static_cast<int>(std::floor(reach / pitch));
  for (int jy = -m; jy <= m; ++jy) {
    for (int jx = -m; jx <= m; ++jx) {
      const Vec2 c = hist.grid.center + Vec2{jx * pitch, jy * pitch};
      if (dist(c, hist.grid.center) > reach) continue;

      std::vector<int> cells;
      const int lo_i = std::max(0, static_cast<int>((c.x - r_disk - hist.grid.center.x +
                                                     hist.grid.half_extent) / h) - 1);
      const int lo_j = std::max(0, static_cast<int>((c.y - r_disk - hist.grid.center.y +
                                                     hist.grid.half_extent) / h) - 1);
      const int hi_i = std::min(hist.grid.n_cells - 1,
                                static_cast<int>((c.x + r_disk - hist.grid.center.x +
                                                  hist.grid.half_extent) / h) + 1);
      const int hi_j = std::min(hist.grid.n_cells - 1,
                                static_cast<int>((c.y + r_disk - hist.grid.center.y +
                                                  hist.grid.half_extent) / h) + 1);
      for (int j = lo_j; j <= hi_j; ++j)
        for (int i = lo_i; i <= hi_i; ++i) {
          const int k = j * hist.grid.n_cells + i;
          if (dist(hist.grid.cell_center(k), c) <= r_disk) cells.push_back(k);
        }
      if (cells.empty()) continue;

      DiskAverage da;
      da.center = c;
      da.radius = r_disk;
      da.bound = bound;
      std::vector<double> per_chain(hist.n_chains, 0.0);
      for (int ch = 0; ch < hist.n_chains; ++ch) {
        double s = 0.0;
        for (int k : cells) s += hist.chain_density[ch][k];
        per_chain[ch] = s / cells.size();
      }
      double mean = 0.0;
      for (double v : per_chain) mean += v;
      mean /= hist.n_chains;
      da.mean = mean;
      if (hist.n_chains > 1) {
        double var = 0.0;
        for (double v : per_chain) var += (v - mean) * (v - mean);
        var /= (hist.n_chains - 1);
        da.stderr_ = std::sqrt(var / hist.n_chains);
      }
      da.exceeds = (da.mean - 2.0 * da.stderr_ > da.bound);
      out.push_back(da);
    }
  }
  return out;
}

}  // namespace laughlin
