#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laughlin/conv.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/grid.hpp"

namespace laughlin {

// ---------------------------------------------------------------------------
// Thomas-Fermi obstacle problem for K point charges ("nuclei") in 2D:
// minimize  E[sigma] = -int V_nucl sigma + D(sigma, sigma)
// over 0 <= sigma <= 1 with int sigma = K, where
//   V_nucl(x) = -sum_i log|x - x_i|,
//   D(s, s')  = -1/2 iint s(x) log|x - x'| s'(x').
// The minimizer is (up to a null set) the indicator of the screening region,
// on which the total potential Phi = V_nucl + conv_log(sigma) is positive.
// ---------------------------------------------------------------------------

struct NucleiSet {
  std::vector<Vec2> positions;

  int k() const { return static_cast<int>(positions.size()); }

  void validate() const {
    if (positions.empty()) throw std::invalid_argument("nuclei set must not be empty");
    for (size_t i = 0; i < positions.size(); ++i) {
      if (!is_finite(positions[i])) throw std::invalid_argument("nucleus position not finite");
      for (size_t j = i + 1; j < positions.size(); ++j)
        if (positions[i] == positions[j])
          throw std::invalid_argument("nuclei positions must be pairwise distinct");
    }
  }
};

struct TfSettings {
  int max_iterations = 5000;
  double energy_rtol = 1e-9;  // stop on relative energy change below this
  double armijo_c1 = 1e-4;
  int max_backtracks = 40;
};

// Screening region as a cell indicator plus its traced boundary.
struct ScreeningRegion {
  GridSpec spec;
  std::vector<std::uint8_t> inside;
  std::vector<std::vector<Vec2>> boundary;  // closed loops, sub-cell accurate

  double area() const {
    std::int64_t c = 0;
    for (auto v : inside) c += v;
    return static_cast<double>(c) * spec.h * spec.h;
  }

  bool contains(Vec2 p) const { return spec.contains(p) && inside[spec.cell_of(p)]; }

  // true if p lies in the region eroded by one cell (p's cell and all its
  // 8 neighbors are inside); the one-cell slack for exclusion checks
  bool contains_eroded(Vec2 p) const {
    if (!spec.contains(p)) return false;
    const int k = spec.cell_of(p);
    const int i = k % spec.nx, j = k / spec.nx;
    if (i < 1 || j < 1 || i >= spec.nx - 1 || j >= spec.ny - 1) return false;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (!inside[spec.index(i + di, j + dj)]) return false;
    return true;
  }
};

struct TfSolution {
  NucleiSet nuclei;
  GridField sigma;
  GridField phi;
  ScreeningRegion region;
  double energy = 0.0;
  double epsilon_grid = 0.0;  // grid tolerance for "Phi > 0"
  double multiplier = 0.0;    // mass-constraint multiplier at convergence
  int iterations = 0;
  bool converged = false;
  std::vector<double> energy_trace;
};

// Square grid around the nuclei. pad <= 0 selects the default padding
// 2 sqrt(K/pi), twice the equivalent radius of the screening region.
inline GridSpec auto_grid(const NucleiSet& nuclei, int n_cells, double pad = 0.0) {
  nuclei.validate();
  if (n_cells < 32) throw std::invalid_argument("grid must have at least 32 cells per side");
  if (pad <= 0.0) pad = 2.0 * std::sqrt(nuclei.k() / M_PI);
  double lo_x = nuclei.positions[0].x, hi_x = lo_x;
  double lo_y = nuclei.positions[0].y, hi_y = lo_y;
  for (const Vec2& p : nuclei.positions) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double width = std::max(hi_x - lo_x, hi_y - lo_y) + 2.0 * pad;
  const Vec2 center{0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)};
  GridSpec spec;
  spec.h = width / n_cells;
  spec.nx = spec.ny = n_cells;
  spec.origin = {center.x - 0.5 * width, center.y - 0.5 * width};
  return spec;
}

// -sum_i log|x - x_i| at cell centers. A cell whose equal-area disk contains
// a nucleus uses the disk average of the log instead of the midpoint value.
inline GridField nuclear_potential(const NucleiSet& nuclei, const GridSpec& spec) {
  nuclei.validate();
  GridField v(spec, FieldRole::Phi);
  const double r_cell = spec.h / std::sqrt(M_PI);
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const Vec2 c = spec.cell_center(i, j);
      double s = 0.0;
      for (const Vec2& x : nuclei.positions) {
        const double d = dist(c, x);
        if (d < r_cell) {
          const double t = d / r_cell;
          s += std::log(r_cell) - 0.5 * (1.0 - t * t);
        } else {
          s += std::log(d);
        }
      }
      v.values[spec.index(i, j)] = -s;
    }
  return v;
}

namespace detail {

// Projection onto { 0 <= sigma <= 1, h^2 sum sigma = mass } by bisection on
// the uniform shift. Returns the shift actually applied.
inline double project_box_mass(std::vector<double>& v, double cell_area, double mass) {
  const double target = mass / cell_area;  // required sum of sigma
  auto shifted_sum = [&](double s) {
    double acc = 0.0;
    for (double x : v) acc += std::clamp(x + s, 0.0, 1.0);
    return acc;
  };
  double lo = -1.0, hi = 1.0;
  for (double x : v) {
    lo = std::min(lo, -x);            // at shift lo everything clamps to <= 0
    hi = std::max(hi, 1.0 - x);       // at shift hi everything clamps to >= 1
  }
  if (target <= 0.0 || target >= static_cast<double>(v.size()))
    throw std::invalid_argument("mass constraint out of range for grid");
  for (int it = 0; it < 90; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shifted_sum(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double s = 0.5 * (lo + hi);
  for (double& x : v) x = std::clamp(x + s, 0.0, 1.0);
  return s;
}

// Marching squares at a level set of cell-center samples. Segment endpoints
// live on lattice edges, so loops can be chained by exact edge identity.
inline std::vector<std::vector<Vec2>> trace_level_set(const GridSpec& spec,
                                                      std::span<const double> f, double level) {
  struct EdgeKey {
    int a, b;  // node indices, a < b
    bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
  };
  auto node = [&](int i, int j) { return j * spec.nx + i; };
  auto node_pos = [&](int k) { return spec.cell_center(k % spec.nx, k / spec.nx); };
  auto interp = [&](int k0, int k1) {
    const double f0 = f[k0], f1 = f[k1];
    double t = (level - f0) / (f1 - f0);
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 p0 = node_pos(k0), p1 = node_pos(k1);
    return p0 + (p1 - p0) * t;
  };

  std::map<EdgeKey, Vec2> edge_point;
  std::map<EdgeKey, std::vector<EdgeKey>> links;
  auto add_segment = [&](EdgeKey e0, Vec2 p0, EdgeKey e1, Vec2 p1) {
    edge_point[e0] = p0;
    edge_point[e1] = p1;
    links[e0].push_back(e1);
    links[e1].push_back(e0);
  };

  for (int j = 0; j + 1 < spec.ny; ++j)
    for (int i = 0; i + 1 < spec.nx; ++i) {
      const int k00 = node(i, j), k10 = node(i + 1, j), k11 = node(i + 1, j + 1),
                k01 = node(i, j + 1);
      int c = 0;
      if (f[k00] > level) c |= 1;
      if (f[k10] > level) c |= 2;
      if (f[k11] > level) c |= 4;
      if (f[k01] > level) c |= 8;
      if (c == 0 || c == 15) continue;

      const EdgeKey bottom{std::min(k00, k10), std::max(k00, k10)};
      const EdgeKey right{std::min(k10, k11), std::max(k10, k11)};
      const EdgeKey top{std::min(k01, k11), std::max(k01, k11)};
      const EdgeKey left{std::min(k00, k01), std::max(k00, k01)};
      const Vec2 pb = interp(k00, k10), pr = interp(k10, k11), pt = interp(k01, k11),
                 pl = interp(k00, k01);

      switch (c) {
        case 1: case 14: add_segment(left, pl, bottom, pb); break;
        case 2: case 13: add_segment(bottom, pb, right, pr); break;
        case 3: case 12: add_segment(left, pl, right, pr); break;
        case 4: case 11: add_segment(right, pr, top, pt); break;
        case 6: case 9:  add_segment(bottom, pb, top, pt); break;
        case 7: case 8:  add_segment(left, pl, top, pt); break;
        case 5: case 10: {
          const double center = 0.25 * (f[k00] + f[k10] + f[k11] + f[k01]);
          const bool center_in = center > level;
          if ((c == 5) == center_in) {
            add_segment(left, pl, top, pt);
            add_segment(bottom, pb, right, pr);
          } else {
            add_segment(left, pl, bottom, pb);
            add_segment(right, pr, top, pt);
          }
          break;
        }
        default: break;
      }
    }

  std::vector<std::vector<Vec2>> loops;
  std::map<EdgeKey, bool> used;
  for (const auto& [start, _] : links) {
    if (used[start]) continue;
    std::vector<Vec2> loop;
    EdgeKey cur = start;
    EdgeKey prev{-1, -1};
    while (true) {
      used[cur] = true;
      loop.push_back(edge_point[cur]);
      const auto& nbrs = links[cur];
      EdgeKey next{-1, -1};
      for (const auto& nb : nbrs)
        if (!(nb.a == prev.a && nb.b == prev.b) && !used[nb]) {
          next = nb;
          break;
        }
      if (next.a < 0) break;
      prev = cur;
      cur = next;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace detail

// Solve the discrete TF problem by projected gradient descent with
// Barzilai-Borwein step sizes and a monotone (Armijo) backtracking safeguard.
inline TfSolution tf_solve(const NucleiSet& nuclei, const GridSpec& spec,
                           const TfSettings& settings = {}) {
  nuclei.validate();
  const int k_charge = nuclei.k();
  const double pad_needed = 2.0 * std::sqrt(k_charge / M_PI);
  for (const Vec2& p : nuclei.positions) {
    const double margin =
        std::min(std::min(p.x - spec.origin.x, spec.origin.x + spec.nx * spec.h - p.x),
                 std::min(p.y - spec.origin.y, spec.origin.y + spec.ny * spec.h - p.y));
    if (margin < pad_needed - 1e-9)
      throw std::invalid_argument("grid domain must pad nuclei by at least 2 sqrt(K/pi)");
  }
  if (spec.h > 1.0 / (8.0 * std::sqrt(M_PI)))
    throw std::invalid_argument("grid too coarse: unit disk must span at least 16 cells");

  const double cell_area = spec.h * spec.h;
  const GridField v_nucl = nuclear_potential(nuclei, spec);
  LogConvolution conv(spec);

  // start from superposed unit-area disks, then project
  std::vector<double> sigma(spec.size(), 0.0);
  const double r0 = 1.0 / std::sqrt(M_PI);
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const Vec2 c = spec.cell_center(i, j);
      double s = 0.0;
      for (const Vec2& x : nuclei.positions)
        if (dist(c, x) <= r0) s += 1.0;
      sigma[spec.index(i, j)] = s;
    }
  double shift = detail::project_box_mass(sigma, cell_area, k_charge);
  double step = 0.0;  // set below

  auto energy_of = [&](const std::vector<double>& s, const std::vector<double>& conv_s) {
    double e = 0.0;
    for (int k = 0; k < spec.size(); ++k)
      e += (-v_nucl.values[k] - 0.5 * conv_s[k]) * s[k];
    return e * cell_area;
  };

  std::vector<double> conv_sigma = conv.apply(sigma);
  std::vector<double> phi(spec.size());
  auto refresh_phi = [&]() {
    for (int k = 0; k < spec.size(); ++k) phi[k] = v_nucl.values[k] + conv_sigma[k];
  };
  refresh_phi();

  double energy = energy_of(sigma, conv_sigma);
  double max_phi = 1e-12;
  for (double p : phi) max_phi = std::max(max_phi, std::abs(p));
  step = 0.5 / max_phi;

  TfSolution sol;
  sol.nuclei = nuclei;
  sol.energy_trace.push_back(energy);

  std::vector<double> sigma_prev, phi_prev;
  int iter = 0;
  bool converged = false;
  for (; iter < settings.max_iterations; ++iter) {
    // BB step from the previous move (gradient of E is -phi up to cell_area)
    if (!sigma_prev.empty()) {
      double ss = 0.0, sg = 0.0;
      for (int k = 0; k < spec.size(); ++k) {
        const double ds = sigma[k] - sigma_prev[k];
        ss += ds * ds;
        sg += ds * (phi_prev[k] - phi[k]);
      }
      if (sg > 1e-300)
        step = ss / sg;
      else
        step *= 2.0;
      step = std::clamp(step, 1e-12, 1e6);
    }

    double trial_shift = 0.0;
    std::vector<double> trial, conv_trial;
    double trial_energy = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= settings.max_backtracks; ++bt) {
      trial = sigma;
      for (int k = 0; k < spec.size(); ++k) trial[k] += step * phi[k];
      trial_shift = detail::project_box_mass(trial, cell_area, k_charge);
      conv_trial = conv.apply(trial);
      trial_energy = energy_of(trial, conv_trial);
      double descent = 0.0;  // <grad, trial - sigma> = -cell_area * sum phi * d
      for (int k = 0; k < spec.size(); ++k) descent -= phi[k] * (trial[k] - sigma[k]);
      descent *= cell_area;
      if (trial_energy <= energy + settings.armijo_c1 * descent) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease found at any step length: the iterate is optimal to
      // machine precision. Count it as converged only if already near flat.
      const double last = sol.energy_trace.size() > 1
                              ? std::abs(sol.energy_trace.back() -
                                         sol.energy_trace[sol.energy_trace.size() - 2])
                              : std::numeric_limits<double>::infinity();
      converged = last <= 1e-6 * std::max(1.0, std::abs(energy));
      break;
    }

    sigma_prev = sigma;
    phi_prev = phi;
    sigma = std::move(trial);
    conv_sigma = std::move(conv_trial);
    refresh_phi();
    shift = trial_shift;
    const double prev_energy = energy;
    energy = trial_energy;
    sol.energy_trace.push_back(energy);

    if (iter > 5 &&
        std::abs(prev_energy - energy) <= settings.energy_rtol * std::max(1.0, std::abs(energy))) {
      converged = true;
      ++iter;
      break;
    }
  }

  if (!converged) {
    const double last_change = sol.energy_trace.size() > 1
                                   ? std::abs(sol.energy_trace.back() -
                                              sol.energy_trace[sol.energy_trace.size() - 2])
                                   : 0.0;
    throw ConvergenceError("tf_solve did not reach the energy tolerance", iter, last_change);
  }

  sol.sigma = GridField(spec, FieldRole::Sigma);
  sol.sigma.values = sigma;
  sol.phi = GridField(spec, FieldRole::Phi);
  sol.phi.values = phi;
  sol.energy = energy;
  sol.iterations = iter;
  sol.converged = true;

  // multiplier: Phi equals lambda on cells where neither box constraint binds
  std::vector<double> fractional;
  for (int k = 0; k < spec.size(); ++k)
    if (sigma[k] > 0.01 && sigma[k] < 0.99) fractional.push_back(phi[k]);
  if (!fractional.empty()) {
    std::nth_element(fractional.begin(), fractional.begin() + fractional.size() / 2,
                     fractional.end());
    sol.multiplier = fractional[fractional.size() / 2];
  } else {
    sol.multiplier = step > 0.0 ? -shift / step : 0.0;
  }

  // grid tolerance for the positivity set: cell size times the largest
  // potential gradient across the boundary layer
  double grad_band = 0.0;
  for (int j = 1; j + 1 < spec.ny; ++j)
    for (int i = 1; i + 1 < spec.nx; ++i) {
      const double s = sigma[spec.index(i, j)];
      if (s <= 0.01 || s >= 0.99) continue;
      const double gx = (phi[spec.index(i + 1, j)] - phi[spec.index(i - 1, j)]) / (2 * spec.h);
      const double gy = (phi[spec.index(i, j + 1)] - phi[spec.index(i, j - 1)]) / (2 * spec.h);
      grad_band = std::max(grad_band, std::hypot(gx, gy));
    }
  sol.epsilon_grid = std::max({spec.h * grad_band, 2.0 * std::abs(sol.multiplier), 1e-9});

  // screening region: complementarity ties {Phi > 0} to {sigma = 1}; the
  // majority-coverage rule keeps the boundary cells unbiased
  sol.region.spec = spec;
  sol.region.inside.assign(spec.size(), 0);
  for (int k = 0; k < spec.size(); ++k)
    sol.region.inside[k] = (sigma[k] >= 0.5 || phi[k] > sol.epsilon_grid) ? 1 : 0;
  sol.region.boundary = detail::trace_level_set(spec, sigma, 0.5);

  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i)
      if ((i == 0 || j == 0 || i == spec.nx - 1 || j == spec.ny - 1) &&
          sol.region.inside[spec.index(i, j)])
        throw std::invalid_argument("screening region touches the domain boundary; enlarge grid");

  return sol;
}

// Potential Phi at an arbitrary (off-grid) point, evaluated directly from
// the nuclei and the solved charge density.
inline double phi_at(const TfSolution& sol, Vec2 p) {
  double v = 0.0;
  for (const Vec2& x : sol.nuclei.positions) {
    const double d2 = dist2(p, x);
    if (d2 == 0.0) return std::numeric_limits<double>::infinity();
    v -= 0.5 * std::log(d2);
  }
  const GridSpec& spec = sol.sigma.spec;
  const double r_cell = spec.h / std::sqrt(M_PI);
  const double cell_area = spec.h * spec.h;
  double c = 0.0;
  for (int k = 0; k < spec.size(); ++k) {
    const double s = sol.sigma.values[k];
    if (s == 0.0) continue;
    const double d = dist(p, spec.cell_center(k));
    if (d < r_cell) {
      const double t = d / r_cell;
      c += s * (std::log(r_cell) - 0.5 * (1.0 - t * t));
    } else {
      c += s * std::log(d);
    }
  }
  return v + c * cell_area;
}

struct RegionReport {
  int k = 0;
  double area = 0.0;
  double area_error = 0.0;  // |area - K|
  bool area_ok = false;     // within 2% of K
};

inline RegionReport region_properties(const ScreeningRegion& region, const NucleiSet& nuclei) {
  RegionReport r;
  r.k = nuclei.k();
  r.area = region.area();
  r.area_error = std::abs(r.area - r.k);
  r.area_ok = r.area_error <= 0.02 * r.k;
  return r;
}

// Cells of `small` (eroded by one cell) not contained in `large`.
inline int containment_violations(const ScreeningRegion& small, const ScreeningRegion& large) {
  if (!(small.spec == large.spec))
    throw std::invalid_argument("containment check requires a common grid");
  const GridSpec& spec = small.spec;
  int violations = 0;
  for (int j = 1; j + 1 < spec.ny; ++j)
    for (int i = 1; i + 1 < spec.nx; ++i) {
      if (!small.inside[spec.index(i, j)]) continue;
      bool interior = true;
      for (int dj = -1; dj <= 1 && interior; ++dj)
        for (int di = -1; di <= 1 && interior; ++di)
          if (!small.inside[spec.index(i + di, j + dj)]) interior = false;
      if (interior && !large.inside[spec.index(i, j)]) ++violations;
    }
  return violations;
}

struct BinaryReport {
  double intermediate_fraction = 0.0;  // occupied cells with sigma in (0.05, 0.95)
  double bound = 0.0;                  // perimeter-proportional allowance
  bool pass = false;
};

// The continuum minimizer is 0/1 a.e.; on a grid, fractional values may only
// populate a boundary layer. Checks the fraction against c * boundary/occupied.
inline BinaryReport tf_binary_check(const GridField& sigma) {
  const GridSpec& spec = sigma.spec;
  std::int64_t occupied = 0, intermediate = 0, boundary = 0;
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const double s = sigma.values[spec.index(i, j)];
      if (s >= 0.05) ++occupied;
      if (s > 0.05 && s < 0.95) ++intermediate;
      const bool above = s > 0.5;
      bool crossing = false;
      if (i + 1 < spec.nx && (sigma.values[spec.index(i + 1, j)] > 0.5) != above) crossing = true;
      if (j + 1 < spec.ny && (sigma.values[spec.index(i, j + 1)] > 0.5) != above) crossing = true;
      if (crossing) ++boundary;
    }
  BinaryReport r;
  if (occupied == 0) {
    r.pass = intermediate == 0;
    return r;
  }
  r.intermediate_fraction = static_cast<double>(intermediate) / occupied;
  r.bound = 2.0 * static_cast<double>(boundary) / occupied;
  r.pass = intermediate == 0 || r.intermediate_fraction <= r.bound;
  return r;
}

// Discrete residual of the TF complementarity conditions:
// sigma-weighted negative part of Phi plus vacancy-weighted positive part of
// Phi outside the region. Small (<= epsilon_grid * K) at a converged solve.
inline double complementarity_residual(const TfSolution& sol) {
  const GridSpec& spec = sol.sigma.spec;
  double r = 0.0;
  for (int k = 0; k < spec.size(); ++k) {
    const double s = sol.sigma.values[k];
    const double p = sol.phi.values[k];
    r += s * std::max(-p, 0.0);
    if (!sol.region.inside[k]) r += (1.0 - s) * std::max(p, 0.0);
  }
  return r * spec.h * spec.h;
}

}  // namespace laughlin
