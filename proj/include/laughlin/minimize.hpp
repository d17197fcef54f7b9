#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "laughlin/parallel.hpp"
#include "laughlin/params.hpp"
#include "laughlin/plasma.hpp"
#include "laughlin/rng.hpp"

namespace laughlin {

struct MinimizeSettings {
  int restarts = 8;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-8;  // on the max per-particle gradient norm
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
  std::uint64_t seed = 0;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("tolerances must be positive");
  }
};

struct MinimizerResult {
  std::vector<Vec2> configuration;
  double energy = std::numeric_limits<double>::infinity();
  double max_gradient_norm = std::numeric_limits<double>::infinity();
  int best_restart = -1;
  bool converged = false;
  std::vector<double> restart_energies;   // final energy per restart
  std::vector<double> initial_energies;   // energy of each random start
  std::vector<bool> restart_converged;
};

namespace detail {

struct DescentOutcome {
  std::vector<Vec2> x;
  double energy;
  double max_grad;
  bool converged;
  double initial_energy;
};

inline double max_gradient_norm(std::span<const Vec2> grad) {
  double m = 0.0;
  for (const Vec2& g : grad) m = std::max(m, norm(g));
  return m;
}

// Gradient descent with Barzilai-Borwein step sizes and Armijo backtracking.
// The log singularity makes long steps hazardous; a step that lands on a
// coincident pair raises SingularConfiguration and is treated as infinite
// energy by the line search.
inline DescentOutcome descend(std::vector<Vec2> x, const ExternalField& w,
                              const MinimizeSettings& settings) {
  const int n = static_cast<int>(x.size());
  DescentOutcome out{std::move(x), 0.0, 0.0, false, 0.0};

  auto energy_or_inf = [&](const std::vector<Vec2>& pts) {
    try {
      return scaled_hamiltonian(std::span<const Vec2>(pts), w);
    } catch (const SingularConfiguration&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  double energy = energy_or_inf(out.x);
  out.initial_energy = energy;
  std::vector<Vec2> grad = scaled_gradient(std::span<const Vec2>(out.x), w);
  double gmax = max_gradient_norm(grad);

  std::vector<Vec2> x_prev, g_prev;
  double step = 0.1 / std::max(1.0, gmax);
  std::vector<Vec2> trial(n);

  // Once the line search reaches the floor where energy differences drown in
  // round-off (|dE| ~ eps |E|), descent continues on pure BB steps: the
  // gradient stays accurate long after the energy stops resolving.
  bool energy_floor = false;
  double floor_guard = std::numeric_limits<double>::infinity();

  auto bb_step = [&]() {
    if (x_prev.empty()) return;
    double ss = 0.0, sg = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec2 dx = out.x[i] - x_prev[i];
      const Vec2 dg = grad[i] - g_prev[i];
      ss += dot(dx, dx);
      sg += dot(dx, dg);
    }
    step = sg > 1e-300 ? ss / sg : step * 2.0;
    step = std::clamp(step, 1e-14, 1e4);
  };

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    if (gmax <= settings.gradient_tolerance) {
      out.converged = true;
      break;
    }
    bb_step();
    const double bb_proposed = step;

    double g2 = 0.0;
    for (const Vec2& g : grad) g2 += norm2(g);
    // the Armijo test stops carrying information once its decrement is
    // below the evaluation round-off
    if (!energy_floor &&
        settings.armijo_c1 * step * g2 <= 1e-13 * (1.0 + std::abs(energy))) {
      energy_floor = true;
      floor_guard = energy + 1e-9 * std::max(1.0, std::abs(energy));
    }

    bool accepted = false;
    double trial_energy = 0.0;
    if (!energy_floor) {
      for (int bt = 0; bt <= settings.max_backtracks; ++bt) {
        for (int i = 0; i < n; ++i) trial[i] = out.x[i] - grad[i] * step;
        trial_energy = energy_or_inf(trial);
        if (trial_energy <= energy - settings.armijo_c1 * step * g2) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        energy_floor = true;
        floor_guard = energy + 1e-9 * std::max(1.0, std::abs(energy));
        step = bb_proposed;
      }
    }
    if (energy_floor && !accepted) {
      step = std::clamp(step, 1e-14, 1.0);
      for (int bt = 0; bt <= settings.max_backtracks; ++bt) {
        for (int i = 0; i < n; ++i) trial[i] = out.x[i] - grad[i] * step;
        trial_energy = energy_or_inf(trial);
        if (trial_energy <= floor_guard) {  // loose band, not a descent test
          accepted = true;
          break;
        }
        step *= 0.25;
      }
      if (!accepted) break;
    }

    x_prev = out.x;
    g_prev = grad;
    out.x.swap(trial);
    energy = trial_energy;
    grad = scaled_gradient(std::span<const Vec2>(out.x), w);
    gmax = max_gradient_norm(grad);
  }

  out.energy = energy;
  out.max_grad = gmax;
  out.converged = out.converged || gmax <= settings.gradient_tolerance;
  return out;
}

}  // namespace detail

// Best-of-restarts minimization of the scaled Hamiltonian. Starts are random
// Gaussian clouds at scale sqrt(N/pi), matching unit density over the
// expected droplet.
inline MinimizerResult minimize(const PlasmaParams& params, const ExternalField& w,
                                const MinimizeSettings& settings, int n_threads = 1) {
  settings.validate();
  const int n = params.n_particles;
  std::vector<detail::DescentOutcome> outcomes(settings.restarts);

  parallel_for(settings.restarts, n_threads, [&](int r) {
    Rng rng(Rng::mix(settings.seed, static_cast<std::uint64_t>(r)));
    const double scale = std::sqrt(n / (2.0 * M_PI));  // per-axis; E|x|^2 = N/pi
    std::vector<Vec2> x(n);
    for (auto& p : x) p = rng.gaussian_vec(scale);
    outcomes[r] = detail::descend(std::move(x), w, settings);
  });

  MinimizerResult result;
  for (int r = 0; r < settings.restarts; ++r) {
    const auto& o = outcomes[r];
    result.restart_energies.push_back(o.energy);
    result.initial_energies.push_back(o.initial_energy);
    result.restart_converged.push_back(o.converged);
    const bool better = result.best_restart < 0 ||
                        (o.converged && !result.converged) ||
                        (o.converged == result.converged && o.energy < result.energy);
    if (better) {
      result.best_restart = r;
      result.energy = o.energy;
      result.max_gradient_norm = o.max_grad;
      result.converged = o.converged;
      result.configuration = o.x;
    }
  }
  return result;
}

// Minimum pairwise distance; total (returns 0 for coincident points) so it
// can be used to reject unconverged states.
inline double min_pairwise_distance(std::span<const Vec2> pts) {
  const int n = static_cast<int>(pts.size());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::min(best, dist(pts[i], pts[j]));
  return n < 2 ? 0.0 : best;
}

inline double min_pairwise_distance(const MinimizerResult& r) {
  return min_pairwise_distance(std::span<const Vec2>(r.configuration));
}

struct DensityCount {
  double radius;
  int count;     // points inside the centered disk
  double ratio;  // count / (pi radius^2), the unit-density comparison
};

inline std::vector<DensityCount> density_counts(std::span<const Vec2> pts,
                                                std::span<const double> radii) {
  std::vector<DensityCount> out;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("density count radius must be positive");
    int c = 0;
    for (const Vec2& p : pts)
      if (norm(p) <= r) ++c;
    out.push_back({r, c, c / (M_PI * r * r)});
  }
  return out;
}

inline std::vector<DensityCount> density_counts(const MinimizerResult& result,
                                                std::span<const double> radii) {
  return density_counts(std::span<const Vec2>(result.configuration), radii);
}

}  // namespace laughlin
