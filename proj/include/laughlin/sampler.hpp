#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "laughlin/configuration.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/histogram.hpp"
#include "laughlin/parallel.hpp"
#include "laughlin/plasma.hpp"
#include "laughlin/rng.hpp"

namespace laughlin {

struct ChainSettings {
  std::int64_t sweeps = 20000;   // total sweeps, one proposal per particle each
  std::int64_t burn_in = 2000;   // sweeps discarded; step adaptation happens here only
  double proposal_sigma = 0.1;   // initial Gaussian step
  std::uint64_t seed = 0;
  double target_acceptance = 0.35;
  int n_chains = 4;
  int grid_cells = 128;            // histogram cells across the droplet diameter
  double grid_extent_factor = 1.625;

  void validate() const {
    if (sweeps <= 0 || burn_in < 0 || burn_in >= sweeps)
      throw std::invalid_argument("need 0 <= burn_in < sweeps");
    if (!(proposal_sigma > 0.0)) throw std::invalid_argument("proposal_sigma must be > 0");
    if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
      throw std::invalid_argument("target_acceptance must be in (0,1)");
    if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
    if (grid_cells < 8) throw std::invalid_argument("grid_cells must be >= 8");
  }
};

// Metropolis acceptance exponent for a symmetric proposal. Kept as a named
// function so the detailed-balance identity can be tested directly:
// exp(log_acceptance(d)) / exp(log_acceptance(-d)) == exp(d) exactly.
inline double log_acceptance(double delta_log_weight) { return std::min(0.0, delta_log_weight); }

// Change in log_gibbs_weight when one particle moves, computed in O(N).
inline double delta_log_weight(const Configuration& config, const Prefactor& pf, int particle,
                               Vec2 new_position) {
  const auto& z = config.points;
  const int n = config.params.n_particles;
  if (particle < 0 || particle >= n) throw std::invalid_argument("particle index out of range");
  const Vec2 old_position = z[particle];
  if (new_position == old_position) return 0.0;

  double dlog = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == particle) continue;
    const double d2_new = dist2(new_position, z[j]);
    if (d2_new == 0.0) throw SingularConfiguration("proposed move lands on another particle");
    const double d2_old = dist2(old_position, z[j]);
    dlog += std::log(d2_new / d2_old);
  }
  const double ell = config.params.ell;
  double delta = ell * dlog - n * (norm2(new_position) - norm2(old_position));
  if (!pf.is_identity())
    delta += 2.0 * (pf.log_modulus_single(physical_from_sample(new_position, n)) -
                    pf.log_modulus_single(physical_from_sample(old_position, n)));
  return delta;
}

struct ChainResult {
  ChainHistogram hist;
  std::vector<double> second_moment_series;  // sum_i |z_i|^2 per recorded sweep
  double acceptance_rate = 0.0;              // post burn-in
  double final_step = 0.0;
  std::vector<std::string> warnings;
};

// Single-particle Metropolis chain targeting exp(log_gibbs_weight).
// The step size is tuned toward the target acceptance during burn-in and
// frozen afterwards, so the recorded part of the chain is exactly stationary.
inline ChainResult run_chain(const PlasmaParams& params, const Prefactor& pf,
                             const ChainSettings& settings, int chain_index) {
  settings.validate();
  const int n = params.n_particles;
  const double ell = params.ell;
  const HistGrid grid = HistGrid::for_params(params, settings.grid_cells,
                                             settings.grid_extent_factor);
  ChainResult result{ChainHistogram(grid), {}, 0.0, 0.0, {}};
  result.second_moment_series.reserve(settings.sweeps - settings.burn_in);

  Rng rng(Rng::mix(settings.seed, static_cast<std::uint64_t>(chain_index)));

  std::vector<Vec2> z(n);
  for (auto& p : z) p = rng.disk_point(params.droplet_radius_scaled);

  // cached per-particle prefactor terms, replaced (not accumulated) on accept
  std::vector<double> pf_single(n, 0.0);
  if (!pf.is_identity())
    for (int i = 0; i < n; ++i) pf_single[i] = pf.log_modulus_single(physical_from_sample(z[i], n));

  double step = settings.proposal_sigma;
  const int adapt_interval = 50;  // sweeps between step updates during burn-in
  std::int64_t adapt_accepted = 0, adapt_proposed = 0;
  std::int64_t accepted = 0, proposed = 0;  // post burn-in

  for (std::int64_t sweep = 0; sweep < settings.sweeps; ++sweep) {
    const bool recording = sweep >= settings.burn_in;
    for (int p = 0; p < n; ++p) {
      const Vec2 trial = z[p] + rng.gaussian_vec(step);

      double delta = 0.0;
      double trial_pf = 0.0;
      bool singular = false;
      double dlog = 0.0;
      for (int j = 0; j < n && !singular; ++j) {
        if (j == p) continue;
        const double d2_new = dist2(trial, z[j]);
        if (d2_new == 0.0) {
          singular = true;
          break;
        }
        dlog += std::log(d2_new / dist2(z[p], z[j]));
      }
      if (!singular) {
        delta = ell * dlog - n * (norm2(trial) - norm2(z[p]));
        if (!pf.is_identity()) {
          try {
            trial_pf = pf.log_modulus_single(physical_from_sample(trial, n));
            delta += 2.0 * (trial_pf - pf_single[p]);
          } catch (const SingularConfiguration&) {
            singular = true;
          }
        }
      }

      bool accept = false;
      if (!singular) {
        if (delta >= 0.0)
          accept = true;
        else
          accept = std::log(rng.uniform_pos()) < delta;
      }
      if (accept) {
        z[p] = trial;
        if (!pf.is_identity()) pf_single[p] = trial_pf;
        if (recording)
          ++accepted;
        else
          ++adapt_accepted;
      }
      if (recording)
        ++proposed;
      else
        ++adapt_proposed;
    }

    if (!recording && (sweep + 1) % adapt_interval == 0 && adapt_proposed > 0) {
      const double rate = static_cast<double>(adapt_accepted) / adapt_proposed;
      step *= std::exp(0.6 * (rate - settings.target_acceptance));
      step = std::clamp(step, 1e-6, params.droplet_radius_scaled);
      adapt_accepted = adapt_proposed = 0;
    }

    if (recording) {
      double m2 = 0.0;
      for (const Vec2& pos : z) {
        result.hist.deposit(pos);
        m2 += norm2(pos);
      }
      result.second_moment_series.push_back(m2);
    }
  }

  result.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
  result.final_step = step;
  if (result.acceptance_rate < 0.05 || result.acceptance_rate > 0.9)
    result.warnings.push_back("mixing failure: acceptance rate " +
                              std::to_string(result.acceptance_rate) + " outside [0.05, 0.9]");
  return result;
}

struct SampleRun {
  DensityHistogram histogram;
  std::vector<ChainResult> chains;
  std::vector<std::string> warnings;
  double mean_second_moment = 0.0;    // chain-averaged sum_i |z_i|^2, scaled
  double stderr_second_moment = 0.0;  // inter-chain standard error
};

inline SampleRun run_chains(const PlasmaParams& params, const Prefactor& pf,
                            const ChainSettings& settings, int n_threads = 1) {
  settings.validate();
  std::vector<ChainResult> chains;
  chains.reserve(settings.n_chains);
  for (int c = 0; c < settings.n_chains; ++c)
    chains.emplace_back(ChainResult{ChainHistogram(HistGrid::for_params(
                            params, settings.grid_cells, settings.grid_extent_factor)),
                        {}, 0.0, 0.0, {}});
  parallel_for(settings.n_chains, n_threads,
               [&](int c) { chains[c] = run_chain(params, pf, settings, c); });

  SampleRun run{DensityHistogram{}, {}, {}, 0.0, 0.0};
  std::vector<ChainHistogram> hists;
  std::vector<double> chain_means;
  for (auto& c : chains) {
    hists.push_back(c.hist);
    double m = 0.0;
    for (double v : c.second_moment_series) m += v;
    chain_means.push_back(m / std::max<size_t>(1, c.second_moment_series.size()));
    for (const auto& w : c.warnings) run.warnings.push_back(w);
  }
  run.histogram = DensityHistogram::merge(hists);
  const int nc = settings.n_chains;
  double mean = 0.0;
  for (double v : chain_means) mean += v;
  mean /= nc;
  run.mean_second_moment = mean;
  if (nc > 1) {
    double var = 0.0;
    for (double v : chain_means) var += (v - mean) * (v - mean);
    var /= (nc - 1);
    run.stderr_second_moment = std::sqrt(var / nc);
  }
  run.chains = std::move(chains);
  return run;
}

}  // namespace laughlin
