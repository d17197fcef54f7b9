#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "laughlin/histogram.hpp"
#include "laughlin/params.hpp"
#include "laughlin/sampler.hpp"

namespace laughlin {

// Radial power-law trap V(x) = |x|^s in physical coordinates.
struct TrapPotential {
  double s = 2.0;

  explicit TrapPotential(double exponent) : s(exponent) {
    if (!(s > 0.0)) throw std::invalid_argument("trap exponent must be positive");
  }
  double operator()(Vec2 physical) const { return std::pow(norm(physical), s); }
};

struct ValueWithError {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Least potential energy of any density bounded by 1/(pi ell) with mass N:
// fill the disk of physical radius sqrt(ell N) at the maximal density.
// For V = |x|^s the integral is 2 (ell N)^{(s+2)/2} / (ell (s+2)).
inline double bathtub_energy(const PlasmaParams& params, const TrapPotential& trap) {
  const double ln = static_cast<double>(params.ell) * params.n_particles;
  return 2.0 * std::pow(ln, 0.5 * (trap.s + 2.0)) / (params.ell * (trap.s + 2.0));
}

// Integral of a physical-coordinate potential against the particle density,
// estimated from the sampled scaled density: int V rho = N * sum_cells
// V(sqrt(N) z) mu(z) h^2. Error bars come from the inter-chain spread.
inline ValueWithError potential_energy_mc(const DensityHistogram& hist, const PlasmaParams& params,
                                          const std::function<double(Vec2)>& v_physical) {
  const double h2 = hist.grid.cell * hist.grid.cell;
  const double n = params.n_particles;
  std::vector<double> per_chain(hist.n_chains, 0.0);
  std::vector<double> v_cell(hist.grid.size());
  for (int k = 0; k < hist.grid.size(); ++k)
    v_cell[k] = v_physical(physical_from_sample(hist.grid.cell_center(k), params.n_particles));
  for (int c = 0; c < hist.n_chains; ++c) {
    double s = 0.0;
    for (int k = 0; k < hist.grid.size(); ++k) s += v_cell[k] * hist.chain_density[c][k];
    per_chain[c] = n * s * h2;
  }
  ValueWithError out;
  for (double v : per_chain) out.value += v;
  out.value /= hist.n_chains;
  if (hist.n_chains > 1) {
    double var = 0.0;
    for (double v : per_chain) var += (v - out.value) * (v - out.value);
    var /= (hist.n_chains - 1);
    out.stderr_ = std::sqrt(var / hist.n_chains);
  }
  return out;
}

inline ValueWithError trap_energy_mc(const DensityHistogram& hist, const PlasmaParams& params,
                                     const TrapPotential& trap) {
  if (hist.clipped_fraction() > 1e-3)
    throw std::runtime_error("support clipped: histogram lost more than 1e-3 of the mass");
  return potential_energy_mc(hist, params, [&](Vec2 w) { return trap(w); });
}

// Total angular momentum from the sampled second moment:
// <L> = <sum_i |z_phys,i|^2> - N = N <sum_i |z_i|^2>_scaled - N.
inline ValueWithError angular_momentum_estimate(const SampleRun& run, const PlasmaParams& params) {
  const double n = params.n_particles;
  ValueWithError out;
  out.value = n * run.mean_second_moment - n;
  out.stderr_ = n * run.stderr_second_moment;
  return out;
}

struct EnergyReport {
  std::string prefactor;
  PlasmaParams params;
  double trap_s = 2.0;
  ValueWithError mc_energy;
  double bathtub = 0.0;
  ValueWithError ratio;  // mc / bathtub
  ValueWithError angular_momentum;
  double momentum_ratio = 0.0;  // <L> / N^2

  void finalize() {
    ratio.value = mc_energy.value / bathtub;
    ratio.stderr_ = mc_energy.stderr_ / bathtub;
    momentum_ratio = angular_momentum.value /
                     (static_cast<double>(params.n_particles) * params.n_particles);
  }
};

struct CorollaryComparison {
  std::string prefactor;
  double energy = 0.0;
  double combined_stderr = 0.0;
  double gap = 0.0;  // perturbed - identity
  bool identity_not_higher = false;
};

struct CorollaryVerdict {
  bool ratio_in_band = false;
  double ratio = 0.0;
  double band = 0.1;  // finite-N tolerance on |ratio - 1|
  std::vector<CorollaryComparison> comparisons;
  bool identity_is_minimum = false;
  bool pass = false;
};

// Radial-trap optimality: the unperturbed state should not have higher trap
// energy than any perturbed prefactor (within errors), and its energy should
// sit at the bathtub floor up to the finite-N band.
inline CorollaryVerdict corollary_check(const EnergyReport& identity,
                                        std::span<const EnergyReport> perturbed,
                                        double band = 0.1) {
  CorollaryVerdict verdict;
  verdict.band = band;
  verdict.ratio = identity.ratio.value;
  verdict.ratio_in_band = std::abs(identity.ratio.value - 1.0) <= band;
  verdict.identity_is_minimum = true;
  for (const auto& p : perturbed) {
    CorollaryComparison c;
    c.prefactor = p.prefactor;
    c.energy = p.mc_energy.value;
    c.combined_stderr = std::sqrt(identity.mc_energy.stderr_ * identity.mc_energy.stderr_ +
                                  p.mc_energy.stderr_ * p.mc_energy.stderr_);
    c.gap = p.mc_energy.value - identity.mc_energy.value;
    c.identity_not_higher = identity.mc_energy.value <= p.mc_energy.value + 3.0 * c.combined_stderr;
    verdict.identity_is_minimum = verdict.identity_is_minimum && c.identity_not_higher;
    verdict.comparisons.push_back(c);
  }
  verdict.pass = verdict.ratio_in_band && verdict.identity_is_minimum;
  return verdict;
}

}  // namespace laughlin
