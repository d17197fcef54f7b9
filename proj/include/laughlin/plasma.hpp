#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "laughlin/configuration.hpp"
#include "laughlin/errors.hpp"
#include "laughlin/prefactor.hpp"

namespace laughlin {

// ---------------------------------------------------------------------------
// Gibbs log-weight in sampling coordinates.
//
// The unnormalized log-density of the plasma at inverse temperature N is
//   log mu_F(Z) = 2 ell sum_{i<j} log|z_i - z_j| - N sum_j |z_j|^2
//                 + 2 log|F(sqrt(N) Z)|
// (an additive normalization constant is dropped throughout).
// ---------------------------------------------------------------------------

struct GibbsWeightParts {
  double confinement = 0.0;  // -N sum |z_j|^2
  double interaction = 0.0;  // 2 ell sum_{i<j} log|z_i - z_j|
  double prefactor = 0.0;    // 2 log|F(sqrt(N) Z)|
  double total() const { return confinement + interaction + prefactor; }
};

namespace detail {
// Order-independent sum: relabeling the particles permutes the terms, and a
// sorted accumulation returns the bit-identical total either way.
inline double stable_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}
}  // namespace detail

inline GibbsWeightParts log_gibbs_weight_parts(const Configuration& config, const Prefactor& pf) {
  const auto& z = config.points;
  const int n = config.params.n_particles;
  const double ell = config.params.ell;

  GibbsWeightParts parts;
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(n) * (n - 1) / 2);

  for (const Vec2& p : z) terms.push_back(norm2(p));
  parts.confinement = -static_cast<double>(n) * detail::stable_sum(terms);

  terms.clear();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d2 = dist2(z[i], z[j]);
      if (d2 == 0.0) throw SingularConfiguration("coincident particles in log_gibbs_weight");
      terms.push_back(0.5 * std::log(d2));
    }
  parts.interaction = 2.0 * ell * detail::stable_sum(terms);

  terms.clear();
  for (const Vec2& p : z) terms.push_back(pf.log_modulus_single(physical_from_sample(p, n)));
  parts.prefactor = 2.0 * detail::stable_sum(terms);
  return parts;
}

inline double log_gibbs_weight(const Configuration& config, const Prefactor& pf) {
  return log_gibbs_weight_parts(config, pf).total();
}

// ---------------------------------------------------------------------------
// Scaled ground-state problem.
//
//   H(X) = (pi/2) sum |x_i|^2 - sum_{i<j} log|x_i - x_j| + W(X)
//
// with W symmetric and superharmonic in each variable. A prefactor induces
//   W(X) = -(1/ell) log|F(sqrt(pi ell) X)|,
// i.e. N W_N / (2 ell) under x -> z = sqrt(pi ell / N) x, with the additive
// constant dropped. Every supported prefactor separates over particles, so
// the field is represented by its single-particle term.
// ---------------------------------------------------------------------------

class ExternalField {
 public:
  ExternalField() = default;  // W = 0

  ExternalField(Prefactor pf, int ell) : pf_(std::move(pf)), ell_(ell) {
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
  }

  bool is_zero() const { return pf_.is_identity(); }
  const Prefactor& prefactor() const { return pf_; }
  int ell() const { return ell_; }

  double single_value(Vec2 x) const {
    if (pf_.is_identity()) return 0.0;
    return -pf_.log_modulus_single(physical_from_ground(x, ell_)) / ell_;
  }

  Vec2 single_gradient(Vec2 x) const {
    if (pf_.is_identity()) return {0.0, 0.0};
    const double scale = std::sqrt(M_PI * ell_);
    return pf_.log_modulus_gradient(physical_from_ground(x, ell_)) * (-scale / ell_);
  }

  double value(std::span<const Vec2> xs) const {
    if (pf_.is_identity()) return 0.0;
    double s = 0.0;
    for (const Vec2& x : xs) s += single_value(x);
    return s;
  }

 private:
  Prefactor pf_;
  int ell_ = 1;
};

inline double scaled_hamiltonian(std::span<const Vec2> xs, const ExternalField& w) {
  const int n = static_cast<int>(xs.size());
  double conf = 0.0;
  for (const Vec2& x : xs) conf += norm2(x);
  double logsum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d2 = dist2(xs[i], xs[j]);
      if (d2 == 0.0) throw SingularConfiguration("coincident particles in scaled_hamiltonian");
      logsum += 0.5 * std::log(d2);
    }
  return 0.5 * M_PI * conf - logsum + w.value(xs);
}

inline double scaled_hamiltonian(const Configuration& config, const ExternalField& w) {
  return scaled_hamiltonian(std::span<const Vec2>(config.points), w);
}

// grad_i H = pi x_i - sum_{j != i} (x_i - x_j)/|x_i - x_j|^2 + grad_i W
inline std::vector<Vec2> scaled_gradient(std::span<const Vec2> xs, const ExternalField& w) {
  const int n = static_cast<int>(xs.size());
  std::vector<Vec2> grad(n, Vec2{0.0, 0.0});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec2 d = xs[i] - xs[j];
      const double d2 = norm2(d);
      if (d2 == 0.0) throw SingularConfiguration("coincident particles in scaled_gradient");
      const Vec2 f = d * (1.0 / d2);
      grad[i] -= f;
      grad[j] += f;
    }
  for (int i = 0; i < n; ++i) {
    grad[i] += xs[i] * M_PI;
    if (!w.is_zero()) grad[i] += w.single_gradient(xs[i]);
  }
  return grad;
}

inline std::vector<Vec2> scaled_gradient(const Configuration& config, const ExternalField& w) {
  return scaled_gradient(std::span<const Vec2>(config.points), w);
}

}  // namespace laughlin
