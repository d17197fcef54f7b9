#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "laughlin/geometry.hpp"
#include "laughlin/params.hpp"

namespace laughlin {

// Ordered list of the N particle positions in scaled coordinates, together
// with the parameters the scaling refers to. Used both as the sampler state
// (z variables, droplet radius sqrt(ell)) and as the minimizer state
// (x variables, unit background density) after the linear change of variables.
struct Configuration {
  std::vector<Vec2> points;
  PlasmaParams params;

  Configuration(std::vector<Vec2> pts, PlasmaParams p) : points(std::move(pts)), params(p) {
    if (static_cast<int>(points.size()) != params.n_particles)
      throw std::invalid_argument("configuration size does not match n_particles");
    for (const Vec2& v : points)
      if (!is_finite(v)) throw std::invalid_argument("configuration has non-finite coordinates");
  }
};

// Coordinate maps between the three systems in use.
//   physical w  <-  sampling z:      w = sqrt(N) z
//   physical w  <-  ground-state x:  w = sqrt(pi * ell) x
//   z = sqrt(pi * ell / N) x
inline Vec2 physical_from_sample(Vec2 z, int n_particles) {
  return z * std::sqrt(static_cast<double>(n_particles));
}
inline Vec2 physical_from_ground(Vec2 x, int ell) { return x * std::sqrt(M_PI * ell); }
inline Vec2 sample_from_ground(Vec2 x, const PlasmaParams& p) {
  return x * std::sqrt(M_PI * p.ell / static_cast<double>(p.n_particles));
}

}  // namespace laughlin
