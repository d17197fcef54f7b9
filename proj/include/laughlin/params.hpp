#pragma once

#include <cmath>
#include <stdexcept>

namespace laughlin {

// Particle number, Jastrow exponent and the quantities derived from them.
// The effective temperature of the plasma is exactly 1/N; the droplet has
// radius sqrt(ell) in the scaled sampling coordinates. Whether ell describes
// fermions (odd) or bosons (even) is interpretation only and not enforced.
struct PlasmaParams {
  int n_particles = 1;
  int ell = 1;
  double temperature = 1.0;
  double droplet_radius_scaled = 1.0;

  static PlasmaParams create(int n_particles, int ell) {
    if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
    if (ell < 1) throw std::invalid_argument("ell must be >= 1");
    PlasmaParams p;
    p.n_particles = n_particles;
    p.ell = ell;
    p.temperature = 1.0 / static_cast<double>(n_particles);
    p.droplet_radius_scaled = std::sqrt(static_cast<double>(ell));
    return p;
  }
};

}  // namespace laughlin
