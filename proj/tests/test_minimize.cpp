#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "laughlin/minimize.hpp"
#include "oracles.hpp"

using namespace laughlin;

namespace {

// independent route to the same minimum: multistart Nelder-Mead over the
// flattened coordinates
double nelder_mead_ground_energy(int n, int starts, unsigned seed) {
  const ExternalField none;
  auto objective = [&](std::span<const double> flat) {
    std::vector<Vec2> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {flat[2 * i], flat[2 * i + 1]};
    try {
      return scaled_hamiltonian(std::span<const Vec2>(pts), none);
    } catch (const SingularConfiguration&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(n / (2.0 * M_PI)));
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    std::vector<double> start(2 * n);
    for (auto& v : start) v = normal(gen);
    const auto x = oracles::nelder_mead(objective, start, 0.25, 60000, 1e-15);
    best = std::min(best, objective(x));
  }
  return best;
}

}  // namespace

TEST_CASE("single particle settles at the origin") {
  MinimizeSettings settings;
  settings.restarts = 2;
  settings.seed = 1;
  const auto r = minimize(PlasmaParams::create(1, 2), ExternalField(), settings);
  REQUIRE(r.converged);
  CHECK(norm(r.configuration[0]) < 1e-7);
  CHECK(std::abs(r.energy) < 1e-12);
}

TEST_CASE("two particles: separation and energy from the 1D oracle") {
  MinimizeSettings settings;
  settings.restarts = 4;
  settings.seed = 2;
  const auto r = minimize(PlasmaParams::create(2, 2), ExternalField(), settings);
  REQUIRE(r.converged);

  const double d_star = std::sqrt(2.0 / M_PI);
  CHECK(min_pairwise_distance(r) == Catch::Approx(d_star).epsilon(1e-7));
  CHECK(r.energy == Catch::Approx(0.5 - 0.5 * std::log(2.0 / M_PI)).epsilon(1e-10));

  // symmetric about the origin
  const Vec2 com = (r.configuration[0] + r.configuration[1]) * 0.5;
  CHECK(norm(com) < 1e-7);
  CHECK(min_pairwise_distance(r) >= 1.0 / std::sqrt(M_PI));
}

TEST_CASE("small clusters match the independent optimizer") {
  for (int n = 2; n <= 6; ++n) {
    MinimizeSettings settings;
    settings.restarts = 8;
    settings.seed = 100 + n;
    const auto r = minimize(PlasmaParams::create(n, 2), ExternalField(), settings, 2);
    REQUIRE(r.converged);
    const double oracle = nelder_mead_ground_energy(n, 12, 900 + n);
    CHECK(r.energy == Catch::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("energy never rises above the starting configuration") {
  MinimizeSettings settings;
  settings.restarts = 6;
  settings.seed = 5;
  const auto r = minimize(PlasmaParams::create(12, 2), ExternalField(), settings, 2);
  REQUIRE(r.restart_energies.size() == r.initial_energies.size());
  for (size_t i = 0; i < r.restart_energies.size(); ++i)
    CHECK(r.restart_energies[i] <= r.initial_energies[i]);
  CHECK(r.energy <= r.restart_energies[0]);
}

TEST_CASE("center of mass sits at the origin without an external field") {
  MinimizeSettings settings;
  settings.restarts = 3;
  settings.seed = 7;
  const auto r = minimize(PlasmaParams::create(20, 2), ExternalField(), settings, 2);
  REQUIRE(r.converged);
  Vec2 com{0, 0};
  for (const Vec2& p : r.configuration) com += p;
  com = com * (1.0 / 20.0);
  CHECK(norm(com) <= 1e-6);
}

TEST_CASE("minimizer energy is rotation invariant") {
  MinimizeSettings settings;
  settings.restarts = 3;
  settings.seed = 8;
  const auto r = minimize(PlasmaParams::create(9, 2), ExternalField(), settings, 2);
  REQUIRE(r.converged);
  const ExternalField none;
  for (double angle : {0.3, 1.1, 2.7}) {
    std::vector<Vec2> rotated;
    for (const Vec2& p : r.configuration) rotated.push_back(rotate(p, angle));
    const double e = scaled_hamiltonian(std::span<const Vec2>(rotated), none);
    CHECK(std::abs(e - r.energy) / std::abs(r.energy) < 1e-9);
  }
}

TEST_CASE("pairwise exclusion distance holds for minimizers") {
  const double bound = (1.0 - 0.02) / std::sqrt(M_PI);
  MinimizeSettings settings;
  settings.restarts = 4;
  settings.seed = 11;

  const auto plain = minimize(PlasmaParams::create(30, 2), ExternalField(), settings, 2);
  REQUIRE(plain.converged);
  CHECK(min_pairwise_distance(plain) >= bound);

  // superharmonic external term: a quasi-hole at the origin
  const ExternalField hole(Prefactor::quasi_holes({{{0.0, 0.0}, 1}}), 2);
  const auto held = minimize(PlasmaParams::create(18, 2), hole, settings, 2);
  REQUIRE(held.converged);
  CHECK(min_pairwise_distance(held) >= bound);
  // the hole repels particles from its location
  for (const Vec2& p : held.configuration) CHECK(norm(p) > 0.1);
}

TEST_CASE("density counts on minimizers and synthetic data") {
  SECTION("single point") {
    std::vector<Vec2> one{{0.0, 0.0}};
    const auto counts = density_counts(one, std::vector<double>{0.5, 2.0});
    CHECK(counts[0].count == 1);
    CHECK(counts[1].count == 1);
    CHECK(counts[0].ratio == Catch::Approx(1.0 / (M_PI * 0.25)));
  }

  SECTION("unit lattice approaches unit density") {
    std::vector<Vec2> lattice;
    for (int i = -15; i <= 15; ++i)
      for (int j = -15; j <= 15; ++j) lattice.push_back({double(i), double(j)});
    const auto counts = density_counts(lattice, std::vector<double>{4.0, 7.0, 10.0});
    CHECK(counts[2].count == 317);  // Gauss circle count at radius 10
    for (const auto& c : counts)
      CHECK(std::abs(c.ratio - 1.0) <= 3.0 / std::sqrt(M_PI * c.radius * c.radius));
  }

  SECTION("minimizer stays under unit density with finite-size slack") {
    MinimizeSettings settings;
    settings.restarts = 4;
    settings.seed = 13;
    const auto r = minimize(PlasmaParams::create(50, 2), ExternalField(), settings, 2);
    REQUIRE(r.converged);
    const double droplet = std::sqrt(50.0 / M_PI);
    const auto counts = density_counts(r, std::vector<double>{2.0, droplet / 2.0});
    for (const auto& c : counts)
      CHECK(c.ratio <= 1.0 + 3.0 / std::sqrt(M_PI * c.radius * c.radius));
  }

  SECTION("coincident points still yield a total distance") {
    std::vector<Vec2> pair{{0.1, 0.1}, {0.1, 0.1}};
    CHECK(min_pairwise_distance(std::span<const Vec2>(pair)) == 0.0);
  }
}

TEST_CASE("failure to converge is reported, not hidden") {
  MinimizeSettings settings;
  settings.restarts = 2;
  settings.max_iterations = 3;
  settings.seed = 17;
  const auto r = minimize(PlasmaParams::create(15, 2), ExternalField(), settings);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.energy));

  MinimizeSettings bad;
  bad.restarts = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
