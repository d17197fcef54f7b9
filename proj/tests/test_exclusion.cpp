#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "laughlin/exclusion.hpp"
#include "laughlin/minimize.hpp"
#include "oracles.hpp"

using namespace laughlin;

TEST_CASE("pairwise exclusion on the two-particle optimum") {
  MinimizeSettings settings;
  settings.restarts = 4;
  settings.seed = 3;
  const auto r = minimize(PlasmaParams::create(2, 2), ExternalField(), settings);
  REQUIRE(r.converged);
  const auto report = exclusion_check(r.configuration, 1);
  CHECK(report.pass());
  CHECK(report.min_pairwise == Catch::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-6));
  CHECK(report.min_pairwise > report.pairwise_bound);
}

TEST_CASE("a constructed close pair is flagged with its margin") {
  std::vector<Vec2> pts{{0.0, 0.0}, {0.5, 0.0}};
  const auto report = exclusion_check(pts, 1);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].k == 1);
  CHECK(report.violations[0].margin ==
        Catch::Approx(1.0 / std::sqrt(M_PI) - 0.5).epsilon(1e-9));
}

TEST_CASE("tight synthetic triangle violates the K=2 exclusion") {
  // side 0.65 passes the pairwise bound (0.65 > 0.98/sqrt(pi)) but each
  // vertex falls inside the screening region of the other two (the pair
  // region reaches 0.64 off-axis, the apex sits at 0.56); side 1.5 clears it
  auto triangle = [](double side) {
    std::vector<Vec2> pts;
    for (int k = 0; k < 3; ++k) {
      const double a = 2.0 * M_PI * k / 3.0 + 0.5;
      pts.push_back({side / std::sqrt(3.0) * std::cos(a), side / std::sqrt(3.0) * std::sin(a)});
    }
    return pts;
  };

  const auto tight = exclusion_check(triangle(0.65), 2, {}, 2);
  bool k2_violation = false;
  for (const auto& v : tight.violations)
    if (v.k == 2) k2_violation = true;
  CHECK(k2_violation);

  const auto wide = exclusion_check(triangle(1.5), 2, {}, 2);
  CHECK(wide.pass());
}

TEST_CASE("minimizers pass the K=2 exclusion") {
  MinimizeSettings settings;
  settings.restarts = 4;
  settings.seed = 21;
  const auto r = minimize(PlasmaParams::create(20, 2), ExternalField(), settings, 2);
  REQUIRE(r.converged);
  const auto report = exclusion_check(r.configuration, 2, {}, 2);
  CHECK(report.clusters_tested > 0);
  CHECK(report.violations.empty());
  CHECK_THROWS_AS(exclusion_check(r.configuration, 0), std::invalid_argument);
}

TEST_CASE("single-nucleus potential against the Newton closed form") {
  const NucleiSet nucleus{{{0.0, 0.0}}};
  const TfSolution sol = tf_solve(nucleus, auto_grid(nucleus, 192));
  const double r = 1.0 / std::sqrt(M_PI);

  // interior: -log d + log r - pi (r^2 - d^2) / 2
  for (double d : {0.1, 0.2, 0.35}) {
    const double expected = -std::log(d) + std::log(r) - 0.5 * M_PI * (r * r - d * d);
    CHECK(phi_at(sol, {d, 0.0}) == Catch::Approx(expected).margin(5e-3));
  }
  // on the boundary the potential vanishes up to the grid tolerance
  for (double angle : {0.0, 1.0, 2.5}) {
    const Vec2 p{r * std::cos(angle), r * std::sin(angle)};
    CHECK(std::abs(phi_at(sol, p)) <= 5.0 * sol.epsilon_grid);
  }
  // outside it stays flat
  CHECK(std::abs(phi_at(sol, {2.0 * r, 0.0})) <= 5.0 * sol.epsilon_grid);
}

TEST_CASE("boundary descent for a probe next to a single nucleus") {
  const NucleiSet nucleus{{{0.0, 0.0}}};
  const TfSolution sol = tf_solve(nucleus, auto_grid(nucleus, 192));

  std::vector<Vec2> config{{0.0, 0.0}};
  std::vector<int> subset{0};
  const ExternalField none;
  const auto report = verify_boundary_descent(config, subset, {0.2, 0.0}, std::nullopt, none, sol);

  CHECK(report.pass);
  CHECK(report.boundary_points >= 64);
  CHECK(report.descent_margin > 0.0);
  const double r = 1.0 / std::sqrt(M_PI);
  const double phi_expected = -std::log(0.2) + std::log(r) - 0.5 * M_PI * (r * r - 0.04);
  CHECK(report.phi_probe == Catch::Approx(phi_expected).margin(5e-3));
  CHECK(report.phi_boundary_max_abs <= 5.0 * sol.epsilon_grid);
}

TEST_CASE("boundary descent on a minimizer") {
  MinimizeSettings settings;
  settings.restarts = 4;
  settings.seed = 29;
  const auto r = minimize(PlasmaParams::create(10, 2), ExternalField(), settings, 2);
  REQUIRE(r.converged);

  // nearest pair; probe midway between them, inside the screening region of
  // either endpoint
  int a = 0, b = 1;
  double best = 1e30;
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j)
      if (dist(r.configuration[i], r.configuration[j]) < best) {
        best = dist(r.configuration[i], r.configuration[j]);
        a = i;
        b = j;
      }
  const Vec2 probe = (r.configuration[a] + r.configuration[b]) * 0.5;

  NucleiSet nucleus{{r.configuration[a]}};
  ExclusionSettings ex;
  const TfSolution sol = tf_solve(nucleus, detail::cluster_grid(nucleus, ex));
  REQUIRE(sol.region.contains(probe));

  std::vector<int> subset{a};
  const ExternalField none;
  const auto report =
      verify_boundary_descent(r.configuration, subset, probe, std::nullopt, none, sol);
  CHECK(report.pass);
  CHECK(report.phi_probe > 0.0);
  CHECK(report.descent_margin > 0.0);

  // probes outside the region are rejected up front
  const Vec2 far = r.configuration[a] + Vec2{5.0, 5.0};
  CHECK_THROWS_AS(verify_boundary_descent(r.configuration, subset, far, std::nullopt, none, sol),
                  std::invalid_argument);
}
