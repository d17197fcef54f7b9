#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "laughlin/conv.hpp"
#include "laughlin/tf.hpp"
#include "oracles.hpp"

using namespace laughlin;

namespace {

// coverage-weighted disk indicator (4x4 subsampling per cell)
GridField disk_sigma(const GridSpec& spec, Vec2 center, double radius) {
  GridField sigma(spec, FieldRole::Sigma);
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i) {
      const Vec2 c = spec.cell_center(i, j);
      int hits = 0;
      for (int sj = 0; sj < 4; ++sj)
        for (int si = 0; si < 4; ++si) {
          const Vec2 p{c.x + (si - 1.5) * spec.h / 4.0, c.y + (sj - 1.5) * spec.h / 4.0};
          if (dist(p, center) <= radius) ++hits;
        }
      sigma.values[spec.index(i, j)] = hits / 16.0;
    }
  return sigma;
}

}  // namespace

TEST_CASE("disk potential quadrature agrees with the closed form") {
  const double r = 1.0 / std::sqrt(M_PI);
  for (double d : {0.3 * r, 0.8 * r, 1.7 * r, 4.0 * r}) {
    const double exact = oracles::disk_log_potential(r, d);
    const double quad = oracles::disk_log_potential_quadrature(r, d);
    CHECK(quad == Catch::Approx(exact).margin(1e-6));
  }
}

TEST_CASE("nuclear potential point values") {
  // grids arranged so the evaluation points are exact cell centers
  const NucleiSet one{{{0.0, 0.0}}};

  GridSpec unit;  // single cell centered at (1, 0)
  unit.h = 0.05;
  unit.nx = unit.ny = 1;
  unit.origin = {1.0 - 0.5 * unit.h, -0.5 * unit.h};
  CHECK(nuclear_potential(one, unit).values[0] == Catch::Approx(0.0).margin(1e-12));

  GridSpec at_e = unit;
  at_e.origin = {std::exp(1.0) - 0.5 * at_e.h, -0.5 * at_e.h};
  CHECK(nuclear_potential(one, at_e).values[0] == Catch::Approx(-1.0).margin(1e-12));

  const NucleiSet two{{{1.0, 0.0}, {-1.0, 0.0}}};
  GridSpec origin_cell = unit;
  origin_cell.origin = {-0.5 * origin_cell.h, -0.5 * origin_cell.h};
  CHECK(nuclear_potential(two, origin_cell).values[0] == Catch::Approx(0.0).margin(1e-12));

  // the cell hosting a nucleus gets the equal-area-disk regularized value
  GridSpec self = unit;
  self.origin = {-0.5 * self.h, -0.5 * self.h};
  const double r_cell = self.h / std::sqrt(M_PI);
  CHECK(nuclear_potential(one, self).values[0] ==
        Catch::Approx(-(std::log(r_cell) - 0.5)).margin(1e-12));
}

TEST_CASE("log convolution reproduces the disk potential") {
  GridSpec spec;
  spec.nx = spec.ny = 160;
  spec.h = 0.02;
  spec.origin = {-1.6, -1.6};
  const double r = 1.0 / std::sqrt(M_PI);
  const GridField sigma = disk_sigma(spec, {0.0, 0.0}, r);
  const GridField conv = log_convolution(sigma);

  for (int k = 0; k < spec.size(); ++k) {
    const double d = norm(spec.cell_center(k));
    if (d > 1.2 * r && d < 1.5) {
      CHECK(conv.values[k] == Catch::Approx(oracles::disk_log_potential(r, d)).margin(2e-3));
    }
    if (d < 0.6 * r) {
      CHECK(conv.values[k] == Catch::Approx(oracles::disk_log_potential(r, d)).margin(2e-3));
    }
  }
}

TEST_CASE("log convolution is linear and vanishes on zero input") {
  GridSpec spec;
  spec.nx = spec.ny = 96;
  spec.h = 0.03;
  spec.origin = {-1.44, -1.44};

  GridField zero(spec, FieldRole::Sigma, 0.0);
  for (double v : log_convolution(zero).values) CHECK(v == 0.0);

  const GridField a = disk_sigma(spec, {-0.4, 0.1}, 0.3);
  const GridField b = disk_sigma(spec, {0.5, -0.2}, 0.45);
  GridField ab(spec, FieldRole::Sigma);
  for (int k = 0; k < spec.size(); ++k) ab.values[k] = a.values[k] + b.values[k];

  const auto ca = log_convolution(a), cb = log_convolution(b), cab = log_convolution(ab);
  for (int k = 0; k < spec.size(); ++k)
    CHECK(cab.values[k] == Catch::Approx(ca.values[k] + cb.values[k]).margin(1e-10));
}

TEST_CASE("single nucleus: screening region is the unit-area disk") {
  const NucleiSet nuclei{{{0.0, 0.0}}};
  const GridSpec spec = auto_grid(nuclei, 192);
  const TfSolution sol = tf_solve(nuclei, spec);
  const double r = 1.0 / std::sqrt(M_PI);

  CHECK(sol.converged);
  CHECK(sol.region.area() == Catch::Approx(1.0).margin(0.02));

  REQUIRE(sol.region.boundary.size() == 1);
  for (const Vec2& v : sol.region.boundary[0])
    CHECK(std::abs(norm(v) - r) <= 2.0 * spec.h);

  // flat potential outside, up to the grid tolerance
  for (int k = 0; k < spec.size(); ++k)
    if (!sol.region.inside[k]) CHECK(std::abs(sol.phi.values[k]) <= sol.epsilon_grid);

  // interior potential follows the closed form -log d + log r - pi (r^2-d^2)/2
  for (int k = 0; k < spec.size(); ++k) {
    const double d = norm(spec.cell_center(k));
    if (d > 0.2 * r && d < 0.7 * r) {
      const double expected = -std::log(d) + std::log(r) - 0.5 * M_PI * (r * r - d * d);
      CHECK(sol.phi.values[k] == Catch::Approx(expected).margin(5e-3));
    }
  }

  // TF energy of the unit disk: -log(pi)/4 - 3/8
  CHECK(sol.energy == Catch::Approx(-std::log(M_PI) / 4.0 - 0.375).margin(5e-3));

  CHECK(std::abs(sol.multiplier) <= sol.epsilon_grid);
  CHECK(complementarity_residual(sol) <= sol.epsilon_grid * 1.0);

  // mass conservation and box constraints, exactly as projected
  double mass = 0.0;
  for (double s : sol.sigma.values) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    mass += s;
  }
  CHECK(mass * spec.h * spec.h == Catch::Approx(1.0).margin(1e-6));

  // monotone energy trace
  for (size_t i = 1; i < sol.energy_trace.size(); ++i)
    CHECK(sol.energy_trace[i] <= sol.energy_trace[i - 1] + 1e-12);

  const auto binary = tf_binary_check(sol.sigma);
  CHECK(binary.pass);
  CHECK(binary.intermediate_fraction <= 0.1);

  const auto props = region_properties(sol.region, nuclei);
  CHECK(props.area_ok);
}

TEST_CASE("two distant nuclei screen as two unit disks") {
  const NucleiSet nuclei{{{-5.0, 0.0}, {5.0, 0.0}}};
  const GridSpec spec = auto_grid(nuclei, 224);
  const TfSolution sol = tf_solve(nuclei, spec);
  const double r = 1.0 / std::sqrt(M_PI);

  CHECK(sol.region.area() == Catch::Approx(2.0).margin(0.05));
  REQUIRE(sol.region.boundary.size() == 2);
  for (const auto& loop : sol.region.boundary) {
    // each loop hugs the circle around its nearest nucleus
    const Vec2 c = loop[0].x < 0 ? Vec2{-5.0, 0.0} : Vec2{5.0, 0.0};
    for (const Vec2& v : loop) CHECK(std::abs(dist(v, c) - r) <= 2.5 * spec.h);
  }
}

TEST_CASE("nested nuclei sets give nested screening regions") {
  const NucleiSet small{{{0.0, 0.0}}};
  const NucleiSet large{{{0.0, 0.0}, {0.7, 0.1}}};
  const GridSpec spec = auto_grid(large, 224);
  const TfSolution sol_small = tf_solve(small, spec);
  const TfSolution sol_large = tf_solve(large, spec);

  CHECK(containment_violations(sol_small.region, sol_large.region) == 0);
  CHECK(region_properties(sol_large.region, large).area_ok);
  // overlapping pair merges into one simply connected region
  CHECK(sol_large.region.boundary.size() == 1);
}

TEST_CASE("translation covariance") {
  // Exactly representable translation on a dyadic grid: the shifted problem
  // is the same problem cell-for-cell, so the fields must follow it. A
  // non-representable offset would perturb every input at roundoff and allow
  // the solver to stop elsewhere inside its tolerance basin.
  const double h = 1.0 / 64.0;
  const Vec2 t{0.5, 0.25};  // 32 and 16 cells
  const int si = 32, sj = 16;

  const NucleiSet base{{{0.0, 0.0}, {0.875, -0.3125}}};
  NucleiSet moved;
  for (const Vec2& p : base.positions) moved.positions.push_back(p + t);

  GridSpec spec;
  spec.h = h;
  spec.nx = spec.ny = 304;  // wide enough to pad both the base and moved sets
  spec.origin = {-1.75, -2.0};

  TfSettings tight;
  tight.energy_rtol = 1e-11;
  const TfSolution a = tf_solve(base, spec, tight);
  const TfSolution b = tf_solve(moved, spec, tight);

  // Cells inside the free-boundary layer are only determined up to the
  // stopping tolerance of the solve; off the layer sigma is pinned to 0/1
  // and must follow the translation to full precision.
  auto fractional = [&](const TfSolution& s, int i, int j) {
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const double v = s.sigma.values[spec.index(std::clamp(i + di, 0, spec.nx - 1),
                                                   std::clamp(j + dj, 0, spec.ny - 1))];
        if (v > 0.01 && v < 0.99) return true;
      }
    return false;
  };

  int off_band = 0, region_mismatch = 0;
  for (int j = 1; j + sj < spec.ny - 1; ++j)
    for (int i = 1; i + si < spec.nx - 1; ++i) {
      const int ka = spec.index(i, j), kb = spec.index(i + si, j + sj);
      if (a.region.inside[ka] != b.region.inside[kb]) ++region_mismatch;
      if (fractional(a, i, j) || fractional(b, i + si, j + sj)) continue;
      ++off_band;
      CHECK(a.sigma.values[ka] == Catch::Approx(b.sigma.values[kb]).margin(1e-8));
      CHECK(a.phi.values[ka] == Catch::Approx(b.phi.values[kb]).margin(1e-5));
    }
  CHECK(off_band > spec.size() / 2);
  CHECK(region_mismatch <= 8);  // a few cells straddling the traced boundary
  CHECK(std::abs(a.region.area() - b.region.area()) <= 8.0 * h * h);
  CHECK(a.energy == Catch::Approx(b.energy).epsilon(1e-8));
}

TEST_CASE("region area is stable under grid refinement") {
  const NucleiSet nuclei{{{0.0, 0.0}}};
  const GridSpec coarse = auto_grid(nuclei, 128);
  const GridSpec fine = auto_grid(nuclei, 256);
  const double area_coarse = tf_solve(nuclei, coarse).region.area();
  const double area_fine = tf_solve(nuclei, fine).region.area();
  const double perimeter = 2.0 * std::sqrt(M_PI);  // unit-area disk
  CHECK(std::abs(area_coarse - area_fine) <= 4.0 * coarse.h * perimeter);
}

TEST_CASE("binary check on synthetic fields") {
  GridSpec spec;
  spec.nx = spec.ny = 64;
  spec.h = 0.05;
  spec.origin = {-1.6, -1.6};

  GridField binary(spec, FieldRole::Sigma, 0.0);
  for (int k = 0; k < spec.size(); ++k)
    if (norm(spec.cell_center(k)) < 1.0) binary.values[k] = 1.0;
  const auto rb = tf_binary_check(binary);
  CHECK(rb.pass);
  CHECK(rb.intermediate_fraction == 0.0);

  GridField half(spec, FieldRole::Sigma, 0.5);
  const auto rh = tf_binary_check(half);
  CHECK_FALSE(rh.pass);
  CHECK(rh.intermediate_fraction == 1.0);
}

TEST_CASE("solver input validation") {
  CHECK_THROWS_AS(auto_grid(NucleiSet{}, 128), std::invalid_argument);
  CHECK_THROWS_AS(auto_grid(NucleiSet{{{0, 0}, {0, 0}}}, 128), std::invalid_argument);

  const NucleiSet one{{{0.0, 0.0}}};
  GridSpec coarse = auto_grid(one, 128);
  coarse.h *= 10.0;  // unit disk no longer spans 16 cells
  CHECK_THROWS_AS(tf_solve(one, coarse), std::invalid_argument);

  GridSpec tight = auto_grid(one, 128, 0.5);  // pad below 2 sqrt(K/pi)
  CHECK_THROWS_AS(tf_solve(one, tight), std::invalid_argument);

  GridSpec spec = auto_grid(one, 128);
  TfSettings strict;
  strict.max_iterations = 2;
  try {
    tf_solve(one, spec, strict);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations <= 2);
  }
}
