#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "laughlin/io.hpp"
#include "laughlin/rng.hpp"

using namespace laughlin;
namespace fs = std::filesystem;

TEST_CASE("base64 round trip preserves doubles bitwise") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(1 + rng.next_u64() % 300);
    for (auto& v : values) v = rng.gaussian() * std::pow(10.0, rng.uniform(-300.0, 300.0));
    const auto decoded = io::decode_doubles(io::encode_doubles(values));
    REQUIRE(decoded.size() == values.size());
    for (size_t i = 0; i < values.size(); ++i) CHECK(decoded[i] == values[i]);
  }
  CHECK(io::decode_doubles(io::encode_doubles(std::vector<double>{})).empty());
}

TEST_CASE("grid field JSON round trip") {
  GridSpec spec;
  spec.origin = {-1.25, 0.5};
  spec.h = 0.03125;
  spec.nx = 12;
  spec.ny = 9;
  GridField f(spec, FieldRole::Phi);
  Rng rng(5);
  for (auto& v : f.values) v = rng.gaussian();

  const auto j = io::to_json(f);
  CHECK(j.at("schema_version") == io::kSchemaVersion);
  CHECK(j.at("role") == "phi");
  const auto back = io::grid_field_from_json(j);
  CHECK(back.spec == f.spec);
  CHECK(back.role == f.role);
  for (int k = 0; k < spec.size(); ++k) CHECK(back.values[k] == f.values[k]);
}

TEST_CASE("prefactor JSON round trip") {
  const Prefactor cases[] = {
      Prefactor::identity(),
      Prefactor::quasi_holes({{{0.5, -0.25}, 2}, {{3.0, 1.0}, 1}}),
      Prefactor::quadratic({0.15, -0.05}),
  };
  for (const auto& pf : cases) {
    const auto back = io::prefactor_from_json(io::to_json(pf));
    CHECK(back.kind() == pf.kind());
    CHECK(back.describe() == pf.describe());
  }
  CHECK_THROWS_AS(io::prefactor_from_json({{"kind", "mystery"}}), std::invalid_argument);
}

TEST_CASE("atomic writes leave no temp files") {
  const fs::path dir = fs::temp_directory_path() / "laughlin_io_test";
  fs::remove_all(dir);
  const fs::path target = dir / "artifact.json";
  io::atomic_write_text(target, "{\"ok\": true}\n");
  CHECK(fs::exists(target));
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "{\"ok\": true}\n");
  fs::remove_all(dir);
}

TEST_CASE("config hash is stable and sensitive") {
  const io::json a = {{"n", 50}, {"ell", 2}, {"seed", 7}};
  const io::json b = {{"n", 50}, {"ell", 2}, {"seed", 8}};
  CHECK(io::config_hash(a) == io::config_hash(a));
  CHECK(io::config_hash(a) != io::config_hash(b));
}

TEST_CASE("csv writers emit headers and rows") {
  ChainHistogram chain(HistGrid::for_params(PlasmaParams::create(4, 2), 32));
  Rng rng(9);
  for (int i = 0; i < 5000; ++i) chain.deposit(rng.gaussian_vec(0.5));
  std::vector<ChainHistogram> chains{chain, chain};
  const auto hist = DensityHistogram::merge(chains);
  const std::string csv = io::csv_radial_profile(hist);
  CHECK(csv.rfind("radius,density,stderr\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 10);

  ScreeningRegion region;
  region.boundary = {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}}};
  const std::string rcsv = io::csv_region_boundary(region);
  CHECK(rcsv == "loop,x,y\n0,0,0\n0,1,0\n0,1,1\n");
}

TEST_CASE("report serializers carry the schema version") {
  ExclusionReport er;
  er.min_pairwise = 0.9;
  er.pairwise_bound = 1.0 / std::sqrt(M_PI);
  er.violations.push_back({1, {0}, 3, 0.05});
  const auto j = io::to_json(er);
  CHECK(j.at("schema_version") == io::kSchemaVersion);
  CHECK(j.at("pass") == false);
  CHECK(j.at("violations").size() == 1);

  EnergyReport energy;
  energy.prefactor = "identity";
  energy.params = PlasmaParams::create(10, 2);
  energy.mc_energy = {100.0, 1.0};
  energy.bathtub = 100.0;
  energy.angular_momentum = {90.0, 1.0};
  energy.finalize();
  const auto je = io::to_json(energy);
  CHECK(je.at("ratio").at("value") == Catch::Approx(1.0));
  CHECK(je.at("momentum_ratio") == Catch::Approx(0.9));
}
