// Command-line driver: batch runs of the sampler, minimizer, TF solver and
// the verification pipelines, with JSON/CSV artifacts written atomically.
//
// Exit codes: 0 success, 1 verification failure (a bound was violated),
// 2 usage/config error, 3 numerical non-convergence.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "laughlin/io.hpp"
#include "laughlin/laughlin.hpp"

namespace fs = std::filesystem;
using namespace laughlin;
using io::json;

namespace {

constexpr const char* kOutRootEnv = "LAUGHLIN_OUT_ROOT";

struct CommonOpts {
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string config_file;
};

struct PrefactorOpts {
  std::string kind = "identity";  // identity | holes | quad
  std::vector<std::string> holes;  // "x,y,m"
  std::string quad_c = "0.1";      // "re[,im]"
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out, "output directory (default: $LAUGHLIN_OUT_ROOT or .)");
  cmd->add_option("--threads", c.threads, "worker pool size, 0 = all cores");
  cmd->add_option("--seed", c.seed, "global seed");
  cmd->add_option("--config", c.config_file, "JSON file whose keys mirror the long flags");
}

void add_prefactor(CLI::App* cmd, PrefactorOpts& p) {
  cmd->add_option("--prefactor", p.kind, "prefactor kind: identity | holes | quad")
      ->check(CLI::IsMember({"identity", "holes", "quad"}));
  cmd->add_option("--hole", p.holes, "quasi-hole as x,y,m (repeatable; implies --prefactor holes)");
  cmd->add_option("--quad-c", p.quad_c, "quadratic coefficient re[,im] for --prefactor quad");
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) out.push_back(std::stod(token));
  return out;
}

Prefactor build_prefactor(const PrefactorOpts& p) {
  std::string kind = p.kind;
  if (!p.holes.empty() && kind == "identity") kind = "holes";
  if (kind == "identity") return Prefactor::identity();
  if (kind == "holes") {
    if (p.holes.empty()) throw std::invalid_argument("--prefactor holes requires --hole x,y,m");
    std::vector<QuasiHole> holes;
    for (const auto& spec : p.holes) {
      const auto v = parse_csv_doubles(spec);
      if (v.size() != 3) throw std::invalid_argument("--hole expects x,y,m");
      holes.push_back({{v[0], v[1]}, static_cast<int>(v[2])});
    }
    return Prefactor::quasi_holes(std::move(holes));
  }
  const auto v = parse_csv_doubles(p.quad_c);
  if (v.empty() || v.size() > 2) throw std::invalid_argument("--quad-c expects re[,im]");
  return Prefactor::quadratic({v[0], v.size() > 1 ? v[1] : 0.0});
}

json prefactor_config(const PrefactorOpts& p) {
  return io::to_json(build_prefactor(p));
}

fs::path resolve_out(const std::string& flag) {
  if (!flag.empty()) return fs::path(flag);
  if (const char* root = std::getenv(kOutRootEnv)) return fs::path(root);
  return fs::path(".");
}

int thread_count(const CommonOpts& c) {
  return c.threads > 0 ? c.threads : default_thread_count();
}

// wraps a payload with the schema header and the configuration echo
json artifact(const json& config, json payload) {
  payload["schema_version"] = io::kSchemaVersion;
  payload["config_hash"] = io::config_hash(config);
  payload["config"] = config;
  return payload;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_meta(const fs::path& dir, const std::string& command, double seconds,
                const std::vector<std::string>& warnings) {
  // timestamps live here, outside the deterministic artifacts
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  json meta{{"command", command},
            {"created_unix", std::chrono::duration_cast<std::chrono::seconds>(now).count()},
            {"duration_seconds", seconds},
            {"warnings", warnings}};
  io::write_json(dir / "meta.json", meta);
}

json disk_to_json(const std::vector<DiskAverage>& disks) {
  json arr = json::array();
  for (const auto& d : disks) arr.push_back(io::to_json(d));
  return arr;
}

// ---------------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------------

struct SampleOpts {
  CommonOpts common;
  PrefactorOpts prefactor;
  int n = 50;
  int ell = 2;
  std::int64_t sweeps = 100000;
  std::int64_t burn = 10000;
  int chains = 4;
  double proposal_sigma = 0.0;  // 0 = auto
  int grid_cells = 128;
  std::vector<double> alphas{0.3, 0.4, 0.5};
  double tolerance = 0.10;  // finite-N allowance on the density bound
};

int run_sample(const SampleOpts& opt) {
  Stopwatch watch;
  const auto params = PlasmaParams::create(opt.n, opt.ell);
  const Prefactor pf = build_prefactor(opt.prefactor);

  ChainSettings settings;
  settings.sweeps = opt.sweeps;
  settings.burn_in = opt.burn;
  settings.n_chains = opt.chains;
  settings.grid_cells = opt.grid_cells;
  settings.seed = opt.common.seed;
  settings.proposal_sigma =
      opt.proposal_sigma > 0.0 ? opt.proposal_sigma : 0.5 / std::sqrt(double(opt.n));
  settings.validate();
  for (double a : opt.alphas)
    if (!(a > 0.0 && a <= 0.5)) throw std::invalid_argument("alpha must lie in (0, 1/2]");

  const json config{{"command", "sample"},
                    {"n", opt.n},
                    {"ell", opt.ell},
                    {"prefactor", prefactor_config(opt.prefactor)},
                    {"sweeps", opt.sweeps},
                    {"burn", opt.burn},
                    {"chains", opt.chains},
                    {"proposal_sigma", settings.proposal_sigma},
                    {"grid_cells", opt.grid_cells},
                    {"alphas", opt.alphas},
                    {"tolerance", opt.tolerance},
                    {"seed", opt.common.seed}};

  const fs::path dir = resolve_out(opt.common.out);
  fs::create_directories(dir);

  const auto run = run_chains(params, pf, settings, thread_count(opt.common));

  io::write_json(dir / "density.json",
                 artifact(config, {{"params", {{"n", opt.n}, {"ell", opt.ell}}},
                                   {"prefactor", io::to_json(pf)},
                                   {"histogram", io::to_json(run.histogram)},
                                   {"mean_second_moment", run.mean_second_moment},
                                   {"stderr_second_moment", run.stderr_second_moment}}));
  io::atomic_write_text(dir / "radial.csv", io::csv_radial_profile(run.histogram));

  // Two flags per disk: `exceeds` is the strict asymptotic bound; the edge
  // ring of a finite droplet overshoots it by O(1/sqrt(N)), so the verdict
  // (and exit code) uses the banded form mean <= (1+tol) bound + 2 stderr.
  const double bound = 1.0 / (M_PI * opt.ell);
  bool any_exceedance = false, any_beyond_band = false;
  json per_alpha = json::object();
  for (double a : opt.alphas) {
    const auto disks = disk_averages(run.histogram, params, a);
    json arr = json::array();
    for (const auto& d : disks) {
      any_exceedance = any_exceedance || d.exceeds;
      const bool beyond = d.mean > (1.0 + opt.tolerance) * bound + 2.0 * d.stderr_;
      any_beyond_band = any_beyond_band || beyond;
      json dj = io::to_json(d);
      dj["exceeds_tol"] = beyond;
      arr.push_back(dj);
    }
    std::ostringstream key;
    key << a;
    per_alpha[key.str()] = arr;
  }
  io::write_json(dir / "disk_averages.json",
                 artifact(config, {{"bound", bound},
                                   {"tolerance", opt.tolerance},
                                   {"disks", per_alpha},
                                   {"any_exceedance", any_exceedance},
                                   {"any_exceedance_tol", any_beyond_band}}));
  write_meta(dir, "sample", watch.seconds(), run.warnings);
  return any_beyond_band ? 1 : 0;
}

// ---------------------------------------------------------------------------
// minimize
// ---------------------------------------------------------------------------

struct MinimizeOpts {
  CommonOpts common;
  PrefactorOpts prefactor;
  int n = 20;
  int ell = 2;
  int restarts = 8;
  int max_iter = 50000;
  double gtol = 1e-8;
};

MinimizerResult run_minimize_core(const MinimizeOpts& opt) {
  const auto params = PlasmaParams::create(opt.n, opt.ell);
  const Prefactor pf = build_prefactor(opt.prefactor);
  const ExternalField w = pf.is_identity() ? ExternalField() : ExternalField(pf, opt.ell);
  MinimizeSettings settings;
  settings.restarts = opt.restarts;
  settings.max_iterations = opt.max_iter;
  settings.gradient_tolerance = opt.gtol;
  settings.seed = opt.common.seed;
  settings.validate();
  return minimize(params, w, settings, thread_count(opt.common));
}

json minimize_config(const MinimizeOpts& opt, const char* command) {
  return json{{"command", command},
              {"n", opt.n},
              {"ell", opt.ell},
              {"prefactor", prefactor_config(opt.prefactor)},
              {"restarts", opt.restarts},
              {"max_iter", opt.max_iter},
              {"gtol", opt.gtol},
              {"seed", opt.common.seed}};
}

int run_minimize(const MinimizeOpts& opt) {
  Stopwatch watch;
  const json config = minimize_config(opt, "minimize");
  const fs::path dir = resolve_out(opt.common.out);
  fs::create_directories(dir);
  const auto result = run_minimize_core(opt);
  io::write_json(dir / "minimizer.json", artifact(config, io::to_json(result)));
  write_meta(dir, "minimize", watch.seconds(), {});
  return result.converged ? 0 : 3;
}

// ---------------------------------------------------------------------------
// tf
// ---------------------------------------------------------------------------

struct TfOpts {
  CommonOpts common;
  std::string nuclei_json = "[[0,0]]";
  int grid = 256;
  std::string pad = "auto";
};

int run_tf(const TfOpts& opt) {
  Stopwatch watch;
  NucleiSet nuclei;
  for (const auto& p : json::parse(opt.nuclei_json)) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("--nuclei expects [[x,y],...]");
    nuclei.positions.push_back({p[0], p[1]});
  }
  const double pad = opt.pad == "auto" ? 0.0 : std::stod(opt.pad);

  const json config{{"command", "tf"},
                    {"nuclei", json::parse(opt.nuclei_json)},
                    {"grid", opt.grid},
                    {"pad", opt.pad},
                    {"seed", opt.common.seed}};
  const fs::path dir = resolve_out(opt.common.out);
  fs::create_directories(dir);

  const GridSpec spec = auto_grid(nuclei, opt.grid, pad);
  const TfSolution sol = tf_solve(nuclei, spec);

  io::write_json(dir / "sigma.json", artifact(config, io::to_json(sol.sigma)));
  io::write_json(dir / "phi.json", artifact(config, io::to_json(sol.phi)));
  io::atomic_write_text(dir / "region.csv", io::csv_region_boundary(sol.region));

  const auto props = region_properties(sol.region, nuclei);
  const auto binary = tf_binary_check(sol.sigma);
  io::write_json(dir / "tf_report.json",
                 artifact(config, {{"k", props.k},
                                   {"area", props.area},
                                   {"area_ok", props.area_ok},
                                   {"energy", sol.energy},
                                   {"iterations", sol.iterations},
                                   {"epsilon_grid", sol.epsilon_grid},
                                   {"multiplier", sol.multiplier},
                                   {"complementarity_residual", complementarity_residual(sol)},
                                   {"binary_check",
                                    {{"intermediate_fraction", binary.intermediate_fraction},
                                     {"bound", binary.bound},
                                     {"pass", binary.pass}}}}));
  write_meta(dir, "tf", watch.seconds(), {});
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOpts {
  CommonOpts common;
  PrefactorOpts prefactor;
  int minimize_n = 50;
  int ell = 2;
  int k_max = 2;
  int restarts = 8;
  int max_iter = 50000;
  double gtol = 1e-8;
  std::vector<double> radii;  // empty = {2, 4, droplet/2}
};

int run_verify(const VerifyOpts& opt) {
  Stopwatch watch;
  MinimizeOpts mopt;
  mopt.common = opt.common;
  mopt.prefactor = opt.prefactor;
  mopt.n = opt.minimize_n;
  mopt.ell = opt.ell;
  mopt.restarts = opt.restarts;
  mopt.max_iter = opt.max_iter;
  mopt.gtol = opt.gtol;

  json config = minimize_config(mopt, "verify");
  config["k_max"] = opt.k_max;

  const fs::path dir = resolve_out(opt.common.out);
  fs::create_directories(dir);

  const auto result = run_minimize_core(mopt);
  io::write_json(dir / "minimizer.json", artifact(config, io::to_json(result)));
  if (!result.converged) {
    write_meta(dir, "verify", watch.seconds(), {"minimizer did not converge"});
    return 3;
  }

  const auto exclusion =
      exclusion_check(result.configuration, opt.k_max, {}, thread_count(opt.common));

  std::vector<double> radii = opt.radii;
  if (radii.empty()) radii = {2.0, 4.0, 0.5 * std::sqrt(opt.minimize_n / M_PI)};
  const auto counts = density_counts(result, radii);
  json counts_json = json::array();
  bool density_ok = true;
  for (const auto& c : counts) {
    const double bound = 1.0 + 3.0 / std::sqrt(M_PI * c.radius * c.radius);
    const bool ok = c.ratio <= bound;
    density_ok = density_ok && ok;
    counts_json.push_back({{"radius", c.radius},
                           {"count", c.count},
                           {"ratio", c.ratio},
                           {"bound", bound},
                           {"ok", ok}});
  }

  const bool pass = exclusion.pass() && density_ok;
  json report = io::to_json(exclusion);
  report["density_counts"] = counts_json;
  report["density_ok"] = density_ok;
  report["pass"] = pass;
  io::write_json(dir / "exclusion_report.json", artifact(config, report));
  write_meta(dir, "verify", watch.seconds(), {});
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

struct EnergyOpts {
  SampleOpts sample;  // reuses the sampling flags
  double s = 2.0;
};

int run_energy(const EnergyOpts& opt) {
  Stopwatch watch;
  const auto params = PlasmaParams::create(opt.sample.n, opt.sample.ell);
  const Prefactor pf = build_prefactor(opt.sample.prefactor);
  const TrapPotential trap(opt.s);

  ChainSettings settings;
  settings.sweeps = opt.sample.sweeps;
  settings.burn_in = opt.sample.burn;
  settings.n_chains = opt.sample.chains;
  settings.grid_cells = opt.sample.grid_cells;
  settings.seed = opt.sample.common.seed;
  settings.proposal_sigma = opt.sample.proposal_sigma > 0.0
                                ? opt.sample.proposal_sigma
                                : 0.5 / std::sqrt(double(opt.sample.n));
  settings.validate();

  const json config{{"command", "energy"},
                    {"n", opt.sample.n},
                    {"ell", opt.sample.ell},
                    {"s", opt.s},
                    {"prefactor", prefactor_config(opt.sample.prefactor)},
                    {"sweeps", opt.sample.sweeps},
                    {"burn", opt.sample.burn},
                    {"chains", opt.sample.chains},
                    {"seed", opt.sample.common.seed}};
  const fs::path dir = resolve_out(opt.sample.common.out);
  fs::create_directories(dir);

  const auto run = run_chains(params, pf, settings, thread_count(opt.sample.common));

  EnergyReport report;
  report.prefactor = pf.describe();
  report.params = params;
  report.trap_s = opt.s;
  report.mc_energy = trap_energy_mc(run.histogram, params, trap);
  report.bathtub = bathtub_energy(params, trap);
  report.angular_momentum = angular_momentum_estimate(run, params);
  report.finalize();

  io::write_json(dir / "energy.json", artifact(config, io::to_json(report)));
  write_meta(dir, "energy", watch.seconds(), run.warnings);

  // the bathtub value is a floor: flag a statistically significant dip
  const bool floor_ok = report.ratio.value >= 1.0 - 3.0 * report.ratio.stderr_ - 1e-3;
  return floor_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportOpts {
  CommonOpts common;
  std::string dir;
  double band = 0.1;  // finite-N tolerance for |ratio - 1|
};

int run_report(const ReportOpts& opt) {
  Stopwatch watch;
  const fs::path root(opt.dir);
  if (!fs::exists(root)) throw std::invalid_argument("report directory does not exist");

  std::vector<EnergyReport> energies;
  std::vector<json> energy_docs;
  int disk_files = 0, disk_exceedances = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "energy.json") {
      const json doc = io::read_json(entry.path());
      EnergyReport r;
      r.prefactor = doc.at("prefactor");
      r.params = PlasmaParams::create(doc.at("n"), doc.at("ell"));
      r.trap_s = doc.at("s");
      r.mc_energy = {doc.at("mc_energy").at("value"), doc.at("mc_energy").at("stderr")};
      r.bathtub = doc.at("bathtub_energy");
      r.angular_momentum = {doc.at("angular_momentum").at("value"),
                            doc.at("angular_momentum").at("stderr")};
      r.finalize();
      energies.push_back(r);
      energy_docs.push_back(doc);
    } else if (name == "disk_averages.json") {
      ++disk_files;
      const json doc = io::read_json(entry.path());
      for (const auto& [alpha, disks] : doc.at("disks").items())
        for (const auto& d : disks)
          if (d.value("exceeds_tol", d.at("exceeds").get<bool>())) ++disk_exceedances;
    }
  }

  // group energies by (ell, n, s); identity is the reference within a group
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < energies.size(); ++i) {
    std::ostringstream key;
    key << energies[i].params.ell << ":" << energies[i].params.n_particles << ":"
        << energies[i].trap_s;
    groups[key.str()].push_back(i);
  }

  json verdicts = json::array();
  bool corollary_ok = true;
  for (const auto& [key, members] : groups) {
    std::optional<size_t> identity;
    std::vector<EnergyReport> perturbed;
    for (size_t i : members) {
      if (energies[i].prefactor == "identity" && !identity)
        identity = i;
      else
        perturbed.push_back(energies[i]);
    }
    if (!identity) continue;
    const auto verdict = corollary_check(energies[*identity], perturbed, opt.band);
    corollary_ok = corollary_ok && verdict.pass;
    json comparisons = json::array();
    for (const auto& c : verdict.comparisons)
      comparisons.push_back({{"prefactor", c.prefactor},
                             {"energy", c.energy},
                             {"gap", c.gap},
                             {"combined_stderr", c.combined_stderr},
                             {"identity_not_higher", c.identity_not_higher}});
    verdicts.push_back({{"group", key},
                        {"ratio", verdict.ratio},
                        {"ratio_in_band", verdict.ratio_in_band},
                        {"band", verdict.band},
                        {"identity_is_minimum", verdict.identity_is_minimum},
                        {"comparisons", comparisons},
                        {"pass", verdict.pass}});
  }

  const fs::path dir = resolve_out(opt.common.out);
  fs::create_directories(dir);

  std::ostringstream csv;
  csv.precision(17);
  csv << "prefactor,ell,n,s,mc_energy,mc_stderr,bathtub,ratio,angular_momentum,momentum_ratio\n";
  for (const auto& r : energies)
    csv << r.prefactor << "," << r.params.ell << "," << r.params.n_particles << "," << r.trap_s
        << "," << r.mc_energy.value << "," << r.mc_energy.stderr_ << "," << r.bathtub << ","
        << r.ratio.value << "," << r.angular_momentum.value << "," << r.momentum_ratio << "\n";
  io::atomic_write_text(dir / "summary.csv", csv.str());

  const bool pass = corollary_ok && disk_exceedances == 0;
  const json config{{"command", "report"}, {"dir", opt.dir}, {"band", opt.band}};
  io::write_json(dir / "summary.json",
                 artifact(config, {{"energy_reports", energy_docs.size()},
                                   {"disk_average_files", disk_files},
                                   {"disk_exceedances", disk_exceedances},
                                   {"corollary_verdicts", verdicts},
                                   {"pass", pass}}));
  write_meta(dir, "report", watch.seconds(), {});
  return pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

void fail_json(const std::string& kind, const std::string& message) {
  json diag{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << diag.dump() << "\n";
}

// injects values from --config FILE as defaults for flags not given explicitly
std::vector<std::string> with_config_defaults(std::vector<std::string> args) {
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;
  const json cfg = io::read_json(config_path);
  if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool present = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (present) continue;
    if (value.is_array()) {
      for (const auto& v : value) {
        args.push_back(flag);
        args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    } else {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D log-gas laboratory: plasma sampling, ground states, and "
               "Thomas-Fermi screening for fully correlated states"};
  app.require_subcommand(1);

  SampleOpts sample;
  auto* sample_cmd = app.add_subcommand("sample", "Metropolis sampling of the plasma density");
  add_common(sample_cmd, sample.common);
  add_prefactor(sample_cmd, sample.prefactor);
  sample_cmd->add_option("--n", sample.n, "particle number");
  sample_cmd->add_option("--ell", sample.ell, "Jastrow exponent");
  sample_cmd->add_option("--sweeps", sample.sweeps, "sweeps per chain");
  sample_cmd->add_option("--burn", sample.burn, "burn-in sweeps");
  sample_cmd->add_option("--chains", sample.chains, "independent chains");
  sample_cmd->add_option("--proposal-sigma", sample.proposal_sigma, "initial step (0 = auto)");
  sample_cmd->add_option("--grid-cells", sample.grid_cells, "histogram cells across the droplet");
  sample_cmd->add_option("--alpha", sample.alphas, "disk-average exponents (repeatable)");
  sample_cmd->add_option("--tolerance", sample.tolerance,
                         "finite-N band on the density bound for the verdict");

  MinimizeOpts minimize_opts;
  auto* minimize_cmd = app.add_subcommand("minimize", "ground-state configuration search");
  add_common(minimize_cmd, minimize_opts.common);
  add_prefactor(minimize_cmd, minimize_opts.prefactor);
  minimize_cmd->add_option("--n", minimize_opts.n, "particle number");
  minimize_cmd->add_option("--ell", minimize_opts.ell, "Jastrow exponent (for the external term)");
  minimize_cmd->add_option("--restarts", minimize_opts.restarts, "random restarts");
  minimize_cmd->add_option("--max-iter", minimize_opts.max_iter, "iteration cap per restart");
  minimize_cmd->add_option("--gtol", minimize_opts.gtol, "max gradient norm tolerance");

  TfOpts tf_opts;
  auto* tf_cmd = app.add_subcommand("tf", "Thomas-Fermi screening-region solve");
  add_common(tf_cmd, tf_opts.common);
  tf_cmd->add_option("--nuclei", tf_opts.nuclei_json, "nuclei as JSON [[x,y],...]");
  tf_cmd->add_option("--grid", tf_opts.grid, "cells per side");
  tf_cmd->add_option("--pad", tf_opts.pad, "domain padding (auto = 2 sqrt(K/pi))");

  VerifyOpts verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "minimize, then run the exclusion checks");
  add_common(verify_cmd, verify_opts.common);
  add_prefactor(verify_cmd, verify_opts.prefactor);
  verify_cmd->add_option("--minimize-n", verify_opts.minimize_n, "particle number to minimize");
  verify_cmd->add_option("--ell", verify_opts.ell, "Jastrow exponent (for the external term)");
  verify_cmd->add_option("--k-max", verify_opts.k_max, "largest cluster size for exclusion");
  verify_cmd->add_option("--restarts", verify_opts.restarts, "random restarts");
  verify_cmd->add_option("--max-iter", verify_opts.max_iter, "iteration cap per restart");
  verify_cmd->add_option("--gtol", verify_opts.gtol, "max gradient norm tolerance");
  verify_cmd->add_option("--radius", verify_opts.radii, "density-count radii (repeatable)");

  EnergyOpts energy_opts;
  auto* energy_cmd = app.add_subcommand("energy", "trap energy versus the bathtub floor");
  add_common(energy_cmd, energy_opts.sample.common);
  add_prefactor(energy_cmd, energy_opts.sample.prefactor);
  energy_cmd->add_option("--n", energy_opts.sample.n, "particle number");
  energy_cmd->add_option("--ell", energy_opts.sample.ell, "Jastrow exponent");
  energy_cmd->add_option("--s", energy_opts.s, "trap exponent, V = |x|^s");
  energy_cmd->add_option("--sweeps", energy_opts.sample.sweeps, "sweeps per chain");
  energy_cmd->add_option("--burn", energy_opts.sample.burn, "burn-in sweeps");
  energy_cmd->add_option("--chains", energy_opts.sample.chains, "independent chains");
  energy_cmd->add_option("--proposal-sigma", energy_opts.sample.proposal_sigma,
                         "initial step (0 = auto)");
  energy_cmd->add_option("--grid-cells", energy_opts.sample.grid_cells,
                         "histogram cells across the droplet");

  ReportOpts report_opts;
  auto* report_cmd = app.add_subcommand("report", "aggregate a directory of runs");
  add_common(report_cmd, report_opts.common);
  report_cmd->add_option("--dir", report_opts.dir, "directory tree of runs")->required();
  report_cmd->add_option("--band", report_opts.band, "finite-N tolerance on the energy ratio");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = with_config_defaults(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_json("usage", e.what());
    return 2;
  } catch (const std::exception& e) {
    fail_json("config", e.what());
    return 2;
  }

  try {
    if (*sample_cmd) return run_sample(sample);
    if (*minimize_cmd) return run_minimize(minimize_opts);
    if (*tf_cmd) return run_tf(tf_opts);
    if (*verify_cmd) return run_verify(verify_opts);
    if (*energy_cmd) return run_energy(energy_opts);
    if (*report_cmd) return run_report(report_opts);
  } catch (const ConvergenceError& e) {
    fail_json("convergence", std::string(e.what()) + " (iterations: " +
                                 std::to_string(e.iterations) + ")");
    return 3;
  } catch (const std::invalid_argument& e) {
    fail_json("config", e.what());
    return 2;
  } catch (const json::exception& e) {
    fail_json("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    fail_json("runtime", e.what());
    return 3;
  }
  return 2;
}
