#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "laughlin/exclusion.hpp"
#include "laughlin/grid.hpp"
#include "laughlin/histogram.hpp"
#include "laughlin/incompressibility.hpp"
#include "laughlin/minimize.hpp"
#include "laughlin/prefactor.hpp"
#include "laughlin/tf.hpp"

namespace laughlin::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// --- base64 payloads for dense double arrays -------------------------------

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
  }
  const size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto value_of = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    if (c == '=') return -1;
    throw std::invalid_argument("invalid base64 character");
  };
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    const int v = value_of(c);
    if (v < 0) break;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
    }
  }
  return out;
}

inline std::string encode_doubles(std::span<const double> values) {
  static_assert(sizeof(double) == 8);
  std::vector<std::uint8_t> bytes(values.size() * 8);
  std::memcpy(bytes.data(), values.data(), bytes.size());
  return base64_encode(bytes);
}

inline std::vector<double> decode_doubles(const std::string& text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % 8 != 0) throw std::invalid_argument("payload size not a multiple of 8");
  std::vector<double> values(bytes.size() / 8);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

// --- atomic file output -----------------------------------------------------

inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

// FNV-1a over the canonical dump; artifacts embed this so every report is
// self-describing about the configuration that produced it.
inline std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// --- JSON forms of the domain types -----------------------------------------

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }

inline json to_json(const Prefactor& pf) {
  json j;
  switch (pf.kind()) {
    case Prefactor::Kind::Identity:
      j["kind"] = "identity";
      break;
    case Prefactor::Kind::QuasiHoleProduct: {
      j["kind"] = "holes";
      json holes = json::array();
      for (const auto& h : pf.holes())
        holes.push_back({{"location", to_json(h.location)}, {"multiplicity", h.multiplicity}});
      j["holes"] = holes;
      break;
    }
    case Prefactor::Kind::QuadraticExponential:
      j["kind"] = "quadratic";
      j["coefficient"] = {pf.coefficient().real(), pf.coefficient().imag()};
      break;
  }
  return j;
}

inline Prefactor prefactor_from_json(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "identity") return Prefactor::identity();
  if (kind == "holes") {
    std::vector<QuasiHole> holes;
    for (const auto& h : j.at("holes"))
      holes.push_back({{h.at("location")[0], h.at("location")[1]}, h.at("multiplicity")});
    return Prefactor::quasi_holes(std::move(holes));
  }
  if (kind == "quadratic")
    return Prefactor::quadratic({j.at("coefficient")[0], j.at("coefficient")[1]});
  throw std::invalid_argument("unknown prefactor kind: " + kind);
}

inline json to_json(const GridField& f) {
  return json{{"schema_version", kSchemaVersion},
              {"role", f.role == FieldRole::Sigma ? "sigma" : "phi"},
              {"origin", to_json(f.spec.origin)},
              {"cell_size", f.spec.h},
              {"nx", f.spec.nx},
              {"ny", f.spec.ny},
              {"encoding", "base64/f64le"},
              {"values", encode_doubles(f.values)}};
}

inline GridField grid_field_from_json(const json& j) {
  GridField f;
  f.spec.origin = {j.at("origin")[0], j.at("origin")[1]};
  f.spec.h = j.at("cell_size");
  f.spec.nx = j.at("nx");
  f.spec.ny = j.at("ny");
  f.role = j.at("role") == "sigma" ? FieldRole::Sigma : FieldRole::Phi;
  f.values = decode_doubles(j.at("values"));
  if (static_cast<int>(f.values.size()) != f.spec.size())
    throw std::invalid_argument("grid field payload size mismatch");
  return f;
}

inline json to_json(const DensityHistogram& h) {
  return json{{"schema_version", kSchemaVersion},
              {"grid",
               {{"center", to_json(h.grid.center)},
                {"half_extent", h.grid.half_extent},
                {"n_cells", h.grid.n_cells},
                {"cell_size", h.grid.cell}}},
              {"n_chains", h.n_chains},
              {"total_deposits", h.total_deposits},
              {"in_grid_deposits", h.in_grid_deposits},
              {"clipped_fraction", h.clipped_fraction()},
              {"encoding", "base64/f64le"},
              {"density", encode_doubles(h.density)},
              {"stderr", encode_doubles(h.stderr_)}};
}

inline json to_json(const DiskAverage& d) {
  return json{{"center", to_json(d.center)}, {"radius", d.radius},   {"mean", d.mean},
              {"stderr", d.stderr_},         {"bound", d.bound},     {"exceeds", d.exceeds}};
}

inline json to_json(const MinimizerResult& r) {
  json points = json::array();
  for (const Vec2& p : r.configuration) points.push_back(to_json(p));
  return json{{"schema_version", kSchemaVersion},
              {"points", points},
              {"energy", r.energy},
              {"max_gradient_norm", r.max_gradient_norm},
              {"best_restart", r.best_restart},
              {"converged", r.converged},
              {"restart_energies", r.restart_energies}};
}

inline json to_json(const ExclusionReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations)
    violations.push_back({{"k", v.k},
                          {"cluster", v.cluster},
                          {"violator", v.violator},
                          {"margin", v.margin}});
  return json{{"schema_version", kSchemaVersion},
              {"min_pairwise_distance", r.min_pairwise},
              {"pairwise_bound", r.pairwise_bound},
              {"slack", r.slack},
              {"clusters_tested", r.clusters_tested},
              {"violations", violations},
              {"pass", r.pass()}};
}

inline json to_json(const ValueWithError& v) {
  return json{{"value", v.value}, {"stderr", v.stderr_}};
}

inline json to_json(const EnergyReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"prefactor", r.prefactor},
              {"n", r.params.n_particles},
              {"ell", r.params.ell},
              {"s", r.trap_s},
              {"mc_energy", to_json(r.mc_energy)},
              {"bathtub_energy", r.bathtub},
              {"ratio", to_json(r.ratio)},
              {"angular_momentum", to_json(r.angular_momentum)},
              {"momentum_ratio", r.momentum_ratio}};
}

// --- CSV writers -------------------------------------------------------------

inline std::string csv_radial_profile(const DensityHistogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "radius,density,stderr\n";
  for (const auto& bin : h.radial_profile())
    os << bin.radius << "," << bin.density << "," << bin.stderr_ << "\n";
  return os.str();
}

inline std::string csv_region_boundary(const ScreeningRegion& region) {
  std::ostringstream os;
  os.precision(17);
  os << "loop,x,y\n";
  for (size_t l = 0; l < region.boundary.size(); ++l)
    for (const Vec2& v : region.boundary[l]) os << l << "," << v.x << "," << v.y << "\n";
  return os.str();
}

}  // namespace laughlin::io
