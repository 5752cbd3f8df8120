#pragma once

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "atomdata.hpp"
#include "channels.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "units.hpp"

namespace icec {

inline constexpr const char* version = "0.1.0";

inline std::filesystem::path default_data_dir() {
  if (const char* d = std::getenv("ICEC_DATA_DIR")) return d;
#ifdef ICEC_DEFAULT_DATA_DIR
  return ICEC_DEFAULT_DATA_DIR;
#else
  return "data";
#endif
}

struct EnergyGrid {
  double start = 0, stop = 0, step = 0;  // eV

  std::vector<double> values_ev() const {
    long n = std::lround((stop - start) / step);
    std::vector<double> v;
    for (long i = 0; i <= n; ++i) v.push_back(start + i * step);
    return v;
  }
  std::string str() const { return fmt::format("{:g}:{:g}:{:g}", start, stop, step); }
};

inline EnergyGrid parse_energy_grid(const std::string& spec) {
  EnergyGrid g;
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError("energy grid '" + spec + "': bad number '" + item + "'");
    }
  }
  if (parts.size() != 3) throw ConfigError("energy grid must be start:stop:step in eV, got '" + spec + "'");
  g = {parts[0], parts[1], parts[2]};
  if (!(g.step > 0) || !(g.stop >= g.start)) throw ConfigError("energy grid '" + spec + "' is not strictly increasing");
  if (!(g.start > 0)) throw ConfigError("energy grid '" + spec + "' must start above 0 eV");
  return g;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(what + ": bad number '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

struct SurfaceOverride {
  std::optional<double> r_e_angstrom, d_e_cm, omega_e_cm, e_min_hartree;
};

struct RunConfig {
  std::filesystem::path source;  // empty for defaults
  std::filesystem::path species_registry = default_data_dir() / "species.ini";
  std::optional<double> reduced_mass;  // electron masses
  double pi_degeneracy_factor = 1;
  std::map<std::string, SurfaceOverride> surfaces;
  double r_box_angstrom = 10;
  int grid_points = 3000;
  int panels = 400;
  int quad_order = 10;
  ContinuumRule continuum = ContinuumRule::endpoint;
  int dvr_points = 3000;
  double alpha = 1.6;
  double c_bar = 1;
  double d_hartree = 1;
  int ell_max = 200;
  double term_tol = 1e-8;
  std::vector<double> temperatures{15, 77, 298};
  std::optional<EnergyGrid> energies;
  std::string format = "csv";
  std::string output;

  double mu() const { return reduced_mass ? *reduced_mass : default_reduced_mass(); }

  std::vector<MorseSurface> build_surfaces() const {
    auto s = default_surfaces(mu());
    for (auto& surf : s) {
      auto it = surfaces.find(surf.label);
      if (it == surfaces.end()) continue;
      const auto& o = it->second;
      if (o.r_e_angstrom) surf.r_e = units::from_angstrom(*o.r_e_angstrom);
      if (o.d_e_cm) surf.d_e = units::from_cm(*o.d_e_cm);
      if (o.omega_e_cm) surf.omega_e = units::from_cm(*o.omega_e_cm);
      if (o.e_min_hartree) surf.e_min = *o.e_min_hartree;
    }
    for (const auto& surf : s) surf.validate();
    return s;
  }

  EngineOptions engine_options() const {
    EngineOptions o;
    o.grid.r_box = units::from_angstrom(r_box_angstrom);
    o.grid.points = grid_points;
    o.panels = panels;
    o.quad_order = quad_order;
    o.continuum = continuum;
    return o;
  }

  ElectronTransferParams et_params(const TransitionChannel& c) const {
    auto p = default_et_params(c, alpha);
    p.c_bar = c_bar;
    p.d = d_hartree;
    p.ell_max = ell_max;
    p.term_tol = term_tol;
    p.validate();
    return p;
  }

  bool calibration_required() const { return c_bar == 1 && d_hartree == 1; }

  void validate() const {
    if (!(r_box_angstrom > 0)) throw ConfigError("r_box_angstrom must be positive");
    if (grid_points < 10) throw ConfigError("grid points must be >= 10");
    if (panels < 1 || quad_order < 2) throw ConfigError("quadrature panels/order too small");
    if (dvr_points < 2) throw ConfigError("dvr points must be >= 2");
    if (!(alpha > 0)) throw ConfigError("alpha must be positive");
    if (!(c_bar >= 0) || !(d_hartree > 0)) throw ConfigError("c_bar must be >= 0 and d_hartree > 0");
    if (ell_max < 0 || !(term_tol > 0)) throw ConfigError("ell_max >= 0 and term_tol > 0 required");
    if (!(pi_degeneracy_factor > 0)) throw ConfigError("pi_degeneracy_factor must be positive");
    if (reduced_mass && !(*reduced_mass > 0)) throw ConfigError("reduced mass must be positive");
    for (double t : temperatures)
      if (!(t >= 0)) throw ConfigError("temperatures must be >= 0");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    build_surfaces();
  }

  // Canonical key=value dump of every resolved parameter; input to the config hash.
  std::vector<std::pair<std::string, std::string>> canonical() const {
    std::vector<std::pair<std::string, std::string>> kv;
    auto num = [](double v) { return fmt::format("{:.17g}", v); };
    kv.emplace_back("species_registry", species_registry.lexically_normal().string());
    kv.emplace_back("reduced_mass_me", num(mu()));
    kv.emplace_back("pi_degeneracy_factor", num(pi_degeneracy_factor));
    for (const auto& s : build_surfaces()) {
      kv.emplace_back("surface." + s.label + ".r_e_angstrom", num(units::to_angstrom(s.r_e)));
      kv.emplace_back("surface." + s.label + ".d_e_cm", num(units::to_cm(s.d_e)));
      kv.emplace_back("surface." + s.label + ".omega_e_cm", num(units::to_cm(s.omega_e)));
      kv.emplace_back("surface." + s.label + ".e_min_hartree", num(s.e_min));
    }
    kv.emplace_back("grid.r_box_angstrom", num(r_box_angstrom));
    kv.emplace_back("grid.points", std::to_string(grid_points));
    kv.emplace_back("grid.panels", std::to_string(panels));
    kv.emplace_back("grid.quad_order", std::to_string(quad_order));
    kv.emplace_back("grid.continuum", continuum == ContinuumRule::direct ? "direct" : "endpoint");
    kv.emplace_back("dvr.points", std::to_string(dvr_points));
    kv.emplace_back("electron_transfer.alpha", num(alpha));
    kv.emplace_back("electron_transfer.c_bar", num(c_bar));
    kv.emplace_back("electron_transfer.d_hartree", num(d_hartree));
    kv.emplace_back("electron_transfer.ell_max", std::to_string(ell_max));
    kv.emplace_back("electron_transfer.term_tol", num(term_tol));
    return kv;
  }

  std::string hash() const {
    std::string text;
    for (const auto& [k, v] : canonical()) text += k + "=" + v + "\n";
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
  }
};

inline RunConfig parse_config(std::istream& in, const std::filesystem::path& source = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  RunConfig c;
  c.source = source;
  auto base = source.empty() ? std::filesystem::current_path() : source.parent_path();

  static const std::map<std::string, std::set<std::string>> schema{
      {"system", {"species_registry", "reduced_mass_me", "pi_degeneracy_factor"}},
      {"grid", {"r_box_angstrom", "points", "panels", "quad_order", "continuum"}},
      {"dvr", {"points"}},
      {"electron_transfer", {"alpha", "c_bar", "d_hartree", "ell_max", "term_tol"}},
      {"run", {"temperatures", "energies", "format", "output"}},
      {"surface.X", {"r_e_angstrom", "d_e_cm", "omega_e_cm", "e_min_hartree"}},
      {"surface.A", {"r_e_angstrom", "d_e_cm", "omega_e_cm", "e_min_hartree"}},
      {"surface.B", {"r_e_angstrom", "d_e_cm", "omega_e_cm", "e_min_hartree"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [k, v] : body)
      if (!it->second.count(k)) throw ConfigError("config: unknown key " + k + " in [" + section + "]");
  }
  auto str = [&](const std::string& path) { return tree.get_optional<std::string>(pt::ptree::path_type(path, '/')); };
  auto num = [&](const std::string& path) -> std::optional<double> {
    auto s = str(path);
    if (!s) return std::nullopt;
    try {
      std::size_t used = 0;
      double v = std::stod(*s, &used);
      if (used != detail::trim(*s).size()) throw std::invalid_argument(*s);
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("config: bad number for " + path + ": '" + *s + "'");
    }
  };
  auto integer = [&](const std::string& path) -> std::optional<int> {
    auto v = num(path);
    if (!v) return std::nullopt;
    if (*v != std::floor(*v)) throw ConfigError("config: " + path + " must be an integer");
    return static_cast<int>(*v);
  };

  if (auto s = str("system/species_registry")) {
    std::filesystem::path p = *s;
    c.species_registry = p.is_relative() ? base / p : p;
  }
  if (auto v = num("system/reduced_mass_me")) c.reduced_mass = *v;
  if (auto v = num("system/pi_degeneracy_factor")) c.pi_degeneracy_factor = *v;
  for (const char* lab : {"X", "A", "B"}) {
    std::string sec = std::string("surface.") + lab;
    if (!tree.get_child_optional(pt::ptree::path_type(sec, '/'))) continue;
    SurfaceOverride o;
    o.r_e_angstrom = num(sec + "/r_e_angstrom");
    o.d_e_cm = num(sec + "/d_e_cm");
    o.omega_e_cm = num(sec + "/omega_e_cm");
    o.e_min_hartree = num(sec + "/e_min_hartree");
    c.surfaces[lab] = o;
  }
  if (auto v = num("grid/r_box_angstrom")) c.r_box_angstrom = *v;
  if (auto v = integer("grid/points")) c.grid_points = *v;
  if (auto v = integer("grid/panels")) c.panels = *v;
  if (auto v = integer("grid/quad_order")) c.quad_order = *v;
  if (auto s = str("grid/continuum")) {
    if (*s == "direct")
      c.continuum = ContinuumRule::direct;
    else if (*s == "endpoint")
      c.continuum = ContinuumRule::endpoint;
    else
      throw ConfigError("config: grid/continuum must be direct or endpoint");
  }
  if (auto v = integer("dvr/points")) c.dvr_points = *v;
  if (auto v = num("electron_transfer/alpha")) c.alpha = *v;
  if (auto v = num("electron_transfer/c_bar")) c.c_bar = *v;
  if (auto v = num("electron_transfer/d_hartree")) c.d_hartree = *v;
  if (auto v = integer("electron_transfer/ell_max")) c.ell_max = *v;
  if (auto v = num("electron_transfer/term_tol")) c.term_tol = *v;
  if (auto s = str("run/temperatures")) c.temperatures = parse_list(*s, "run/temperatures");
  if (auto s = str("run/energies")) c.energies = parse_energy_grid(*s);
  if (auto s = str("run/format")) c.format = *s;
  if (auto s = str("run/output")) c.output = *s;
  c.validate();
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path);
}

// Explicit path, else $ICEC_CONFIG, else built-in defaults.
inline RunConfig resolve_config(const std::string& path) {
  if (!path.empty()) return load_config(path);
  if (const char* env = std::getenv("ICEC_CONFIG"); env && *env) return load_config(env);
  RunConfig c;
  c.validate();
  return c;
}

// He+-capturing channels start near zero energy, Ne+-capturing ones near the threshold.
inline EnergyGrid default_energy_grid(const TransitionChannel& c) {
  if (c.acceptor->name == "He") return {0.01, 8, 0.01};
  return {3, 8, 0.01};
}

}  // namespace icec
