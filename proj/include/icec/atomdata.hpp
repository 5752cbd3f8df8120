#pragma once

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "units.hpp"

namespace icec {

// Photon energies in hartree, cross sections in bohr^2.
struct PhotoTable {
  std::vector<double> energy;
  std::vector<double> sigma;
  std::string provenance;

  std::size_t size() const { return energy.size(); }
};

namespace detail {

inline std::string trim(std::string s) {
  auto issp = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
  return s;
}

inline double parse_number(const std::string& field, int line, const std::string& what) {
  std::string t = trim(field);
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" + t + "'", line);
  return v;
}

}  // namespace detail

inline PhotoTable parse_pi_table(std::istream& in, const std::string& name = "<stream>") {
  PhotoTable t;
  std::string line;
  int ln = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string s = detail::trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      std::string c = detail::trim(s.substr(1));
      if (!c.empty()) t.provenance += (t.provenance.empty() ? "" : " ") + c;
      continue;
    }
    if (!header) {
      if (s != "photon_energy_eV,sigma_Mb")
        throw ParseError(name + " line " + std::to_string(ln) + ": expected header photon_energy_eV,sigma_Mb", ln);
      header = true;
      continue;
    }
    auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
      throw ParseError(name + " line " + std::to_string(ln) + ": expected two fields", ln);
    double e = detail::parse_number(s.substr(0, comma), ln, "photon energy");
    double sg = detail::parse_number(s.substr(comma + 1), ln, "cross section");
    if (e <= 0) throw ParseError(name + " line " + std::to_string(ln) + ": non-positive photon energy", ln);
    if (sg < 0) throw ParseError(name + " line " + std::to_string(ln) + ": negative cross section", ln);
    if (!t.energy.empty() && units::from_ev(e) <= t.energy.back())
      throw ParseError(name + " line " + std::to_string(ln) + ": photon energies not strictly increasing", ln);
    t.energy.push_back(units::from_ev(e));
    t.sigma.push_back(units::from_mb(sg));
  }
  if (!header) throw ParseError(name + ": missing header", ln);
  if (t.energy.empty()) throw ParseError(name + ": no data rows", ln);
  return t;
}

inline PhotoTable load_pi_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open photoionization table " + path.string());
  return parse_pi_table(in, path.string());
}

struct AtomicSpecies {
  std::string name;
  double ip = 0;  // hartree
  int g_neutral = 1;
  int g_ion = 1;
  double r_cov = 0;  // bohr
  int orbital_degeneracy = 1;
  PhotoTable pi_table;

  void validate() const {
    if (!(ip > 0)) throw ConfigError(name + ": ionization potential must be positive");
    if (!(r_cov > 0)) throw ConfigError(name + ": covalent radius must be positive");
    if (orbital_degeneracy < 1 || g_neutral < 1 || g_ion < 1)
      throw ConfigError(name + ": degeneracies must be >= 1");
    if (pi_table.size() == 0) throw ConfigError(name + ": empty photoionization table");
    if (pi_table.energy.front() < ip * (1 - 1e-12))
      throw ConfigError(name + ": photoionization table starts below the ionization potential");
  }
};

// Log-log interpolation; omega in hartree, result in bohr^2.
inline double pi_cross_section(const AtomicSpecies& sp, double omega, bool per_orbital) {
  const auto& t = sp.pi_table;
  if (omega < sp.ip) throw ThresholdError(sp.name + ": photon energy below the ionization potential");
  if (omega < t.energy.front() || omega > t.energy.back())
    throw ExtrapolationError(sp.name + ": photon energy " + std::to_string(units::to_ev(omega)) +
                             " eV outside the photoionization table");
  auto it = std::lower_bound(t.energy.begin(), t.energy.end(), omega);
  std::size_t j = it - t.energy.begin();
  double s;
  if (*it == omega) {
    s = t.sigma[j];
  } else {
    double e0 = t.energy[j - 1], e1 = t.energy[j], s0 = t.sigma[j - 1], s1 = t.sigma[j];
    if (s0 == 0 || s1 == 0) {
      s = s0 + (s1 - s0) * (omega - e0) / (e1 - e0);
    } else {
      double x = std::log(omega / e0) / std::log(e1 / e0);
      s = s0 * std::exp(x * std::log(s1 / s0));
    }
  }
  return per_orbital ? s / sp.orbital_degeneracy : s;
}

inline double milne_factor(const AtomicSpecies& sp, double epsilon) {
  double omega = epsilon + sp.ip;
  double ck = units::speed_of_light * std::sqrt(2 * epsilon);
  return static_cast<double>(sp.g_neutral) / sp.g_ion * (omega / ck) * (omega / ck);
}

// Photorecombination onto the cation of `acceptor_neutral` by detailed balance.
inline double pr_cross_section(const AtomicSpecies& acceptor_neutral, double epsilon) {
  if (!(epsilon > 0)) throw DomainError("photorecombination needs a positive electron energy");
  return milne_factor(acceptor_neutral, epsilon) * pi_cross_section(acceptor_neutral, epsilon + acceptor_neutral.ip, false);
}

inline double gaussian_width(const AtomicSpecies& sp, double alpha = 1.6) {
  if (!(alpha > 0)) throw DomainError("Gaussian width scale must be positive");
  return alpha * sp.r_cov;
}

using SpeciesRegistry = std::map<std::string, AtomicSpecies>;

// INI registry: one section per species; relative table paths resolve against the registry file.
inline SpeciesRegistry load_species_registry(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("species registry: " + std::string(e.what()));
  }
  static const std::set<std::string> keys{"ip_eV", "g_neutral", "g_ion", "r_cov_angstrom", "orbital_degeneracy",
                                          "pi_table_path", "name"};
  SpeciesRegistry reg;
  for (const auto& [section, body] : tree) {
    for (const auto& [k, v] : body)
      if (!keys.count(k)) throw ConfigError("species registry [" + section + "]: unknown key " + k);
    auto need = [&](const std::string& k) {
      auto v = body.get_optional<std::string>(k);
      if (!v) throw ConfigError("species registry [" + section + "]: missing key " + k);
      return *v;
    };
    auto num = [&](const std::string& k) {
      try {
        return std::stod(need(k));
      } catch (const std::logic_error&) {
        throw ConfigError("species registry [" + section + "]: bad value for " + k);
      }
    };
    AtomicSpecies sp;
    sp.name = body.get<std::string>("name", section);
    sp.ip = units::from_ev(num("ip_eV"));
    sp.g_neutral = static_cast<int>(num("g_neutral"));
    sp.g_ion = static_cast<int>(num("g_ion"));
    sp.r_cov = units::from_angstrom(num("r_cov_angstrom"));
    sp.orbital_degeneracy = static_cast<int>(num("orbital_degeneracy"));
    std::filesystem::path tp = need("pi_table_path");
    if (tp.is_relative()) tp = path.parent_path() / tp;
    sp.pi_table = load_pi_table(tp);
    sp.validate();
    reg[sp.name] = std::move(sp);
  }
  return reg;
}

}  // namespace icec
