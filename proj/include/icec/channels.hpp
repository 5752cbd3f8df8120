#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "atomdata.hpp"
#include "error.hpp"
#include "morse.hpp"

namespace icec {

// He-Ne cation surfaces; mu in electron masses.
inline std::vector<MorseSurface> default_surfaces(double mu) {
  using namespace units;
  return {
      {"X", from_angstrom(1.43), from_cm(5200), from_cm(911), -130.94349, mu, "Ne", Symmetry::sigma},
      {"A", from_angstrom(2.42), from_cm(283), from_cm(152), -130.92176, mu, "Ne", Symmetry::pi},
      {"B", from_angstrom(2.66), from_cm(343), from_cm(152), -130.80754, mu, "He", Symmetry::sigma},
  };
}

inline double default_reduced_mass() { return units::reduced_mass_amu(4.002602, 20.1797); }

enum class Mechanism { energy_transfer = 1, electron_transfer = 2 };

struct TransitionChannel {
  std::string name;
  std::shared_ptr<const MorseSurface> initial, final;
  std::shared_ptr<const AtomicSpecies> acceptor, donor;
  bool energy_transfer = true;
  bool electron_transfer = false;
  double delta_ip = 0;  // IP of the neutral acceptor minus IP of the donor
  double degeneracy_factor = 1;

  bool has(Mechanism m) const {
    return m == Mechanism::energy_transfer ? energy_transfer : electron_transfer;
  }
};

// Charge moves from the initial surface's charged atom (acceptor) to the final one's (donor).
inline std::vector<TransitionChannel> transition_catalog(const std::vector<MorseSurface>& surfaces,
                                                         const SpeciesRegistry& species, double pi_factor = 1) {
  for (const char* need : {"X", "A", "B"})
    if (std::none_of(surfaces.begin(), surfaces.end(), [&](auto& s) { return s.label == need; }))
      throw ConfigError(std::string("missing surface ") + need);
  std::vector<TransitionChannel> out;
  for (const auto& si : surfaces) {
    for (const auto& sf : surfaces) {
      if (si.label == sf.label || si.asymptote_tag == sf.asymptote_tag) continue;
      auto ai = species.find(si.asymptote_tag), df = species.find(sf.asymptote_tag);
      if (ai == species.end()) throw ConfigError("missing species " + si.asymptote_tag);
      if (df == species.end()) throw ConfigError("missing species " + sf.asymptote_tag);
      TransitionChannel c;
      c.name = si.label + "-" + sf.label;
      c.initial = std::make_shared<const MorseSurface>(si);
      c.final = std::make_shared<const MorseSurface>(sf);
      c.acceptor = std::make_shared<const AtomicSpecies>(ai->second);
      c.donor = std::make_shared<const AtomicSpecies>(df->second);
      c.energy_transfer = true;
      // orbital overlap with the s-like partner survives only between sigma states
      c.electron_transfer = si.symmetry == Symmetry::sigma && sf.symmetry == Symmetry::sigma;
      c.delta_ip = c.acceptor->ip - c.donor->ip;
      c.degeneracy_factor = sf.symmetry == Symmetry::pi ? pi_factor : 1.0;
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline const TransitionChannel& find_channel(const std::vector<TransitionChannel>& cat, std::string name) {
  for (auto& ch : name) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const auto& c : cat)
    if (c.name == name) return c;
  throw ConfigError("unknown channel '" + name + "' (expected X-B, B-X, A-B or B-A)");
}

// Vibrational energies relative to each surface's own asymptote.
inline double outgoing_energy(const TransitionChannel& c, double epsilon, double e_i, double e_f) {
  return epsilon + c.delta_ip - (e_f - e_i);
}

inline double max_dissociation_energy(const TransitionChannel& c, double epsilon, double e_i) {
  return epsilon + c.delta_ip + e_i;
}

}  // namespace icec
