#pragma once

#include <icec/channels.hpp>
#include <icec/config.hpp>
#include <icec/engine.hpp>

namespace icec::testing {

inline const std::vector<MorseSurface>& surfaces() {
  static const auto s = default_surfaces(default_reduced_mass());
  return s;
}

inline const MorseSurface& surface(const std::string& label) {
  for (const auto& s : surfaces())
    if (s.label == label) return s;
  throw std::out_of_range(label);
}

inline const SpeciesRegistry& registry() {
  static const auto r = load_species_registry(default_data_dir() / "species.ini");
  return r;
}

inline const std::vector<TransitionChannel>& catalog() {
  static const auto c = transition_catalog(surfaces(), registry());
  return c;
}

inline const TransitionChannel& channel(const std::string& name) { return find_channel(catalog(), name); }

// Engines are expensive to build; share one per channel across tests.
inline const IcecEngine& engine(const std::string& name, double e_limit_ev = 8.0) {
  static std::map<std::pair<std::string, double>, std::unique_ptr<IcecEngine>> cache;
  auto key = std::make_pair(name, e_limit_ev);
  auto& slot = cache[key];
  if (!slot) {
    const auto& ch = channel(name);
    slot = std::make_unique<IcecEngine>(ch, default_et_params(ch), EngineOptions{}, units::from_ev(e_limit_ev));
  }
  return *slot;
}

inline double ev(double e) { return units::from_ev(e); }

}  // namespace icec::testing
