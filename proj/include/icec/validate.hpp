#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "config.hpp"
#include "continuum.hpp"
#include "dvr.hpp"
#include "engine.hpp"

namespace icec {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Oracle suite behind `icec validate`.
inline std::vector<CheckResult> run_validation(const RunConfig& cfg) {
  std::vector<CheckResult> out;
  auto surfaces = cfg.build_surfaces();
  auto opt = cfg.engine_options();
  auto quad = default_quadrature(opt.grid, opt.panels);

  for (const auto& s : surfaces) {
    int nb = bound_state_count(s);
    auto dvr = dvr_oracle(s, opt.grid.r_box, cfg.dvr_points, std::min(nb + 2, cfg.dvr_points));
    double worst = 0;
    for (int n = 0; n + 1 < nb; ++n)
      worst = std::max(worst, std::abs(units::to_cm(dvr.energies[n] - bound_energy(s, n))));
    out.push_back({"dvr_agreement_" + s.label, worst < 0.1,
                   fmt::format("max |E_analytic - E_dvr| = {:.3e} cm^-1 over {} levels (N = {})", worst, nb - 1,
                               cfg.dvr_points)});

    // count in a box wide enough to hold even a barely bound top level
    auto wide = dvr_oracle(s, units::from_angstrom(50.0), std::max(cfg.dvr_points, 2), std::min(nb + 2, cfg.dvr_points));
    int cnt = dvr_count_below(wide, s.d_e);
    out.push_back({"bound_count_" + s.label, cnt == nb,
                   fmt::format("analytic {} vs DVR {} below D_e (50 angstrom box)", nb, cnt)});

    auto bound = bound_states(s, opt.grid, quad);
    auto box = dissociative_states(s, BoxRange{60, {}}, opt.grid, quad);
    std::vector<std::vector<double>> tab;
    for (const auto& v : bound)
      if (!v.box_unreliable) tab.push_back(v.sample(quad.nodes()));
    for (const auto& v : box) tab.push_back(v.sample(quad.nodes()));
    double dev = 0;
    for (std::size_t i = 0; i < tab.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double o = 0;
        for (std::size_t k = 0; k < quad.size(); ++k) o += quad.weights()[k] * tab[i][k] * tab[j][k];
        dev = std::max(dev, std::abs(o - (i == j ? 1.0 : 0.0)));
      }
    out.push_back({"orthonormality_" + s.label, dev < 1e-6,
                   fmt::format("max |<m|n> - delta| = {:.3e} over {} states", dev, tab.size())});
  }

  auto reg = load_species_registry(cfg.species_registry);
  for (const auto& [name, sp] : reg) {
    double worst = 0;
    const auto& t = sp.pi_table;
    for (std::size_t i = 0; i < t.size(); ++i) {
      double eps = t.energy[i] - sp.ip;
      if (eps <= 0) continue;
      double back = pr_cross_section(sp, eps) / milne_factor(sp, eps);
      double ref = pi_cross_section(sp, t.energy[i], false);
      if (ref > 0) worst = std::max(worst, std::abs(back / ref - 1));
    }
    out.push_back({"milne_roundtrip_" + name, worst < 1e-12, fmt::format("max relative deviation {:.3e}", worst)});
  }

  auto cat = transition_catalog(surfaces, reg, cfg.pi_degeneracy_factor);
  const auto& ch = find_channel(cat, "B-X");
  auto finer = opt;
  finer.panels *= 2;
  IcecEngine e1(ch, cfg.et_params(ch), opt, units::from_ev(1.0));
  IcecEngine e2(ch, cfg.et_params(ch), finer, units::from_ev(1.0));
  auto a = e1.total(units::from_ev(1.0), 0), b = e2.total(units::from_ev(1.0), 0);
  double rel = std::max(std::abs(b.bb / a.bb - 1), std::abs(b.bd / a.bd - 1));
  out.push_back({"quadrature_convergence", rel < 1e-5,
                 fmt::format("B-X at 1 eV, relative change on panel doubling {:.3e}", rel)});
  return out;
}

}  // namespace icec
