#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <icec/config.hpp>
#include <icec/engine.hpp>
#include <icec/output.hpp>
#include <icec/validate.hpp>
#include <iostream>
#include <optional>
#include <string>

using namespace icec;

namespace {

struct Options {
  std::string config, channel, energies, temperatures, output, format, surface;
  int nu_i = 0;
  double energy = 0, emax_ev = 1.0;
};

struct Context {
  RunConfig cfg;
  std::vector<TransitionChannel> catalog;
};

Context setup(const Options& o) {
  Context c{resolve_config(o.config), {}};
  if (!o.format.empty()) c.cfg.format = o.format;
  if (c.cfg.format != "csv" && c.cfg.format != "json") throw ConfigError("--format must be csv or json");
  auto reg = load_species_registry(c.cfg.species_registry);
  c.catalog = transition_catalog(c.cfg.build_surfaces(), reg, c.cfg.pi_degeneracy_factor);
  return c;
}

std::string output_path(const Options& o, const Context& c) { return o.output.empty() ? c.cfg.output : o.output; }

std::vector<double> energy_grid(const Options& o, const Context& c, const TransitionChannel& ch) {
  EnergyGrid g = !o.energies.empty() ? parse_energy_grid(o.energies)
                 : c.cfg.energies    ? *c.cfg.energies
                                     : default_energy_grid(ch);
  return g.values_ev();
}

void check_nu_i(const TransitionChannel& ch, int nu_i) {
  int nb = bound_state_count(*ch.initial);
  if (nu_i < 0 || nu_i >= nb - 1)
    throw ConfigError(fmt::format("--nu-i must be in [0, {}] for channel {} (level {} is box-unreliable)", nb - 2,
                                  ch.name, nb - 1));
}

int cmd_states(const Options& o) {
  auto c = setup(o);
  auto surfaces = c.cfg.build_surfaces();
  auto it = std::find_if(surfaces.begin(), surfaces.end(), [&](auto& s) { return s.label == o.surface; });
  if (it == surfaces.end()) throw ConfigError("unknown surface '" + o.surface + "' (expected X, A or B)");
  auto opt = c.cfg.engine_options();
  auto quad = default_quadrature(opt.grid, opt.panels);
  Table t;
  t.metadata = run_metadata(c.cfg);
  t.metadata.emplace_back("surface", it->label);
  t.columns = {"n", "E_above_min_cm", "E_rel_asymptote_cm", "box_unreliable"};
  for (int n = 0; n < bound_state_count(*it); ++n) {
    double e = bound_energy(*it, n);
    t.rows.push_back({double(n), units::to_cm(e), units::to_cm(e - it->d_e), n == bound_state_count(*it) - 1 ? 1.0 : 0.0});
  }
  int nbox = 0;
  if (o.emax_ev > 0) {
    MorseShooter sh(*it, opt.grid.r_box, MorseShooter::start_point(*it, it->d_e + units::from_ev(o.emax_ev)));
    nbox = std::max(0, box_count_below(sh, it->d_e + units::from_ev(o.emax_ev)) - bound_state_count(*it));
  }
  t.metadata.emplace_back("box_states_below_E_max", fmt::format("{} (E_max = {} eV above the asymptote)", nbox, o.emax_ev));
  write_table(t, output_path(o, c), c.cfg.format);
  return 0;
}

int cmd_xsec(const Options& o) {
  auto c = setup(o);
  const auto& ch = find_channel(c.catalog, o.channel);
  check_nu_i(ch, o.nu_i);
  auto eps = energy_grid(o, c, ch);
  IcecEngine eng(ch, c.cfg.et_params(ch), c.cfg.engine_options(), units::from_ev(eps.back()));
  Table t;
  t.metadata = run_metadata(c.cfg);
  t.metadata.emplace_back("channel", ch.name);
  t.metadata.emplace_back("nu_i", std::to_string(o.nu_i));
  t.columns = {"epsilon_eV", "sigma_bb_Mb", "sigma_bd_Mb", "sigma_total_Mb", "sigma_PR_Mb"};
  for (double e : eps) {
    auto s = eng.total(units::from_ev(e), o.nu_i);
    double bb = units::to_mb(s.bb), bd = units::to_mb(s.bd);
    t.rows.push_back({e, bb, bd, bb + bd, units::to_mb(pr_cross_section(*ch.acceptor, units::from_ev(e)))});
  }
  write_table(t, output_path(o, c), c.cfg.format);
  return 0;
}

int cmd_thermal(const Options& o) {
  auto c = setup(o);
  const auto& ch = find_channel(c.catalog, o.channel);
  auto temps = o.temperatures.empty() ? c.cfg.temperatures : parse_list(o.temperatures, "--temperatures");
  for (double t : temps)
    if (!(t >= 0)) throw ConfigError("temperatures must be >= 0");
  auto eps = energy_grid(o, c, ch);
  IcecEngine eng(ch, c.cfg.et_params(ch), c.cfg.engine_options(), units::from_ev(eps.back()));
  Table t;
  t.metadata = run_metadata(c.cfg);
  t.metadata.emplace_back("channel", ch.name);
  t.columns = {"epsilon_eV"};
  for (double T : temps) t.columns.push_back(fmt::format("sigma_{}K_Mb", T));
  t.columns.push_back("sigma_PR_Mb");
  for (double e : eps) {
    std::vector<double> row{e};
    for (double s : eng.thermal(units::from_ev(e), temps)) row.push_back(units::to_mb(s));
    row.push_back(units::to_mb(pr_cross_section(*ch.acceptor, units::from_ev(e))));
    t.rows.push_back(row);
  }
  write_table(t, output_path(o, c), c.cfg.format);
  return 0;
}

int cmd_spectrum(const Options& o) {
  auto c = setup(o);
  const auto& ch = find_channel(c.catalog, o.channel);
  check_nu_i(ch, o.nu_i);
  if (!(o.energy > 0)) throw ConfigError("--energy must be positive (eV)");
  IcecEngine eng(ch, c.cfg.et_params(ch), c.cfg.engine_options(), units::from_ev(o.energy));
  auto sp = eng.spectrum(units::from_ev(o.energy), o.nu_i);
  auto meta = run_metadata(c.cfg);
  meta.emplace_back("channel", ch.name);
  meta.emplace_back("epsilon_eV", fmt::format("{}", o.energy));
  meta.emplace_back("nu_i", std::to_string(o.nu_i));
  meta.emplace_back("closed", sp.closed ? "yes" : "no");
  meta.emplace_back("sigma_PR_Mb", fmt::format("{}", units::to_mb(sp.pr_reference)));
  meta.emplace_back("display_threshold_Mb", fmt::format("{}", units::to_mb(sp.display_threshold)));
  meta.emplace_back("sigma_total_bb_Mb", fmt::format("{}", units::to_mb(sp.sigma_total_bb)));
  meta.emplace_back("sigma_total_bd_Mb", fmt::format("{}", units::to_mb(sp.sigma_total_bd)));

  std::string prefix = output_path(o, c);
  if (prefix.empty()) prefix = "spectrum_" + ch.name;
  std::string ext = c.cfg.format == "json" ? ".json" : ".csv";

  Table sticks{meta, {"epsilon_prime_eV", "sigma_Mb"}, {}};
  for (auto [e, s] : sp.sticks) sticks.rows.push_back({units::to_ev(e), units::to_mb(s)});
  write_table(sticks, prefix + "_sticks" + ext, c.cfg.format);

  Table cont{meta, {"epsilon_prime_eV", "dsigma_dE_Mb_per_eV"}, {}};
  for (auto [e, s] : sp.continuum) cont.rows.push_back({units::to_ev(e), units::to_mb(s) / units::hartree_ev});
  write_table(cont, prefix + "_continuum" + ext, c.cfg.format);

  if (ch.electron_transfer && !sp.closed) {
    Table refl{meta, {"epsilon_prime_eV", "relative_intensity"}, {}};
    for (auto [e, v] : eng.reflection_spectrum(units::from_ev(o.energy), o.nu_i))
      refl.rows.push_back({units::to_ev(e), v});
    write_table(refl, prefix + "_reflection" + ext, c.cfg.format);
  }
  return 0;
}

int cmd_validate(const Options& o) {
  auto cfg = resolve_config(o.config);
  bool ok = true;
  for (const auto& r : run_validation(cfg)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interatomic Coulombic electron capture cross sections for (HeNe)+"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "config file (default: $ICEC_CONFIG, then built-in defaults)");
    s->add_option("--output", o.output, "output file (spectrum: file prefix); default stdout");
    s->add_option("--format", o.format, "csv or json");
  };

  auto* states = app.add_subcommand("states", "list bound levels of a surface");
  states->add_option("surface", o.surface, "X, A or B")->required();
  states->add_option("--emax", o.emax_ev, "count box states up to this energy above the asymptote (eV)");
  common(states);

  auto* xsec = app.add_subcommand("xsec", "cross section versus incoming electron energy");
  xsec->add_option("--channel", o.channel, "X-B, B-X, A-B or B-A")->required();
  xsec->add_option("--nu-i", o.nu_i, "initial vibrational level");
  xsec->add_option("--energies", o.energies, "start:stop:step in eV");
  common(xsec);

  auto* thermal = app.add_subcommand("thermal", "Boltzmann-averaged cross sections");
  thermal->add_option("--channel", o.channel, "X-B, B-X, A-B or B-A")->required();
  thermal->add_option("--temperatures", o.temperatures, "comma separated, K");
  thermal->add_option("--energies", o.energies, "start:stop:step in eV");
  common(thermal);

  auto* spectrum = app.add_subcommand("spectrum", "outgoing electron spectrum");
  spectrum->add_option("--channel", o.channel, "X-B, B-X, A-B or B-A")->required();
  spectrum->add_option("--energy", o.energy, "incoming electron energy, eV")->required();
  spectrum->add_option("--nu-i", o.nu_i, "initial vibrational level");
  common(spectrum);

  auto* validate = app.add_subcommand("validate", "run the oracle checks");
  validate->add_option("--config", o.config, "config file");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*states) return cmd_states(o);
    if (*xsec) return cmd_xsec(o);
    if (*thermal) return cmd_thermal(o);
    if (*spectrum) return cmd_spectrum(o);
    if (*validate) return cmd_validate(o);
  } catch (const icec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
