#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <icec/dvr.hpp>
#include <icec/engine.hpp>
#include <iostream>

#include "support.hpp"

using namespace icec;
using icec::testing::channel;
using icec::testing::engine;
using icec::testing::ev;
using icec::testing::registry;
using icec::testing::surface;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::cout << fmt::format("criterion {} {}: {}", id, ok ? "PASS" : "FAIL", what) << std::endl;
  if (!ok) ++failures;
}

void info(const std::string& what) { std::cout << "  info: " << what << std::endl; }

int interior_minima(const std::vector<std::pair<double, double>>& curve) {
  int n = 0;
  for (std::size_t j = 1; j + 1 < curve.size(); ++j)
    if (curve[j].second < curve[j - 1].second && curve[j].second < curve[j + 1].second) ++n;
  return n;
}

double peak_position(const std::vector<std::pair<double, double>>& curve) {
  return std::max_element(curve.begin(), curve.end(), [](auto& a, auto& b) { return a.second < b.second; })->first;
}

void morse_oracle() {
  auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const char* lab : {"X", "A", "B"}) {
    const auto& s = surface(lab);
    int nb = bound_state_count(s);
    auto r = dvr_oracle(s, units::from_angstrom(10), 3000, nb + 2);
    double worst = 0;
    for (int n = 0; n + 1 < nb; ++n) worst = std::max(worst, std::abs(units::to_cm(r.energies[n] - bound_energy(s, n))));
    ok = ok && worst < 0.1;
    detail += fmt::format("{}: max dev {:.2e} cm-1, ", lab, worst);
    info(fmt::format("{} top level analytic {:.4f} cm-1, DVR {:.4f} cm-1, {} DVR levels below D_e in the 10 A box", lab,
                     units::to_cm(bound_energy(s, nb - 1)), units::to_cm(r.energies[nb - 1]),
                     dvr_count_below(r, s.d_e)));
  }
  double elapsed = seconds_since(t0);
  std::vector<int> analytic, wide;
  for (const char* lab : {"X", "A", "B"}) {
    const auto& s = surface(lab);
    analytic.push_back(bound_state_count(s));
    wide.push_back(dvr_count_below(dvr_oracle(s, units::from_angstrom(50), 3000, bound_state_count(s) + 2), s.d_e));
  }
  bool counts = analytic == std::vector<int>{11, 4, 5} && wide == analytic;
  report(1, ok && counts && elapsed < 10,
         detail + fmt::format("counts analytic {}/{}/{}, DVR (50 A box) {}/{}/{}, {:.1f} s", analytic[0], analytic[1],
                              analytic[2], wide[0], wide[1], wide[2], elapsed));
}

void orthonormality() {
  auto t0 = Clock::now();
  RadialGrid g;
  auto q = default_quadrature(g);
  bool ok = true;
  std::string detail;
  for (const char* lab : {"X", "A", "B"}) {
    const auto& s = surface(lab);
    std::vector<std::vector<double>> tab;
    for (const auto& v : bound_states(s, g, q))
      if (!v.box_unreliable) tab.push_back(v.sample(q.nodes()));
    int nbox = 200 - static_cast<int>(tab.size());
    for (const auto& v : dissociative_states(s, BoxRange{nbox, {}}, g, q)) tab.push_back(v.sample(q.nodes()));
    double worst = 0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < tab.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double o = 0;
        for (std::size_t k = 0; k < q.size(); ++k) o += q.weights()[k] * tab[i][k] * tab[j][k];
        double dev = std::abs(o - (i == j ? 1.0 : 0.0));
        if (dev > worst) worst = dev, wi = i, wj = j;
      }
    ok = ok && worst < 1e-6 && tab.size() >= 200;
    detail += fmt::format("{}: {} states, max {:.2e} at ({},{}); ", lab, tab.size(), worst, wi, wj);
  }
  double elapsed = seconds_since(t0);
  report(2, ok && elapsed < 30, detail + fmt::format("{:.1f} s", elapsed));
}

void milne() {
  double worst = 0;
  for (const auto& [name, sp] : registry())
    for (std::size_t i = 0; i < sp.pi_table.size(); ++i) {
      double eps = sp.pi_table.energy[i] - sp.ip;
      if (eps <= 0) continue;
      double back = pr_cross_section(sp, eps) / milne_factor(sp, eps);
      worst = std::max(worst, std::abs(back / sp.pi_table.sigma[i] - 1));
    }
  report(3, worst < 1e-12, fmt::format("max relative deviation {:.2e} over He and Ne tables", worst));
}

void threshold() {
  const auto& e = engine("X-B");
  double below = 0;
  for (int i = 1; i < 350; ++i) below = std::max(below, e.total(ev(0.01 * i), 0).total());
  double at38 = e.total(ev(3.8), 0).total();
  auto onset = [&](double temp) {
    for (int i = 0; i <= 150; ++i) {
      double eps = 2.5 + 0.01 * i;
      if (e.thermal(ev(eps), temp) > 1e-3 * pr_cross_section(*e.channel().acceptor, ev(eps))) return eps;
    }
    return 99.0;
  };
  double hot = onset(298), cold = onset(15);
  report(4, below == 0 && at38 > 0 && hot < cold,
         fmt::format("max below 3.5 eV = {}, sigma(3.8 eV) = {:.3e} Mb, onset 298 K {:.2f} eV < 15 K {:.2f} eV", below,
                     units::to_mb(at38), hot, cold));
  double first = 0;
  for (int i = 350; i <= 380; ++i)
    if (e.total(ev(0.01 * i), 0).total() > 0) {
      first = 0.01 * i;
      break;
    }
  info(fmt::format("first grid energy with sigma > 0 for nu_i = 0: {:.2f} eV; onsets above use the 1e-3 sigma_PR floor", first));
}

void dominance() {
  const auto& bx = engine("B-X");
  double lo = 1e300, hi = 0;
  for (double eps : {0.01, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
    auto t = bx.total(ev(eps), 0);
    lo = std::min(lo, t.bb / t.bd);
    hi = std::max(hi, t.bb / t.bd);
  }
  bool a = lo >= 10 && hi <= 1000;
  auto xb = engine("X-B").total(ev(5), 0);
  bool b = xb.bd / xb.bb >= 1e6;
  double tot = bx.total(ev(1), 0).total(), pr = pr_cross_section(*bx.channel().acceptor, ev(1));
  bool c = tot / pr >= 1e3;
  report(5, a && b && c,
         fmt::format("B-X bb/bd in [{:.0f}, {:.0f}]; X-B bd/bb at 5 eV {:.2e}; B-X / sigma_PR at 1 eV {:.2e}", lo, hi,
                     xb.bd / xb.bb, tot / pr));
  double en = 0, el = 0;
  for (const auto& t : bx.final_terms(ev(1), 0))
    if (t.open) en += t.en, el += t.el;
  info(fmt::format("B-X at 1 eV: electron/energy transfer = {:.1f} (calibration-dependent, CALIBRATION-REQUIRED {})",
                   el / en, bx.params().calibration_required() ? "yes" : "no"));
}

void temperature() {
  const auto& e = engine("B-X");
  double lo = 1e300, hi = 0;
  for (int i = 0; i <= 32; ++i) {
    double eps = i == 0 ? 0.01 : 0.25 * i;
    auto s = e.thermal(ev(eps), std::vector<double>{15, 298});
    lo = std::min(lo, s[0] / s[1]);
    hi = std::max(hi, s[0] / s[1]);
  }
  report(6, lo >= 1.1 && hi <= 1.8, fmt::format("sigma(15 K)/sigma(298 K) in [{:.3f}, {:.3f}] over 0.01-8 eV", lo, hi));
}

void spectrum_structure() {
  const auto& e = engine("X-B");
  auto s0 = e.spectrum(ev(5), 0), s5 = e.spectrum(ev(5), 5);
  int minima = interior_minima(s5.continuum);
  double shift = units::to_ev(s5.continuum.back().first - s0.continuum.back().first);
  auto refl = e.reflection_spectrum(ev(5), 5);
  int rmin = interior_minima(refl);
  double pf = units::to_ev(peak_position(s5.continuum)), pr = units::to_ev(peak_position(refl));
  bool ok = minima == 5 && std::abs(shift - 0.4) <= 0.1 && rmin == minima && pr > pf;
  report(7, ok,
         fmt::format("5 eV: continuum minima {}, shift {:.3f} eV, reflection minima {}, peaks full {:.3f} / "
                     "reflection {:.3f} eV",
                     minima, shift, rmin, pf, pr));
  auto s8 = e.spectrum(ev(8), 5);
  auto r8 = e.reflection_spectrum(ev(8), 5);
  info(fmt::format("8 eV: continuum minima {}, reflection minima {}, peaks full {:.3f} / reflection {:.3f} eV",
                   interior_minima(s8.continuum), interior_minima(r8), units::to_ev(peak_position(s8.continuum)),
                   units::to_ev(peak_position(r8))));
}

void consistency() {
  double spec = 0;
  for (const char* name : {"B-X", "X-B", "A-B", "B-A"}) {
    const auto& e = engine(name);
    for (double eps : {1.0, 4.0, 7.5})
      for (int v : {0, 2}) {
        auto sp = e.spectrum(ev(eps), v);
        auto t = e.total(ev(eps), v);
        if (t.bb > 0) spec = std::max(spec, std::abs(sp.sigma_total_bb / t.bb - 1));
        if (t.bd > 0) spec = std::max(spec, std::abs(sp.sigma_total_bd / t.bd - 1));
      }
  }

  const auto& xb = channel("X-B");
  EngineOptions wide;
  wide.grid.r_box *= 2;
  wide.grid.points *= 2;
  IcecEngine big(xb, default_et_params(xb), wide, ev(5));
  double box = std::abs(big.total(ev(5), 0).bd / engine("X-B").total(ev(5), 0).bd - 1);

  double quad = 0;
  EngineOptions fine;
  fine.panels *= 2;
  for (const auto& [name, eps, v] : {std::tuple{"B-X", 1.0, 0}, std::tuple{"X-B", 5.0, 5}, std::tuple{"A-B", 5.0, 0},
                                     std::tuple{"B-A", 2.0, 1}}) {
    const auto& ch = channel(name);
    IcecEngine a(ch, default_et_params(ch), EngineOptions{}, ev(eps));
    IcecEngine b(ch, default_et_params(ch), fine, ev(eps));
    auto ta = a.total(ev(eps), v), tb = b.total(ev(eps), v);
    if (ta.bb > 0) quad = std::max(quad, std::abs(tb.bb / ta.bb - 1));
    if (ta.bd > 0) quad = std::max(quad, std::abs(tb.bd / ta.bd - 1));
  }

  auto t0 = Clock::now();
  for (const char* name : {"B-X", "X-B", "A-B", "B-A"}) {
    const auto& ch = channel(name);
    IcecEngine e(ch, default_et_params(ch), EngineOptions{}, ev(8));
    for (int i = 1; i <= 800; ++i) e.total(ev(0.01 * i), 0);
  }
  double pipeline = seconds_since(t0);

  report(8, spec < 1e-9 && box < 0.02 && quad < 1e-5 && pipeline < 600,
         fmt::format("spectrum vs scan {:.1e}; box doubling {:.2e}; quadrature doubling {:.1e}; 4 x 800 energies "
                     "{:.0f} s",
                     spec, box, quad, pipeline));
}

}  // namespace

int main() {
  std::cout << "acceptance run, one line per criterion" << std::endl;
  morse_oracle();
  orthonormality();
  milne();
  threshold();
  dominance();
  temperature();
  spectrum_structure();
  consistency();
  std::cout << (failures ? fmt::format("{} criteria failed", failures) : std::string("all criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
