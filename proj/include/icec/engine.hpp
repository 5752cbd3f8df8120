#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "atomdata.hpp"
#include "channels.hpp"
#include "continuum.hpp"
#include "error.hpp"
#include "morse.hpp"
#include "quadrature.hpp"
#include "units.hpp"

namespace icec {

struct ElectronTransferParams {
  double a_A = 0, a_D = 0;  // bohr
  double c_bar = 1;
  double d = 1;  // hartree
  int ell_max = 200;
  double term_tol = 1e-8;

  void validate() const {
    if (!(a_A > 0 && a_D > 0 && d > 0)) throw ConfigError("Gaussian widths and d must be positive");
    if (!(c_bar >= 0)) throw ConfigError("C_bar must be non-negative");
    if (ell_max < 0) throw ConfigError("ell_max must be non-negative");
    if (!(term_tol > 0)) throw ConfigError("term_tol must be positive");
  }
  // default amplitude parameters are placeholders until fitted
  bool calibration_required() const { return c_bar == 1 && d == 1; }
};

inline ElectronTransferParams default_et_params(const TransitionChannel& c, double alpha = 1.6) {
  ElectronTransferParams p;
  p.a_A = gaussian_width(*c.acceptor, alpha);
  p.a_D = gaussian_width(*c.donor, alpha);
  return p;
}

inline double s_ad(double r, double a_a, double a_d) {
  if (!(a_a > 0 && a_d > 0)) throw DomainError("Gaussian widths must be positive");
  double s2 = a_a * a_a + a_d * a_d;
  return std::pow(a_a * a_d / s2, 1.5) * std::exp(-r * r / (2 * s2));
}

inline double k2_av(double r, double eps, double epsp, double a_a, double a_d) {
  return (a_a + r) * (a_a + r) * eps + (a_d + r) * (a_d + r) * epsp;
}

inline double j_ell_abs(int ell, double r, double eps, double epsp, const ElectronTransferParams& p) {
  if (!(eps > 0 && epsp > 0)) throw DomainError("J_ell needs positive electron energies");
  double k2 = k2_av(r, eps, epsp, p.a_A, p.a_D);
  return std::sqrt(p.c_bar * std::exp(-std::abs(epsp - eps) / p.d) * std::exp(-ell * (ell + 1.0) / k2));
}

struct CrossSection {
  double value = 0;  // bohr^2
  bool closed = false;
};

// (3 c^4 / 4 pi) sigma_PR sigma_PI' / (omega^3 omega') |m|^2 with m = <f|R^-3|i>.
inline double energy_transfer_formula(double sigma_pr, double sigma_pi, double omega, double omegap, double m) {
  double c4 = std::pow(units::speed_of_light, 4);
  return 3 * c4 / (4 * units::pi) * sigma_pr * sigma_pi / (omega * omega * omega * omegap) * m * m;
}

inline double energy_transfer_from_element(const TransitionChannel& c, double eps, double epsp, double m,
                                           std::optional<double> sigma_pr = std::nullopt) {
  double omega = eps + c.acceptor->ip;
  double omegap = epsp + c.donor->ip;
  double pr = sigma_pr ? *sigma_pr : pr_cross_section(*c.acceptor, eps);
  return energy_transfer_formula(pr, pi_cross_section(*c.donor, omegap, true), omega, omegap, m) *
         c.degeneracy_factor;
}

inline CrossSection sigma_energy_transfer(const TransitionChannel& c, double eps, const VibState& vi,
                                          const VibState& vf, const Quadrature& quad) {
  if (!c.energy_transfer) return {};
  if (!(eps > 0)) throw DomainError("incoming electron energy must be positive");
  double epsp = outgoing_energy(c, eps, vi.energy_rel_asymptote, vf.energy_rel_asymptote);
  if (epsp <= 0) return {0, true};
  double m = weighted_matrix_element(vf, vi, [](double r) { return 1 / (r * r * r); }, quad);
  return {energy_transfer_from_element(c, eps, epsp, m), false};
}

// 32 pi (eps^3 eps')^-1/2 sum_l (2l+1) |sum_k h_k J_l(R_k)|^2; h_k carries weight, psi_i psi_f S / R.
inline double partial_wave_sum(const double* r, const double* h, std::size_t n, double eps, double epsp,
                               const ElectronTransferParams& p, std::vector<double>& work) {
  if (n == 0) return 0;
  double amp2 = p.c_bar * std::exp(-std::abs(epsp - eps) / p.d);
  if (amp2 == 0) return 0;
  work.resize(3 * n);
  double *ratio = work.data(), *pw = ratio + n, *t = pw + n;
  double m0 = 0, b0 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ratio[k] = std::exp(-1 / k2_av(r[k], eps, epsp, p.a_A, p.a_D));
    pw[k] = 1;
    t[k] = 1;
    m0 += h[k];
    b0 += std::abs(h[k]);
  }
  double sum = m0 * m0;
  for (int l = 1; l <= p.ell_max; ++l) {
    double m = 0, b = 0;
    for (std::size_t k = 0; k < n; ++k) {
      pw[k] *= ratio[k];  // exp(-l / K^2)
      t[k] *= pw[k];      // exp(-l(l+1) / (2 K^2))
      m += h[k] * t[k];
      b += std::abs(h[k]) * t[k];
    }
    sum += (2 * l + 1) * m * m;
    if ((2 * l + 1) * b * b < p.term_tol * sum || b == 0) break;
  }
  return 32 * units::pi / std::sqrt(eps * eps * eps * epsp) * amp2 * sum;
}

inline CrossSection sigma_electron_transfer(const TransitionChannel& c, double eps, const VibState& vi,
                                            const VibState& vf, const ElectronTransferParams& p,
                                            const Quadrature& quad) {
  if (!c.electron_transfer) return {};
  if (!(eps > 0)) throw DomainError("incoming electron energy must be positive");
  p.validate();
  double epsp = outgoing_energy(c, eps, vi.energy_rel_asymptote, vf.energy_rel_asymptote);
  if (epsp <= 0) return {0, true};
  auto a = vi.sample(quad.nodes());
  auto b = vf.sample(quad.nodes());
  std::vector<double> h(quad.size()), work;
  for (std::size_t k = 0; k < quad.size(); ++k) {
    double r = quad.nodes()[k];
    h[k] = quad.weights()[k] * a[k] * b[k] * s_ad(r, p.a_A, p.a_D) / r;
  }
  double s = partial_wave_sum(quad.nodes().data(), h.data(), h.size(), eps, epsp, p, work);
  return {s * c.degeneracy_factor, false};
}

struct TotalCrossSection {
  double bb = 0, bd = 0;  // bohr^2
  double total() const { return bb + bd; }
};

struct SpectrumResult {
  std::string channel;
  double epsilon = 0;
  int nu_i = 0;
  bool closed = false;
  std::vector<std::pair<double, double>> sticks;     // (eps', sigma)
  std::vector<std::pair<double, double>> continuum;  // (eps', dsigma/dE)
  double sigma_total_bb = 0, sigma_total_bd = 0;
  double pr_reference = 0;
  double display_threshold = 0;

  // trapezoid over the continuum points
  double continuum_trapezoid() const {
    double s = 0;
    for (std::size_t j = 1; j < continuum.size(); ++j)
      s += 0.5 * (continuum[j].second + continuum[j - 1].second) * std::abs(continuum[j].first - continuum[j - 1].first);
    return s;
  }
};

// direct: plain sum over box states. endpoint: each box state's cell integrated against the
// exact (eps')^-1/2 factor, so the integrable singularity at E_max does not depend on box placement.
enum class ContinuumRule { direct, endpoint };

struct EngineOptions {
  RadialGrid grid;
  ContinuumRule continuum = ContinuumRule::endpoint;
  int panels = 400;  // per 10 angstrom of box
  int quad_order = 10;
  double support_floor = 1e-22;
};

// Cross-section evaluator for one channel with states and node tables cached.
class IcecEngine {
 public:
  // e_limit: largest incoming electron energy that will be requested (hartree).
  IcecEngine(TransitionChannel ch, ElectronTransferParams p, EngineOptions opt, double e_limit)
      : ch_(std::move(ch)), p_(p), opt_(opt) {
    p_.validate();
    quad_ = default_quadrature(opt_.grid, opt_.panels);
    if (opt_.quad_order != 10) quad_ = Quadrature(0, opt_.grid.r_box, quad_.panels(), opt_.quad_order);
    initial_ = bound_states(*ch_.initial, opt_.grid, quad_);
    final_bound_ = bound_states(*ch_.final, opt_.grid, quad_);
    double e_top = initial_[std::max(usable_initial_count() - 1, 0)].energy_rel_asymptote;
    double kmax = std::max(0.0, max_dissociation_energy(ch_, e_limit, e_top));
    if (kmax > 0) final_box_ = dissociative_states(*ch_.final, BoxRange{{}, kmax + 0.01}, opt_.grid, quad_);
    for (const auto* set : {&final_bound_, &final_box_})
      for (const auto& v : *set) final_nodes_.push_back(v.sample(quad_.nodes()));
    init_nodes_.resize(initial_.size());
  }

  const TransitionChannel& channel() const { return ch_; }
  const ElectronTransferParams& params() const { return p_; }
  const Quadrature& quadrature() const { return quad_; }
  const std::vector<VibState>& initial_states() const { return initial_; }
  const std::vector<VibState>& final_bound() const { return final_bound_; }
  const std::vector<VibState>& final_box() const { return final_box_; }
  int usable_initial_count() const { return static_cast<int>(initial_.size()) - 1; }

  const VibState& final_state(std::size_t j) const {
    return j < final_bound_.size() ? final_bound_[j] : final_box_[j - final_bound_.size()];
  }
  std::size_t final_count() const { return final_bound_.size() + final_box_.size(); }

  // Per-final cross sections for one initial level, split by mechanism.
  struct FinalTerm {
    double eps_prime = 0, en = 0, el = 0;
    double weight = 1;  // multiplies en + el in the dissociative total
    bool open = false;
    double sigma() const { return en + el; }
  };

  std::vector<FinalTerm> final_terms(double eps, int nu_i) const {
    check_initial(nu_i);
    if (!(eps > 0)) throw DomainError("incoming electron energy must be positive");
    const auto& tab = initial_tables(nu_i);
    const auto& vi = initial_[nu_i];
    double emax = max_dissociation_energy(ch_, eps, vi.energy_rel_asymptote);
    std::vector<FinalTerm> out(final_count());
    std::vector<double> h, work;
    double pr = 0;
    bool pr_done = false;
    for (std::size_t j = 0; j < final_count(); ++j) {
      const auto& vf = final_state(j);
      auto& ft = out[j];
      ft.eps_prime = outgoing_energy(ch_, eps, vi.energy_rel_asymptote, vf.energy_rel_asymptote);
      if (ft.eps_prime <= 0 || vf.energy_rel_asymptote > emax) continue;
      ft.open = true;
      if (ch_.energy_transfer) {
        if (!pr_done) {
          pr = pr_cross_section(*ch_.acceptor, eps);
          pr_done = true;
        }
        ft.en = energy_transfer_from_element(ch_, eps, ft.eps_prime, tab.r3[j], pr);
      }
      if (ch_.electron_transfer) {
        const auto& f = final_nodes_[j];
        std::size_t n = tab.hi - tab.lo;
        h.resize(n);
        for (std::size_t k = 0; k < n; ++k) h[k] = tab.g[k] * f[tab.lo + k];
        ft.el = partial_wave_sum(quad_.nodes().data() + tab.lo, h.data(), n, eps, ft.eps_prime, p_, work) *
                ch_.degeneracy_factor;
      }
    }
    if (opt_.continuum == ContinuumRule::endpoint) endpoint_weights(out, emax);
    return out;
  }

  TotalCrossSection total(double eps, int nu_i) const {
    auto terms = final_terms(eps, nu_i);
    TotalCrossSection t;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (!terms[j].open) continue;
      if (j < final_bound_.size())
        t.bb += terms[j].sigma();
      else
        t.bd += terms[j].weight * terms[j].sigma();
    }
    return t;
  }

  // Normalized Boltzmann weights over the usable initial levels.
  std::vector<double> boltzmann_weights(double temperature) const {
    if (temperature < 0) throw DomainError("temperature must be non-negative");
    int n = usable_initial_count();
    std::vector<double> w(n, 0.0);
    if (temperature == 0) {
      w[0] = 1;
      return w;
    }
    double kt = units::boltzmann * temperature, sum = 0;
    for (int i = 0; i < n; ++i) {
      w[i] = std::exp(-(initial_[i].energy_rel_min - initial_[0].energy_rel_min) / kt);
      sum += w[i];
    }
    for (auto& x : w) x /= sum;
    return w;
  }

  double thermal(double eps, double temperature) const {
    auto w = boltzmann_weights(temperature);
    if (temperature == 0) return total(eps, 0).total();
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] > 0) s += w[i] * total(eps, static_cast<int>(i)).total();
    return s;
  }

  // Several temperatures sharing the per-level totals.
  std::vector<double> thermal(double eps, const std::vector<double>& temps) const {
    int n = usable_initial_count();
    std::vector<std::optional<double>> tot(n);
    std::vector<double> out;
    for (double t : temps) {
      auto w = boltzmann_weights(t);
      double s = 0;
      for (int i = 0; i < n; ++i) {
        if (w[i] == 0) continue;
        if (!tot[i]) tot[i] = total(eps, i).total();
        s += w[i] * *tot[i];
      }
      out.push_back(t == 0 ? *tot[0] : s);
    }
    return out;
  }

  SpectrumResult spectrum(double eps, int nu_i) const {
    auto terms = final_terms(eps, nu_i);
    SpectrumResult r;
    r.channel = ch_.name;
    r.epsilon = eps;
    r.nu_i = nu_i;
    r.pr_reference = pr_cross_section(*ch_.acceptor, eps);
    r.display_threshold = 1e-3 * r.pr_reference;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (!terms[j].open) continue;
      double s = terms[j].en + terms[j].el;
      if (j < final_bound_.size()) {
        r.sticks.emplace_back(terms[j].eps_prime, s);
        r.sigma_total_bb += s;
      } else {
        r.continuum.emplace_back(terms[j].eps_prime, s * final_state(j).dos);
        r.sigma_total_bd += terms[j].weight * s;
      }
    }
    std::sort(r.sticks.begin(), r.sticks.end());
    std::sort(r.continuum.begin(), r.continuum.end());
    r.closed = r.sticks.empty() && r.continuum.empty();
    return r;
  }

  // Classical mapping of |nu_i|^2 (S/R)^2 through the final potential onto eps'.
  std::vector<std::pair<double, double>> reflection_spectrum(double eps, int nu_i, int points = 2000) const {
    check_initial(nu_i);
    if (!ch_.electron_transfer) throw DomainError("reflection spectrum needs the electron-transfer mechanism");
    const auto& si = *ch_.initial;
    const auto& sf = *ch_.final;
    const auto& vi = initial_[nu_i];
    double e = vi.energy_rel_min, a = si.alpha();
    double x = std::sqrt(e / si.d_e);
    double r_in = si.r_e - std::log(1 + x) / a, r_out = si.r_e - std::log(1 - x) / a;
    std::vector<double> rs(points);
    for (int k = 0; k < points; ++k) rs[k] = r_in + (r_out - r_in) * (k + 0.5) / points;
    double sgn = 0;
    for (double rr : rs) {
      double dv = morse_potential_derivative(sf, rr);
      if (dv == 0 || (sgn != 0 && (dv > 0) != (sgn > 0)))
        throw DomainError("final potential not monotone over the initial state support");
      sgn = dv;
    }
    auto psi = vi.sample(rs);
    double s2 = p_.a_A * p_.a_A + p_.a_D * p_.a_D;
    std::vector<std::pair<double, double>> out;
    double peak = 0;
    for (int k = 0; k < points; ++k) {
      double rr = rs[k];
      double ef = morse_potential(sf, rr) - sf.d_e;
      double epsp = outgoing_energy(ch_, eps, vi.energy_rel_asymptote, ef);
      if (epsp <= 0) continue;
      double kern = std::exp(-rr * rr / (2 * s2)) / rr;
      double val = psi[k] * psi[k] * kern * kern / std::abs(morse_potential_derivative(sf, rr));
      out.emplace_back(epsp, val);
      peak = std::max(peak, val);
    }
    std::sort(out.begin(), out.end());
    if (peak > 0)
      for (auto& [ep, v] : out) v /= peak;
    return out;
  }

 private:
  struct InitialTables {
    std::vector<double> r3;  // <f|R^-3|i> for every final
    std::vector<double> g;   // w psi_i S / R on [lo, hi)
    std::size_t lo = 0, hi = 0;
  };

  void endpoint_weights(std::vector<FinalTerm>& terms, double emax) const {
    const std::size_t nb = final_bound_.size(), n = final_box_.size();
    auto e = [&](std::size_t j) { return final_box_[j].energy_rel_asymptote; };
    for (std::size_t j = 0; j < n; ++j) {
      auto& t = terms[nb + j];
      if (!t.open) continue;
      bool top = j + 1 == n || !terms[nb + j + 1].open;
      double lo = j == 0 ? e(0) - 0.5 * (e(1) - e(0)) : 0.5 * (e(j - 1) + e(j));
      double hi = top ? emax : 0.5 * (e(j) + e(j + 1));
      double cell = 2 * (std::sqrt(emax - lo) - std::sqrt(std::max(emax - hi, 0.0)));
      t.weight = final_box_[j].dos * std::sqrt(t.eps_prime) * cell;
    }
  }

  void check_initial(int nu_i) const {
    if (nu_i < 0 || nu_i >= static_cast<int>(initial_.size()))
      throw DomainError("initial level " + std::to_string(nu_i) + " out of range");
    if (initial_[nu_i].box_unreliable)
      throw DomainError("initial level " + std::to_string(nu_i) +
                        " is the highest bound level, excluded from initial states (box-unreliable)");
  }

  const InitialTables& initial_tables(int nu_i) const {
    std::lock_guard lock(mutex_);
    auto& slot = init_nodes_[nu_i];
    if (slot) return *slot;
    auto t = std::make_unique<InitialTables>();
    auto psi = initial_[nu_i].sample(quad_.nodes());
    const auto& w = quad_.weights();
    const auto& r = quad_.nodes();
    std::size_t n = quad_.size();
    t->r3.resize(final_count());
    for (std::size_t j = 0; j < final_count(); ++j) {
      const auto& f = final_nodes_[j];
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += w[k] * psi[k] * f[k] / (r[k] * r[k] * r[k]);
      t->r3[j] = s;
    }
    if (ch_.electron_transfer) {
      std::vector<double> g(n);
      double mx = 0;
      for (std::size_t k = 0; k < n; ++k) {
        g[k] = w[k] * psi[k] * s_ad(r[k], p_.a_A, p_.a_D) / r[k];
        mx = std::max(mx, std::abs(g[k]));
      }
      std::size_t lo = 0, hi = n;
      while (lo < n && std::abs(g[lo]) <= opt_.support_floor * mx) ++lo;
      while (hi > lo && std::abs(g[hi - 1]) <= opt_.support_floor * mx) --hi;
      t->lo = lo;
      t->hi = hi;
      t->g.assign(g.begin() + lo, g.begin() + hi);
    }
    slot = std::move(t);
    return *slot;
  }

  TransitionChannel ch_;
  ElectronTransferParams p_;
  EngineOptions opt_;
  Quadrature quad_;
  std::vector<VibState> initial_, final_bound_, final_box_;
  std::vector<std::vector<double>> final_nodes_;
  mutable std::vector<std::unique_ptr<InitialTables>> init_nodes_;
  mutable std::mutex mutex_;
};

}  // namespace icec
