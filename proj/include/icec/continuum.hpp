#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "morse.hpp"

namespace icec {

// Integrates psi'' = 2 mu (V - E) psi outward by local Taylor series of the
// analytic Morse potential, starting with psi = 0 deep inside the inner wall.
class MorseShooter {
 public:
  static constexpr int max_order = 64;

  MorseShooter(const MorseSurface& s, double r_box, double r_start)
      : d_(s.d_e), a_(s.alpha()), re_(s.r_e), twomu_(2 * s.mu), r_box_(r_box), r_start_(r_start) {}

  // Start point where the WKB decay from the inner turning point at energy e reaches exp(-depth).
  static double start_point(const MorseSurface& s, double e, double depth = 36.0) {
    double a = s.alpha();
    double rt = s.r_e - std::log(1 + std::sqrt(std::max(e, 0.0) / s.d_e)) / a;
    double r = rt, acc = 0, dr = 0.01;
    while (acc < depth && r > dr) {
      double rm = r - 0.5 * dr;
      acc += dr * std::sqrt(2 * s.mu * std::max(morse_potential(s, rm) - e, 0.0));
      r -= dr;
    }
    return std::max(r, 0.0);
  }

  struct Result {
    double end_value = 0;
    double max_abs = 0;
    int nodes = 0;
  };

  // Sample points below r_start are returned as 0.
  Result shoot(double e, std::span<const double> at = {}, std::span<double> out = {}) const {
    Result res;
    std::array<double, max_order + 1> f{}, y{};
    double r = r_start_, psi = 0, dpsi = 1;
    std::size_t idx = 0;
    while (idx < at.size() && at[idx] < r_start_) out[idx++] = 0;
    while (r_box_ - r > 1e-13 * r_box_) {
      double u0 = std::exp(-a_ * (r - re_));
      f[0] = twomu_ * (d_ * (1 - u0) * (1 - u0) - e);
      double p1 = -2 * u0, p2 = u0 * u0;
      for (int j = 1; j <= max_order; ++j) {
        p1 *= -a_ / j;
        p2 *= -2 * a_ / j;
        f[j] = twomu_ * d_ * (p1 + p2);
      }
      double kappa = std::max(std::sqrt(std::abs(f[0])), std::cbrt(std::abs(f[1])));
      double h = std::min({0.25, 2.0 / (kappa + 2 * a_), r_box_ - r});
      y[0] = psi;
      y[1] = dpsi;
      int order = 0;
      while (order == 0) {
        double scale = std::max(std::abs(psi), std::abs(dpsi) * h);
        double hk = h;
        int k = 2;
        for (; k <= max_order; ++k) {
          double s = 0;
          for (int j = 0; j <= k - 2; ++j) s += f[j] * y[k - 2 - j];
          y[k] = s / (k * (k - 1.0));
          hk *= h;
          double t = std::abs(y[k]) * hk + std::abs(y[k - 1]) * hk / h;
          if (k >= 8 && t < 1e-18 * scale) break;
        }
        if (k > max_order) {
          h *= 0.5;
        } else {
          order = k;
        }
      }
      while (idx < at.size() && at[idx] <= r + h * (1 + 1e-14)) {
        double t = at[idx] - r, v = y[order];
        for (int k = order - 1; k >= 0; --k) v = v * t + y[k];
        out[idx++] = v;
      }
      double v = y[order], dv = order * y[order];
      for (int k = order - 1; k >= 0; --k) v = v * h + y[k];
      for (int k = order - 1; k >= 1; --k) dv = dv * h + k * y[k];
      if (psi != 0 && (v > 0) != (psi > 0) && v != 0) ++res.nodes;
      psi = v;
      dpsi = dv;
      r += h;
      res.max_abs = std::max(res.max_abs, std::abs(psi));
    }
    while (idx < at.size()) out[idx++] = psi;
    res.end_value = psi;
    return res;
  }

  double r_box() const { return r_box_; }
  double r_start() const { return r_start_; }

 private:
  double d_, a_, re_, twomu_, r_box_, r_start_;
};

namespace detail {

class BoxWavefunction : public Wavefunction {
 public:
  BoxWavefunction(MorseShooter sh, double e) : sh_(sh), e_(e) {}
  void set_scale(double c) { scale_ = c; }
  void sample(std::span<const double> r, std::span<double> out) const override {
    sh_.shoot(e_, r, out);
    for (auto& v : out) v *= scale_;
  }

 private:
  MorseShooter sh_;
  double e_;
  double scale_ = 1;
};

}  // namespace detail

// Number of box eigenvalues below e (energy above the potential minimum).
inline int box_count_below(const MorseShooter& sh, double e) { return sh.shoot(e).nodes; }

// Box eigenvalue between lo and hi where psi(r_box) changes sign; Illinois regula falsi to a few ulp.
inline double refine_box_energy(const MorseShooter& sh, double lo, double hi) {
  double flo = sh.shoot(lo).end_value, fhi = sh.shoot(hi).end_value;
  if ((flo > 0) == (fhi > 0) && flo != 0 && fhi != 0)
    throw NumericalError("box energy bracket without sign change", lo, hi);
  int side = 0;
  for (int it = 0; it < 400; ++it) {
    if (flo == 0) return lo;
    if (fhi == 0) return hi;
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::abs(hi)) break;
    double m = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(m > lo && m < hi)) m = 0.5 * (lo + hi);
    double fm = sh.shoot(m).end_value;
    if ((fm > 0) == (fhi > 0)) {
      hi = m;
      fhi = fm;
      if (side == -1) flo *= 0.5;
      side = -1;
    } else {
      lo = m;
      flo = fm;
      if (side == 1) fhi *= 0.5;
      side = 1;
    }
  }
  if (hi - lo > 1e-12) throw NumericalError("box energy refinement did not converge", lo, hi);
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

struct BoxRange {
  std::optional<int> count;             // number of dissociative states wanted
  std::optional<double> e_max;          // highest energy above the asymptote, hartree
};

// rho_j = 2 / |E_{j+1} - E_{j-1}|, one-sided at the ends.
inline double density_of_states(std::span<const double> e, std::size_t j) {
  if (e.size() < 3) throw DomainError("density of states needs at least three energies");
  if (j >= e.size()) throw DomainError("density of states index out of range");
  if (j == 0) return 1 / std::abs(e[1] - e[0]);
  if (j == e.size() - 1) return 1 / std::abs(e[j] - e[j - 1]);
  return 2 / std::abs(e[j + 1] - e[j - 1]);
}

namespace detail {

inline double kinetic_from_k(const MorseSurface& s, double k) { return k * k / (2 * s.mu); }

}  // namespace detail

// Box-discretized dissociative states psi(r_box) = 0 above D_e. Box eigenvalues with
// index below the analytic bound count are skipped so bound levels are not double counted.
inline std::vector<VibState> dissociative_states(const MorseSurface& s, const BoxRange& range, const RadialGrid& grid,
                                                 const Quadrature& quad) {
  if (!range.count && !range.e_max) throw DomainError("box range needs a count or an energy limit");
  const double rb = grid.r_box;
  const int nb = bound_state_count(s);
  const double dk = units::pi / (2 * rb);

  // Upper energy for the start point: generous estimate if only a count is given.
  double e_top_guess = range.e_max ? *range.e_max : detail::kinetic_from_k(s, (*range.count + nb + 4) * 2 * dk);
  if (range.count && range.e_max) e_top_guess = std::max(e_top_guess, *range.e_max);
  double r0 = MorseShooter::start_point(s, s.d_e + 1.5 * e_top_guess + 0.01);
  MorseShooter sh(s, rb, r0);

  std::vector<double> roots;
  auto wanted_done = [&](double e_rel) {
    if (range.count && static_cast<int>(roots.size()) >= *range.count) return true;
    if (!range.count && range.e_max && e_rel > *range.e_max) return true;
    return false;
  };

  // Bracket eigenvalues by node count on a scan uniform in k.
  std::vector<std::pair<double, int>> scan;
  double e_prev = s.d_e * (1 + 1e-12);
  int n_prev = box_count_below(sh, e_prev);
  bool done = false;
  for (int step = 1; !done; ++step) {
    double e = s.d_e + detail::kinetic_from_k(s, step * dk);
    if (range.e_max && !range.count && e - s.d_e > *range.e_max * 1.5 + 0.05) break;
    int n = box_count_below(sh, e);
    // split until each interval holds at most one eigenvalue
    std::vector<std::pair<double, int>> stack{{e, n}};
    double lo = e_prev;
    int nlo = n_prev;
    while (!stack.empty()) {
      auto [hi, nhi] = stack.back();
      if (nhi - nlo > 1) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo < 1e-14) throw NumericalError("unresolved box eigenvalue cluster", lo, hi);
        stack.push_back({mid, box_count_below(sh, mid)});
        continue;
      }
      stack.pop_back();
      if (nhi - nlo == 1 && nlo >= nb) {
        double root = refine_box_energy(sh, lo, hi);
        if (wanted_done(root - s.d_e)) {
          done = true;
          break;
        }
        roots.push_back(root);
        if (wanted_done(root - s.d_e)) {
          done = true;
          break;
        }
      }
      lo = hi;
      nlo = nhi;
    }
    e_prev = e;
    n_prev = n;
    if (step > 1000000) throw NumericalError("box state scan did not terminate", s.d_e, e);
  }
  if (range.e_max && !range.count) {
    while (!roots.empty() && roots.back() - s.d_e > *range.e_max) roots.pop_back();
  }
  if (roots.size() < 3) throw DomainError("fewer than three box states in the requested range");

  std::vector<double> rel(roots.size());
  for (std::size_t j = 0; j < roots.size(); ++j) rel[j] = roots[j] - s.d_e;
  std::vector<VibState> out;
  out.reserve(roots.size());
  auto r = grid.values();
  for (std::size_t j = 0; j < roots.size(); ++j) {
    auto wf = std::make_shared<detail::BoxWavefunction>(sh, roots[j]);
    wf->set_scale(1 / std::sqrt(detail::norm_squared(*wf, quad)));
    VibState v;
    v.surface = s.label;
    v.kind = StateKind::box_dissociative;
    v.index = static_cast<int>(j);
    v.energy_rel_min = roots[j];
    v.energy_rel_asymptote = rel[j];
    v.dos = density_of_states(rel, j);
    v.grid = grid;
    v.amplitude.resize(grid.points);
    wf->sample(r, v.amplitude);
    v.wavefunction = std::move(wf);
    out.push_back(std::move(v));
  }
  return out;
}

inline std::vector<VibState> dissociative_states(const MorseSurface& s, const BoxRange& range,
                                                 const RadialGrid& grid) {
  return dissociative_states(s, range, grid, default_quadrature(grid));
}

}  // namespace icec
