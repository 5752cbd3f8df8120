#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "quadrature.hpp"
#include "units.hpp"

namespace icec {

enum class Symmetry { sigma, pi };

struct MorseSurface {
  std::string label;
  double r_e = 0;      // bohr
  double d_e = 0;      // hartree
  double omega_e = 0;  // hartree
  double e_min = 0;    // hartree, electronic energy at R_e
  double mu = 0;       // electron masses
  std::string asymptote_tag;  // atom carrying the charge at large R
  Symmetry symmetry = Symmetry::sigma;

  double alpha() const { return omega_e * std::sqrt(mu / (2 * d_e)); }
  double lambda() const { return 2 * d_e / omega_e; }

  void validate() const {
    if (!(d_e > 0 && omega_e > 0 && r_e > 0 && mu > 0))
      throw ConfigError("surface " + label + ": D_e, omega_e, R_e and mu must be positive");
    if (!(lambda() > 0.5))
      throw ConfigError("surface " + label + ": 2 D_e / omega_e <= 1/2, no bound states");
  }
};

inline double morse_potential(const MorseSurface& s, double r) {
  double x = 1 - std::exp(-s.alpha() * (r - s.r_e));
  return s.d_e * x * x;
}

inline double morse_potential_derivative(const MorseSurface& s, double r) {
  double a = s.alpha(), u = std::exp(-a * (r - s.r_e));
  return 2 * s.d_e * a * u * (1 - u);
}

inline int bound_state_count(const MorseSurface& s) {
  s.validate();
  return static_cast<int>(std::floor(s.lambda() - 0.5)) + 1;
}

// Energy of level n above the potential minimum.
inline double bound_energy(const MorseSurface& s, int n) {
  double x = s.omega_e * (n + 0.5);
  return x - x * x / (4 * s.d_e);
}

// Uniform grid R_i = i * r_box / points, i = 1..points.
struct RadialGrid {
  double r_box = units::from_angstrom(10.0);
  int points = 3000;

  double step() const { return r_box / points; }
  double operator[](int i) const { return (i + 1) * step(); }
  std::vector<double> values() const {
    std::vector<double> r(points);
    for (int i = 0; i < points; ++i) r[i] = (*this)[i];
    return r;
  }
};

class Wavefunction {
 public:
  virtual ~Wavefunction() = default;
  // r must be sorted ascending and lie in (0, r_box]
  virtual void sample(std::span<const double> r, std::span<double> out) const = 0;
};

enum class StateKind { bound, box_dissociative };

struct VibState {
  std::string surface;
  StateKind kind = StateKind::bound;
  int index = 0;
  double energy_rel_min = 0;
  double energy_rel_asymptote = 0;
  double dos = 0;  // box states only, 1/hartree
  bool box_unreliable = false;
  RadialGrid grid;
  std::vector<double> amplitude;
  std::shared_ptr<const Wavefunction> wavefunction;

  std::vector<double> sample(std::span<const double> r) const {
    std::vector<double> out(r.size());
    wavefunction->sample(r, out);
    return out;
  }
};

namespace detail {

class MorseBound : public Wavefunction {
 public:
  MorseBound(const MorseSurface& s, int n) : a_(s.alpha()), lam_(s.lambda()), re_(s.r_e), n_(n) {
    double twos = 2 * lam_ - 2 * n - 1;
    log_norm_ = 0.5 * (std::log(a_ * twos) + std::lgamma(n + 1.0) - std::lgamma(2 * lam_ - n));
  }

  void set_scale(double c) { scale_ = c; }

  void sample(std::span<const double> r, std::span<double> out) const override {
    double s = lam_ - n_ - 0.5, al = 2 * s;
    double sign = (n_ % 2) ? -scale_ : scale_;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double y = -a_ * (r[i] - re_);
      double z = 2 * lam_ * std::exp(y);
      double l0 = 1;
      if (n_ > 0) {
        double lm = 1;
        l0 = 1 + al - z;
        for (int k = 1; k < n_; ++k) {
          double next = ((2 * k + 1 + al - z) * l0 - (k + al) * lm) / (k + 1);
          lm = l0;
          l0 = next;
        }
      }
      double lg = log_norm_ + s * (std::log(2 * lam_) + y) - 0.5 * z;
      out[i] = l0 == 0 ? 0.0 : sign * std::copysign(std::exp(lg + std::log(std::abs(l0))), l0);
    }
  }

 private:
  double a_, lam_, re_;
  int n_;
  double log_norm_;
  double scale_ = 1;
};

inline double norm_squared(const Wavefunction& w, const Quadrature& q) {
  std::vector<double> v(q.size());
  w.sample(q.nodes(), v);
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += q.weights()[i] * v[i] * v[i];
  return s;
}

}  // namespace detail

inline Quadrature default_quadrature(const RadialGrid& g, int panels_per_10_angstrom = 400) {
  int panels = static_cast<int>(std::lround(panels_per_10_angstrom * g.r_box / units::from_angstrom(10.0)));
  return Quadrature(0.0, g.r_box, std::max(panels, 1));
}

inline VibState bound_state(const MorseSurface& s, int n, const RadialGrid& grid, const Quadrature& quad) {
  int nb = bound_state_count(s);
  if (n < 0 || n >= nb)
    throw DomainError("bound level " + std::to_string(n) + " out of range for surface " + s.label);
  auto wf = std::make_shared<detail::MorseBound>(s, n);
  wf->set_scale(1 / std::sqrt(detail::norm_squared(*wf, quad)));
  VibState v;
  v.surface = s.label;
  v.kind = StateKind::bound;
  v.index = n;
  v.energy_rel_min = bound_energy(s, n);
  v.energy_rel_asymptote = v.energy_rel_min - s.d_e;
  v.box_unreliable = (n == nb - 1);
  v.grid = grid;
  v.amplitude.resize(grid.points);
  wf->sample(grid.values(), v.amplitude);
  v.wavefunction = std::move(wf);
  return v;
}

inline VibState bound_state(const MorseSurface& s, int n, const RadialGrid& grid) {
  return bound_state(s, n, grid, default_quadrature(grid));
}

inline std::vector<VibState> bound_states(const MorseSurface& s, const RadialGrid& grid, const Quadrature& quad) {
  std::vector<VibState> out;
  for (int n = 0; n < bound_state_count(s); ++n) out.push_back(bound_state(s, n, grid, quad));
  return out;
}

inline int interior_nodes(std::span<const double> amplitude, double rel_floor = 1e-8) {
  double mx = 0;
  for (double v : amplitude) mx = std::max(mx, std::abs(v));
  int nodes = 0, last = 0;
  for (double v : amplitude) {
    if (std::abs(v) < rel_floor * mx) continue;
    int sg = v > 0 ? 1 : -1;
    if (last != 0 && sg != last) ++nodes;
    last = sg;
  }
  return nodes;
}

// <bra| w |ket> with panel doubling until the relative change is below tol.
inline double weighted_matrix_element(const VibState& bra, const VibState& ket, const std::function<double(double)>& w,
                                      const Quadrature& start, double tol = 1e-6, int max_refinements = 5) {
  if (bra.grid.r_box != ket.grid.r_box) throw DomainError("matrix element between states on different boxes");
  auto eval = [&](const Quadrature& q, double& absint) {
    auto b = bra.sample(q.nodes());
    auto k = ket.sample(q.nodes());
    double s = 0;
    absint = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double t = q.weights()[i] * b[i] * w(q.nodes()[i]) * k[i];
      s += t;
      absint += std::abs(t);
    }
    return s;
  };
  Quadrature q = start;
  double abs1, abs2;
  double prev = eval(q, abs1);
  for (int i = 0; i < max_refinements; ++i) {
    q = q.refined();
    double cur = eval(q, abs2);
    if (std::abs(cur - prev) <= tol * std::abs(cur) + 1e-13 * abs2) return cur;
    prev = cur;
  }
  throw NumericalError("matrix element quadrature did not converge", prev, eval(q, abs2));
}

inline double weighted_matrix_element(const VibState& bra, const VibState& ket,
                                      const std::function<double(double)>& w) {
  return weighted_matrix_element(bra, ket, w, default_quadrature(bra.grid));
}

}  // namespace icec
