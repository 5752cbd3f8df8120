#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace icec {

struct GaussRule {
  std::vector<double> x, w;  // on [-1, 1]
};

inline GaussRule gauss_legendre(int order) {
  GaussRule r;
  r.x.resize(order);
  r.w.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= order; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[order - 1 - i] = z;
    r.w[i] = r.w[order - 1 - i] = 2 / ((1 - z * z) * dp * dp);
  }
  return r;
}

// Composite Gauss-Legendre rule with equal panels; nodes sorted ascending.
class Quadrature {
 public:
  Quadrature() = default;
  Quadrature(double lo, double hi, int panels, int order = 10)
      : lo_(lo), hi_(hi), panels_(panels), order_(order) {
    if (!(hi > lo) || panels < 1 || order < 1) throw DomainError("invalid quadrature specification");
    auto g = gauss_legendre(order);
    double h = (hi - lo) / panels;
    nodes_.reserve(panels * order);
    weights_.reserve(panels * order);
    for (int p = 0; p < panels; ++p) {
      double mid = lo + (p + 0.5) * h;
      for (int k = 0; k < order; ++k) {
        nodes_.push_back(mid + 0.5 * h * g.x[k]);
        weights_.push_back(0.5 * h * g.w[k]);
      }
    }
  }

  Quadrature refined() const { return Quadrature(lo_, hi_, 2 * panels_, order_); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(nodes_[i]);
    return s;
  }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  int panels() const { return panels_; }
  int order() const { return order_; }

 private:
  double lo_ = 0, hi_ = 1;
  int panels_ = 0, order_ = 0;
  std::vector<double> nodes_, weights_;
};

}  // namespace icec
