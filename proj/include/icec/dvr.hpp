#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "error.hpp"
#include "morse.hpp"

namespace icec {

struct DvrResult {
  std::vector<double> grid;      // interior points x_i = i L / (n+1)
  Eigen::VectorXd energies;      // ascending, above the potential minimum
  Eigen::MatrixXd vectors;       // columns, unit norm in the discrete sense
};

// Sine-DVR Hamiltonian on (0, r_box) with n interior points.
inline Eigen::MatrixXd sine_dvr_hamiltonian(const MorseSurface& s, double r_box, int n) {
  const int nn = n + 1;
  const double pre = units::pi * units::pi / (4 * s.mu * r_box * r_box);
  Eigen::MatrixXd h(n, n);
  for (int i = 1; i <= n; ++i) {
    double si = std::sin(units::pi * i / nn);
    h(i - 1, i - 1) = pre * ((2.0 * nn * nn + 1) / 3 - 1 / (si * si)) + morse_potential(s, i * r_box / nn);
    for (int j = 1; j < i; ++j) {
      double a = std::sin(units::pi * (i - j) / (2.0 * nn)), b = std::sin(units::pi * (i + j) / (2.0 * nn));
      double t = pre * (1 / (a * a) - 1 / (b * b)) * (((i - j) % 2) ? -1 : 1);
      h(i - 1, j - 1) = h(j - 1, i - 1) = t;
    }
  }
  return h;
}

// Lowest `wanted` eigenpairs by Lanczos on H^{-1} (H is positive definite: V >= 0 and T > 0).
inline DvrResult dvr_oracle(const MorseSurface& s, double r_box, int n, int wanted) {
  if (n < 2 || wanted < 1 || wanted > n) throw DomainError("invalid DVR size");
  Eigen::MatrixXd h = sine_dvr_hamiltonian(s, r_box, n);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw NumericalError("DVR Cholesky failed", 0, 0);

  const int maxk = std::min(n, std::max(4 * wanted + 60, 200));
  Eigen::MatrixXd q(n, maxk + 1);
  std::vector<double> alpha, beta;
  q.col(0) = Eigen::VectorXd::Ones(n).normalized();
  Eigen::VectorXd theta;
  Eigen::MatrixXd ritz;
  int k = 0;
  for (; k < maxk; ++k) {
    Eigen::VectorXd r = llt.solve(q.col(k));
    alpha.push_back(q.col(k).dot(r));
    for (int pass = 0; pass < 2; ++pass) r -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * r);
    beta.push_back(r.norm());
    bool last = (k + 1 == maxk) || beta.back() < 1e-300;
    if (!last) q.col(k + 1) = r / beta.back();
    if ((k + 1 >= wanted && (k + 1) % 5 == 0) || last) {
      int m = k + 1;
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      theta = es.eigenvalues().reverse();
      ritz = es.eigenvectors().rowwise().reverse();
      if (m >= wanted) {
        double worst = 0;
        for (int j = 0; j < wanted; ++j) {
          double e = 1 / theta[j];
          worst = std::max(worst, std::abs(beta.back() * ritz(m - 1, j)) * e * e);
        }
        if (worst < 1e-12 || last) {
          k = m;
          break;
        }
      }
    }
  }
  DvrResult out;
  out.grid.resize(n);
  for (int i = 0; i < n; ++i) out.grid[i] = (i + 1) * r_box / (n + 1);
  out.energies.resize(wanted);
  for (int j = 0; j < wanted; ++j) out.energies[j] = 1 / theta[j];
  out.vectors = q.leftCols(k) * ritz.leftCols(wanted);
  for (int j = 0; j < wanted; ++j) out.vectors.col(j).normalize();
  return out;
}

inline int dvr_count_below(const DvrResult& r, double e) {
  int c = 0;
  for (int j = 0; j < r.energies.size(); ++j) c += r.energies[j] < e;
  return c;
}

}  // namespace icec
