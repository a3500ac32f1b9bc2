#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "algebroid/errors.hpp"

namespace algebroid {

/// Central-difference step for one axis: cbrt(machine eps) * max(1, |x|).
inline double fd_step(double x) {
  static const double h0 =
      std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * std::max(1.0, std::abs(x));
}

/// Central-difference gradient of a scalar function of a vector.
template <typename F>
Eigen::VectorXd central_gradient(const F& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function; rows index outputs.
template <typename F>
Eigen::MatrixXd central_jacobian(const F& f, const Eigen::VectorXd& x,
                                 Eigen::Index out_dim) {
  Eigen::MatrixXd jac(out_dim, x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    xp[i] = x[i] + h;
    const Eigen::VectorXd fp = f(xp);
    xp[i] = x[i] - h;
    const Eigen::VectorXd fm = f(xp);
    xp[i] = x[i];
    jac.col(i) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

/// Symmetric second difference d2f/dxi dxj on a fixed step h.
template <typename F>
Eigen::MatrixXd central_hessian(const F& f, const Eigen::VectorXd& x,
                                double h) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd hess(n, n);
  const double f0 = f(x);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      xp[i] = x[i] + h;
      xp[j] = x[j] + h;
      const double fpp = f(xp);
      xp[j] = x[j] - h;
      const double fpm = f(xp);
      xp[i] = x[i] - h;
      const double fmm = f(xp);
      xp[j] = x[j] + h;
      const double fmp = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return hess;
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite value");
}

inline void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                           const char* what) {
  if (!m.allFinite()) throw NumericError(std::string(what) + ": non-finite entries");
}

}  // namespace algebroid
