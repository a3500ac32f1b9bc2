#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "algebroid/chart.hpp"
#include "algebroid/errors.hpp"
#include "algebroid/fields.hpp"
#include "algebroid/finite_diff.hpp"
#include "algebroid/rng.hpp"

namespace algebroid {

/// Third-order tensor stored as a vector of matrices. For the structure
/// functions the layout is C[gamma](alpha, beta); for anchor derivatives it
/// is d_rho[j](i, alpha) = d rho^i_alpha / d q^j.
using Tensor3 = std::vector<Matrix>;
using Tensor4 = std::vector<Tensor3>;

/// Covector of the algebroid dual frame attached to a base point.
struct AlgebroidCovector {
  Vector base_point;  // q, size m
  Vector components;  // theta_alpha, size n
};

/// A Lie algebroid of rank n presented in one chart: anchor matrix
/// rho^i_alpha(q) (m x n) and structure functions C^gamma_{alpha beta}(q),
/// antisymmetric in the lower pair. m = 0 is the Lie-algebra case: the
/// anchor is the empty 0 x n matrix and nothing depends on q.
///
/// Analytic q-derivatives of rho and C may be supplied; otherwise central
/// finite differences with per-axis step cbrt(eps) * max(1, |q_i|) are
/// substituted transparently.
struct ChartedAlgebroid {
  BaseChart chart;
  int rank = 0;

  std::function<Matrix(const Vector&)> anchor;                       // m x n
  std::function<Tensor3(const Vector&)> structure;                   // [g](a,b)
  std::function<Tensor3(const Vector&)> anchor_jac;                  // optional
  std::function<std::vector<Tensor3>(const Vector&)> structure_jac;  // optional

  int base_dim() const { return chart.dim; }

  bool has_analytic_jacobians() const {
    return base_dim() == 0 ||
           (static_cast<bool>(anchor_jac) && static_cast<bool>(structure_jac));
  }

  Matrix anchor_at(const Vector& q) const {
    chart.require_inside(q);
    Matrix rho = anchor ? anchor(q) : Matrix::Zero(0, rank);
    if (rho.rows() != base_dim() || rho.cols() != rank)
      throw ModelError("anchor returned a matrix of the wrong shape");
    require_finite(rho, "anchor");
    return rho;
  }

  Tensor3 structure_at(const Vector& q) const {
    chart.require_inside(q);
    Tensor3 c = structure(q);
    if (static_cast<int>(c.size()) != rank)
      throw ModelError("structure tensor has wrong outer size");
    for (const Matrix& cg : c) {
      if (cg.rows() != rank || cg.cols() != rank)
        throw ModelError("structure tensor slice has wrong shape");
      require_finite(cg, "structure");
    }
    return c;
  }

  /// d rho / d q^j for each j; analytic when supplied, else central FD.
  Tensor3 anchor_jacobian_at(const Vector& q) const {
    const int m = base_dim();
    if (m == 0) return {};
    if (anchor_jac) {
      Tensor3 d = anchor_jac(q);
      if (static_cast<int>(d.size()) != m)
        throw ModelError("anchor jacobian has wrong outer size");
      return d;
    }
    Tensor3 d(m);
    Vector qp = q;
    for (int j = 0; j < m; ++j) {
      const double h = fd_step(q[j]);
      qp[j] = q[j] + h;
      const Matrix rp = anchor(qp);
      qp[j] = q[j] - h;
      const Matrix rm = anchor(qp);
      qp[j] = q[j];
      d[j] = (rp - rm) / (2.0 * h);
    }
    return d;
  }

  /// d C / d q^j for each j; layout [j][gamma](alpha, beta).
  std::vector<Tensor3> structure_jacobian_at(const Vector& q) const {
    const int m = base_dim();
    if (m == 0) return {};
    if (structure_jac) {
      std::vector<Tensor3> d = structure_jac(q);
      if (static_cast<int>(d.size()) != m)
        throw ModelError("structure jacobian has wrong outer size");
      return d;
    }
    std::vector<Tensor3> d(m);
    Vector qp = q;
    for (int j = 0; j < m; ++j) {
      const double h = fd_step(q[j]);
      qp[j] = q[j] + h;
      const Tensor3 cp = structure(qp);
      qp[j] = q[j] - h;
      const Tensor3 cm = structure(qp);
      qp[j] = q[j];
      Tensor3 slice(rank);
      for (int g = 0; g < rank; ++g) slice[g] = (cp[g] - cm[g]) / (2.0 * h);
      d[j] = std::move(slice);
    }
    return d;
  }

  /// Shape checks plus antisymmetry of C at seeded probe points. Storage does
  /// not enforce antisymmetry, so builders and the model loader call this.
  void validate(int probe_points = 10, double tol = 1e-10,
                double half_width = 2.0,
                std::uint64_t seed = 0xa1beb01dULL) const {
    chart.validate();
    if (rank < 1) throw ModelError("rank must be at least 1");
    if (!structure) throw ModelError("structure function map is required");
    if (base_dim() > 0 && !anchor)
      throw ModelError("anchor map is required when base_dim > 0");
    CounterRng rng(seed);
    auto [lo, hi] = chart.finite_box(half_width);
    for (int k = 0; k < probe_points; ++k) {
      const Vector q = (base_dim() == 0) ? Vector(0) : rng.uniform_vector(lo, hi);
      anchor_at(q);
      const Tensor3 c = structure_at(q);
      for (int g = 0; g < rank; ++g) {
        const double asym = (c[g] + c[g].transpose()).cwiseAbs().maxCoeff();
        if (asym > tol)
          throw ModelError("structure functions are not antisymmetric (|C+C^T| = " +
                           std::to_string(asym) + ")");
      }
    }
  }
};

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline double max_abs(const Tensor3& t) {
  double r = 0.0;
  for (const Matrix& a : t) r = std::max(r, max_abs(a));
  return r;
}

inline double max_abs(const Tensor4& t) {
  double r = 0.0;
  for (const Tensor3& a : t) r = std::max(r, max_abs(a));
  return r;
}

/// Contraction C^gamma_{alpha beta} v_gamma -> matrix (alpha, beta).
inline Matrix contract_upper(const Tensor3& c, const Vector& v) {
  const Eigen::Index n = v.size();
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index g = 0; g < n; ++g) s += v[g] * c[g];
  return s;
}

/// Residual of the first structure equation,
///   R^i_{alpha beta} = rho^j_alpha d_j rho^i_beta - rho^j_beta d_j rho^i_alpha
///                      - rho^i_gamma C^gamma_{alpha beta},
/// indexed [i](alpha, beta). Identically zero exactly when the anchor
/// intertwines the frame brackets with vector-field brackets. Empty for m = 0.
inline Tensor3 anchor_compat_residual(const ChartedAlgebroid& alg,
                                      const Vector& q) {
  const int m = alg.base_dim();
  const int n = alg.rank;
  const Matrix rho = alg.anchor_at(q);
  const Tensor3 c = alg.structure_at(q);
  const Tensor3 drho = alg.anchor_jacobian_at(q);

  Tensor3 res(m);
  for (int i = 0; i < m; ++i) {
    Matrix r = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = 0.0;
        for (int j = 0; j < m; ++j)
          v += rho(j, a) * drho[j](i, b) - rho(j, b) * drho[j](i, a);
        for (int g = 0; g < n; ++g) v -= rho(i, g) * c[g](a, b);
        r(a, b) = v;
      }
    require_finite(r, "anchor_compat_residual");
    res[i] = std::move(r);
  }
  return res;
}

/// Residual of the second structure equation (the Jacobi identity),
///   J^nu_{abc} = sum over cyclic (a,b,c) of
///                [ rho^i_a d_i C^nu_{bc} + C^nu_{a mu} C^mu_{bc} ],
/// indexed [nu][alpha](beta, gamma).
inline Tensor4 jacobi_residual(const ChartedAlgebroid& alg, const Vector& q) {
  const int m = alg.base_dim();
  const int n = alg.rank;
  const Matrix rho = alg.anchor_at(q);
  const Tensor3 c = alg.structure_at(q);
  const std::vector<Tensor3> dc = alg.structure_jacobian_at(q);

  auto term = [&](int nu, int a, int b, int g) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) v += rho(i, a) * dc[i][nu](b, g);
    for (int mu = 0; mu < n; ++mu) v += c[nu](a, mu) * c[mu](b, g);
    return v;
  };

  Tensor4 res(n, Tensor3(n, Matrix::Zero(n, n)));
  for (int nu = 0; nu < n; ++nu)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int g = 0; g < n; ++g) {
          const double v =
              term(nu, a, b, g) + term(nu, b, g, a) + term(nu, g, a, b);
          require_finite(v, "jacobi_residual");
          res[nu][a](b, g) = v;
        }
  return res;
}

/// Differential of a base function: (df)_alpha = rho^i_alpha d_i f.
inline AlgebroidCovector differential_of_function(const ChartedAlgebroid& alg,
                                                  const ScalarField& f,
                                                  const Vector& q) {
  const Matrix rho = alg.anchor_at(q);
  const Vector df = f.grad(q);
  Vector comps = rho.transpose() * df;
  require_finite(comps, "differential_of_function");
  return {q, std::move(comps)};
}

/// Differential of a covector field in degree one:
///   (d theta)_{alpha beta} = rho^i_alpha d_i theta_beta
///                          - rho^i_beta d_i theta_alpha
///                          - C^gamma_{alpha beta} theta_gamma.
/// The output is antisymmetric by construction.
inline Matrix differential_of_section(const ChartedAlgebroid& alg,
                                      const CovectorField& theta,
                                      const Vector& q) {
  const Matrix rho = alg.anchor_at(q);
  const Tensor3 c = alg.structure_at(q);
  const Vector th = theta(q);
  if (th.size() != alg.rank)
    throw ModelError("covector field has wrong number of components");

  // a(beta, alpha) = d_i theta_beta rho^i_alpha
  const Matrix jth = theta.jac(q, alg.rank);  // n x m
  const Matrix a = jth * rho;                 // n x n
  Matrix out = a.transpose() - a - contract_upper(c, th);
  require_finite(out, "differential_of_section");
  return out;
}

}  // namespace algebroid
