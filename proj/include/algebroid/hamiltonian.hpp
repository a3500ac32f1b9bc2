#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <functional>

#include "algebroid/core.hpp"
#include "algebroid/errors.hpp"
#include "algebroid/fields.hpp"

namespace algebroid {

/// Mechanical Hamiltonian H(q, p) = 1/2 p . G(q) p + V(q), with G the
/// fiberwise cometric (symmetric positive definite n x n) and V the
/// potential. Fiber derivatives are always analytic: dH/dp = G p. Base
/// derivatives use cometric_jac / the potential gradient when supplied,
/// central differences otherwise.
struct MechanicalHamiltonian {
  std::function<Matrix(const Vector&)> cometric;
  std::function<Tensor3(const Vector&)> cometric_jac;  // optional, [j] = dG/dq^j
  ScalarField potential;
  bool cometric_constant = false;  // set by builders with q-independent G

  Matrix cometric_at(const Vector& q) const {
    Matrix g = cometric(q);
    require_finite(g, "cometric");
    const double scale = std::max(1.0, max_abs(g));
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ModelError("cometric is not symmetric");
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success)
      throw ModelError("cometric is not positive definite");
    return g;
  }

  Tensor3 cometric_jacobian_at(const Vector& q) const {
    const int m = static_cast<int>(q.size());
    const Eigen::Index n = cometric(q).rows();
    if (cometric_constant) return Tensor3(m, Matrix::Zero(n, n));
    if (cometric_jac) return cometric_jac(q);
    Tensor3 d(m);
    Vector qp = q;
    for (int j = 0; j < m; ++j) {
      const double h = fd_step(q[j]);
      qp[j] = q[j] + h;
      const Matrix gp = cometric(qp);
      qp[j] = q[j] - h;
      const Matrix gm = cometric(qp);
      qp[j] = q[j];
      d[j] = (gp - gm) / (2.0 * h);
    }
    return d;
  }

  double energy(const PhasePoint& x) const {
    const Matrix g = cometric_at(x.q);
    return 0.5 * x.p.dot(g * x.p) + potential.value(x.q);
  }

  /// dH/dq (uses 1/2 p . dG/dq^i . p + dV/dq^i) and dH/dp = G p.
  Vector grad_q(const PhasePoint& x) const {
    const int m = static_cast<int>(x.q.size());
    Vector gq = potential.grad(x.q);
    if (!cometric_constant) {
      const Tensor3 dg = cometric_jacobian_at(x.q);
      for (int j = 0; j < m; ++j) gq[j] += 0.5 * x.p.dot(dg[j] * x.p);
    }
    return gq;
  }

  Vector grad_p(const PhasePoint& x) const { return cometric_at(x.q) * x.p; }
};

/// Wrap a mechanical Hamiltonian as a generic phase field with analytic
/// gradient (and Hessian when the cometric is constant and the potential
/// carries one).
inline ScalarPhaseField as_phase_field(const MechanicalHamiltonian& mech) {
  ScalarPhaseField f;
  f.value = [mech](const PhasePoint& x) { return mech.energy(x); };
  f.gradient = [mech](const PhasePoint& x) {
    Vector g(x.q.size() + x.p.size());
    g.head(x.q.size()) = mech.grad_q(x);
    g.tail(x.p.size()) = mech.grad_p(x);
    return g;
  };
  if (mech.cometric_constant && mech.potential.hessian) {
    f.hessian = [mech](const PhasePoint& x) {
      const Eigen::Index m = x.q.size(), n = x.p.size();
      Matrix h = Matrix::Zero(m + n, m + n);
      h.topLeftCorner(m, m) = mech.potential.hessian(x.q);
      h.bottomRightCorner(n, n) = mech.cometric_at(x.q);
      return h;
    };
  }
  return f;
}

}  // namespace algebroid
