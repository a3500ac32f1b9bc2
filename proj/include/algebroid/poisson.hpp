#pragma once

#include <Eigen/Dense>

#include "algebroid/core.hpp"
#include "algebroid/fields.hpp"
#include "algebroid/hamiltonian.hpp"

namespace algebroid {

inline void check_phase_point(const ChartedAlgebroid& alg, const PhasePoint& x) {
  alg.chart.require_inside(x.q);
  if (x.p.size() != alg.rank)
    throw PreconditionError("phase point has wrong fiber dimension");
}

/// Fiberwise-linear Poisson bivector on the dual bundle, as a matrix on the
/// chart coordinates (q^1..q^m, p_1..p_n):
///
///   Pi[q_i, p_a] =  rho^i_a(q)
///   Pi[p_a, p_b] = -C^g_{ab}(q) p_g        Pi[q_i, q_j] = 0
///
/// Sign convention: the bracket of two fiber-linear momentum functions is
/// MINUS the structure functions, {p_a, p_b} = -C^g_{ab} p_g. Much of the
/// literature uses the opposite sign; all built-ins and tests here fix this
/// one. Exactly antisymmetric by construction.
inline Matrix poisson_bivector(const ChartedAlgebroid& alg, const PhasePoint& x) {
  check_phase_point(alg, x);
  const int m = alg.base_dim();
  const int n = alg.rank;
  const Matrix rho = alg.anchor_at(x.q);
  const Matrix s = contract_upper(alg.structure_at(x.q), x.p);

  Matrix pi = Matrix::Zero(m + n, m + n);
  pi.topRightCorner(m, n) = rho;
  pi.bottomLeftCorner(n, m) = -rho.transpose();
  pi.bottomRightCorner(n, n) = -s;
  return pi;
}

/// q-derivative (k < m) or p-derivative (k >= m) of the bivector matrix.
inline Matrix poisson_bivector_derivative(const ChartedAlgebroid& alg,
                                          const PhasePoint& x, int k) {
  const int m = alg.base_dim();
  const int n = alg.rank;
  Matrix d = Matrix::Zero(m + n, m + n);
  if (k < m) {
    const Tensor3 drho = alg.anchor_jacobian_at(x.q);
    const std::vector<Tensor3> dc = alg.structure_jacobian_at(x.q);
    d.topRightCorner(m, n) = drho[k];
    d.bottomLeftCorner(n, m) = -drho[k].transpose();
    d.bottomRightCorner(n, n) = -contract_upper(dc[k], x.p);
  } else {
    const Tensor3 c = alg.structure_at(x.q);
    d.bottomRightCorner(n, n) = -c[k - m];
  }
  return d;
}

/// {F, G}(x) = grad F . Pi(x) . grad G.
inline double poisson_bracket(const ChartedAlgebroid& alg,
                              const ScalarPhaseField& f,
                              const ScalarPhaseField& g, const PhasePoint& x) {
  const Matrix pi = poisson_bivector(alg, x);
  const double v = f.grad(x).dot(pi * g.grad(x));
  require_finite(v, "poisson_bracket");
  return v;
}

/// Hamiltonian vector field in chart coordinates,
///   qdot^i = dH/dp_a rho^i_a
///   pdot_a = -(dH/dq^i rho^i_a + dH/dp_b C^g_{ab} p_g),
/// equal to Pi(x) . grad H(x).
inline Vector hamiltonian_vector_field(const ChartedAlgebroid& alg,
                                       const ScalarPhaseField& h,
                                       const PhasePoint& x) {
  check_phase_point(alg, x);
  const int m = alg.base_dim();
  const int n = alg.rank;
  const Matrix rho = alg.anchor_at(x.q);
  const Matrix s = contract_upper(alg.structure_at(x.q), x.p);
  const Vector grad = h.grad(x);
  const Vector hq = grad.head(m);
  const Vector hp = grad.tail(n);

  Vector out(m + n);
  out.head(m) = rho * hp;
  out.tail(n) = -(rho.transpose() * hq + s * hp);
  require_finite(out, "hamiltonian_vector_field");
  return out;
}

/// hamiltonian_vector_field specialized to a mechanical Hamiltonian, with
/// the fiber derivative G(q) p exact in closed form.
inline Vector mechanical_rhs(const ChartedAlgebroid& alg,
                             const MechanicalHamiltonian& mech,
                             const PhasePoint& x) {
  check_phase_point(alg, x);
  const int m = alg.base_dim();
  const int n = alg.rank;
  const Matrix rho = alg.anchor_at(x.q);
  const Matrix s = contract_upper(alg.structure_at(x.q), x.p);
  const Vector hp = mech.grad_p(x);
  const Vector hq = mech.grad_q(x);

  Vector out(m + n);
  out.head(m) = rho * hp;
  out.tail(n) = -(rho.transpose() * hq + s * hp);
  require_finite(out, "mechanical_rhs");
  return out;
}

namespace detail {

template <typename Rhs>
Matrix fd_rhs_jacobian(const Rhs& rhs, const PhasePoint& x) {
  const int m = static_cast<int>(x.q.size());
  const Vector s0 = x.stacked();
  return central_jacobian(
      [&](const Vector& s) { return rhs(PhasePoint::from_stacked(s, m)); }, s0,
      s0.size());
}

}  // namespace detail

/// Jacobian d X_H / d (q, p) of the mechanical vector field. Analytic when
/// the model supplies analytic anchor/structure derivatives, a constant
/// cometric and a potential Hessian; central differences of the full RHS
/// otherwise (same step rule as elsewhere).
inline Matrix mechanical_rhs_jacobian(const ChartedAlgebroid& alg,
                                      const MechanicalHamiltonian& mech,
                                      const PhasePoint& x) {
  const int m = alg.base_dim();
  const int n = alg.rank;
  const bool analytic = alg.has_analytic_jacobians() && mech.cometric_constant &&
                        (m == 0 || static_cast<bool>(mech.potential.hessian));
  if (!analytic)
    return detail::fd_rhs_jacobian(
        [&](const PhasePoint& y) { return mechanical_rhs(alg, mech, y); }, x);

  const Matrix rho = alg.anchor_at(x.q);
  const Tensor3 c = alg.structure_at(x.q);
  const Matrix g = mech.cometric_at(x.q);
  const Matrix s = contract_upper(c, x.p);
  const Vector u = g * x.p;  // dH/dp

  Matrix jac = Matrix::Zero(m + n, m + n);
  // dqdot/dp = rho G
  jac.topRightCorner(m, n) = rho * g;
  // dpdot/dp = -(S G + [C^b u]_ab)
  Matrix dpdp = -(s * g);
  for (int b = 0; b < n; ++b) dpdp.col(b) -= c[b] * u;
  jac.bottomRightCorner(n, n) = dpdp;

  if (m > 0) {
    const Tensor3 drho = alg.anchor_jacobian_at(x.q);
    const std::vector<Tensor3> dc = alg.structure_jacobian_at(x.q);
    const Vector w = mech.potential.grad(x.q);
    const Matrix hv = mech.potential.hessian(x.q);
    for (int j = 0; j < m; ++j) {
      // dqdot/dq^j = d_j rho . u
      jac.block(0, j, m, 1) = drho[j] * u;
      // dpdot_a/dq^j = -(HessV(i,j) rho^i_a + w_i d_j rho^i_a
      //                  + u_b d_j C^g_{ab} p_g)
      Vector col = rho.transpose() * hv.col(j) + drho[j].transpose() * w +
                   contract_upper(dc[j], x.p) * u;
      jac.block(m, j, n, 1) = -col;
    }
  }
  return jac;
}

/// Jacobian of the generic Hamiltonian vector field X = Pi grad H. Analytic
/// when H carries a Hessian and the algebroid has analytic derivatives.
inline Matrix phase_rhs_jacobian(const ChartedAlgebroid& alg,
                                 const ScalarPhaseField& h,
                                 const PhasePoint& x) {
  const int m = alg.base_dim();
  const int n = alg.rank;
  const bool analytic = alg.has_analytic_jacobians() &&
                        static_cast<bool>(h.hessian) &&
                        static_cast<bool>(h.gradient);
  if (!analytic)
    return detail::fd_rhs_jacobian(
        [&](const PhasePoint& y) { return hamiltonian_vector_field(alg, h, y); },
        x);

  const Matrix pi = poisson_bivector(alg, x);
  const Vector grad = h.gradient(x);
  const Matrix hess = h.hessian(x);
  Matrix jac = pi * hess;
  for (int k = 0; k < m + n; ++k)
    jac.col(k) += poisson_bivector_derivative(alg, x, k) * grad;
  return jac;
}

/// Pointwise product F G with the product-rule gradient.
inline ScalarPhaseField product_field(const ScalarPhaseField& f,
                                      const ScalarPhaseField& g) {
  ScalarPhaseField out;
  out.value = [f, g](const PhasePoint& x) { return f.value(x) * g.value(x); };
  if (f.gradient && g.gradient)
    out.gradient = [f, g](const PhasePoint& x) {
      return (f.value(x) * g.gradient(x) + g.value(x) * f.gradient(x)).eval();
    };
  return out;
}

/// The bracket {F, G} as a field in its own right. Its gradient is assembled
/// from the bivector derivatives and the operand Hessians,
///   d_k {F, G} = Hess F e_k . Pi grad G + grad F . d_k Pi grad G
///              + grad F . Pi Hess G e_k,
/// so iterated brackets (Jacobi tests) stay analytic. Falls back to finite
/// differences of the value when the pieces are missing.
inline ScalarPhaseField bracket_field(const ChartedAlgebroid& alg,
                                      const ScalarPhaseField& f,
                                      const ScalarPhaseField& g) {
  ScalarPhaseField out;
  out.value = [alg, f, g](const PhasePoint& x) {
    return poisson_bracket(alg, f, g, x);
  };
  if (f.gradient && g.gradient && f.hessian && g.hessian) {
    out.gradient = [alg, f, g](const PhasePoint& x) {
      const int d = alg.base_dim() + alg.rank;
      const Matrix pi = poisson_bivector(alg, x);
      const Vector gf = f.gradient(x);
      const Vector gg = g.gradient(x);
      const Matrix hf = f.hessian(x);
      const Matrix hg = g.hessian(x);
      const Vector pig = pi * gg;
      const Vector pitf = pi.transpose() * gf;
      Vector grad = hf.transpose() * pig + hg.transpose() * pitf;
      for (int k = 0; k < d; ++k)
        grad[k] += gf.dot(poisson_bivector_derivative(alg, x, k) * gg);
      return grad;
    };
  }
  return out;
}

}  // namespace algebroid
