#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <cmath>
#include <memory>
#include <utility>

#include "algebroid/integrate.hpp"
#include "algebroid/modular.hpp"
#include "algebroid/poisson.hpp"

namespace algebroid {

/// Divergence of the Hamiltonian field at one point, split into the
/// coordinate part (trace of the flow Jacobian) and the density-advection
/// part X(sigma_tilde + sigma_nu + lambda).
struct DivergenceReport {
  PhasePoint point;
  double divergence = 0.0;
  double coordinate_term = 0.0;
  double density_term = 0.0;
};

/// Outcome of integrating the variational equations alongside a trajectory:
/// log det of the flow Jacobian and the quadrature of the coordinate
/// divergence, which agree up to integrator tolerance. The discrepancy is
/// always reported. When a reference volume is supplied, `volume_drift` is
/// the growth measured against that volume,
///   log det J + [sigma_tot(x(T)) - sigma_tot(x(0))],
/// which vanishes for flows preserving it even when the chart Lebesgue
/// volume does not (densities advect).
struct VolumeDriftReport {
  double t_final = 0.0;
  double log_det_jacobian = 0.0;
  double integrated_divergence = 0.0;
  double discrepancy = 0.0;
  std::optional<double> volume_drift;
};

namespace detail {

inline double advection_term(const VolumeSpec& vol, const PhaseDensity& density,
                             const PhasePoint& x, const Vector& flow) {
  const Eigen::Index m = x.q.size();
  const Eigen::Index n = x.p.size();
  Vector dlog = density.sigma_tilde.grad(x);
  if (m > 0)
    dlog.head(m) +=
        vol.base_log_density.grad(x.q) + vol.fiber_log_density.grad(x.q);
  (void)n;
  return flow.dot(dlog);
}

}  // namespace detail

/// Divergence of the mechanical Hamiltonian field with respect to
/// Phi = e^{sigma_tilde} nu ^ Lambda:
///   div(X) = sum_k d X^k / d x^k + X(sigma_tilde + sigma_nu + lambda).
inline DivergenceReport divergence(const ChartedAlgebroid& alg,
                                   const MechanicalHamiltonian& mech,
                                   const VolumeSpec& vol,
                                   const PhaseDensity& density,
                                   const PhasePoint& x) {
  check_phase_point(alg, x);
  DivergenceReport rep;
  rep.point = x;
  rep.coordinate_term = mechanical_rhs_jacobian(alg, mech, x).trace();
  rep.density_term =
      detail::advection_term(vol, density, x, mechanical_rhs(alg, mech, x));
  rep.divergence = rep.coordinate_term + rep.density_term;
  require_finite(rep.divergence, "divergence");
  return rep;
}

/// Same for a generic Hamiltonian phase field.
inline DivergenceReport divergence(const ChartedAlgebroid& alg,
                                   const ScalarPhaseField& h,
                                   const VolumeSpec& vol,
                                   const PhaseDensity& density,
                                   const PhasePoint& x) {
  check_phase_point(alg, x);
  DivergenceReport rep;
  rep.point = x;
  rep.coordinate_term = phase_rhs_jacobian(alg, h, x).trace();
  rep.density_term = detail::advection_term(
      vol, density, x, hamiltonian_vector_field(alg, h, x));
  rep.divergence = rep.coordinate_term + rep.density_term;
  require_finite(rep.divergence, "divergence");
  return rep;
}

/// Value of the modular vector field at x: the vertical lift of the modular
/// section, i.e. zero in the q slots and M_a(q) in the p slots.
inline Vector modular_vector_field_value(const ChartedAlgebroid& alg,
                                         const VolumeSpec& vol,
                                         const PhasePoint& x) {
  check_phase_point(alg, x);
  const int m = alg.base_dim();
  Vector out = Vector::Zero(m + alg.rank);
  out.tail(alg.rank) = modular_section(alg, vol, x.q).components;
  return out;
}

/// Fiber derivative d sigma_tilde / d p at x (the fiber component of the
/// associated map from the dual bundle to the bundle, in the model frame).
inline Vector vertical_derivative(const PhaseDensity& density,
                                  const PhasePoint& x) {
  const Vector g = density.sigma_tilde.grad(x);
  Vector out = g.tail(x.p.size());
  require_finite(out, "vertical_derivative");
  return out;
}

namespace detail {

/// Lock-step integration of state, variational matrix and divergence
/// quadrature: xdot = X(x), Ydot = J(x) Y, zdot = tr J(x), all advanced by
/// the same RK4 stages so the det/quadrature comparison is made on one
/// discrete trajectory.
struct DriftOutcome {
  VolumeDriftReport report;
  PhasePoint final_state;
};

template <typename RhsFn, typename JacFn>
DriftOutcome drift_outcome(const ChartedAlgebroid& alg, const RhsFn& rhs,
                           const JacFn& jac, const PhasePoint& x0,
                           double t_final, double dt) {
  check_phase_point(alg, x0);
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!(t_final >= 0.0)) throw PreconditionError("t_final must be >= 0");

  const int m = alg.base_dim();
  const int d = m + alg.rank;
  const int total = d + d * d + 1;

  auto aug_rhs = [&](const Vector& y) {
    const PhasePoint x = PhasePoint::from_stacked(y.head(d), m);
    const Matrix j = jac(x);
    Vector out(total);
    out.head(d) = rhs(x);
    Eigen::Map<const Matrix> ymat(y.data() + d, d, d);
    Eigen::Map<Matrix> omat(out.data() + d, d, d);
    omat = j * ymat;
    out[total - 1] = j.trace();
    return out;
  };

  Vector y(total);
  y.head(d) = x0.stacked();
  Eigen::Map<Matrix>(y.data() + d, d, d).setIdentity();
  y[total - 1] = 0.0;

  double t = 0.0;
  const double tiny = 1e-12 * std::max(1.0, t_final);
  while (t < t_final - tiny) {
    const double step = std::min(dt, t_final - t);
    Vector y_next;
    try {
      y_next = rk4_step(aug_rhs, y, step);
    } catch (const OutOfChartError&) {
      throw TrajectoryEscapeError(
          "trajectory left the chart at t = " + std::to_string(t + step),
          t + step);
    }
    if (!alg.chart.contains(y_next.segment(0, m)))
      throw TrajectoryEscapeError(
          "trajectory left the chart at t = " + std::to_string(t + step),
          t + step);
    y = std::move(y_next);
    t += step;
  }

  VolumeDriftReport rep;
  rep.t_final = t_final;
  rep.integrated_divergence = y[total - 1];
  Eigen::Map<const Matrix> ymat(y.data() + d, d, d);
  Eigen::PartialPivLU<Matrix> lu(ymat);
  const Matrix& lum = lu.matrixLU();
  double log_det = 0.0;
  double sign = static_cast<double>(lu.permutationP().determinant());
  for (int i = 0; i < d; ++i) {
    const double piv = lum(i, i);
    if (piv < 0) sign = -sign;
    log_det += std::log(std::abs(piv));
  }
  if (!(sign > 0) || !std::isfinite(log_det))
    throw NumericError("flow Jacobian determinant is not positive");
  rep.log_det_jacobian = log_det;
  rep.discrepancy = std::abs(rep.log_det_jacobian - rep.integrated_divergence);
  return {rep, PhasePoint::from_stacked(y.head(d), m)};
}

inline double total_log_density(const VolumeSpec& vol,
                                const PhaseDensity& density,
                                const PhasePoint& x) {
  double s = density.sigma_tilde.value(x);
  if (x.q.size() > 0)
    s += vol.base_log_density.value(x.q) + vol.fiber_log_density.value(x.q);
  return s;
}

}  // namespace detail

/// Integrate the variational equations Ydot = (dX/dx) Y, Y(0) = I along the
/// flow (same RK4 step sequence) and return log det Y(t_final) together with
/// the quadrature of the coordinate divergence. Chart exit is an error here
/// (the report would not cover [0, t_final]).
inline VolumeDriftReport jacobian_log_det(const ChartedAlgebroid& alg,
                                          const MechanicalHamiltonian& mech,
                                          const PhasePoint& x0, double t_final,
                                          double dt) {
  return detail::drift_outcome(
             alg,
             [&](const PhasePoint& x) { return mechanical_rhs(alg, mech, x); },
             [&](const PhasePoint& x) {
               return mechanical_rhs_jacobian(alg, mech, x);
             },
             x0, t_final, dt)
      .report;
}

inline VolumeDriftReport jacobian_log_det(const ChartedAlgebroid& alg,
                                          const ScalarPhaseField& h,
                                          const PhasePoint& x0, double t_final,
                                          double dt) {
  return detail::drift_outcome(
             alg,
             [&](const PhasePoint& x) {
               return hamiltonian_vector_field(alg, h, x);
             },
             [&](const PhasePoint& x) { return phase_rhs_jacobian(alg, h, x); },
             x0, t_final, dt)
      .report;
}

/// Drift of the flow measured against Phi = e^{sigma_tilde} nu ^ Lambda:
/// fills `volume_drift` with log det J plus the change of the total log
/// density along the trajectory. Zero (to integrator tolerance) exactly when
/// the flow preserves Phi, whatever the chart densities do.
inline VolumeDriftReport volume_drift(const ChartedAlgebroid& alg,
                                      const MechanicalHamiltonian& mech,
                                      const VolumeSpec& vol,
                                      const PhaseDensity& density,
                                      const PhasePoint& x0, double t_final,
                                      double dt) {
  detail::DriftOutcome out = detail::drift_outcome(
      alg, [&](const PhasePoint& x) { return mechanical_rhs(alg, mech, x); },
      [&](const PhasePoint& x) { return mechanical_rhs_jacobian(alg, mech, x); },
      x0, t_final, dt);
  out.report.volume_drift =
      out.report.log_det_jacobian +
      detail::total_log_density(vol, density, out.final_state) -
      detail::total_log_density(vol, density, x0);
  return out.report;
}

/// Zero-section residual of the invariant-volume condition for a mechanical
/// system: with M the modular section for (e^{sigma} nu, Lambda_G),
///   R_mu = G^{mu a} M_a - dV/dq^i rho^i_a (d2 sigma_tilde / dp_a dp_mu)|_{p=0}.
/// Vanishing of R along the zero section is a necessary condition for
/// Phi = e^{sigma_tilde} nu ^ Lambda_G to be preserved by the flow; nothing
/// is claimed off the zero section.
inline Vector zero_section_obstruction(const ChartedAlgebroid& alg,
                                       const MechanicalHamiltonian& mech,
                                       const VolumeSpec& vol,
                                       const PhaseDensity& density,
                                       const ScalarField& cert_sigma,
                                       const Vector& q) {
  alg.chart.require_inside(q);
  const int n = alg.rank;

  // sigma must restrict sigma_tilde to the zero section
  const double at_zero = density.sigma_tilde.value({q, Vector::Zero(n)});
  if (std::abs(at_zero - cert_sigma.value(q)) > 1e-8)
    throw PreconditionError(
        "certificate sigma does not match sigma_tilde on the zero section");

  // modular section for base density sigma_nu + sigma and the metric fiber
  // volume Lambda_G
  VolumeSpec shifted;
  const ScalarField base = vol.base_log_density;
  shifted.base_log_density = ScalarField{
      [base, cert_sigma](const Vector& y) {
        return base.value(y) + cert_sigma.value(y);
      },
      (base.gradient && cert_sigma.gradient)
          ? std::function<Vector(const Vector&)>(
                [base, cert_sigma](const Vector& y) {
                  return (base.gradient(y) + cert_sigma.gradient(y)).eval();
                })
          : nullptr,
      nullptr};
  shifted.fiber_log_density = metric_lambda_field(mech);

  const Vector msec = modular_section(alg, shifted, q).components;
  const Matrix g = mech.cometric_at(q);
  const Matrix hess = density.fiber_hessian(q, n);

  Vector out = g * msec;
  if (alg.base_dim() > 0) {
    const Matrix rho = alg.anchor_at(q);
    const Vector dv = mech.potential.grad(q);
    out -= hess * (rho.transpose() * dv);
  }
  require_finite(out, "zero_section_obstruction");
  return out;
}

/// Instantaneous divergence as a trajectory monitor.
inline Monitor make_divergence_monitor(const ChartedAlgebroid& alg,
                                       const MechanicalHamiltonian& mech,
                                       const VolumeSpec& vol,
                                       const PhaseDensity& density) {
  return {"divergence", [alg, mech, vol, density](double, const PhasePoint& x) {
            return divergence(alg, mech, vol, density, x).divergence;
          }};
}

/// Trapezoid accumulation of the divergence over the recorded states.
inline Monitor make_accumulated_divergence_monitor(
    const ChartedAlgebroid& alg, const MechanicalHamiltonian& mech,
    const VolumeSpec& vol, const PhaseDensity& density) {
  struct State {
    double t = 0.0, last = 0.0, accum = 0.0;
    bool started = false;
  };
  auto state = std::make_shared<State>();
  return {"accumulated_divergence",
          [alg, mech, vol, density, state](double t, const PhasePoint& x) {
            const double div = divergence(alg, mech, vol, density, x).divergence;
            if (state->started)
              state->accum += 0.5 * (div + state->last) * (t - state->t);
            state->t = t;
            state->last = div;
            state->started = true;
            return state->accum;
          }};
}

}  // namespace algebroid
