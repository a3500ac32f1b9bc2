#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "algebroid/errors.hpp"
#include "algebroid/fields.hpp"
#include "algebroid/hamiltonian.hpp"
#include "algebroid/poisson.hpp"

namespace algebroid {

enum class StepMethod { rk4_fixed, rkf45_adaptive };

struct IntegratorConfig {
  StepMethod method = StepMethod::rk4_fixed;
  double dt = 1e-3;          // fixed-step size
  double rtol = 1e-8;        // adaptive tolerances
  double atol = 1e-8;
  double dt_min = 1e-12;
  double dt_max = 1.0;
  double t_final = 1.0;
  int record_stride = 1;

  void validate() const {
    if (!(t_final >= 0.0)) throw PreconditionError("t_final must be >= 0");
    if (method == StepMethod::rk4_fixed) {
      if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    } else {
      if (!(rtol > 0.0) || !(atol > 0.0))
        throw PreconditionError("rtol and atol must be positive");
      if (!(dt_min > 0.0) || !(dt_max > 0.0) || dt_min > dt_max)
        throw PreconditionError("step bounds must be positive with dt_min <= dt_max");
    }
    if (record_stride < 1) throw PreconditionError("record_stride must be >= 1");
  }
};

/// Per-record scalar observable. `eval` may be stateful (accumulators); the
/// integrator calls it once per recorded state, in time order.
struct Monitor {
  std::string name;
  std::function<double(double t, const PhasePoint&)> eval;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<std::string> monitor_names;
  std::vector<std::vector<double>> monitor_values;  // [record][monitor]
  bool escaped = false;
  double escape_time = std::numeric_limits<double>::quiet_NaN();
};

/// One classical 4-stage Runge-Kutta step on a flat state vector.
template <typename Rhs>
Vector rk4_step(const Rhs& rhs, const Vector& x, double dt) {
  const Vector k1 = rhs(x);
  const Vector k2 = rhs(x + 0.5 * dt * k1);
  const Vector k3 = rhs(x + 0.5 * dt * k2);
  const Vector k4 = rhs(x + dt * k3);
  Vector out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  require_finite(out, "rk4_step");
  return out;
}

namespace detail {

// Fehlberg 4(5) tableau. The fifth-order solution is propagated (local
// extrapolation); the embedded difference drives step control.
struct Rkf45Result {
  Vector y5;
  double scaled_err;
};

template <typename Rhs>
Rkf45Result rkf45_attempt(const Rhs& rhs, const Vector& y, double h,
                          double atol, double rtol) {
  const Vector k1 = rhs(y);
  const Vector k2 = rhs(y + h * (0.25 * k1));
  const Vector k3 = rhs(y + h * ((3.0 / 32.0) * k1 + (9.0 / 32.0) * k2));
  const Vector k4 = rhs(y + h * ((1932.0 / 2197.0) * k1 - (7200.0 / 2197.0) * k2 +
                                 (7296.0 / 2197.0) * k3));
  const Vector k5 = rhs(y + h * ((439.0 / 216.0) * k1 - 8.0 * k2 +
                                 (3680.0 / 513.0) * k3 - (845.0 / 4104.0) * k4));
  const Vector k6 = rhs(y + h * ((-8.0 / 27.0) * k1 + 2.0 * k2 -
                                 (3544.0 / 2565.0) * k3 + (1859.0 / 4104.0) * k4 -
                                 (11.0 / 40.0) * k5));

  Vector y5 = y + h * ((16.0 / 135.0) * k1 + (6656.0 / 12825.0) * k3 +
                       (28561.0 / 56430.0) * k4 - (9.0 / 50.0) * k5 +
                       (2.0 / 55.0) * k6);
  const Vector err = h * ((1.0 / 360.0) * k1 - (128.0 / 4275.0) * k3 -
                          (2197.0 / 75240.0) * k4 + (1.0 / 50.0) * k5 +
                          (2.0 / 55.0) * k6);
  require_finite(y5, "rkf45_step");

  double scaled = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double tol = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    scaled = std::max(scaled, std::abs(err[i]) / tol);
  }
  return {std::move(y5), scaled};
}

}  // namespace detail

/// Energy monitor H(q, p) for a mechanical system.
inline Monitor make_energy_monitor(const MechanicalHamiltonian& mech) {
  return {"energy",
          [mech](double, const PhasePoint& x) { return mech.energy(x); }};
}

inline Monitor make_field_monitor(std::string name, const ScalarPhaseField& f) {
  return {std::move(name), [f](double, const PhasePoint& x) { return f.value(x); }};
}

/// Integrate the Hamilton equations for a mechanical system. Fixed-step RK4
/// or adaptive RKF45 (steps accepted when the embedded error estimate fits
/// atol/rtol). If the base point leaves the chart box the trajectory is
/// truncated and flagged, not an error, so partial data stays usable.
inline Trajectory integrate(const ChartedAlgebroid& alg,
                            const MechanicalHamiltonian& mech,
                            const PhasePoint& x0, const IntegratorConfig& cfg,
                            const std::vector<Monitor>& monitors = {}) {
  cfg.validate();
  check_phase_point(alg, x0);
  const int m = alg.base_dim();

  auto rhs = [&](const Vector& s) {
    return mechanical_rhs(alg, mech, PhasePoint::from_stacked(s, m));
  };

  Trajectory traj;
  for (const Monitor& mon : monitors) traj.monitor_names.push_back(mon.name);

  auto record = [&](double t, const Vector& s) {
    const PhasePoint x = PhasePoint::from_stacked(s, m);
    traj.times.push_back(t);
    traj.states.push_back(x);
    std::vector<double> row;
    row.reserve(monitors.size());
    for (const Monitor& mon : monitors) row.push_back(mon.eval(t, x));
    traj.monitor_values.push_back(std::move(row));
  };

  Vector s = x0.stacked();
  double t = 0.0;
  record(t, s);
  if (cfg.t_final == 0.0) return traj;

  const double tiny = 1e-12 * std::max(1.0, cfg.t_final);
  long step_index = 0;
  double h = (cfg.method == StepMethod::rk4_fixed)
                 ? cfg.dt
                 : std::min(cfg.dt_max, cfg.t_final);

  while (t < cfg.t_final - tiny) {
    double step = std::min(h, cfg.t_final - t);
    Vector s_next;
    double t_next = t + step;
    try {
      if (cfg.method == StepMethod::rk4_fixed) {
        s_next = rk4_step(rhs, s, step);
      } else {
        for (;;) {
          auto attempt = detail::rkf45_attempt(rhs, s, step, cfg.atol, cfg.rtol);
          const double factor =
              0.9 * std::pow(1.0 / std::max(attempt.scaled_err, 1e-10), 0.2);
          if (attempt.scaled_err <= 1.0) {
            s_next = std::move(attempt.y5);
            t_next = t + step;
            h = std::clamp(step * std::min(4.0, factor), cfg.dt_min, cfg.dt_max);
            break;
          }
          step *= std::clamp(factor, 0.1, 0.9);
          if (step < cfg.dt_min)
            throw StiffnessError("adaptive step fell below dt_min at t = " +
                                 std::to_string(t));
        }
      }
    } catch (const OutOfChartError&) {
      // a stage already left the box
      traj.escaped = true;
      traj.escape_time = t_next;
      return traj;
    }

    if (!alg.chart.contains(s_next.head(m))) {
      traj.escaped = true;
      traj.escape_time = t_next;
      return traj;
    }

    s = std::move(s_next);
    t = t_next;
    ++step_index;
    const bool last = t >= cfg.t_final - tiny;
    if (last || step_index % cfg.record_stride == 0) record(t, s);
  }
  return traj;
}

}  // namespace algebroid
