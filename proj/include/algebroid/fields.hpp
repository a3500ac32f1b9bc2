#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "algebroid/errors.hpp"
#include "algebroid/finite_diff.hpp"
#include "algebroid/rng.hpp"

namespace algebroid {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point (q, p) of the dual bundle in chart coordinates.
struct PhasePoint {
  Vector q;
  Vector p;

  static PhasePoint zero(int m, int n) {
    return {Vector::Zero(m), Vector::Zero(n)};
  }

  Vector stacked() const {
    Vector x(q.size() + p.size());
    x << q, p;
    return x;
  }

  static PhasePoint from_stacked(const Vector& x, int m) {
    return {x.head(m), x.tail(x.size() - m)};
  }
};

/// Scalar function on the base chart. `gradient` and `hessian` are optional;
/// central differences substitute transparently unless allow_fd is cleared.
struct ScalarField {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;  // may be empty
  std::function<Matrix(const Vector&)> hessian;   // may be empty
  bool allow_fd = true;

  double operator()(const Vector& q) const { return value(q); }

  bool has_analytic_gradient() const { return static_cast<bool>(gradient); }

  Vector grad(const Vector& q) const {
    if (gradient) return gradient(q);
    if (!allow_fd)
      throw CapabilityError("scalar field: no gradient and finite differences disabled");
    return central_gradient(value, q);
  }

  Matrix hess(const Vector& q) const {
    if (hessian) return hessian(q);
    if (gradient)
      return central_jacobian([&](const Vector& y) { return gradient(y); }, q,
                              q.size());
    if (!allow_fd)
      throw CapabilityError("scalar field: no hessian and finite differences disabled");
    return central_hessian(value, q, 1e-4);
  }

  static ScalarField zero() {
    return {[](const Vector&) { return 0.0; },
            [](const Vector& q) { return Vector::Zero(q.size()); },
            [](const Vector& q) { return Matrix::Zero(q.size(), q.size()); }};
  }

  static ScalarField constant(double c) {
    return {[c](const Vector&) { return c; },
            [](const Vector& q) { return Vector::Zero(q.size()); },
            [](const Vector& q) { return Matrix::Zero(q.size(), q.size()); }};
  }
};

/// Scalar function on phase space (q, p). Gradients are stacked with the m
/// base slots first, then the n fiber slots.
struct ScalarPhaseField {
  std::function<double(const PhasePoint&)> value;
  std::function<Vector(const PhasePoint&)> gradient;  // may be empty
  std::function<Matrix(const PhasePoint&)> hessian;   // may be empty
  bool allow_fd = true;

  double operator()(const PhasePoint& x) const { return value(x); }

  bool has_analytic_gradient() const { return static_cast<bool>(gradient); }

  Vector grad(const PhasePoint& x) const {
    if (gradient) return gradient(x);
    if (!allow_fd)
      throw CapabilityError("phase field: no gradient and finite differences disabled");
    const int m = static_cast<int>(x.q.size());
    return central_gradient(
        [&](const Vector& s) { return value(PhasePoint::from_stacked(s, m)); },
        x.stacked());
  }

  Matrix hess(const PhasePoint& x) const {
    const int m = static_cast<int>(x.q.size());
    if (hessian) return hessian(x);
    if (gradient)
      return central_jacobian(
          [&](const Vector& s) { return gradient(PhasePoint::from_stacked(s, m)); },
          x.stacked(), x.q.size() + x.p.size());
    if (!allow_fd)
      throw CapabilityError("phase field: no hessian and finite differences disabled");
    return central_hessian(
        [&](const Vector& s) { return value(PhasePoint::from_stacked(s, m)); },
        x.stacked(), 1e-4);
  }

  /// Lift of a base function: f(q, p) = sigma(q).
  static ScalarPhaseField basic(const ScalarField& sigma, int n) {
    ScalarPhaseField f;
    f.value = [sigma](const PhasePoint& x) { return sigma.value(x.q); };
    if (sigma.gradient) {
      f.gradient = [sigma, n](const PhasePoint& x) {
        Vector g(x.q.size() + n);
        g.head(x.q.size()) = sigma.gradient(x.q);
        g.tail(n).setZero();
        return g;
      };
    }
    f.allow_fd = sigma.allow_fd;
    return f;
  }

  static ScalarPhaseField zero() {
    ScalarPhaseField f;
    f.value = [](const PhasePoint&) { return 0.0; };
    f.gradient = [](const PhasePoint& x) {
      return Vector::Zero(x.q.size() + x.p.size());
    };
    f.hessian = [](const PhasePoint& x) {
      const Eigen::Index d = x.q.size() + x.p.size();
      return Matrix::Zero(d, d);
    };
    return f;
  }
};

/// Quadratic phase function c + b.s + 1/2 s.A s of the stacked coordinates
/// s = (q, p), with exact gradient and Hessian. A must be symmetric.
inline ScalarPhaseField make_quadratic_phase_field(int m, const Matrix& a,
                                                   const Vector& b, double c) {
  ScalarPhaseField f;
  f.value = [a, b, c, m](const PhasePoint& x) {
    const Vector s = x.stacked();
    return c + b.dot(s) + 0.5 * s.dot(a * s);
  };
  f.gradient = [a, b, m](const PhasePoint& x) {
    return (b + a * x.stacked()).eval();
  };
  f.hessian = [a](const PhasePoint&) { return a; };
  return f;
}

/// Covector field on the base: components theta_alpha(q) in the dual frame,
/// with optional base Jacobian d theta_alpha / d q^j (rows alpha, cols j).
struct CovectorField {
  std::function<Vector(const Vector&)> components;
  std::function<Matrix(const Vector&)> base_jacobian;  // may be empty
  bool allow_fd = true;

  Vector operator()(const Vector& q) const { return components(q); }

  Matrix jac(const Vector& q, Eigen::Index n) const {
    if (base_jacobian) return base_jacobian(q);
    if (!allow_fd)
      throw CapabilityError("covector field: no jacobian and finite differences disabled");
    return central_jacobian(components, q, n);
  }
};

/// Probe a supplied gradient against central finite differences at `points`
/// seeded sample points inside [lo, hi]. Relative tolerance per component.
/// Used at construction time by the model loader and builders to catch
/// transcription errors in hand-written gradients.
inline void validate_gradient(const ScalarField& f, const Vector& lo,
                              const Vector& hi, int points = 5,
                              double rel_tol = 1e-4,
                              std::uint64_t seed = 0x5eedf1e1dULL) {
  if (!f.gradient || lo.size() == 0) return;
  CounterRng rng(seed);
  for (int k = 0; k < points; ++k) {
    const Vector q = rng.uniform_vector(lo, hi);
    const Vector ga = f.gradient(q);
    const Vector gn = central_gradient(f.value, q);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double scale = std::max({1.0, std::abs(ga[i]), std::abs(gn[i])});
      if (std::abs(ga[i] - gn[i]) > rel_tol * scale)
        throw ModelError("gradient check failed on component " +
                         std::to_string(i));
    }
  }
}

inline void validate_phase_gradient(const ScalarPhaseField& f, const Vector& qlo,
                                    const Vector& qhi, int n,
                                    double p_halfwidth = 2.0, int points = 5,
                                    double rel_tol = 1e-4,
                                    std::uint64_t seed = 0x5eedf1e1dULL) {
  if (!f.gradient) return;
  CounterRng rng(seed);
  const int m = static_cast<int>(qlo.size());
  for (int k = 0; k < points; ++k) {
    PhasePoint x{rng.uniform_vector(qlo, qhi), rng.uniform_box(n, p_halfwidth)};
    const Vector ga = f.gradient(x);
    const Vector gn = central_gradient(
        [&](const Vector& s) { return f.value(PhasePoint::from_stacked(s, m)); },
        x.stacked());
    for (Eigen::Index i = 0; i < ga.size(); ++i) {
      const double scale = std::max({1.0, std::abs(ga[i]), std::abs(gn[i])});
      if (std::abs(ga[i] - gn[i]) > rel_tol * scale)
        throw ModelError("phase gradient check failed on component " +
                         std::to_string(i));
    }
  }
}

}  // namespace algebroid
