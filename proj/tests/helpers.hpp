#pragma once

#include <Eigen/Dense>
#include <vector>

#include "algebroid/fields.hpp"
#include "algebroid/models.hpp"
#include "algebroid/rng.hpp"

namespace test_helpers {

using algebroid::CounterRng;
using algebroid::Matrix;
using algebroid::ModelBundle;
using algebroid::PhasePoint;
using algebroid::ScalarField;
using algebroid::ScalarPhaseField;
using algebroid::Vector;

/// Random quadratic phase function with exact gradient and Hessian,
/// coefficients in [-1, 1].
inline ScalarPhaseField random_quadratic(CounterRng& rng, int m, int n) {
  const int d = m + n;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.uniform(-1.0, 1.0);
  return algebroid::make_quadratic_phase_field(m, a, b, rng.uniform(-1.0, 1.0));
}

/// Random smooth base function a + b.q + 1/2 q.C q + s * sin(q_1), with
/// analytic gradient and Hessian.
inline ScalarField random_base_function(CounterRng& rng, int m) {
  if (m == 0) {
    const double c = rng.uniform(-1.0, 1.0);
    return ScalarField::constant(c);
  }
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform(-0.5, 0.5);
  Vector b(m);
  for (int i = 0; i < m; ++i) b[i] = rng.uniform(-1.0, 1.0);
  const double c = rng.uniform(-1.0, 1.0);
  const double s = rng.uniform(-0.5, 0.5);
  ScalarField f;
  f.value = [a, b, c, s](const Vector& q) {
    return c + b.dot(q) + 0.5 * q.dot(a * q) + s * std::sin(q[0]);
  };
  f.gradient = [a, b, s](const Vector& q) {
    Vector g = b + a * q;
    g[0] += s * std::cos(q[0]);
    return g;
  };
  f.hessian = [a, s](const Vector& q) {
    Matrix h = a;
    h(0, 0) -= s * std::sin(q[0]);
    return h;
  };
  return f;
}

inline PhasePoint random_point(const ModelBundle& b, CounterRng& rng) {
  return b.sample_point(rng);
}

/// Coordinate functions as phase fields, for bracket identities.
inline ScalarPhaseField coordinate_q(int m, int n, int i) {
  Vector b = Vector::Zero(m + n);
  b[i] = 1.0;
  return algebroid::make_quadratic_phase_field(m, Matrix::Zero(m + n, m + n), b, 0.0);
}

inline ScalarPhaseField coordinate_p(int m, int n, int a) {
  Vector b = Vector::Zero(m + n);
  b[m + a] = 1.0;
  return algebroid::make_quadratic_phase_field(m, Matrix::Zero(m + n, m + n), b, 0.0);
}

}  // namespace test_helpers
