#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algebroid/core.hpp"
#include "algebroid/hamiltonian.hpp"
#include "algebroid/modular.hpp"
#include "algebroid/poisson.hpp"
#include "algebroid/rng.hpp"
#include "algebroid/volume_flow.hpp"

namespace algebroid {

struct NamedCasimir {
  std::string name;
  ScalarPhaseField field;
};

struct ExpectedProperties {
  bool unimodular = true;
  std::vector<NamedCasimir> casimirs;
};

/// A ready-to-run example system: algebroid + mechanical Hamiltonian +
/// reference volume densities, an optional unimodularity certificate, and
/// documented expectations. Construction validates the structure equations
/// on the sampling box and probes supplied gradients; a bundle that fails
/// its own residuals never escapes the factory.
struct ModelBundle {
  std::string name;
  ChartedAlgebroid algebroid;
  MechanicalHamiltonian hamiltonian;
  VolumeSpec volume;
  std::optional<UnimodularityCertificate> certificate;
  std::map<std::string, double> params;
  ExpectedProperties expected;
  std::string card;

  // finite q-window used for validation grids and random sampling
  std::pair<Vector, Vector> sampling_box{Vector(0), Vector(0)};
  double momentum_halfwidth = 2.0;
  // chart-interior initial conditions safe for fixed-horizon runs
  std::function<PhasePoint(CounterRng&)> ic_sampler;

  PhasePoint sample_point(CounterRng& rng) const {
    return {rng.uniform_vector(sampling_box.first, sampling_box.second),
            rng.uniform_box(algebroid.rank, momentum_halfwidth)};
  }

  PhasePoint sample_initial_condition(CounterRng& rng) const {
    if (ic_sampler) return ic_sampler(rng);
    return sample_point(rng);
  }
};

namespace detail {

inline Tensor3 zero_tensor3(int outer, int n) {
  return Tensor3(outer, Matrix::Zero(n, n));
}

/// Structure map for q-independent structure constants.
inline std::function<Tensor3(const Vector&)> constant_structure(Tensor3 c) {
  return [c = std::move(c)](const Vector&) { return c; };
}

inline Tensor3 so3_constants() {
  Tensor3 c = zero_tensor3(3, 3);
  // [e1,e2] = e3, [e2,e3] = e1, [e3,e1] = e2
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  c[0](1, 2) = 1.0;
  c[0](2, 1) = -1.0;
  c[1](2, 0) = 1.0;
  c[1](0, 2) = -1.0;
  return c;
}

inline Tensor3 se2_constants() {
  // e1 the rotation generator acting on the translations e2, e3:
  // [e1,e2] = e3, [e1,e3] = -e2
  Tensor3 c = zero_tensor3(3, 3);
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  c[1](0, 2) = -1.0;
  c[1](2, 0) = 1.0;
  return c;
}

inline Tensor3 aff1_constants() {
  // [e1,e2] = e2
  Tensor3 c = zero_tensor3(2, 2);
  c[1](0, 1) = 1.0;
  c[1](1, 0) = -1.0;
  return c;
}

inline Tensor3 heisenberg_constants() {
  // [e1,e2] = e3
  Tensor3 c = zero_tensor3(3, 3);
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  return c;
}

inline Tensor3 lie_constants(const std::string& name) {
  if (name == "so3") return so3_constants();
  if (name == "se2") return se2_constants();
  if (name == "aff1") return aff1_constants();
  if (name == "heisenberg") return heisenberg_constants();
  throw ModelError("unknown Lie algebra name: " + name);
}

inline bool lie_unimodular(const std::string& name) { return name != "aff1"; }

inline MechanicalHamiltonian constant_kinetic(const Matrix& cometric) {
  MechanicalHamiltonian mech;
  mech.cometric = [cometric](const Vector&) { return cometric; };
  mech.cometric_constant = true;
  mech.potential = ScalarField::zero();
  return mech;
}

/// p_a p_b quadratic on the fiber slots, as a named Casimir candidate.
inline ScalarPhaseField momentum_quadratic(int m, int n,
                                           const std::vector<int>& slots) {
  Matrix a = Matrix::Zero(m + n, m + n);
  for (int s : slots) a(m + s, m + s) = 2.0;
  return make_quadratic_phase_field(m, a, Vector::Zero(m + n), 0.0);
}

inline ScalarPhaseField momentum_coordinate(int m, int n, int slot) {
  Vector b = Vector::Zero(m + n);
  b[m + slot] = 1.0;
  return make_quadratic_phase_field(m, Matrix::Zero(m + n, m + n), b, 0.0);
}

inline std::vector<NamedCasimir> lie_casimirs(const std::string& name, int m,
                                              int n) {
  if (name == "so3")
    return {{"p_squared", momentum_quadratic(m, n, {0, 1, 2})}};
  if (name == "se2")
    return {{"translation_p_squared", momentum_quadratic(m, n, {1, 2})}};
  if (name == "heisenberg")
    return {{"p3", momentum_coordinate(m, n, 2)}};
  return {};
}

/// Construction-time gate: structure residuals on a Halton grid plus seeded
/// random points of the sampling box must stay below `tol`.
inline void validate_bundle(const ModelBundle& b, double tol = 1e-8,
                            int grid_points = 24, int random_points = 16,
                            std::uint64_t seed = 0xb0d1e5ULL) {
  b.algebroid.validate();
  const int m = b.algebroid.base_dim();
  std::vector<Vector> pts;
  if (m == 0) {
    pts.push_back(Vector(0));
  } else {
    for (int k = 1; k <= grid_points; ++k)
      pts.push_back(halton_point(k, b.sampling_box.first, b.sampling_box.second));
    CounterRng rng(seed);
    for (int k = 0; k < random_points; ++k)
      pts.push_back(rng.uniform_vector(b.sampling_box.first, b.sampling_box.second));
  }
  double worst = 0.0;
  for (const Vector& q : pts) {
    worst = std::max(worst, max_abs(anchor_compat_residual(b.algebroid, q)));
    worst = std::max(worst, max_abs(jacobi_residual(b.algebroid, q)));
  }
  if (!(worst < tol))
    throw ModelError("model '" + b.name + "' fails the structure equations (max residual " +
                     std::to_string(worst) + ")");
  if (m > 0) {
    validate_gradient(b.hamiltonian.potential, b.sampling_box.first,
                      b.sampling_box.second);
    validate_gradient(b.volume.base_log_density, b.sampling_box.first,
                      b.sampling_box.second);
    validate_gradient(b.volume.fiber_log_density, b.sampling_box.first,
                      b.sampling_box.second);
    if (b.certificate)
      validate_gradient(b.certificate->sigma, b.sampling_box.first,
                        b.sampling_box.second);
  }
}

}  // namespace detail

/// Tangent-bundle system on R^m: identity anchor, vanishing structure
/// functions, Euclidean cometric and a configurable potential (harmonic by
/// default). The canonical phase-space volume is preserved, certificate
/// sigma = 0.
inline ModelBundle make_standard(int m, std::optional<ScalarField> potential = {},
                                 const std::string& name = "") {
  if (m < 1) throw ModelError("make_standard requires m >= 1");
  ModelBundle b;
  b.name = name.empty() ? ("standard-" + std::to_string(m) + "d") : name;
  b.algebroid.chart = BaseChart::unbounded(m);
  b.algebroid.rank = m;
  b.algebroid.anchor = [m](const Vector&) { return Matrix::Identity(m, m); };
  b.algebroid.structure = detail::constant_structure(detail::zero_tensor3(m, m));
  b.algebroid.anchor_jac = [m](const Vector&) {
    return Tensor3(m, Matrix::Zero(m, m));
  };
  b.algebroid.structure_jac = [m](const Vector&) {
    return std::vector<Tensor3>(m, detail::zero_tensor3(m, m));
  };

  b.hamiltonian = detail::constant_kinetic(Matrix::Identity(m, m));
  if (potential) {
    b.hamiltonian.potential = *potential;
  } else {
    b.hamiltonian.potential =
        ScalarField{[](const Vector& q) { return 0.5 * q.squaredNorm(); },
                    [](const Vector& q) { return q; },
                    [](const Vector& q) { return Matrix::Identity(q.size(), q.size()); }};
  }

  b.volume = VolumeSpec::lebesgue();
  b.certificate = UnimodularityCertificate{ScalarField::zero(), true};
  b.expected.unimodular = true;
  b.params = {{"m", static_cast<double>(m)}};
  b.card = "Canonical mechanics on R^" + std::to_string(m) +
           ": identity anchor, zero structure functions, Euclidean kinetic term.";
  b.sampling_box = b.algebroid.chart.finite_box(2.0);
  detail::validate_bundle(b);
  return b;
}

/// Lie algebra over a point with kinetic Hamiltonian G = inertia^{-1}.
/// Supported names: so3, se2, aff1, heisenberg. aff1 is the minimal
/// non-unimodular case; its kinetic flow compresses phase volume.
inline ModelBundle make_lie_algebra(const std::string& lie_name,
                                    std::optional<Matrix> inertia = {}) {
  const Tensor3 c = detail::lie_constants(lie_name);
  const int n = static_cast<int>(c.size());
  Matrix in = inertia ? *inertia : Matrix::Identity(n, n);
  if (in.rows() != n || in.cols() != n)
    throw ModelError("inertia has wrong shape for " + lie_name);
  Eigen::LLT<Matrix> llt(in);
  if (llt.info() != Eigen::Success)
    throw ModelError("inertia must be symmetric positive definite");

  ModelBundle b;
  b.name = lie_name;
  b.algebroid.chart = BaseChart::point();
  b.algebroid.rank = n;
  b.algebroid.anchor = [n](const Vector&) { return Matrix::Zero(0, n); };
  b.algebroid.structure = detail::constant_structure(c);

  b.hamiltonian = detail::constant_kinetic(in.inverse());
  b.volume = VolumeSpec::lebesgue();
  b.expected.unimodular = detail::lie_unimodular(lie_name);
  if (b.expected.unimodular)
    b.certificate = UnimodularityCertificate{ScalarField::zero(), true};
  b.expected.casimirs = detail::lie_casimirs(lie_name, 0, n);
  for (int i = 0; i < n; ++i)
    b.params["inertia_" + std::to_string(i + 1)] = in(i, i);
  b.card = "Lie-Poisson dynamics on the dual of " + lie_name +
           " with kinetic energy 1/2 p . inertia^{-1} p.";
  b.sampling_box = {Vector(0), Vector(0)};
  detail::validate_bundle(b);
  return b;
}

/// Heavy top as the rotation algebra acting on the sphere, in spherical
/// coordinates (theta, phi) with pole guard 1e-3 on theta; phi is left
/// unbounded (the chart formulas are periodic). Anchor columns are the
/// rotation generators; the base volume is the spherical area density
/// sin(theta) so the reference volume is rotation invariant, and the bundle
/// carries the certificate sigma = 0. V = mass * grav * length * (x . axis).
inline ModelBundle make_heavy_top(double mass = 1.0, double grav = 1.0,
                                  double length = 0.2,
                                  std::optional<Matrix> inertia = {},
                                  Eigen::Vector3d axis = {0.0, 0.0, 1.0}) {
  if (!(mass > 0.0) || !(grav >= 0.0) || !(length > 0.0))
    throw ModelError("heavy top: mass and length must be positive");
  if (std::abs(axis.norm() - 1.0) > 1e-12)
    throw ModelError("heavy top: axis must be a unit vector");
  Matrix in = inertia ? *inertia
                      : static_cast<Matrix>(Eigen::Vector3d(1.0, 1.5, 2.0).asDiagonal());
  Eigen::LLT<Matrix> llt(in);
  if (in.rows() != 3 || in.cols() != 3 || llt.info() != Eigen::Success)
    throw ModelError("heavy top: inertia must be 3x3 SPD");

  constexpr double kGuard = 1e-3;
  const double pi = std::acos(-1.0);

  ModelBundle b;
  b.name = "heavy-top";
  b.algebroid.chart.dim = 2;
  b.algebroid.chart.coord_names = {"theta", "phi"};
  b.algebroid.chart.lower = Vector(2);
  b.algebroid.chart.upper = Vector(2);
  b.algebroid.chart.lower << kGuard, -std::numeric_limits<double>::infinity();
  b.algebroid.chart.upper << pi - kGuard, std::numeric_limits<double>::infinity();
  b.algebroid.rank = 3;

  // rho(e_a) = x cross e_a expressed in (theta, phi)
  b.algebroid.anchor = [](const Vector& q) {
    const double th = q[0], ph = q[1];
    const double ct = std::cos(th) / std::sin(th);
    Matrix rho(2, 3);
    rho << std::sin(ph), -std::cos(ph), 0.0,
           ct * std::cos(ph), ct * std::sin(ph), -1.0;
    return rho;
  };
  b.algebroid.anchor_jac = [](const Vector& q) {
    const double th = q[0], ph = q[1];
    const double ct = std::cos(th) / std::sin(th);
    const double csc2 = 1.0 / (std::sin(th) * std::sin(th));
    Tensor3 d(2, Matrix::Zero(2, 3));
    // d/dtheta
    d[0] << 0.0, 0.0, 0.0,
            -csc2 * std::cos(ph), -csc2 * std::sin(ph), 0.0;
    // d/dphi
    d[1] << std::cos(ph), std::sin(ph), 0.0,
            -ct * std::sin(ph), ct * std::cos(ph), 0.0;
    return d;
  };
  b.algebroid.structure = detail::constant_structure(detail::so3_constants());
  b.algebroid.structure_jac = [](const Vector&) {
    return std::vector<Tensor3>(2, detail::zero_tensor3(3, 3));
  };

  b.hamiltonian = detail::constant_kinetic(in.inverse());
  const double mgl = mass * grav * length;
  auto embed = [](const Vector& q) {
    return Eigen::Vector3d(std::sin(q[0]) * std::cos(q[1]),
                           std::sin(q[0]) * std::sin(q[1]), std::cos(q[0]));
  };
  b.hamiltonian.potential = ScalarField{
      [mgl, axis, embed](const Vector& q) { return mgl * embed(q).dot(axis); },
      [mgl, axis](const Vector& q) {
        const double th = q[0], ph = q[1];
        const Eigen::Vector3d dth(std::cos(th) * std::cos(ph),
                                  std::cos(th) * std::sin(ph), -std::sin(th));
        const Eigen::Vector3d dph(-std::sin(th) * std::sin(ph),
                                  std::sin(th) * std::cos(ph), 0.0);
        Vector g(2);
        g << mgl * dth.dot(axis), mgl * dph.dot(axis);
        return g;
      },
      [mgl, axis, embed](const Vector& q) {
        const double th = q[0], ph = q[1];
        const Eigen::Vector3d x = embed(q);
        const Eigen::Vector3d dthph(-std::cos(th) * std::sin(ph),
                                    std::cos(th) * std::cos(ph), 0.0);
        const Eigen::Vector3d dphph(-std::sin(th) * std::cos(ph),
                                    -std::sin(th) * std::sin(ph), 0.0);
        Matrix h(2, 2);
        h(0, 0) = mgl * (-x).dot(axis);
        h(0, 1) = h(1, 0) = mgl * dthph.dot(axis);
        h(1, 1) = mgl * dphph.dot(axis);
        return h;
      }};

  b.volume.base_log_density = ScalarField{
      [](const Vector& q) { return std::log(std::sin(q[0])); },
      [](const Vector& q) {
        Vector g(2);
        g << std::cos(q[0]) / std::sin(q[0]), 0.0;
        return g;
      },
      [](const Vector& q) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = -1.0 / (std::sin(q[0]) * std::sin(q[0]));
        return h;
      }};
  b.volume.fiber_log_density = metric_lambda_field(b.hamiltonian);
  b.certificate = UnimodularityCertificate{ScalarField::zero(), true};
  b.expected.unimodular = true;

  b.params = {{"mass", mass}, {"grav", grav}, {"length", length},
              {"inertia_1", in(0, 0)}, {"inertia_2", in(1, 1)},
              {"inertia_3", in(2, 2)}};
  b.card =
      "Heavy top: rotation generators acting on the sphere in spherical "
      "coordinates, kinetic metric from the inertia tensor, linear potential "
      "along the symmetry axis. Reference volume sin(theta) dtheta dphi dp.";

  Vector lo(2), hi(2);
  lo << 0.35, -3.0;
  hi << pi - 0.35, 3.0;
  b.sampling_box = {lo, hi};
  b.momentum_halfwidth = 2.0;

  // spins near-aligned with the vertical at mid-latitudes stay well inside
  // the chart over desk-scale horizons
  b.ic_sampler = [in, embed, pi](CounterRng& rng) {
    Vector q(2);
    q << rng.uniform(pi / 2 - 0.4, pi / 2 + 0.4), rng.uniform(-0.5, 0.5);
    const double spin = rng.uniform(1.0, 2.0);
    Eigen::Vector3d omega = spin * embed(q);
    Vector p = in * omega;
    for (int i = 0; i < 3; ++i) p[i] += rng.uniform(-0.1, 0.1);
    return PhasePoint{q, p};
  };

  detail::validate_bundle(b);
  return b;
}

/// Two planar rigid bodies joined at their centers of mass: an Atiyah-type
/// bundle over the shape circle with the planar Euclidean algebra in the
/// fiber. Slot order (rotation, translation x, translation y, shape); the
/// mass matrix couples rotation and shape with the second body's inertia.
inline ModelBundle make_beanie(double mass = 1.0, double inertia1 = 1.0,
                               double inertia2 = 0.5) {
  if (!(mass > 0.0) || !(inertia1 > 0.0) || !(inertia2 > 0.0))
    throw ModelError("beanie: mass and inertias must be positive");
  const double pi = std::acos(-1.0);

  ModelBundle b;
  b.name = "beanie";
  b.algebroid.chart.dim = 1;
  b.algebroid.chart.coord_names = {"theta"};
  b.algebroid.chart.lower = Vector::Constant(1, -pi);
  b.algebroid.chart.upper = Vector::Constant(1, pi);
  b.algebroid.rank = 4;

  b.algebroid.anchor = [](const Vector&) {
    Matrix rho(1, 4);
    rho << 0.0, 0.0, 0.0, 1.0;
    return rho;
  };
  b.algebroid.anchor_jac = [](const Vector&) {
    return Tensor3(1, Matrix::Zero(1, 4));
  };
  Tensor3 c = detail::zero_tensor3(4, 4);
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  c[1](0, 2) = -1.0;
  c[1](2, 0) = 1.0;
  b.algebroid.structure = detail::constant_structure(c);
  b.algebroid.structure_jac = [](const Vector&) {
    return std::vector<Tensor3>(1, detail::zero_tensor3(4, 4));
  };

  Matrix metric = Matrix::Zero(4, 4);
  metric(0, 0) = inertia1 + inertia2;
  metric(0, 3) = metric(3, 0) = inertia2;
  metric(1, 1) = metric(2, 2) = mass;
  metric(3, 3) = inertia2;
  Eigen::LLT<Matrix> llt(metric);
  if (llt.info() != Eigen::Success)
    throw ModelError("beanie: mass matrix is not positive definite");
  b.hamiltonian = detail::constant_kinetic(metric.inverse());

  b.volume = VolumeSpec::lebesgue();
  b.volume.fiber_log_density = metric_lambda_field(b.hamiltonian);
  b.certificate = UnimodularityCertificate{ScalarField::zero(), true};
  b.expected.unimodular = true;
  b.expected.casimirs = {
      {"translation_p_squared", detail::momentum_quadratic(1, 4, {1, 2})}};
  b.params = {{"mass", mass}, {"inertia_1", inertia1}, {"inertia_2", inertia2}};
  b.card =
      "Coupled planar bodies (rotation, two translations, relative shape "
      "angle over the circle). Constant mass matrix with rotation-shape "
      "coupling; free motion preserves the flat phase volume.";

  b.sampling_box = {Vector::Constant(1, -2.8), Vector::Constant(1, 2.8)};
  b.momentum_halfwidth = 2.0;

  const double i1 = inertia1, i2 = inertia2;
  b.ic_sampler = [i1, i2](CounterRng& rng) {
    Vector q = Vector::Constant(1, rng.uniform(-0.5, 0.5));
    Vector p(4);
    p[0] = rng.uniform(-0.5, 0.5);
    p[1] = rng.uniform(-1.0, 1.0);
    p[2] = rng.uniform(-1.0, 1.0);
    // bound the shape velocity so theta stays inside the cut over T ~ 10
    const double shape_rate = rng.uniform(-0.03, 0.03);
    p[3] = i2 * (i1 * shape_rate + p[0]) / (i1 + i2);
    return PhasePoint{q, p};
  };

  detail::validate_bundle(b);
  return b;
}

/// Product of a Lie algebra with the tangent bundle of R^{m_base}: the
/// anchor kills the algebra slots and is the identity on the base slots,
/// the structure functions live on the algebra slots only, and the cometric
/// is block diagonal. Hamilton's equations split into a canonical block and
/// a Lie-Poisson block.
inline ModelBundle make_trivial_atiyah(const std::string& lie_name, int m_base,
                                       std::optional<Matrix> inertia = {}) {
  if (m_base < 1) throw ModelError("make_trivial_atiyah requires m_base >= 1");
  const Tensor3 cg = detail::lie_constants(lie_name);
  const int ng = static_cast<int>(cg.size());
  const int n = ng + m_base;
  Matrix in = inertia ? *inertia : Matrix::Identity(ng, ng);

  ModelBundle b;
  b.name = "atiyah-" + lie_name;
  b.algebroid.chart = BaseChart::unbounded(m_base, "x");
  b.algebroid.rank = n;
  b.algebroid.anchor = [m_base, n](const Vector&) {
    Matrix rho = Matrix::Zero(m_base, n);
    rho.rightCols(m_base).setIdentity();
    return rho;
  };
  b.algebroid.anchor_jac = [m_base, n](const Vector&) {
    return Tensor3(m_base, Matrix::Zero(m_base, n));
  };
  Tensor3 c = detail::zero_tensor3(n, n);
  for (int g = 0; g < ng; ++g) c[g].topLeftCorner(ng, ng) = cg[g];
  b.algebroid.structure = detail::constant_structure(c);
  b.algebroid.structure_jac = [m_base, n](const Vector&) {
    return std::vector<Tensor3>(m_base, detail::zero_tensor3(n, n));
  };

  Matrix cometric = Matrix::Identity(n, n);
  cometric.topLeftCorner(ng, ng) = in.inverse();
  b.hamiltonian = detail::constant_kinetic(cometric);

  b.volume = VolumeSpec::lebesgue();
  b.expected.unimodular = detail::lie_unimodular(lie_name);
  if (b.expected.unimodular)
    b.certificate = UnimodularityCertificate{ScalarField::zero(), true};
  b.expected.casimirs = detail::lie_casimirs(lie_name, m_base, n);
  b.params = {{"m_base", static_cast<double>(m_base)},
              {"algebra_rank", static_cast<double>(ng)}};
  b.card = "Product bundle " + lie_name + " x TR^" + std::to_string(m_base) +
           ": Hamilton's equations split into canonical and Lie-Poisson blocks.";
  b.sampling_box = b.algebroid.chart.finite_box(2.0);
  detail::validate_bundle(b);
  return b;
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {
      "standard-1d", "standard-2d", "so3",       "se2",
      "aff1",        "heisenberg",  "heavy-top", "beanie",
      "atiyah-so3",  "atiyah-aff1"};
  return names;
}

/// Catalog with fixed default parameters (documented via `params`).
inline ModelBundle make_builtin(const std::string& name) {
  if (name == "standard-1d") return make_standard(1);
  if (name == "standard-2d")
    return make_standard(2, ScalarField::zero(), "standard-2d");
  if (name == "so3")
    return make_lie_algebra(
        "so3", static_cast<Matrix>(Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal()));
  if (name == "se2") return make_lie_algebra("se2");
  if (name == "aff1") return make_lie_algebra("aff1");
  if (name == "heisenberg") return make_lie_algebra("heisenberg");
  if (name == "heavy-top") return make_heavy_top();
  if (name == "beanie") return make_beanie();
  if (name == "atiyah-so3")
    return make_trivial_atiyah(
        "so3", 2, static_cast<Matrix>(Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal()));
  if (name == "atiyah-aff1") return make_trivial_atiyah("aff1", 1);
  throw ModelError("unknown built-in model: " + name);
}

}  // namespace algebroid
