#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "algebroid/integrate.hpp"
#include "algebroid/models.hpp"
#include "algebroid/volume_flow.hpp"
#include "helpers.hpp"

using namespace algebroid;

TEST_CASE("expected unimodularity matches the verification machinery",
          "[models][property]") {
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    INFO("model " << name);
    if (b.algebroid.base_dim() == 0) {
      const bool char_zero =
          modular_character(b.algebroid).cwiseAbs().maxCoeff() < 1e-12;
      REQUIRE(char_zero == b.expected.unimodular);
    }
    if (b.certificate) {
      CertificateCheckOptions opts;
      opts.box = b.sampling_box;
      REQUIRE(verify_certificate(b.algebroid, b.volume, *b.certificate, opts).pass ==
              b.expected.unimodular);
    }
  }
}

TEST_CASE("declared casimirs commute with everything", "[models][property]") {
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    const int m = b.algebroid.base_dim();
    const int n = b.algebroid.rank;
    CounterRng rng(61);
    for (const auto& cas : b.expected.casimirs) {
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const PhasePoint x = b.sample_point(rng);
        for (int a = 0; a < n; ++a)
          worst = std::max(
              worst, std::abs(poisson_bracket(
                         b.algebroid, cas.field,
                         test_helpers::coordinate_p(m, n, a), x)));
        for (int i = 0; i < m; ++i)
          worst = std::max(
              worst, std::abs(poisson_bracket(
                         b.algebroid, cas.field,
                         test_helpers::coordinate_q(m, n, i), x)));
      }
      INFO("model " << name << " casimir " << cas.name);
      REQUIRE(worst < 1e-8);
    }
  }
}

TEST_CASE("flat bundles", "[models]") {
  SECTION("harmonic oscillator bundle validates exactly") {
    ModelBundle b = make_standard(1);
    const Vector q = Vector::Constant(1, 0.3);
    REQUIRE(max_abs(anchor_compat_residual(b.algebroid, q)) == 0.0);
    REQUIRE(max_abs(jacobi_residual(b.algebroid, q)) == 0.0);
    REQUIRE(b.hamiltonian.potential.value(Vector::Constant(1, 2.0)) == 2.0);
  }

  SECTION("free particle geodesics are straight lines") {
    ModelBundle b = make_builtin("standard-2d");
    const PhasePoint x0{(Vector(2) << 0.1, -0.2).finished(),
                        (Vector(2) << 0.7, 0.4).finished()};
    IntegratorConfig cfg;
    cfg.t_final = 3.0;
    cfg.dt = 1e-3;
    cfg.record_stride = 500;
    const Trajectory traj = integrate(b.algebroid, b.hamiltonian, x0, cfg);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const Vector expected = x0.q + traj.times[k] * x0.p;
      REQUIRE((traj.states[k].q - expected).cwiseAbs().maxCoeff() < 1e-10);
      REQUIRE((traj.states[k].p - x0.p).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SECTION("flat flow is divergence free for the flat volume") {
    ModelBundle b = make_builtin("standard-2d");
    CounterRng rng(62);
    for (int k = 0; k < 100; ++k) {
      const PhasePoint x = b.sample_point(rng);
      REQUIRE(std::abs(divergence(b.algebroid, b.hamiltonian, b.volume,
                                  PhaseDensity::zero(2), x)
                           .divergence) < 1e-12);
    }
  }
}

TEST_CASE("lie algebra bundles", "[models]") {
  SECTION("characters and expectations") {
    REQUIRE(make_builtin("so3").expected.unimodular);
    REQUIRE(make_builtin("se2").expected.unimodular);
    REQUIRE(make_builtin("heisenberg").expected.unimodular);
    ModelBundle aff1 = make_builtin("aff1");
    REQUIRE_FALSE(aff1.expected.unimodular);
    REQUIRE_FALSE(aff1.certificate.has_value());
  }

  SECTION("nilpotent flow is incompressible") {
    ModelBundle heis = make_builtin("heisenberg");
    CounterRng rng(63);
    for (int k = 0; k < 50; ++k) {
      const PhasePoint x = heis.sample_point(rng);
      REQUIRE(std::abs(divergence(heis.algebroid, heis.hamiltonian, heis.volume,
                                  PhaseDensity::zero(3), x)
                           .divergence) < 1e-12);
    }
  }

  SECTION("unknown name and bad inertia are rejected") {
    REQUIRE_THROWS_AS(make_lie_algebra("su5"), ModelError);
    REQUIRE_THROWS_AS(
        make_lie_algebra("so3", -Matrix::Identity(3, 3)), ModelError);
  }
}

TEST_CASE("heavy top bundle", "[models]") {
  ModelBundle ht = make_builtin("heavy-top");

  SECTION("structure residuals on random chart points") {
    CounterRng rng(64);
    ChartedAlgebroid fd = ht.algebroid;
    fd.anchor_jac = nullptr;
    fd.structure_jac = nullptr;
    for (int k = 0; k < 50; ++k) {
      const Vector q =
          rng.uniform_vector(ht.sampling_box.first, ht.sampling_box.second);
      REQUIRE(max_abs(anchor_compat_residual(ht.algebroid, q)) < 1e-12);
      REQUIRE(max_abs(anchor_compat_residual(fd, q)) < 1e-9);
    }
  }

  SECTION("spinning about the axis at the equator conserves energy") {
    const double pi = std::acos(-1.0);
    // omega aligned with the symmetry axis; the body momentum is I omega
    const PhasePoint x0{(Vector(2) << pi / 2, 0.0).finished(),
                        (Vector(3) << 0.0, 0.0, 4.0).finished()};
    IntegratorConfig cfg;
    cfg.t_final = 10.0;
    cfg.dt = 1e-3;
    cfg.record_stride = 100;
    const Trajectory traj = integrate(ht.algebroid, ht.hamiltonian, x0, cfg,
                                      {make_energy_monitor(ht.hamiltonian)});
    REQUIRE_FALSE(traj.escaped);
    const double h0 = traj.monitor_values.front()[0];
    for (const auto& row : traj.monitor_values)
      REQUIRE(std::abs(row[0] - h0) / std::max(1.0, std::abs(h0)) < 1e-8);
  }

  SECTION("flow preserves the area-weighted volume") {
    CounterRng rng(65);
    const PhaseDensity density = PhaseDensity::basic(ht.certificate->sigma, 3);
    for (int k = 0; k < 100; ++k) {
      const PhasePoint x = ht.sample_point(rng);
      REQUIRE(std::abs(divergence(ht.algebroid, ht.hamiltonian, ht.volume,
                                  density, x)
                           .divergence) < 1e-8);
    }
  }

  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(make_heavy_top(-1.0), ModelError);
    REQUIRE_THROWS_AS(make_heavy_top(1.0, 1.0, 0.2, std::nullopt,
                                     Eigen::Vector3d(0.0, 0.0, 2.0)),
                      ModelError);
  }
}

TEST_CASE("perturbed rotation constants fail the anchored structure equations",
          "[models]") {
  // C^3_{12} -> 1.1 keeps the Jacobi identity (it is a rescaled bracket
  // table) but breaks anchor compatibility wherever the anchor is nonzero:
  // the residual is 0.1 * rho_3.
  ModelBundle ht = make_builtin("heavy-top");
  ChartedAlgebroid perturbed = ht.algebroid;
  Tensor3 c = ht.algebroid.structure_at((Vector(2) << 1.0, 0.5).finished());
  c[2](0, 1) = 1.1;
  c[2](1, 0) = -1.1;
  perturbed.structure = [c](const Vector&) { return c; };

  CounterRng rng(66);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector q =
        rng.uniform_vector(ht.sampling_box.first, ht.sampling_box.second);
    worst = std::max(worst, max_abs(anchor_compat_residual(perturbed, q)));
    worst = std::max(worst, max_abs(jacobi_residual(perturbed, q)));
  }
  REQUIRE(worst >= 0.05);
  REQUIRE(worst == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("beanie bundle", "[models]") {
  ModelBundle bn = make_builtin("beanie");

  SECTION("constant data validates everywhere") {
    CounterRng rng(67);
    for (int k = 0; k < 20; ++k) {
      const Vector q =
          rng.uniform_vector(bn.sampling_box.first, bn.sampling_box.second);
      REQUIRE(max_abs(anchor_compat_residual(bn.algebroid, q)) < 1e-10);
      REQUIRE(max_abs(jacobi_residual(bn.algebroid, q)) < 1e-10);
    }
  }

  SECTION("mass matrix couples rotation and shape") {
    const Matrix g = bn.hamiltonian.cometric_at(Vector::Zero(1));
    // inverse of ((I1+I2, I2),(I2, I2)) on slots (1,4) with I1=1, I2=0.5
    REQUIRE(g(0, 0) == Catch::Approx(1.0));
    REQUIRE(g(0, 3) == Catch::Approx(-1.0));
    REQUIRE(g(3, 3) == Catch::Approx(3.0));
    REQUIRE(g(1, 1) == Catch::Approx(1.0));
    REQUIRE(g(0, 1) == 0.0);
  }

  SECTION("sigma = 0 certifies unimodularity") {
    CounterRng rng(68);
    for (int k = 0; k < 20; ++k) {
      const Vector q =
          rng.uniform_vector(bn.sampling_box.first, bn.sampling_box.second);
      REQUIRE(unimodularity_residual(bn.algebroid, bn.volume, *bn.certificate, q)
                  .components.cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
  }

  SECTION("drift stays flat over long runs") {
    CounterRng rng(69);
    const PhasePoint x0 = bn.sample_initial_condition(rng);
    const VolumeDriftReport rep =
        jacobian_log_det(bn.algebroid, bn.hamiltonian, x0, 10.0, 1e-3);
    REQUIRE(std::abs(rep.log_det_jacobian) < 1e-5);
  }

  SECTION("bad metric parameters are rejected") {
    REQUIRE_THROWS_AS(make_beanie(1.0, -1.0, 0.5), ModelError);
  }
}

TEST_CASE("product bundles", "[models]") {
  SECTION("unimodularity follows the algebra factor") {
    REQUIRE(make_builtin("atiyah-so3").expected.unimodular);
    ModelBundle at = make_builtin("atiyah-aff1");
    REQUIRE_FALSE(at.expected.unimodular);

    // divergence = p1, independent of the base point
    CounterRng rng(70);
    for (int k = 0; k < 25; ++k) {
      const PhasePoint x = at.sample_point(rng);
      const double div =
          divergence(at.algebroid, at.hamiltonian, at.volume,
                     PhaseDensity::zero(at.algebroid.rank), x)
              .divergence;
      REQUIRE(div == Catch::Approx(x.p[0]).margin(1e-10));
    }
  }

  SECTION("unknown algebra is rejected") {
    REQUIRE_THROWS_AS(make_trivial_atiyah("sp4", 2), ModelError);
  }
}

TEST_CASE("catalog is complete and self-describing", "[models]") {
  REQUIRE(builtin_names().size() == 10);
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    REQUIRE(b.name == name);
    REQUIRE_FALSE(b.card.empty());
    REQUIRE_FALSE(b.params.empty());
    REQUIRE(b.sampling_box.first.size() == b.algebroid.base_dim());
  }
  REQUIRE_THROWS_AS(make_builtin("no-such-model"), ModelError);
}
