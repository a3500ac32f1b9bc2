// Acceptance suite: one pass/fail line per criterion, exit 0 only if all
// pass. Tolerances are pinned here, not configurable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "algebroid/integrate.hpp"
#include "algebroid/models.hpp"
#include "algebroid/modular.hpp"
#include "algebroid/poisson.hpp"
#include "algebroid/volume_flow.hpp"

using namespace algebroid;

namespace {

struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

ScalarPhaseField random_quadratic(CounterRng& rng, int m, int n) {
  const int d = m + n;
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.uniform(-1.0, 1.0);
  return make_quadratic_phase_field(m, a, b, rng.uniform(-1.0, 1.0));
}

ScalarField random_base_function(CounterRng& rng, int m) {
  if (m == 0) return ScalarField::constant(rng.uniform(-1.0, 1.0));
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
  return f;
}

MechanicalHamiltonian random_mechanical(CounterRng& rng, int m, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  MechanicalHamiltonian mech;
  const Matrix g = a * a.transpose() + 0.5 * Matrix::Identity(n, n);
  mech.cometric = [g](const Vector&) { return g; };
  mech.cometric_constant = true;
  mech.potential = random_base_function(rng, m);
  return mech;
}

const std::vector<std::string> kLiouvilleBundles = {
    "standard-1d", "standard-2d", "so3",   "se2",
    "heisenberg",  "heavy-top",   "beanie"};

// ---------------------------------------------------------------------------

void criterion_structure_validity(Check& c) {
  double worst = 0.0;
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    CounterRng rng(101);
    const int points = (b.algebroid.base_dim() == 0) ? 1 : 100;
    for (int k = 0; k < points; ++k) {
      const Vector q = (b.algebroid.base_dim() == 0)
                           ? Vector(0)
                           : rng.uniform_vector(b.sampling_box.first,
                                                b.sampling_box.second);
      worst = std::max(worst, max_abs(anchor_compat_residual(b.algebroid, q)));
      worst = std::max(worst, max_abs(jacobi_residual(b.algebroid, q)));
    }
  }
  c.require(worst < 1e-8, "built-in structure residual " + fmt(worst) + " >= 1e-8");
  c.note("max residual over catalog = " + fmt(worst));

  // perturbed rotation constants on the anchored model
  ModelBundle ht = make_builtin("heavy-top");
  ChartedAlgebroid perturbed = ht.algebroid;
  Tensor3 ct = ht.algebroid.structure_at((Vector(2) << 1.0, 0.5).finished());
  ct[2](0, 1) = 1.1;
  ct[2](1, 0) = -1.1;
  perturbed.structure = [ct](const Vector&) { return ct; };
  CounterRng rng(102);
  double perturbed_worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector q =
        rng.uniform_vector(ht.sampling_box.first, ht.sampling_box.second);
    perturbed_worst =
        std::max(perturbed_worst, max_abs(anchor_compat_residual(perturbed, q)));
    perturbed_worst =
        std::max(perturbed_worst, max_abs(jacobi_residual(perturbed, q)));
  }
  c.require(perturbed_worst >= 0.05, "perturbed so(3) residual " +
                                         fmt(perturbed_worst) + " < 0.05");
  c.note("perturbed so(3) residual = " + fmt(perturbed_worst));
}

void criterion_bracket_axioms(Check& c) {
  double leibniz = 0.0, jacobi = 0.0;
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    const int m = b.algebroid.base_dim();
    const int n = b.algebroid.rank;
    CounterRng rng(103);
    for (int trial = 0; trial < 50; ++trial) {
      const ScalarPhaseField f = random_quadratic(rng, m, n);
      const ScalarPhaseField g = random_quadratic(rng, m, n);
      const ScalarPhaseField h = random_quadratic(rng, m, n);
      for (int j = 0; j < 2; ++j) {
        const PhasePoint x = b.sample_point(rng);
        const double fg = poisson_bracket(b.algebroid, f, g, x);
        const double gf = poisson_bracket(b.algebroid, g, f, x);
        c.require(fg == -gf, "bracket antisymmetry not exact on " + name);

        const double lhs = poisson_bracket(b.algebroid, product_field(f, g), h, x);
        const double rhs = f.value(x) * poisson_bracket(b.algebroid, g, h, x) +
                           g.value(x) * poisson_bracket(b.algebroid, f, h, x);
        leibniz = std::max(leibniz, std::abs(lhs - rhs));

        const double cyc =
            poisson_bracket(b.algebroid, bracket_field(b.algebroid, f, g), h, x) +
            poisson_bracket(b.algebroid, bracket_field(b.algebroid, g, h), f, x) +
            poisson_bracket(b.algebroid, bracket_field(b.algebroid, h, f), g, x);
        jacobi = std::max(jacobi, std::abs(cyc));
      }
    }
  }
  c.require(leibniz < 1e-6, "Leibniz residual " + fmt(leibniz) + " >= 1e-6");
  c.require(jacobi < 1e-6, "Jacobi residual " + fmt(jacobi) + " >= 1e-6");
  c.note("Leibniz = " + fmt(leibniz) + ", Jacobi = " + fmt(jacobi));
}

void criterion_liouville(Check& c) {
  double worst_div = 0.0, worst_drift = 0.0;
  for (const std::string& name : kLiouvilleBundles) {
    ModelBundle b = make_builtin(name);
    const PhaseDensity density =
        PhaseDensity::basic(b.certificate->sigma, b.algebroid.rank);
    CounterRng rng(104);
    for (int k = 0; k < 100; ++k) {
      const PhasePoint x = b.sample_point(rng);
      const double div =
          divergence(b.algebroid, b.hamiltonian, b.volume, density, x).divergence;
      worst_div = std::max(worst_div, std::abs(div));
    }
    for (int k = 0; k < 10; ++k) {
      const PhasePoint x0 = b.sample_initial_condition(rng);
      try {
        const VolumeDriftReport rep = volume_drift(
            b.algebroid, b.hamiltonian, b.volume, density, x0, 10.0, 1e-3);
        worst_drift = std::max(worst_drift, std::abs(*rep.volume_drift));
      } catch (const TrajectoryEscapeError& e) {
        c.require(false, name + " trajectory left the chart at t = " +
                             fmt(e.exit_time));
      }
    }
  }
  c.require(worst_div < 1e-8, "divergence " + fmt(worst_div) + " >= 1e-8");
  c.require(worst_drift < 1e-5, "volume drift " + fmt(worst_drift) + " >= 1e-5");
  c.note("max |divergence| = " + fmt(worst_div) +
         ", max |volume drift| = " + fmt(worst_drift));
}

void criterion_kozlov(Check& c) {
  ModelBundle aff1 = make_builtin("aff1");
  const PhasePoint x0{Vector(0), (Vector(2) << 1.0, 0.0).finished()};
  const VolumeDriftReport rep =
      jacobian_log_det(aff1.algebroid, aff1.hamiltonian, x0, 1.0, 1e-3);
  c.require(rep.log_det_jacobian > 0.1,
            "log det J = " + fmt(rep.log_det_jacobian) + " <= 0.1");
  c.require(rep.discrepancy < 1e-6,
            "log det J vs quadrature discrepancy " + fmt(rep.discrepancy));
  const PhasePoint x{Vector(0), (Vector(2) << 2.0, 5.0).finished()};
  const double div = divergence(aff1.algebroid, aff1.hamiltonian,
                                VolumeSpec::lebesgue(), PhaseDensity::zero(2), x)
                         .divergence;
  c.require(std::abs(div - 2.0) < 1e-10, "divergence at p=(2,5) = " + fmt(div));
  c.note("log det J = " + fmt(rep.log_det_jacobian) +
         ", discrepancy = " + fmt(rep.discrepancy) + ", div(2,5) = " + fmt(div));
}

void criterion_modular_identities(Check& c) {
  // divergence equals the modular pairing for random mechanical systems
  double worst_pairing = 0.0;
  for (const std::string& name : {"aff1", "heavy-top", "beanie"}) {
    ModelBundle b = make_builtin(name);
    const int m = b.algebroid.base_dim();
    const int n = b.algebroid.rank;
    CounterRng rng(105);
    for (int trial = 0; trial < 3; ++trial) {
      const MechanicalHamiltonian mech = random_mechanical(rng, m, n);
      for (int k = 0; k < 100; ++k) {
        const PhasePoint x = b.sample_point(rng);
        const double div =
            divergence(b.algebroid, mech, b.volume, PhaseDensity::zero(n), x)
                .divergence;
        const double paired =
            modular_section(b.algebroid, b.volume, x.q).components.dot(mech.grad_p(x));
        worst_pairing = std::max(worst_pairing, std::abs(div - paired));
      }
    }
  }
  c.require(worst_pairing < 1e-8,
            "divergence/modular pairing residual " + fmt(worst_pairing));

  // the modular section is closed
  double worst_cocycle = 0.0;
  for (const std::string& name : builtin_names()) {
    ModelBundle b = make_builtin(name);
    CounterRng rng(106);
    const int points = (b.algebroid.base_dim() == 0) ? 1 : 100;
    for (int k = 0; k < points; ++k) {
      const Vector q = (b.algebroid.base_dim() == 0)
                           ? Vector(0)
                           : rng.uniform_vector(b.sampling_box.first,
                                                b.sampling_box.second);
      worst_cocycle = std::max(
          worst_cocycle, max_abs(modular_cocycle_residual(b.algebroid, b.volume, q)));
    }
  }
  c.require(worst_cocycle < 1e-6, "cocycle residual " + fmt(worst_cocycle));

  // changing the fiber volume shifts the section by an exact term
  double worst_shift = 0.0;
  for (const std::string& name : {"standard-2d", "heavy-top", "beanie"}) {
    ModelBundle b = make_builtin(name);
    CounterRng rng(107);
    for (int trial = 0; trial < 10; ++trial) {
      const ScalarField mu = random_base_function(rng, b.algebroid.base_dim());
      VolumeSpec shifted = b.volume;
      const ScalarField lam = b.volume.fiber_log_density;
      shifted.fiber_log_density = ScalarField{
          [lam, mu](const Vector& q) { return lam.value(q) + mu.value(q); },
          [lam, mu](const Vector& q) {
            return (lam.gradient(q) + mu.gradient(q)).eval();
          },
          nullptr};
      const Vector q =
          rng.uniform_vector(b.sampling_box.first, b.sampling_box.second);
      const Vector lhs = modular_section(b.algebroid, shifted, q).components;
      const Vector rhs = modular_section(b.algebroid, b.volume, q).components +
                         differential_of_function(b.algebroid, mu, q).components;
      worst_shift = std::max(worst_shift, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }
  c.require(worst_shift < 1e-8, "cohomology shift residual " + fmt(worst_shift));
  c.note("pairing = " + fmt(worst_pairing) + ", cocycle = " + fmt(worst_cocycle) +
         ", shift = " + fmt(worst_shift));
}

void criterion_obstruction(Check& c) {
  double worst = 0.0;
  for (const std::string& name : kLiouvilleBundles) {
    ModelBundle b = make_builtin(name);
    const PhaseDensity density =
        PhaseDensity::basic(b.certificate->sigma, b.algebroid.rank);
    CounterRng rng(108);
    const int points = (b.algebroid.base_dim() == 0) ? 1 : 50;
    for (int k = 0; k < points; ++k) {
      const Vector q = (b.algebroid.base_dim() == 0)
                           ? Vector(0)
                           : rng.uniform_vector(b.sampling_box.first,
                                                b.sampling_box.second);
      const Vector r =
          zero_section_obstruction(b.algebroid, b.hamiltonian, b.volume,
                                   density, b.certificate->sigma, q);
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  c.require(worst < 1e-6, "obstruction residual " + fmt(worst) + " >= 1e-6");

  ModelBundle aff1 = make_builtin("aff1");
  const Vector r = zero_section_obstruction(
      aff1.algebroid, aff1.hamiltonian, aff1.volume, PhaseDensity::zero(2),
      ScalarField::zero(), Vector(0));
  // cometric is the identity, so the expected residual is the character (1, 0)
  c.require(std::abs(r[0] - 1.0) < 1e-10 && std::abs(r[1]) < 1e-10,
            "aff(1) obstruction != G (1,0)");
  c.note("max certified residual = " + fmt(worst) + ", aff(1) = (" + fmt(r[0]) +
         ", " + fmt(r[1]) + ")");
}

void criterion_integrator(Check& c) {
  ModelBundle std1 = make_builtin("standard-1d");
  const double two_pi = 2.0 * std::acos(-1.0);
  IntegratorConfig cfg;
  cfg.t_final = two_pi;
  cfg.dt = 1e-3;
  cfg.record_stride = 1 << 20;
  const PhasePoint x0{Vector::Constant(1, 1.0), Vector::Zero(1)};
  const Trajectory traj = integrate(std1.algebroid, std1.hamiltonian, x0, cfg);
  const double period_error =
      std::hypot(traj.states.back().q[0] - 1.0, traj.states.back().p[0]);
  c.require(period_error < 1e-8, "period error " + fmt(period_error));

  auto endpoint_error = [&](double dt) {
    IntegratorConfig c2;
    c2.t_final = 5.0;
    c2.dt = dt;
    c2.record_stride = 1 << 20;
    const Trajectory t = integrate(std1.algebroid, std1.hamiltonian, x0, c2);
    return std::hypot(t.states.back().q[0] - std::cos(5.0),
                      t.states.back().p[0] + std::sin(5.0));
  };
  const double ratio = endpoint_error(0.05) / endpoint_error(0.025);
  c.require(ratio > 12.0 && ratio < 20.0,
            "convergence ratio " + fmt(ratio) + " outside [12, 20]");

  ModelBundle so3 = make_builtin("so3");
  IntegratorConfig cfg3;
  cfg3.t_final = 10.0;
  cfg3.dt = 1e-3;
  cfg3.record_stride = 10;
  const PhasePoint top0{Vector(0), Vector::Constant(3, 1.0)};
  const Trajectory top =
      integrate(so3.algebroid, so3.hamiltonian, top0, cfg3,
                {make_field_monitor("casimir", so3.expected.casimirs[0].field)});
  double casimir_drift = 0.0;
  for (const auto& row : top.monitor_values)
    casimir_drift = std::max(casimir_drift, std::abs(row[0] - 3.0));
  c.require(casimir_drift < 1e-9, "Casimir drift " + fmt(casimir_drift));
  c.note("period error = " + fmt(period_error) + ", ratio = " + fmt(ratio) +
         ", Casimir drift = " + fmt(casimir_drift));
}

// criterion 8 helpers ------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd =
      "ALGEBROID_THREADS=2 '" + std::string(ALGEBROID_CLI_PATH) + "' " + args;
  return WEXITSTATUS(std::system(cmd.c_str()));
}

void criterion_cli_contract(Check& c) {
  namespace fs = std::filesystem;
  const std::string golden = ALGEBROID_GOLDEN_DIR;
  const std::string tmp =
      (fs::temp_directory_path() / "algebroid_acceptance").string();
  fs::create_directories(tmp);

  struct GoldenCase {
    std::string name;
    std::string args;
  };
  const std::vector<GoldenCase> cases = {
      {"validate_so3.json", "validate --model so3 --samples 100 --seed 0"},
      {"simulate_standard1.csv",
       "simulate --model standard-1d --x0 1,0 --t-final 0.01 --dt 0.001 "
       "--monitors energy"},
      {"modular_heavy_top.json",
       "modular --model heavy-top --point 1.0,0.5 --samples 20 --seed 7"},
      {"volume_aff1.json",
       "volume --model aff1 --t-final 1 --dt 0.001 --samples 10 "
       "--trajectories 2 --seed 3"},
      {"list_models.json", "list-models"},
  };
  for (const GoldenCase& gc : cases) {
    const std::string out = tmp + "/" + gc.name;
    const int code =
        run_cli(gc.args + " --output '" + out + "' >/dev/null 2>&1");
    c.require(code == 0, gc.name + ": exit " + std::to_string(code));
    const std::string got = slurp(out);
    const std::string expected = slurp(golden + "/" + gc.name);
    c.require(!expected.empty() && got == expected,
              gc.name + ": output differs from golden file");
  }

  c.require(run_cli("volume --model aff1 --expect-preserved --samples 10 "
                    "--trajectories 1 --t-final 0.5 --output '" +
                    tmp + "/ec1.json' >/dev/null 2>&1") == 1,
            "expectation failure should exit 1");
  c.require(run_cli("validate --model nonexistent >/dev/null 2>&1") == 2,
            "config error should exit 2");
  c.require(run_cli("simulate --model heavy-top --x0 6.28,0,0,0,1 --t-final 1 "
                    ">/dev/null 2>&1") == 3,
            "numeric failure should exit 3");
  c.note("5 golden files byte-identical, exit codes 0/1/2/3 verified");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "structure validity", criterion_structure_validity},
      {2, "bracket axioms", criterion_bracket_axioms},
      {3, "volume preservation for certified bundles", criterion_liouville},
      {4, "volume growth for the non-unimodular counterexample", criterion_kozlov},
      {5, "modular identities", criterion_modular_identities},
      {6, "zero-section obstruction", criterion_obstruction},
      {7, "integrator quality", criterion_integrator},
      {8, "CLI contract", criterion_cli_contract},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass = check.failures.empty();
    failures += pass ? 0 : 1;
    std::printf("criterion %d: %-48s %s (%.1fs)\n", cr.id, cr.title.c_str(),
                pass ? "PASS" : "FAIL", seconds);
    for (const std::string& note : check.notes)
      std::printf("    %s\n", note.c_str());
    for (const std::string& failure : check.failures)
      std::printf("    FAILURE: %s\n", failure.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
