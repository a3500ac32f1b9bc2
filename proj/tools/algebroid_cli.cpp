// Command-line front end: validate models, run simulations, query modular
// data and run volume studies. Reports are JSON with fixed field order;
// trajectories are CSV with 17-significant-digit values. All sampling is
// driven by the seeded counter generator, so identical invocations produce
// byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "algebroid/integrate.hpp"
#include "algebroid/model_file.hpp"
#include "algebroid/models.hpp"
#include "algebroid/modular.hpp"
#include "algebroid/parallel.hpp"
#include "algebroid/volume_flow.hpp"

namespace {

using algebroid::CounterRng;
using algebroid::ModelBundle;
using algebroid::PhasePoint;
using algebroid::Vector;
using json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitExpectationFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void emit(const json& j, const std::string& output_path) {
  const std::string text = j.dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw algebroid::ParseError("cannot open output file: " + output_path);
    out << text;
  }
}

Vector parse_x0(const std::string& text, int dim) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw algebroid::ParseError("--x0: malformed number '" + item + "'");
    }
  }
  if (static_cast<int>(values.size()) != dim)
    throw algebroid::ParseError("--x0 must list " + std::to_string(dim) +
                                " values (q then p)");
  Vector x(dim);
  for (int i = 0; i < dim; ++i) x[i] = values[i];
  return x;
}

int run_validate(const std::string& model, int samples, std::uint64_t seed,
                 const std::string& output) {
  ModelBundle b = algebroid::resolve_model(model);
  const bool analytic = b.algebroid.has_analytic_jacobians();
  const double threshold = analytic ? 1e-8 : 1e-5;

  std::vector<Vector> points;
  if (b.algebroid.base_dim() == 0) {
    points.push_back(Vector(0));
  } else {
    CounterRng rng(seed);
    for (int i = 0; i < samples; ++i)
      points.push_back(rng.uniform_vector(b.sampling_box.first, b.sampling_box.second));
  }
  std::vector<double> anchor_res(points.size()), jacobi_res(points.size());
  algebroid::parallel_for(points.size(), [&](std::size_t i) {
    anchor_res[i] = algebroid::max_abs(anchor_compat_residual(b.algebroid, points[i]));
    jacobi_res[i] = algebroid::max_abs(jacobi_residual(b.algebroid, points[i]));
  });
  double max_anchor = 0.0, max_jacobi = 0.0;
  for (double r : anchor_res) max_anchor = std::max(max_anchor, r);
  for (double r : jacobi_res) max_jacobi = std::max(max_jacobi, r);
  const bool pass = max_anchor < threshold && max_jacobi < threshold;

  json out;
  out["subcommand"] = "validate";
  out["model"] = b.name;
  out["grid_size"] = points.size();
  out["max_anchor_residual"] = max_anchor;
  out["max_jacobi_residual"] = max_jacobi;
  out["threshold"] = threshold;
  out["derivatives"] = analytic ? "analytic" : "finite-difference";
  out["pass"] = pass;
  emit(out, output);
  return pass ? kExitPass : kExitExpectationFailed;
}

int run_simulate(const std::string& model, const std::string& x0_text,
                 double t_final, std::optional<double> dt,
                 std::optional<double> rtol, std::optional<double> atol,
                 int record_stride, const std::string& monitors_text,
                 const std::string& output) {
  ModelBundle b = algebroid::resolve_model(model);
  const int m = b.algebroid.base_dim();
  const int n = b.algebroid.rank;
  const Vector x0v = parse_x0(x0_text, m + n);
  const PhasePoint x0 = PhasePoint::from_stacked(x0v, m);

  algebroid::IntegratorConfig cfg;
  cfg.t_final = t_final;
  cfg.record_stride = record_stride;
  if (rtol || atol) {
    cfg.method = algebroid::StepMethod::rkf45_adaptive;
    cfg.rtol = rtol.value_or(1e-8);
    cfg.atol = atol.value_or(1e-8);
    cfg.dt_max = 1.0;
    cfg.dt_min = 1e-12;
  } else {
    cfg.method = algebroid::StepMethod::rk4_fixed;
    cfg.dt = dt.value_or(1e-3);
  }

  std::vector<algebroid::Monitor> monitors;
  std::stringstream ss(monitors_text);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (name == "energy") {
      monitors.push_back(algebroid::make_energy_monitor(b.hamiltonian));
    } else if (name == "casimir") {
      for (const auto& cas : b.expected.casimirs)
        monitors.push_back(algebroid::make_field_monitor(cas.name, cas.field));
    } else if (name == "divergence") {
      const algebroid::PhaseDensity dens =
          b.certificate ? algebroid::PhaseDensity::basic(b.certificate->sigma, n)
                        : algebroid::PhaseDensity::zero(n);
      monitors.push_back(
          algebroid::make_divergence_monitor(b.algebroid, b.hamiltonian, b.volume, dens));
      monitors.push_back(algebroid::make_accumulated_divergence_monitor(
          b.algebroid, b.hamiltonian, b.volume, dens));
    } else {
      throw algebroid::ParseError("unknown monitor: " + name);
    }
  }

  const algebroid::Trajectory traj =
      algebroid::integrate(b.algebroid, b.hamiltonian, x0, cfg, monitors);

  std::ostringstream csv;
  csv << "t";
  for (int i = 1; i <= m; ++i) csv << ",q_" << i;
  for (int a = 1; a <= n; ++a) csv << ",p_" << a;
  for (const std::string& mn : traj.monitor_names) csv << "," << mn;
  csv << "\n";
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    csv << format_double(traj.times[r]);
    for (int i = 0; i < m; ++i) csv << "," << format_double(traj.states[r].q[i]);
    for (int a = 0; a < n; ++a) csv << "," << format_double(traj.states[r].p[a]);
    for (double v : traj.monitor_values[r]) csv << "," << format_double(v);
    csv << "\n";
  }
  if (traj.escaped)
    csv << "# escaped chart at t = " << format_double(traj.escape_time) << "\n";

  if (output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw algebroid::ParseError("cannot open output file: " + output);
    out << csv.str();
  }
  return kExitPass;
}

int run_modular(const std::string& model,
                const std::vector<std::string>& point_texts, int samples,
                std::uint64_t seed, const std::string& output) {
  ModelBundle b = algebroid::resolve_model(model);
  const int m = b.algebroid.base_dim();

  json points = json::array();
  std::vector<Vector> qs;
  if (point_texts.empty()) {
    qs.push_back(m == 0 ? Vector(0)
                        : static_cast<Vector>(
                              0.5 * (b.sampling_box.first + b.sampling_box.second)));
  } else {
    for (const std::string& text : point_texts) qs.push_back(parse_x0(text, m));
  }
  for (const Vector& q : qs) {
    const algebroid::AlgebroidCovector sec =
        algebroid::modular_section(b.algebroid, b.volume, q);
    json entry;
    entry["q"] = vector_to_json(q);
    entry["components"] = vector_to_json(sec.components);
    points.push_back(entry);
  }

  json out;
  out["subcommand"] = "modular";
  out["model"] = b.name;
  out["points"] = points;
  bool pass = true;
  if (b.certificate) {
    algebroid::CertificateCheckOptions opts;
    opts.random_points = samples;
    opts.seed = seed;
    opts.box = b.sampling_box;
    const algebroid::CertificateReport rep =
        algebroid::verify_certificate(b.algebroid, b.volume, *b.certificate, opts);
    json cert;
    cert["max_residual"] = rep.max_residual;
    cert["threshold"] = rep.threshold;
    cert["points"] = rep.points;
    cert["pass"] = rep.pass;
    out["certificate"] = cert;
    pass = rep.pass;
  } else {
    out["certificate"] = nullptr;
  }
  emit(out, output);
  return pass ? kExitPass : kExitExpectationFailed;
}

int run_volume(const std::string& model, const std::string& sigma_tilde_text,
               double t_final, double dt, int samples, int trajectories,
               std::uint64_t seed, bool expect_preserved, double divergence_tol,
               const std::string& output) {
  ModelBundle b = algebroid::resolve_model(model);
  const int n = b.algebroid.rank;

  algebroid::PhaseDensity density;
  std::string sigma_source;
  if (!sigma_tilde_text.empty()) {
    density.sigma_tilde = algebroid::parse_phase_expression(
        sigma_tilde_text, b.algebroid.chart.coord_names, n);
    sigma_source = sigma_tilde_text;
  } else if (b.certificate) {
    density = algebroid::PhaseDensity::basic(b.certificate->sigma, n);
    sigma_source = "certificate";
  } else {
    density = algebroid::PhaseDensity::zero(n);
    sigma_source = "0";
  }

  // sigma on the zero section, for the obstruction residual
  algebroid::ScalarField sigma_zero;
  sigma_zero.value = [density, n](const Vector& q) {
    return density.sigma_tilde.value({q, Vector::Zero(n)});
  };

  CounterRng rng(seed);
  std::vector<PhasePoint> sample_points;
  for (int i = 0; i < samples; ++i) sample_points.push_back(b.sample_point(rng));
  std::vector<double> divs(sample_points.size());
  algebroid::parallel_for(sample_points.size(), [&](std::size_t i) {
    divs[i] = std::abs(algebroid::divergence(b.algebroid, b.hamiltonian, b.volume,
                                             density, sample_points[i])
                           .divergence);
  });
  double max_div = 0.0;
  for (double d : divs) max_div = std::max(max_div, d);

  std::vector<PhasePoint> ics;
  for (int i = 0; i < trajectories; ++i)
    ics.push_back(b.sample_initial_condition(rng));
  std::vector<json> reports(ics.size());
  std::vector<std::string> traj_errors(ics.size());
  algebroid::parallel_for(ics.size(), [&](std::size_t i) {
    try {
      const algebroid::VolumeDriftReport rep = algebroid::volume_drift(
          b.algebroid, b.hamiltonian, b.volume, density, ics[i], t_final, dt);
      json r;
      r["t_final"] = rep.t_final;
      r["log_det_jacobian"] = rep.log_det_jacobian;
      r["integrated_divergence"] = rep.integrated_divergence;
      r["discrepancy"] = rep.discrepancy;
      r["volume_drift"] = *rep.volume_drift;
      reports[i] = r;
    } catch (const algebroid::TrajectoryEscapeError& e) {
      json r;
      r["escaped_at"] = e.exit_time;
      reports[i] = r;
    }
  });

  double obstruction_max = 0.0;
  const int obstruction_points = std::min(samples, 50);
  for (int i = 0; i < obstruction_points; ++i) {
    const Vector q = (b.algebroid.base_dim() == 0)
                         ? Vector(0)
                         : rng.uniform_vector(b.sampling_box.first,
                                              b.sampling_box.second);
    const Vector r = algebroid::zero_section_obstruction(
        b.algebroid, b.hamiltonian, b.volume, density, sigma_zero, q);
    obstruction_max = std::max(obstruction_max, r.cwiseAbs().maxCoeff());
    if (b.algebroid.base_dim() == 0) break;
  }

  json out;
  out["subcommand"] = "volume";
  out["model"] = b.name;
  out["sigma_tilde"] = sigma_source;
  out["samples"] = samples;
  out["seed"] = seed;
  out["max_divergence"] = max_div;
  out["drift_reports"] = reports;
  out["obstruction_max"] = obstruction_max;
  const bool preserved = max_div < divergence_tol;
  out["preserved"] = preserved;
  emit(out, output);
  if (expect_preserved && !preserved) return kExitExpectationFailed;
  return kExitPass;
}

int run_list_models(const std::string& output) {
  json models = json::array();
  for (const std::string& name : algebroid::builtin_names()) {
    ModelBundle b = algebroid::make_builtin(name);
    json entry;
    entry["name"] = b.name;
    entry["base_dim"] = b.algebroid.base_dim();
    entry["rank"] = b.algebroid.rank;
    json params;
    for (const auto& [k, v] : b.params) params[k] = v;
    entry["params"] = params;
    entry["unimodular"] = b.expected.unimodular;
    entry["has_certificate"] = b.certificate.has_value();
    json casimirs = json::array();
    for (const auto& cas : b.expected.casimirs) casimirs.push_back(cas.name);
    entry["casimirs"] = casimirs;
    entry["description"] = b.card;
    models.push_back(entry);
  }
  json out;
  out["subcommand"] = "list-models";
  out["models"] = models;
  emit(out, output);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Chart-based numerics for Hamiltonian dynamics on Lie algebroids: "
      "structure validation, simulation, modular sections and volume studies"};
  app.require_subcommand(1);

  std::string model, output, x0_text, monitors_text, sigma_tilde_text;
  std::vector<std::string> point_texts;
  int samples = 100, trajectories = 3, record_stride = 1;
  std::uint64_t seed = 0;
  double t_final = 10.0, divergence_tol = 1e-8;
  std::optional<double> dt_opt, rtol_opt, atol_opt;
  bool expect_preserved = false;

  CLI::App* validate = app.add_subcommand("validate", "Check the structure equations on sampled points");
  validate->add_option("--model", model, "Built-in name or model file path")->required();
  validate->add_option("--samples", samples, "Number of sample points");
  validate->add_option("--seed", seed, "Sampling seed");
  validate->add_option("--output", output, "Write the JSON report here instead of stdout");

  CLI::App* simulate = app.add_subcommand("simulate", "Integrate the Hamilton equations");
  simulate->add_option("--model", model)->required();
  simulate->add_option("--x0", x0_text, "Initial state q_1,..,q_m,p_1,..,p_n")->required();
  simulate->add_option("--t-final", t_final, "Integration horizon")->required();
  simulate->add_option("--dt", dt_opt, "Fixed RK4 step (default 1e-3)");
  simulate->add_option("--rtol", rtol_opt, "Adaptive RKF45 relative tolerance");
  simulate->add_option("--atol", atol_opt, "Adaptive RKF45 absolute tolerance");
  simulate->add_option("--record-stride", record_stride, "Record every k-th step");
  simulate->add_option("--monitors", monitors_text, "Comma list: energy,casimir,divergence");
  simulate->add_option("--output", output, "CSV path (stdout if omitted)");

  CLI::App* modular = app.add_subcommand("modular", "Modular section components and certificate check");
  modular->add_option("--model", model)->required();
  modular->add_option("--point", point_texts, "Base point q_1,..,q_m (repeatable)");
  modular->add_option("--samples", samples, "Random points for certificate verification");
  modular->add_option("--seed", seed, "Sampling seed");
  modular->add_option("--output", output, "Write the JSON report here instead of stdout");

  CLI::App* volume = app.add_subcommand("volume", "Divergence, drift and obstruction study");
  volume->add_option("--model", model)->required();
  volume->add_option("--sigma-tilde", sigma_tilde_text,
                     "Phase density expression in coords and p1..pn (default: certificate)");
  volume->add_option("--t-final", t_final, "Drift trajectory horizon");
  double dt_value = 1e-3;
  volume->add_option("--dt", dt_value, "Drift integration step");
  volume->add_option("--samples", samples, "Random phase points for divergence");
  volume->add_option("--trajectories", trajectories, "Number of drift trajectories");
  volume->add_option("--seed", seed, "Sampling seed");
  volume->add_flag("--expect-preserved", expect_preserved,
                   "Exit 1 unless max divergence is below the tolerance");
  volume->add_option("--divergence-tol", divergence_tol, "Preservation tolerance");
  volume->add_option("--output", output, "Write the JSON report here instead of stdout");

  CLI::App* list_models = app.add_subcommand("list-models", "Catalog of built-in models");
  list_models->add_option("--output", output, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (validate->parsed()) return run_validate(model, samples, seed, output);
    if (simulate->parsed())
      return run_simulate(model, x0_text, t_final, dt_opt, rtol_opt, atol_opt,
                          record_stride, monitors_text, output);
    if (modular->parsed())
      return run_modular(model, point_texts, samples, seed, output);
    if (volume->parsed())
      return run_volume(model, sigma_tilde_text, t_final, dt_value, samples,
                        trajectories, seed, expect_preserved, divergence_tol,
                        output);
    if (list_models->parsed()) return run_list_models(output);
  } catch (const algebroid::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const algebroid::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const algebroid::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const algebroid::Error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  }
  return kExitConfigError;
}
