#pragma once

#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebroid/expression.hpp"
#include "algebroid/models.hpp"

namespace algebroid {

namespace detail {

inline ScalarField expr_scalar_field(const std::string& src,
                                     const std::vector<std::string>& vars) {
  Expression e = Expression::parse(src, vars);
  ScalarField f;
  f.value = [e](const Vector& q) { return e.eval(q); };
  return f;  // gradients by finite differences
}

inline double domain_bound(const nlohmann::json& j, double unbounded) {
  if (j.is_null()) return unbounded;
  if (j.is_number()) return j.get<double>();
  throw ParseError("model file: domain bounds must be numbers or null");
}

}  // namespace detail

/// Phase-space expression in the chart coordinates plus momenta p1..pn.
inline ScalarPhaseField parse_phase_expression(const std::string& src,
                                               const std::vector<std::string>& coords,
                                               int n) {
  std::vector<std::string> vars = coords;
  for (int a = 1; a <= n; ++a) vars.push_back("p" + std::to_string(a));
  Expression e = Expression::parse(src, vars);
  ScalarPhaseField f;
  f.value = [e](const PhasePoint& x) { return e.eval(x.stacked()); };
  return f;
}

/// Build a model bundle from a JSON definition (see docs/model_format.md).
/// The file either names a built-in ({"builtin": "so3"}) or spells the
/// model out with expression strings in the declared coordinates. Expression
/// models get their derivatives by central finite differences.
inline ModelBundle load_model_json(const nlohmann::json& j) {
  if (j.contains("builtin")) return make_builtin(j.at("builtin").get<std::string>());

  ModelBundle b;
  b.name = j.value("name", std::string("user-model"));

  const int m = j.at("base_dim").get<int>();
  const int n = j.at("rank").get<int>();
  if (m < 0 || n < 1) throw ParseError("model file: need base_dim >= 0 and rank >= 1");

  std::vector<std::string> coords;
  if (m > 0) {
    coords = j.at("coord_names").get<std::vector<std::string>>();
    if (static_cast<int>(coords.size()) != m)
      throw ParseError("model file: coord_names must have base_dim entries");
  }

  BaseChart chart;
  chart.dim = m;
  chart.coord_names = coords;
  chart.lower = Vector::Constant(m, -std::numeric_limits<double>::infinity());
  chart.upper = Vector::Constant(m, std::numeric_limits<double>::infinity());
  if (m > 0 && j.contains("domain")) {
    const auto& dom = j.at("domain");
    if (static_cast<int>(dom.size()) != m)
      throw ParseError("model file: domain must have base_dim entries");
    for (int i = 0; i < m; ++i) {
      chart.lower[i] = detail::domain_bound(
          dom[i][0], -std::numeric_limits<double>::infinity());
      chart.upper[i] = detail::domain_bound(
          dom[i][1], std::numeric_limits<double>::infinity());
    }
  }
  b.algebroid.chart = chart;
  b.algebroid.rank = n;

  // anchor[i][alpha] expressions
  if (m > 0) {
    const auto& aj = j.at("anchor");
    if (static_cast<int>(aj.size()) != m)
      throw ParseError("model file: anchor must have base_dim rows");
    std::vector<std::vector<Expression>> entries(m);
    for (int i = 0; i < m; ++i) {
      if (static_cast<int>(aj[i].size()) != n)
        throw ParseError("model file: anchor rows must have rank entries");
      for (int a = 0; a < n; ++a)
        entries[i].push_back(Expression::parse(aj[i][a].get<std::string>(), coords));
    }
    b.algebroid.anchor = [entries, m, n](const Vector& q) {
      Matrix rho(m, n);
      for (int i = 0; i < m; ++i)
        for (int a = 0; a < n; ++a) rho(i, a) = entries[i][a].eval(q);
      return rho;
    };
  } else {
    b.algebroid.anchor = [n](const Vector&) { return Matrix::Zero(0, n); };
  }

  // structure[gamma][alpha][beta] expressions
  {
    const auto& sj = j.at("structure");
    if (static_cast<int>(sj.size()) != n)
      throw ParseError("model file: structure must have rank slices");
    std::vector<std::vector<std::vector<Expression>>> entries(n);
    for (int g = 0; g < n; ++g) {
      if (static_cast<int>(sj[g].size()) != n)
        throw ParseError("model file: structure slices must be rank x rank");
      entries[g].resize(n);
      for (int a = 0; a < n; ++a) {
        if (static_cast<int>(sj[g][a].size()) != n)
          throw ParseError("model file: structure slices must be rank x rank");
        for (int bidx = 0; bidx < n; ++bidx)
          entries[g][a].push_back(
              Expression::parse(sj[g][a][bidx].get<std::string>(), coords));
      }
    }
    b.algebroid.structure = [entries, n](const Vector& q) {
      Tensor3 c(n, Matrix::Zero(n, n));
      for (int g = 0; g < n; ++g)
        for (int a = 0; a < n; ++a)
          for (int bidx = 0; bidx < n; ++bidx)
            c[g](a, bidx) = entries[g][a][bidx].eval(q);
      return c;
    };
  }

  // Hamiltonian: expression cometric + potential, or the flat kinetic one.
  if (j.contains("hamiltonian")) {
    const auto& hj = j.at("hamiltonian");
    if (hj.contains("builtin_hamiltonian")) {
      if (hj.at("builtin_hamiltonian").get<std::string>() != "kinetic")
        throw ParseError("model file: unknown builtin_hamiltonian");
      b.hamiltonian = detail::constant_kinetic(Matrix::Identity(n, n));
    } else {
      const auto& gj = hj.at("cometric");
      if (static_cast<int>(gj.size()) != n)
        throw ParseError("model file: cometric must be rank x rank");
      std::vector<std::vector<Expression>> entries(n);
      for (int a = 0; a < n; ++a) {
        if (static_cast<int>(gj[a].size()) != n)
          throw ParseError("model file: cometric must be rank x rank");
        for (int bidx = 0; bidx < n; ++bidx)
          entries[a].push_back(
              Expression::parse(gj[a][bidx].get<std::string>(), coords));
      }
      b.hamiltonian.cometric = [entries, n](const Vector& q) {
        Matrix g(n, n);
        for (int a = 0; a < n; ++a)
          for (int bidx = 0; bidx < n; ++bidx) g(a, bidx) = entries[a][bidx].eval(q);
        return g;
      };
      b.hamiltonian.potential =
          hj.contains("potential")
              ? detail::expr_scalar_field(hj.at("potential").get<std::string>(), coords)
              : ScalarField::zero();
    }
  } else {
    b.hamiltonian = detail::constant_kinetic(Matrix::Identity(n, n));
  }

  // Volume densities and optional certificate (defaults zero).
  b.volume = VolumeSpec::lebesgue();
  if (j.contains("volume")) {
    const auto& vj = j.at("volume");
    if (vj.contains("base_log_density"))
      b.volume.base_log_density =
          detail::expr_scalar_field(vj.at("base_log_density").get<std::string>(), coords);
    if (vj.contains("fiber_log_density"))
      b.volume.fiber_log_density =
          detail::expr_scalar_field(vj.at("fiber_log_density").get<std::string>(), coords);
    if (vj.contains("certificate_sigma"))
      b.certificate = UnimodularityCertificate{
          detail::expr_scalar_field(vj.at("certificate_sigma").get<std::string>(), coords),
          true};
  }

  b.expected.unimodular = b.certificate.has_value();
  b.card = "User model loaded from file.";
  b.sampling_box = b.algebroid.chart.finite_box(2.0);
  // expression models carry finite-difference derivatives
  detail::validate_bundle(b, 1e-5);
  return b;
}

inline ModelBundle load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
  try {
    return load_model_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("model file " + path + ": " + e.what());
  }
}

/// Resolve a --model argument: a built-in name or a path to a JSON file.
inline ModelBundle resolve_model(const std::string& source) {
  for (const std::string& name : builtin_names())
    if (name == source) return make_builtin(name);
  return load_model_file(source);
}

}  // namespace algebroid
