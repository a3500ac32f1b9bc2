#pragma once

#include <Eigen/Dense>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "algebroid/errors.hpp"

namespace algebroid {

/// A single coordinate chart on the base: m named coordinates restricted to
/// an axis-aligned box. Unbounded sides are +-infinity. All evaluation in the
/// library is chart-local; leaving the box is an error, never extrapolation.
struct BaseChart {
  int dim = 0;
  std::vector<std::string> coord_names;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static BaseChart unbounded(int m, const std::string& prefix = "q") {
    BaseChart c;
    c.dim = m;
    c.lower = Eigen::VectorXd::Constant(m, -std::numeric_limits<double>::infinity());
    c.upper = Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
    for (int i = 0; i < m; ++i)
      c.coord_names.push_back(prefix + std::to_string(i + 1));
    return c;
  }

  static BaseChart point() { return unbounded(0); }

  void validate() const {
    if (dim < 0) throw ModelError("chart: negative dimension");
    if (static_cast<int>(coord_names.size()) != dim ||
        lower.size() != dim || upper.size() != dim)
      throw ModelError("chart: coord_names/domain size must equal base_dim");
    for (int i = 0; i < dim; ++i)
      if (!(lower[i] < upper[i]))
        throw ModelError("chart: lower bound must be below upper bound on axis " +
                         coord_names[i]);
  }

  bool contains(const Eigen::VectorXd& q) const {
    if (q.size() != dim) return false;
    for (int i = 0; i < dim; ++i)
      if (!(q[i] > lower[i] && q[i] < upper[i])) return false;
    return true;
  }

  void require_inside(const Eigen::VectorXd& q) const {
    if (q.size() != dim)
      throw OutOfChartError("point has dimension " + std::to_string(q.size()) +
                            ", chart has " + std::to_string(dim));
    if (!contains(q)) {
      std::ostringstream os;
      os << "point (";
      for (int i = 0; i < dim; ++i) os << (i ? ", " : "") << q[i];
      os << ") is outside the chart box";
      throw OutOfChartError(os.str());
    }
  }

  /// Finite window for sampling: unbounded sides replaced by +-half_width.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> finite_box(double half_width) const {
    Eigen::VectorXd lo(dim), hi(dim);
    for (int i = 0; i < dim; ++i) {
      lo[i] = std::isfinite(lower[i]) ? lower[i] : -half_width;
      hi[i] = std::isfinite(upper[i]) ? upper[i] : half_width;
    }
    return {lo, hi};
  }
};

}  // namespace algebroid
