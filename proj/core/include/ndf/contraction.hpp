#pragma once

#include "ndf/space.hpp"

#include <vector>

namespace ndf {

/// Continuous piecewise-linear map of the real line. Breakpoints are
/// strictly increasing and must contain 0; there is one slope per interval
/// (one more slope than breakpoints). The value at 0 is pinned to 0, which
/// determines the map completely.
class PiecewiseLinear {
 public:
  PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> slopes);

  double operator()(double t) const;

  double lipschitz_constant() const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& slopes() const { return slopes_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> slopes_;
  std::vector<double> values_;  // map values at the breakpoints
};

/// A 1-Lipschitz piecewise-linear map fixing 0. Composing a field with such
/// a map must not raise any of the catalog energies that model diffusion.
class NormalContraction {
 public:
  explicit NormalContraction(PiecewiseLinear map);

  static NormalContraction identity();
  static NormalContraction negation();
  static NormalContraction clamp_unit();     // 0 v t ^ 1
  static NormalContraction absolute_value();
  static NormalContraction positive_part();

  double operator()(double t) const { return map_(t); }
  const PiecewiseLinear& map() const { return map_; }

 private:
  PiecewiseLinear map_;
};

Field apply(const PiecewiseLinear& phi, const Field& u);
Field apply(const NormalContraction& phi, const Field& u);

}  // namespace ndf
