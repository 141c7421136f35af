#pragma once

#include "ndf/space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ndf {

struct GraphEdge {
  int a = 0;
  int b = 0;
  double weight = 1.0;
};

struct AnisotropicEdge {
  int a = 0;
  int b = 0;
  double weight_up = 1.0;    // applies to the positive part of u_b - u_a
  double weight_down = 1.0;  // applies to the negative part of u_b - u_a
};

/// E(u) = sum_e w_e (u_b - u_a)^2.
struct QuadraticGraphSpec {
  std::vector<GraphEdge> edges;
};

/// E(u) = sum_e [w+ ((u_b - u_a)^+)^2 + w- ((u_b - u_a)^-)^2].
/// Asymmetric in the sign of the difference; globally C1 because (t^+)^2 is.
struct AnisotropicGraphSpec {
  std::vector<AnisotropicEdge> edges;
};

/// E(u) = (sum_e w_e |u_b - u_a|^q)^(2/q) with q in [1, 2].
/// Non-smooth for q = 1; couples edges through the outer power for q != 2.
struct PowerSumSpec {
  std::vector<GraphEdge> edges;
  double exponent = 2.0;
};

/// E(u) = u^T Q u with Q symmetric. Positive semi-definite instances are
/// convex; the catalog keeps this family around for negative controls.
struct QuadraticMatrixSpec {
  Eigen::MatrixXd matrix;
};

/// Caller-supplied evaluation. Claimed convex and 2-homogeneous; the audit
/// checks that claim instead of trusting it.
struct CustomSpec {
  std::function<double(const Field&)> evaluate;
  std::string label = "custom";
};

enum class FormFamily {
  kQuadraticGraph,
  kAnisotropicGraph,
  kPowerSumSquared,
  kQuadraticMatrix,
  kCustom,
};

/// Which points each additive term of a form reads, plus whether the form
/// is additive over pairs whose supports are not coupled by any term.
struct LocalityStructure {
  std::vector<std::vector<int>> term_supports;
  bool is_local = false;
  std::string note;
};

/// Declarative description of a convex 2-homogeneous energy on a fixed
/// number of points, with closed-form differential oracles where the
/// family admits them.
class Form {
 public:
  Form(Eigen::Index dimension, QuadraticGraphSpec spec);
  Form(Eigen::Index dimension, AnisotropicGraphSpec spec);
  Form(Eigen::Index dimension, PowerSumSpec spec);
  Form(Eigen::Index dimension, QuadraticMatrixSpec spec);
  Form(Eigen::Index dimension, CustomSpec spec);

  Eigen::Index dimension() const { return dim_; }
  FormFamily family() const;
  std::string label() const;

  double evaluate(const Field& u) const;

  /// Euclidean gradient of evaluate, where the family is C1 at u.
  /// PowerSumSquared with q < 2 declines at points with a zero edge
  /// difference.
  std::optional<Field> euclidean_gradient(const Field& u) const;

  /// Gradient in the weighted geometry: euclidean gradient divided by the
  /// point weights, so that E(u + s v) - E(u) = s * inner(g, v) + o(s).
  std::optional<Field> analytic_gradient(const Field& u, const MeasureSpace& space) const;

  /// Closed-form one-sided directional derivatives (left, right) of
  /// s -> E(u + s v) at s = 0. Absent for families without a formula.
  std::optional<std::pair<double, double>> analytic_slopes(const Field& u,
                                                           const Field& v) const;

  LocalityStructure locality() const;

  int term_count() const;
  double term_value(int term, const Field& u) const;
  std::vector<int> term_support(int term) const;

  /// True when evaluate(u) == u^T Q u exactly for the matrix below.
  bool has_quadratic_matrix() const;
  /// The representing matrix for quadratic families (graph energies are
  /// assembled on demand). Throws for non-quadratic families.
  Eigen::MatrixXd quadratic_matrix() const;

  const QuadraticGraphSpec* as_quadratic_graph() const;
  const AnisotropicGraphSpec* as_anisotropic_graph() const;
  const PowerSumSpec* as_power_sum() const;
  const QuadraticMatrixSpec* as_quadratic_matrix() const;
  const CustomSpec* as_custom() const;

 private:
  Eigen::Index dim_ = 0;
  std::variant<QuadraticGraphSpec, AnisotropicGraphSpec, PowerSumSpec, QuadraticMatrixSpec,
               CustomSpec>
      spec_;
};

}  // namespace ndf
