#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <utility>
#include <vector>

namespace ndf {

/// A real-valued function on the points of a finite measure space.
class Field {
 public:
  Field() = default;
  explicit Field(Eigen::VectorXd values);
  Field(std::initializer_list<double> values);

  static Field zeros(Eigen::Index n);
  static Field constant(Eigen::Index n, double c);

  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

 private:
  Eigen::VectorXd values_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator-(const Field& a);
Field operator*(double s, const Field& a);
bool operator==(const Field& a, const Field& b);

/// Finite set of points carrying strictly positive weights. All inner
/// products and Lp norms are taken against these weights.
class MeasureSpace {
 public:
  explicit MeasureSpace(std::vector<double> weights);
  explicit MeasureSpace(Eigen::VectorXd weights);
  MeasureSpace(std::initializer_list<double> weights);

  static MeasureSpace uniform(Eigen::Index n, double weight = 1.0);

  Eigen::Index size() const { return weights_.size(); }
  double weight(Eigen::Index i) const { return weights_[i]; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_mass() const { return weights_.sum(); }

  /// Weighted scalar product sum_i m_i u_i v_i.
  double inner(const Field& u, const Field& v) const;

  /// norm(u) = sqrt(inner(u, u)).
  double norm(const Field& u) const;

  /// (sum_i m_i |u_i|^p)^(1/p); p may be +infinity (max modulus).
  /// p < 1 is rejected.
  double lp_norm(const Field& u, double p) const;

  void require_compatible(const Field& u) const;

 private:
  Eigen::VectorXd weights_;
};

/// Pointwise minimum and maximum, in that order. meet + join == u + v.
std::pair<Field, Field> meet_join(const Field& u, const Field& v);

/// Pointwise clamp of u to [0, 1].
Field unit_contraction(const Field& u);

/// Moves u toward v, pointwise, by at most alpha:
/// result = v + clamp(u - v, -alpha, alpha). Requires alpha >= 0.
Field h_alpha(const Field& u, const Field& v, double alpha);

}  // namespace ndf
