#include "ndf/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ndf {

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

}  // namespace

Field::Field(Eigen::VectorXd values) : values_(std::move(values)) {
  require_finite(values_, "Field");
}

Field::Field(std::initializer_list<double> values)
    : values_(Eigen::Map<const Eigen::VectorXd>(values.begin(),
                                                static_cast<Eigen::Index>(values.size()))) {
  require_finite(values_, "Field");
}

Field Field::zeros(Eigen::Index n) { return Field(Eigen::VectorXd::Zero(n)); }

Field Field::constant(Eigen::Index n, double c) {
  return Field(Eigen::VectorXd::Constant(n, c));
}

Field operator+(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Field+: dimension mismatch");
  return Field(a.values() + b.values());
}

Field operator-(const Field& a, const Field& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Field-: dimension mismatch");
  return Field(a.values() - b.values());
}

Field operator-(const Field& a) { return Field(-a.values()); }

Field operator*(double s, const Field& a) { return Field(s * a.values()); }

bool operator==(const Field& a, const Field& b) {
  return a.size() == b.size() && a.values() == b.values();
}

MeasureSpace::MeasureSpace(std::vector<double> weights)
    : MeasureSpace(Eigen::Map<const Eigen::VectorXd>(
          weights.data(), static_cast<Eigen::Index>(weights.size()))) {}

MeasureSpace::MeasureSpace(std::initializer_list<double> weights)
    : MeasureSpace(Eigen::Map<const Eigen::VectorXd>(
          weights.begin(), static_cast<Eigen::Index>(weights.size()))) {}

MeasureSpace::MeasureSpace(Eigen::VectorXd weights) : weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw std::invalid_argument("MeasureSpace: needs at least one point");
  }
  require_finite(weights_, "MeasureSpace");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (weights_[i] <= 0.0) {
      throw std::invalid_argument("MeasureSpace: weight " + std::to_string(i) +
                                  " must be strictly positive");
    }
  }
}

MeasureSpace MeasureSpace::uniform(Eigen::Index n, double weight) {
  return MeasureSpace(Eigen::VectorXd::Constant(n, weight));
}

void MeasureSpace::require_compatible(const Field& u) const {
  if (u.size() != size()) {
    throw std::invalid_argument("field has " + std::to_string(u.size()) +
                                " entries, space has " + std::to_string(size()));
  }
}

double MeasureSpace::inner(const Field& u, const Field& v) const {
  require_compatible(u);
  require_compatible(v);
  return (weights_.array() * u.values().array() * v.values().array()).sum();
}

double MeasureSpace::norm(const Field& u) const { return std::sqrt(inner(u, u)); }

double MeasureSpace::lp_norm(const Field& u, double p) const {
  require_compatible(u);
  if (std::isinf(p) && p > 0) {
    return u.values().cwiseAbs().maxCoeff();
  }
  if (!(p >= 1.0)) {
    throw std::invalid_argument("lp_norm: p must lie in [1, infinity]");
  }
  if (p == 1.0) {
    return (weights_.array() * u.values().array().abs()).sum();
  }
  if (p == 2.0) {
    return norm(u);
  }
  const double s = (weights_.array() * u.values().array().abs().pow(p)).sum();
  return std::pow(s, 1.0 / p);
}

std::pair<Field, Field> meet_join(const Field& u, const Field& v) {
  if (u.size() != v.size()) throw std::invalid_argument("meet_join: dimension mismatch");
  return {Field(u.values().cwiseMin(v.values())), Field(u.values().cwiseMax(v.values()))};
}

Field unit_contraction(const Field& u) {
  return Field(u.values().cwiseMax(0.0).cwiseMin(1.0));
}

Field h_alpha(const Field& u, const Field& v, double alpha) {
  if (u.size() != v.size()) throw std::invalid_argument("h_alpha: dimension mismatch");
  if (!(alpha >= 0.0)) throw std::invalid_argument("h_alpha: alpha must be nonnegative");
  Eigen::VectorXd d = (u.values() - v.values()).cwiseMax(-alpha).cwiseMin(alpha);
  return Field(v.values() + d);
}

}  // namespace ndf
