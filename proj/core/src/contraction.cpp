#include "ndf/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ndf {

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints, std::vector<double> slopes)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
  if (breakpoints_.empty()) {
    throw std::invalid_argument("PiecewiseLinear: needs at least one breakpoint");
  }
  if (slopes_.size() != breakpoints_.size() + 1) {
    throw std::invalid_argument("PiecewiseLinear: needs one slope per interval");
  }
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] < breakpoints_[k + 1])) {
      throw std::invalid_argument("PiecewiseLinear: breakpoints must be strictly increasing");
    }
  }
  const auto zero = std::find(breakpoints_.begin(), breakpoints_.end(), 0.0);
  if (zero == breakpoints_.end()) {
    throw std::invalid_argument("PiecewiseLinear: breakpoints must contain 0");
  }
  for (double s : slopes_) {
    if (!std::isfinite(s)) throw std::invalid_argument("PiecewiseLinear: slope not finite");
  }

  // Accumulate breakpoint values outward from the anchor phi(0) = 0.
  const std::size_t z = static_cast<std::size_t>(zero - breakpoints_.begin());
  values_.assign(breakpoints_.size(), 0.0);
  for (std::size_t k = z; k + 1 < breakpoints_.size(); ++k) {
    values_[k + 1] = values_[k] + slopes_[k + 1] * (breakpoints_[k + 1] - breakpoints_[k]);
  }
  for (std::size_t k = z; k-- > 0;) {
    values_[k] = values_[k + 1] - slopes_[k + 1] * (breakpoints_[k + 1] - breakpoints_[k]);
  }
}

double PiecewiseLinear::operator()(double t) const {
  if (t <= breakpoints_.front()) {
    return values_.front() + slopes_.front() * (t - breakpoints_.front());
  }
  if (t >= breakpoints_.back()) {
    return values_.back() + slopes_.back() * (t - breakpoints_.back());
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - breakpoints_.begin());
  return values_[j - 1] + slopes_[j] * (t - breakpoints_[j - 1]);
}

double PiecewiseLinear::lipschitz_constant() const {
  double L = 0.0;
  for (double s : slopes_) L = std::max(L, std::abs(s));
  return L;
}

NormalContraction::NormalContraction(PiecewiseLinear map) : map_(std::move(map)) {
  for (double s : map_.slopes()) {
    if (std::abs(s) > 1.0) {
      throw std::invalid_argument("NormalContraction: slopes must lie in [-1, 1]");
    }
  }
}

NormalContraction NormalContraction::identity() {
  return NormalContraction(PiecewiseLinear({0.0}, {1.0, 1.0}));
}

NormalContraction NormalContraction::negation() {
  return NormalContraction(PiecewiseLinear({0.0}, {-1.0, -1.0}));
}

NormalContraction NormalContraction::clamp_unit() {
  return NormalContraction(PiecewiseLinear({0.0, 1.0}, {0.0, 1.0, 0.0}));
}

NormalContraction NormalContraction::absolute_value() {
  return NormalContraction(PiecewiseLinear({0.0}, {-1.0, 1.0}));
}

NormalContraction NormalContraction::positive_part() {
  return NormalContraction(PiecewiseLinear({0.0}, {0.0, 1.0}));
}

Field apply(const PiecewiseLinear& phi, const Field& u) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = phi(u[i]);
  return Field(std::move(out));
}

Field apply(const NormalContraction& phi, const Field& u) { return apply(phi.map(), u); }

}  // namespace ndf
