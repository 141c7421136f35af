#include "ndf/form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ndf {

namespace {

void check_index(int i, Eigen::Index n, const char* family) {
  if (i < 0 || i >= n) {
    throw std::out_of_range(std::string(family) + ": edge index " + std::to_string(i) +
                            " out of range for " + std::to_string(n) + " points");
  }
}

void check_weight(double w, const char* family) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw std::invalid_argument(std::string(family) + ": edge weights must be positive");
  }
}

double pos(double t) { return t > 0.0 ? t : 0.0; }
double neg(double t) { return t < 0.0 ? -t : 0.0; }

}  // namespace

Form::Form(Eigen::Index dimension, QuadraticGraphSpec spec)
    : dim_(dimension), spec_(std::move(spec)) {
  for (const auto& e : std::get<QuadraticGraphSpec>(spec_).edges) {
    check_index(e.a, dim_, "quadratic_graph");
    check_index(e.b, dim_, "quadratic_graph");
    check_weight(e.weight, "quadratic_graph");
  }
}

Form::Form(Eigen::Index dimension, AnisotropicGraphSpec spec)
    : dim_(dimension), spec_(std::move(spec)) {
  for (const auto& e : std::get<AnisotropicGraphSpec>(spec_).edges) {
    check_index(e.a, dim_, "anisotropic_graph");
    check_index(e.b, dim_, "anisotropic_graph");
    check_weight(e.weight_up, "anisotropic_graph");
    check_weight(e.weight_down, "anisotropic_graph");
  }
}

Form::Form(Eigen::Index dimension, PowerSumSpec spec) : dim_(dimension), spec_(std::move(spec)) {
  const auto& ps = std::get<PowerSumSpec>(spec_);
  if (!(ps.exponent >= 1.0 && ps.exponent <= 2.0)) {
    throw std::invalid_argument("power_sum_squared: exponent must lie in [1, 2]");
  }
  for (const auto& e : ps.edges) {
    check_index(e.a, dim_, "power_sum_squared");
    check_index(e.b, dim_, "power_sum_squared");
    check_weight(e.weight, "power_sum_squared");
  }
}

Form::Form(Eigen::Index dimension, QuadraticMatrixSpec spec)
    : dim_(dimension), spec_(std::move(spec)) {
  const auto& q = std::get<QuadraticMatrixSpec>(spec_).matrix;
  if (q.rows() != dim_ || q.cols() != dim_) {
    throw std::invalid_argument("quadratic_matrix: matrix size must match the space");
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("quadratic_matrix: matrix must be symmetric");
  }
}

Form::Form(Eigen::Index dimension, CustomSpec spec) : dim_(dimension), spec_(std::move(spec)) {
  if (!std::get<CustomSpec>(spec_).evaluate) {
    throw std::invalid_argument("custom form: evaluation routine required");
  }
}

FormFamily Form::family() const {
  switch (spec_.index()) {
    case 0: return FormFamily::kQuadraticGraph;
    case 1: return FormFamily::kAnisotropicGraph;
    case 2: return FormFamily::kPowerSumSquared;
    case 3: return FormFamily::kQuadraticMatrix;
    default: return FormFamily::kCustom;
  }
}

std::string Form::label() const {
  switch (family()) {
    case FormFamily::kQuadraticGraph:
      return "quadratic_graph(n=" + std::to_string(dim_) +
             ",edges=" + std::to_string(as_quadratic_graph()->edges.size()) + ")";
    case FormFamily::kAnisotropicGraph:
      return "anisotropic_graph(n=" + std::to_string(dim_) +
             ",edges=" + std::to_string(as_anisotropic_graph()->edges.size()) + ")";
    case FormFamily::kPowerSumSquared: {
      const double q = as_power_sum()->exponent;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", q);
      return "power_sum_squared(n=" + std::to_string(dim_) +
             ",edges=" + std::to_string(as_power_sum()->edges.size()) + ",q=" + buf + ")";
    }
    case FormFamily::kQuadraticMatrix:
      return "quadratic_matrix(n=" + std::to_string(dim_) + ")";
    default:
      return as_custom()->label;
  }
}

double Form::evaluate(const Field& u) const {
  if (u.size() != dim_) throw std::invalid_argument("evaluate: dimension mismatch");
  switch (family()) {
    case FormFamily::kQuadraticGraph: {
      double s = 0.0;
      for (const auto& e : as_quadratic_graph()->edges) {
        const double d = u[e.b] - u[e.a];
        s += e.weight * d * d;
      }
      return s;
    }
    case FormFamily::kAnisotropicGraph: {
      double s = 0.0;
      for (const auto& e : as_anisotropic_graph()->edges) {
        const double d = u[e.b] - u[e.a];
        const double dp = pos(d);
        const double dn = neg(d);
        s += e.weight_up * dp * dp + e.weight_down * dn * dn;
      }
      return s;
    }
    case FormFamily::kPowerSumSquared: {
      const auto& ps = *as_power_sum();
      if (ps.exponent == 2.0) {
        double s = 0.0;
        for (const auto& e : ps.edges) {
          const double d = u[e.b] - u[e.a];
          s += e.weight * d * d;
        }
        return s;
      }
      double s = 0.0;
      for (const auto& e : ps.edges) {
        s += e.weight * std::pow(std::abs(u[e.b] - u[e.a]), ps.exponent);
      }
      return std::pow(s, 2.0 / ps.exponent);
    }
    case FormFamily::kQuadraticMatrix:
      return u.values().dot(as_quadratic_matrix()->matrix * u.values());
    default:
      return as_custom()->evaluate(u);
  }
}

std::optional<Field> Form::euclidean_gradient(const Field& u) const {
  if (u.size() != dim_) throw std::invalid_argument("gradient: dimension mismatch");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  switch (family()) {
    case FormFamily::kQuadraticGraph: {
      for (const auto& e : as_quadratic_graph()->edges) {
        const double d = u[e.b] - u[e.a];
        g[e.b] += 2.0 * e.weight * d;
        g[e.a] -= 2.0 * e.weight * d;
      }
      return Field(std::move(g));
    }
    case FormFamily::kAnisotropicGraph: {
      for (const auto& e : as_anisotropic_graph()->edges) {
        const double d = u[e.b] - u[e.a];
        const double t = d > 0.0 ? 2.0 * e.weight_up * d : 2.0 * e.weight_down * d;
        g[e.b] += t;
        g[e.a] -= t;
      }
      return Field(std::move(g));
    }
    case FormFamily::kPowerSumSquared: {
      const auto& ps = *as_power_sum();
      const double q = ps.exponent;
      if (q == 2.0) {
        for (const auto& e : ps.edges) {
          const double d = u[e.b] - u[e.a];
          g[e.b] += 2.0 * e.weight * d;
          g[e.a] -= 2.0 * e.weight * d;
        }
        return Field(std::move(g));
      }
      double s = 0.0;
      for (const auto& e : ps.edges) {
        const double d = u[e.b] - u[e.a];
        if (d == 0.0) return std::nullopt;  // kink (q=1) or non-C1 certification declined
        s += e.weight * std::pow(std::abs(d), q);
      }
      if (s == 0.0) return Field(std::move(g));
      const double outer = 2.0 * std::pow(s, 2.0 / q - 1.0);
      for (const auto& e : ps.edges) {
        const double d = u[e.b] - u[e.a];
        const double t = outer * e.weight * std::pow(std::abs(d), q - 1.0) * (d > 0 ? 1.0 : -1.0);
        g[e.b] += t;
        g[e.a] -= t;
      }
      return Field(std::move(g));
    }
    case FormFamily::kQuadraticMatrix:
      return Field(2.0 * (as_quadratic_matrix()->matrix * u.values()));
    default:
      return std::nullopt;
  }
}

std::optional<Field> Form::analytic_gradient(const Field& u, const MeasureSpace& space) const {
  space.require_compatible(u);
  auto g = euclidean_gradient(u);
  if (!g) return std::nullopt;
  return Field(g->values().cwiseQuotient(space.weights()));
}

std::optional<std::pair<double, double>> Form::analytic_slopes(const Field& u,
                                                               const Field& v) const {
  if (u.size() != dim_ || v.size() != dim_) {
    throw std::invalid_argument("analytic_slopes: dimension mismatch");
  }
  switch (family()) {
    case FormFamily::kQuadraticGraph:
    case FormFamily::kAnisotropicGraph:
    case FormFamily::kQuadraticMatrix: {
      const double s = euclidean_gradient(u)->values().dot(v.values());
      return std::make_pair(s, s);
    }
    case FormFamily::kPowerSumSquared: {
      const auto& ps = *as_power_sum();
      const double q = ps.exponent;
      if (q == 2.0) {
        const double s = euclidean_gradient(u)->values().dot(v.values());
        return std::make_pair(s, s);
      }
      double s = 0.0;
      for (const auto& e : ps.edges) {
        s += e.weight * std::pow(std::abs(u[e.b] - u[e.a]), q);
      }
      if (s == 0.0) return std::make_pair(0.0, 0.0);
      if (q == 1.0) {
        // d/ds |du + s dv| at 0 is sign(du) dv away from kinks and +-|dv| at
        // them, so the one-sided sums split into a smooth and a kink part.
        double smooth = 0.0;
        double kink = 0.0;
        for (const auto& e : ps.edges) {
          const double du = u[e.b] - u[e.a];
          const double dv = v[e.b] - v[e.a];
          if (du == 0.0) {
            kink += e.weight * std::abs(dv);
          } else {
            smooth += e.weight * (du > 0 ? dv : -dv);
          }
        }
        return std::make_pair(2.0 * s * (smooth - kink), 2.0 * s * (smooth + kink));
      }
      const double outer = 2.0 * std::pow(s, 2.0 / q - 1.0);
      double acc = 0.0;
      for (const auto& e : ps.edges) {
        const double du = u[e.b] - u[e.a];
        if (du == 0.0) continue;  // |t|^q has zero derivative at 0 for q > 1
        const double dv = v[e.b] - v[e.a];
        acc += e.weight * std::pow(std::abs(du), q - 1.0) * (du > 0 ? dv : -dv);
      }
      const double slope = outer * acc;
      return std::make_pair(slope, slope);
    }
    default:
      return std::nullopt;
  }
}

LocalityStructure Form::locality() const {
  LocalityStructure out;
  const int terms = term_count();
  out.term_supports.reserve(static_cast<std::size_t>(terms));
  for (int t = 0; t < terms; ++t) out.term_supports.push_back(term_support(t));
  switch (family()) {
    case FormFamily::kQuadraticGraph:
    case FormFamily::kAnisotropicGraph:
      out.is_local = true;
      out.note = "additive over pairs with edge-disjoint supports";
      break;
    case FormFamily::kPowerSumSquared: {
      const auto& ps = *as_power_sum();
      out.is_local = ps.exponent == 2.0 || ps.edges.size() <= 1;
      out.note = out.is_local ? "additive over pairs with edge-disjoint supports"
                              : "outer power couples edges";
      break;
    }
    case FormFamily::kQuadraticMatrix:
      out.is_local = false;
      out.note = "quadratic coupling carries mass terms; treated as non-local";
      break;
    default:
      out.is_local = false;
      out.note = "opaque evaluation; full support assumed";
      break;
  }
  return out;
}

int Form::term_count() const {
  switch (family()) {
    case FormFamily::kQuadraticGraph: return static_cast<int>(as_quadratic_graph()->edges.size());
    case FormFamily::kAnisotropicGraph:
      return static_cast<int>(as_anisotropic_graph()->edges.size());
    case FormFamily::kPowerSumSquared: return static_cast<int>(as_power_sum()->edges.size());
    case FormFamily::kQuadraticMatrix: {
      const auto& q = as_quadratic_matrix()->matrix;
      int count = 0;
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = i; j < q.cols(); ++j) {
          if (q(i, j) != 0.0) ++count;
        }
      }
      return count;
    }
    default: return 1;
  }
}

double Form::term_value(int term, const Field& u) const {
  if (term < 0 || term >= term_count()) throw std::out_of_range("term_value: bad term index");
  switch (family()) {
    case FormFamily::kQuadraticGraph: {
      const auto& e = as_quadratic_graph()->edges[static_cast<std::size_t>(term)];
      const double d = u[e.b] - u[e.a];
      return e.weight * d * d;
    }
    case FormFamily::kAnisotropicGraph: {
      const auto& e = as_anisotropic_graph()->edges[static_cast<std::size_t>(term)];
      const double d = u[e.b] - u[e.a];
      return e.weight_up * pos(d) * pos(d) + e.weight_down * neg(d) * neg(d);
    }
    case FormFamily::kPowerSumSquared: {
      // inner summand; the outer power is applied across terms
      const auto& ps = *as_power_sum();
      const auto& e = ps.edges[static_cast<std::size_t>(term)];
      return e.weight * std::pow(std::abs(u[e.b] - u[e.a]), ps.exponent);
    }
    case FormFamily::kQuadraticMatrix: {
      const auto& q = as_quadratic_matrix()->matrix;
      int count = 0;
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = i; j < q.cols(); ++j) {
          if (q(i, j) == 0.0) continue;
          if (count++ == term) {
            const double c = (i == j) ? 1.0 : 2.0;
            return c * q(i, j) * u[i] * u[j];
          }
        }
      }
      return 0.0;
    }
    default:
      return evaluate(u);
  }
}

std::vector<int> Form::term_support(int term) const {
  if (term < 0 || term >= term_count()) throw std::out_of_range("term_support: bad term index");
  switch (family()) {
    case FormFamily::kQuadraticGraph: {
      const auto& e = as_quadratic_graph()->edges[static_cast<std::size_t>(term)];
      return e.a == e.b ? std::vector<int>{e.a} : std::vector<int>{e.a, e.b};
    }
    case FormFamily::kAnisotropicGraph: {
      const auto& e = as_anisotropic_graph()->edges[static_cast<std::size_t>(term)];
      return e.a == e.b ? std::vector<int>{e.a} : std::vector<int>{e.a, e.b};
    }
    case FormFamily::kPowerSumSquared: {
      const auto& e = as_power_sum()->edges[static_cast<std::size_t>(term)];
      return e.a == e.b ? std::vector<int>{e.a} : std::vector<int>{e.a, e.b};
    }
    case FormFamily::kQuadraticMatrix: {
      const auto& q = as_quadratic_matrix()->matrix;
      int count = 0;
      for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = i; j < q.cols(); ++j) {
          if (q(i, j) == 0.0) continue;
          if (count++ == term) {
            if (i == j) return {static_cast<int>(i)};
            return {static_cast<int>(i), static_cast<int>(j)};
          }
        }
      }
      return {};
    }
    default: {
      std::vector<int> all(static_cast<std::size_t>(dim_));
      for (int i = 0; i < dim_; ++i) all[static_cast<std::size_t>(i)] = i;
      return all;
    }
  }
}

bool Form::has_quadratic_matrix() const {
  switch (family()) {
    case FormFamily::kQuadraticGraph:
    case FormFamily::kQuadraticMatrix:
      return true;
    case FormFamily::kPowerSumSquared:
      return as_power_sum()->exponent == 2.0;
    default:
      return false;
  }
}

Eigen::MatrixXd Form::quadratic_matrix() const {
  if (family() == FormFamily::kQuadraticMatrix) return as_quadratic_matrix()->matrix;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim_, dim_);
  auto add_edge = [&q](int a, int b, double w) {
    q(a, a) += w;
    q(b, b) += w;
    q(a, b) -= w;
    q(b, a) -= w;
  };
  if (family() == FormFamily::kQuadraticGraph) {
    for (const auto& e : as_quadratic_graph()->edges) add_edge(e.a, e.b, e.weight);
    return q;
  }
  if (family() == FormFamily::kPowerSumSquared && as_power_sum()->exponent == 2.0) {
    for (const auto& e : as_power_sum()->edges) add_edge(e.a, e.b, e.weight);
    return q;
  }
  throw std::logic_error("quadratic_matrix: form is not quadratic");
}

const QuadraticGraphSpec* Form::as_quadratic_graph() const {
  return std::get_if<QuadraticGraphSpec>(&spec_);
}
const AnisotropicGraphSpec* Form::as_anisotropic_graph() const {
  return std::get_if<AnisotropicGraphSpec>(&spec_);
}
const PowerSumSpec* Form::as_power_sum() const { return std::get_if<PowerSumSpec>(&spec_); }
const QuadraticMatrixSpec* Form::as_quadratic_matrix() const {
  return std::get_if<QuadraticMatrixSpec>(&spec_);
}
const CustomSpec* Form::as_custom() const { return std::get_if<CustomSpec>(&spec_); }

}  // namespace ndf
