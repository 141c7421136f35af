#include "ndf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ndf {

double FieldSampler::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double FieldSampler::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double FieldSampler::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

double FieldSampler::laplace() {
  const double u = uniform() - 0.5;
  return (u < 0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::abs(u));
}

int FieldSampler::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng_() % span);
}

Field FieldSampler::gaussian_field(Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * gaussian();
  return Field(std::move(v));
}

Field FieldSampler::laplace_field(Eigen::Index n, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * laplace();
  return Field(std::move(v));
}

Field FieldSampler::spike_field(Eigen::Index n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  const int spikes = uniform_int(1, std::max(1, static_cast<int>(n) / 3));
  for (int s = 0; s < spikes; ++s) {
    v[uniform_int(0, static_cast<int>(n) - 1)] = uniform(-3.0, 3.0);
  }
  return Field(std::move(v));
}

Field FieldSampler::piecewise_constant_field(Eigen::Index n) {
  Eigen::VectorXd v(n);
  double level = uniform(-2.0, 2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (uniform() < 0.35) level = uniform(-2.0, 2.0);
    v[i] = level;
  }
  return Field(std::move(v));
}

Field FieldSampler::mixed_field(Eigen::Index n) {
  switch (uniform_int(0, 3)) {
    case 0: return gaussian_field(n);
    case 1: return laplace_field(n);
    case 2: return spike_field(n);
    default: return piecewise_constant_field(n);
  }
}

std::pair<Field, Field> FieldSampler::ordered_pair(Eigen::Index n) {
  Field v = mixed_field(n);
  Eigen::VectorXd gap(n);
  for (Eigen::Index i = 0; i < n; ++i) gap[i] = std::abs(gaussian());
  return {Field(v.values() + gap), v};
}

PiecewiseLinear FieldSampler::random_contraction(int max_pieces) {
  return random_lipschitz(1.0, max_pieces);
}

PiecewiseLinear FieldSampler::random_lipschitz(double constant, int max_pieces) {
  std::set<double> pts{0.0};
  const int extra = uniform_int(0, std::max(0, max_pieces - 1));
  for (int k = 0; k < extra; ++k) pts.insert(uniform(-2.5, 2.5));
  std::vector<double> breakpoints(pts.begin(), pts.end());
  std::vector<double> slopes(breakpoints.size() + 1);
  for (auto& s : slopes) s = uniform(-constant, constant);
  return PiecewiseLinear(std::move(breakpoints), std::move(slopes));
}

std::vector<Field> FieldSampler::probe_directions(Eigen::Index n, int extra) {
  std::vector<Field> dirs;
  dirs.reserve(static_cast<std::size_t>(n + extra));
  for (Eigen::Index i = 0; i < n; ++i) {
    Field e = Field::zeros(n);
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  for (int k = 0; k < extra; ++k) dirs.push_back(gaussian_field(n));
  return dirs;
}

MeasureSpace random_space(FieldSampler& s, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = s.uniform(lo, hi);
  return MeasureSpace(std::move(w));
}

std::vector<std::pair<int, int>> random_connected_topology(FieldSampler& s, Eigen::Index n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(s.uniform_int(0, i - 1), i);
  const int extra = s.uniform_int(0, static_cast<int>(n) / 2);
  for (int k = 0; k < extra && n >= 2; ++k) {
    const int a = s.uniform_int(0, static_cast<int>(n) - 1);
    const int b = s.uniform_int(0, static_cast<int>(n) - 1);
    if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return edges;
}

Form random_form(FieldSampler& s, FormFamily family, Eigen::Index n) {
  const auto topo = random_connected_topology(s, n);
  switch (family) {
    case FormFamily::kQuadraticGraph: {
      QuadraticGraphSpec spec;
      for (auto [a, b] : topo) spec.edges.push_back({a, b, s.uniform(0.5, 2.5)});
      return Form(n, std::move(spec));
    }
    case FormFamily::kAnisotropicGraph: {
      AnisotropicGraphSpec spec;
      for (auto [a, b] : topo) {
        spec.edges.push_back({a, b, s.uniform(0.5, 2.5), s.uniform(0.5, 2.5)});
      }
      return Form(n, std::move(spec));
    }
    case FormFamily::kPowerSumSquared: {
      PowerSumSpec spec;
      spec.exponent = s.uniform() < 0.5 ? 1.0 : s.uniform(1.0, 2.0);
      for (auto [a, b] : topo) spec.edges.push_back({a, b, s.uniform(0.5, 2.5)});
      return Form(n, std::move(spec));
    }
    case FormFamily::kQuadraticMatrix: {
      Eigen::MatrixXd root(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) root(i, j) = s.gaussian();
      }
      return Form(n, QuadraticMatrixSpec{root.transpose() * root / static_cast<double>(n)});
    }
    default:
      throw std::invalid_argument("random_form: custom forms cannot be sampled");
  }
}

}  // namespace ndf
