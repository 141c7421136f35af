#pragma once

#include "ndf/contraction.hpp"
#include "ndf/form.hpp"
#include "ndf/space.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ndf {

/// Seeded source of test fields. Distributions are generated from raw
/// mt19937_64 output rather than std::*_distribution so that a seed pins
/// the byte stream on every platform. The mixture leans on non-smooth
/// profiles (spikes, plateaus) because lattice inequalities tend to be
/// tight there.
class FieldSampler {
 public:
  explicit FieldSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double gaussian();
  double laplace();
  int uniform_int(int lo, int hi);  // inclusive bounds

  Field gaussian_field(Eigen::Index n, double scale = 1.0);
  Field laplace_field(Eigen::Index n, double scale = 1.0);
  Field spike_field(Eigen::Index n);
  Field piecewise_constant_field(Eigen::Index n);
  Field mixed_field(Eigen::Index n);

  /// first >= second pointwise.
  std::pair<Field, Field> ordered_pair(Eigen::Index n);

  PiecewiseLinear random_contraction(int max_pieces = 6);
  PiecewiseLinear random_lipschitz(double constant, int max_pieces = 6);

  /// Coordinate fields followed by `extra` gaussian directions.
  std::vector<Field> probe_directions(Eigen::Index n, int extra);

 private:
  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

MeasureSpace random_space(FieldSampler& s, Eigen::Index n, double lo = 0.3, double hi = 3.0);

/// Spanning tree plus a few extra edges; indices cover 0..n-1.
std::vector<std::pair<int, int>> random_connected_topology(FieldSampler& s, Eigen::Index n);

Form random_form(FieldSampler& s, FormFamily family, Eigen::Index n);

}  // namespace ndf
