#pragma once

#include "ndf/form.hpp"
#include "ndf/prox.hpp"
#include "ndf/space.hpp"

#include <span>
#include <string>
#include <vector>

namespace ndf {

/// Discrete gradient-flow trajectory. states[0] is the initial datum and
/// the recorded energies are nonincreasing up to solver tolerance.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<double> energies;
  double step_size = 0.0;
  bool complete = true;
  std::string failure;
  double max_prox_residual = 0.0;
};

/// Implicit Euler: each step applies the resolvent with tau = t_final/steps.
Trajectory flow(const Form& form, const Field& u0, double t_final, int steps,
                const MeasureSpace& space, const SolverConfig& cfg = {});

/// Reference evolution for E(u) = u^T Q u in the weighted geometry, i.e.
/// the semigroup generated by -2 M^{-1} Q, evaluated spectrally.
Field exact_quadratic_flow(const Eigen::MatrixXd& q, const Field& u0, double t,
                           const MeasureSpace& space);

struct ProbePair {
  Field u;
  Field v;
  bool ordered = false;  // true when u >= v pointwise by construction
};

struct MarkovViolation {
  std::string kind;  // "lp_contraction" or "order_preservation"
  double t = 0.0;
  double p = 0.0;  // meaningful for contraction violations
  double margin = 0.0;
  Field u;
  Field v;
};

struct MarkovProbeRecord {
  int pairs = 0;
  int checks = 0;
  std::vector<double> t_grid;
  std::vector<double> p_grid;
  double worst_contraction_margin = 0.0;
  double worst_order_margin = 0.0;
  double tolerance = 0.0;
  int steps_per_time = 0;
  bool solver_trouble = false;
  std::vector<MarkovViolation> violations;

  bool pass() const { return violations.empty() && !solver_trouble; }
};

/// Checks the Lp contraction of the flow map on each pair and order
/// preservation on the ordered ones. Violations are data, not errors.
MarkovProbeRecord markov_probe(const Form& form, std::span<const ProbePair> pairs,
                               std::span<const double> t_grid, std::span<const double> p_grid,
                               const MeasureSpace& space, const SolverConfig& cfg = {},
                               int steps_per_time = 8);

}  // namespace ndf
