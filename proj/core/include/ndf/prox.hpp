#pragma once

#include "ndf/form.hpp"
#include "ndf/space.hpp"

#include <span>
#include <string>
#include <vector>

namespace ndf {

struct SolverConfig {
  /// Stationarity residual in the weighted norm at which a solve counts as
  /// converged. For the non-smooth path the equivalent certificate is a
  /// duality gap of lambda * tolerance^2 / 2.
  double tolerance = 1e-9;
  int max_iterations = 200000;
  double backtrack_shrink = 0.5;   // in (0, 1)
  double armijo = 1e-4;            // in (0, 1)

  void validate() const;
};

struct ProxResult {
  Field minimizer;
  double envelope_value = 0.0;  // E(minimizer) + |u - minimizer|^2_m / (2 lambda)
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;

  /// Weighted subgradient of the form at the minimizer, recovered from the
  /// stationarity system rather than the difference quotient (u - v)/lambda,
  /// so it stays accurate for small lambda.
  Field subgradient;
};

/// Minimizer of E(v) + |v - u|^2_m / (2 lambda). Unique by strong convexity.
ProxResult prox(const Form& form, const Field& u, double lambda, const MeasureSpace& space,
                const SolverConfig& cfg = {});

/// (u - prox(u)) / lambda, evaluated through the stationarity witness.
Field yosida(const Form& form, const Field& u, double lambda, const MeasureSpace& space,
             const SolverConfig& cfg = {});

/// E_lambda(u) = inf_v E(v) + |v - u|^2_m / (2 lambda).
double envelope(const Form& form, const Field& u, double lambda, const MeasureSpace& space,
                const SolverConfig& cfg = {});

struct SubgradientResult {
  Field xi;
  bool converged = false;
  double cdc2_error = 0.0;  // relative defect of inner(xi, u) = 2 E(u)
  int schedule_steps = 0;
  std::string message;
};

/// Geometric ladder 1e-1, 5e-2, ..., down to 1e-6.
std::vector<double> default_lambda_schedule();

/// Minimal-norm subgradient, extrapolated from the resolvent along a
/// decreasing schedule with a Cauchy stopping rule.
SubgradientResult minimal_subgradient(const Form& form, const Field& u,
                                      const MeasureSpace& space, const SolverConfig& cfg = {},
                                      std::span<const double> lambda_schedule = {});

}  // namespace ndf
