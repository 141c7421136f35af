#pragma once

#include "ndf/form.hpp"
#include "ndf/prox.hpp"
#include "ndf/space.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ndf {

/// Thrown on malformed configuration; the message names the offending
/// field (or the parse position for syntax errors).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlowParams {
  std::vector<double> initial;
  double t_final = 1.0;
  int steps = 100;
};

struct SlopesParams {
  std::vector<double> u;
  std::vector<double> v;
  double tol = 1e-6;
  int quadraticity_samples = 20;
  int extra_directions = 20;
};

struct AuditParams {
  int budget_scale = 1;
  int markov_pairs = 50;
  std::vector<double> t_grid = {0.01, 0.1, 1.0};
  std::vector<double> p_grid = {1.0, 2.0, std::numeric_limits<double>::infinity()};
};

/// One experiment: a space, a form, command parameters, and a seed.
/// Parsing is strict; unknown keys are rejected with their path.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& json_text);
  static ExperimentConfig load(const std::string& path);

  /// Canonical serialization; parse(dump()) reproduces dump() bit for bit.
  std::string dump() const;

  MeasureSpace make_space() const;
  Form make_form() const;

  std::vector<double> weights;
  std::string family;
  std::vector<std::array<double, 4>> edges;  // a, b, weight, second weight
  double exponent = 2.0;
  std::vector<std::vector<double>> matrix;

  std::uint64_t seed = 1;
  std::string expect;  // comma-separated verdict tokens, empty for none
  SolverConfig solver;
  double closed_form_tol = 1e-8;
  double prox_tol = 1e-5;
  AuditParams audit;
  std::optional<FlowParams> flow;
  std::optional<SlopesParams> slopes;
};

/// True when every comma-separated token of `expect` matches the flags.
/// Known tokens: dirichlet, not-dirichlet, quadratic, non-quadratic,
/// regular, irregular, symmetric, non-symmetric, local, non-local.
bool expectation_matches(const std::string& expect, bool dirichlet, bool quadratic, bool regular,
                         bool symmetric, bool local);

}  // namespace ndf
