#pragma once

#include "ndf/calculus.hpp"
#include "ndf/semigroup.hpp"
#include "ndf/space.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ndf {

/// Replayable witness of a violated inequality: the stored fields and
/// scalars are enough to recompute the stored margin.
struct Counterexample {
  std::map<std::string, std::vector<double>> fields;
  std::map<std::string, double> scalars;
  std::string description;
  double margin = 0.0;
};

struct PropertyRecord {
  std::string property;
  int samples = 0;
  int violations = 0;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool applicable = true;
  std::string note;
  std::optional<Counterexample> counterexample;
};

struct Inconsistency {
  std::string severity;  // "bug" or "info"
  std::string message;
};

struct Verdict {
  bool dirichlet_consistent = false;
  bool quadratic = false;
  bool regular = false;
  bool negation_symmetric = false;
  bool local = false;
  std::string summary;
};

/// Aggregated audit outcome for one form. The audit is sampled evidence,
/// never a proof; the serialized report says so in its header.
struct PropertyReport {
  std::string form_label;
  std::uint64_t seed = 0;
  Eigen::Index space_size = 0;
  std::vector<double> space_weights;
  std::vector<PropertyRecord> records;
  MarkovProbeRecord markov;
  bool markov_ran = false;
  Verdict verdict;
  std::vector<Inconsistency> inconsistencies;

  const PropertyRecord* find(const std::string& property) const;
};

std::string report_to_json(const PropertyReport& report);
std::string report_to_text(const PropertyReport& report);

std::string trajectory_to_csv(const Trajectory& traj);
std::string trajectory_to_json(const Trajectory& traj);

std::string enclosure_to_json(const SlopeEnclosure& enc);

}  // namespace ndf
