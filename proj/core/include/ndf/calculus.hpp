#pragma once

#include "ndf/form.hpp"
#include "ndf/prox.hpp"
#include "ndf/space.hpp"

#include <span>
#include <string>
#include <vector>

namespace ndf {

/// Certified interval around the one-sided slopes of s -> E(u + s v) at 0.
/// Convexity makes the difference quotient g monotone in s, so at every
/// probed sigma the pair (g(-sigma), g(+sigma)) brackets both slopes; the
/// reported estimates always stay inside the final bracket.
struct SlopeEnclosure {
  double lower_bracket = 0.0;  // g(-sigma_star)
  double upper_bracket = 0.0;  // g(+sigma_star)
  double slope_minus = 0.0;    // left slope estimate
  double slope_plus = 0.0;     // right slope estimate
  double sigma_star = 1.0;
  bool certified = false;
  bool oracle_used = false;
  double noise_estimate = 0.0;  // roundoff level of the difference quotient
  std::string flag;             // "", "irregular-or-noisy", "zero-direction"

  double gap() const { return slope_plus - slope_minus; }
  double width() const { return upper_bracket - lower_bracket; }
};

/// A persistent bracket gap is the signature of a genuine kink, not an
/// error; such enclosures come back uncertified (unless a closed-form
/// oracle pins the slopes) and flagged.
SlopeEnclosure slope_enclosure(const Form& form, const Field& u, const Field& v,
                               const MeasureSpace& space, double tol);

struct RegularityReport {
  bool regular = false;
  bool all_certified = false;
  double max_gap = 0.0;
  int worst_direction = -1;
  std::vector<double> gaps;
};

RegularityReport regularity_probe(const Form& form, const Field& u,
                                  std::span<const Field> directions, const MeasureSpace& space,
                                  double tol);

/// Default directions: the coordinate fields plus 20 seeded random ones.
RegularityReport regularity_probe(const Form& form, const Field& u, const MeasureSpace& space,
                                  double tol, std::uint64_t seed = 7);

struct SecondArgumentReport {
  bool treated_regular = false;
  double linearity_defect = 0.0;     // regular case only
  double convexity_violation = 0.0;  // right slope must be convex in v
  double concavity_violation = 0.0;  // left slope must be concave in v
  double homogeneity_defect = 0.0;   // relative, over both arguments
  double reflection_defect = 0.0;    // right slope at -v vs minus left slope at v

  bool pass(double tol) const {
    return (treated_regular ? linearity_defect <= tol
                            : convexity_violation <= tol && concavity_violation <= tol) &&
           homogeneity_defect <= tol && reflection_defect <= tol;
  }
};

SecondArgumentReport second_argument_linearity_check(const Form& form, const Field& u,
                                                     const Field& v1, const Field& v2,
                                                     double lambda, const MeasureSpace& space,
                                                     double tol);

struct QuadraticityReport {
  int samples = 0;
  bool regular_on_samples = false;
  double symmetry_defect = 0.0;
  double parallelogram_defect = 0.0;
  bool quadratic = false;
  /// regularity+symmetry and the parallelogram identity must agree
  bool equivalence_consistent = false;
};

QuadraticityReport quadraticity_test(const Form& form,
                                     std::span<const std::pair<Field, Field>> samples,
                                     const MeasureSpace& space, double tol);

struct SandwichReport {
  SlopeEnclosure enclosure;
  double pairing = 0.0;  // inner(minimal subgradient, v)
  bool subgradient_converged = false;
  double cdc2_error = 0.0;
  bool pass = false;
};

/// Conservative version of the subdifferential sandwich: the pairing must
/// land inside the bracket interval widened by tol.
SandwichReport sandwich_check(const Form& form, const Field& u, const Field& v,
                              const MeasureSpace& space, const SolverConfig& cfg, double tol);

struct YosidaSandwichReport {
  SlopeEnclosure enclosure;
  std::vector<double> lambdas;
  std::vector<double> pairings;       // inner(A_lambda u, v) per schedule entry
  std::vector<double> finite_slacks;  // (E(u) - E_lambda(u)) / sigma_star
  bool within_widened = false;        // every pairing inside bracket +- (slack + tol)
  double tail_value = 0.0;            // extrapolated limit of the pairings
  bool tail_within = false;
  bool regular_converged = false;  // tail matches the slope when the enclosure is tight
  bool pass = false;
};

/// At finite lambda the resolvent pairing can exceed the slope interval by
/// exactly (E(u) - E_lambda(u)) / sigma; the check widens the interval by
/// that computable slack and separately requires the extrapolated tail to
/// land inside the raw interval.
YosidaSandwichReport yosida_sandwich_check(const Form& form, const Field& u, const Field& v,
                                           std::span<const double> lambda_schedule,
                                           const MeasureSpace& space, const SolverConfig& cfg,
                                           double tol);

struct MembershipReport {
  bool accepted = false;
  double worst_violation = 0.0;
  int witness_direction = -1;  // index into the probed directions, -1 if accepted
  std::vector<double> pairings;
};

/// Tests whether the density xi lies between the slopes in duality with
/// every probed direction.
MembershipReport extended_subdifferential_check(const Form& form, const Field& u, const Field& xi,
                                                std::span<const Field> directions,
                                                const MeasureSpace& space, double tol);

struct ClosureReport {
  bool convex_combinations_ok = false;
  bool scaling_ok = false;
};

/// Membership is stable under convex combinations at fixed u and under
/// simultaneous positive scaling of u and xi.
ClosureReport extended_subdifferential_closure_check(const Form& form, const Field& u,
                                                     const Field& xi1, const Field& xi2,
                                                     std::span<const Field> directions,
                                                     const MeasureSpace& space, double tol);

}  // namespace ndf
