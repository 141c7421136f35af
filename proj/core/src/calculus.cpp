#include "ndf/calculus.hpp"

#include "ndf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ndf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double clampd(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

}  // namespace

SlopeEnclosure slope_enclosure(const Form& form, const Field& u, const Field& v,
                               const MeasureSpace& space, double tol) {
  space.require_compatible(u);
  space.require_compatible(v);
  if (!(tol > 0.0)) throw std::invalid_argument("slope_enclosure: tol must be positive");

  SlopeEnclosure enc;
  const double norm_v = space.norm(v);
  if (norm_v == 0.0) {
    enc.certified = true;
    enc.flag = "zero-direction";
    return enc;
  }

  const double e_u = form.evaluate(u);
  const double sigma_unit = std::max(space.norm(u), 1e-3) / norm_v;
  const double sigma_floor = 1e-9 * sigma_unit;

  const auto oracle = form.analytic_slopes(u, v);

  auto quotient = [&](double sigma) {
    return (form.evaluate(u + sigma * v) - e_u) / sigma;
  };

  double sigma = 0.1 * sigma_unit;
  double g_minus = quotient(-sigma);
  double g_plus = quotient(sigma);
  double prev_width = std::numeric_limits<double>::infinity();
  double noise = 0.0;
  int rung = 0;
  for (;; ++rung) {
    const double width = g_plus - g_minus;
    noise = 8.0 * kEps * (std::abs(e_u) + std::abs(e_u + sigma * g_plus) + 1.0) / sigma;
    if (width <= tol) break;
    if (rung >= 2 && width >= 0.95 * prev_width) break;  // persistent gap: a kink
    if (noise >= 0.25 * std::max(width, tol)) break;     // cancellation dominates
    if (sigma * 0.5 < sigma_floor) break;
    prev_width = width;
    const double sigma_next = 0.5 * sigma;
    const double gm = quotient(-sigma_next);
    const double gp = quotient(sigma_next);
    // convexity: brackets tighten monotonically; keep the sharper bound
    g_minus = std::max(g_minus, gm);
    g_plus = std::min(g_plus, gp);
    sigma = sigma_next;
  }

  enc.sigma_star = sigma;
  enc.lower_bracket = g_minus;
  enc.upper_bracket = g_plus;
  enc.noise_estimate = noise;

  const double slack = noise + 1e-12 * (1.0 + std::abs(g_plus) + std::abs(g_minus));
  if (oracle) {
    enc.oracle_used = true;
    enc.slope_minus = oracle->first;
    enc.slope_plus = oracle->second;
    enc.certified = enc.slope_minus >= g_minus - slack && enc.slope_plus <= g_plus + slack &&
                    enc.slope_minus <= enc.slope_plus + slack;
  } else {
    // no closed form available: report the tightest brackets themselves as
    // the one-sided estimates (their bias is at most the bracket width)
    enc.slope_minus = clampd(g_minus, g_minus, g_plus);
    enc.slope_plus = clampd(g_plus, enc.slope_minus, g_plus);
    enc.certified = (g_plus - g_minus) <= tol;
  }
  if (!enc.certified) enc.flag = "irregular-or-noisy";
  return enc;
}

RegularityReport regularity_probe(const Form& form, const Field& u,
                                  std::span<const Field> directions, const MeasureSpace& space,
                                  double tol) {
  if (directions.empty()) throw std::invalid_argument("regularity_probe: no directions");
  RegularityReport rep;
  rep.all_certified = true;
  rep.regular = true;
  rep.gaps.reserve(directions.size());
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const SlopeEnclosure enc = slope_enclosure(form, u, directions[k], space, tol);
    const double gap = enc.gap();
    rep.gaps.push_back(gap);
    if (!enc.certified) rep.all_certified = false;
    const bool ok = enc.certified && gap <= tol;
    if (!ok && (rep.worst_direction < 0 || gap > rep.max_gap)) {
      rep.worst_direction = static_cast<int>(k);
    }
    if (gap > rep.max_gap) rep.max_gap = gap;
    rep.regular = rep.regular && ok;
  }
  return rep;
}

RegularityReport regularity_probe(const Form& form, const Field& u, const MeasureSpace& space,
                                  double tol, std::uint64_t seed) {
  FieldSampler sampler(seed);
  const auto dirs = sampler.probe_directions(space.size(), 20);
  return regularity_probe(form, u, dirs, space, tol);
}

SecondArgumentReport second_argument_linearity_check(const Form& form, const Field& u,
                                                     const Field& v1, const Field& v2,
                                                     double lambda, const MeasureSpace& space,
                                                     double tol) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("second_argument_linearity_check: lambda must lie in [0, 1]");
  }
  SecondArgumentReport rep;
  const Field mix = lambda * v1 + (1.0 - lambda) * v2;
  const SlopeEnclosure e1 = slope_enclosure(form, u, v1, space, tol);
  const SlopeEnclosure e2 = slope_enclosure(form, u, v2, space, tol);
  const SlopeEnclosure em = slope_enclosure(form, u, mix, space, tol);

  rep.treated_regular = e1.certified && e2.certified && em.certified && e1.gap() <= tol &&
                        e2.gap() <= tol && em.gap() <= tol;
  if (rep.treated_regular) {
    const double l1 = 0.5 * (e1.slope_minus + e1.slope_plus);
    const double l2 = 0.5 * (e2.slope_minus + e2.slope_plus);
    const double lm = 0.5 * (em.slope_minus + em.slope_plus);
    rep.linearity_defect = std::abs(lm - lambda * l1 - (1.0 - lambda) * l2);
  } else {
    rep.convexity_violation =
        std::max(0.0, em.slope_plus - lambda * e1.slope_plus - (1.0 - lambda) * e2.slope_plus);
    rep.concavity_violation =
        std::max(0.0, lambda * e1.slope_minus + (1.0 - lambda) * e2.slope_minus - em.slope_minus);
  }

  // positive 1-homogeneity in each argument
  for (double c : {0.5, 2.0, 10.0}) {
    const SlopeEnclosure scaled_u = slope_enclosure(form, c * u, v1, space, tol);
    const SlopeEnclosure scaled_v = slope_enclosure(form, u, c * v1, space, tol);
    for (auto [got, want] :
         {std::pair{scaled_u.slope_plus, c * e1.slope_plus},
          std::pair{scaled_u.slope_minus, c * e1.slope_minus},
          std::pair{scaled_v.slope_plus, c * e1.slope_plus},
          std::pair{scaled_v.slope_minus, c * e1.slope_minus}}) {
      rep.homogeneity_defect =
          std::max(rep.homogeneity_defect, std::abs(got - want) / (1.0 + std::abs(want)));
    }
  }

  const SlopeEnclosure refl = slope_enclosure(form, u, -v1, space, tol);
  rep.reflection_defect = std::abs(refl.slope_plus + e1.slope_minus);
  return rep;
}

QuadraticityReport quadraticity_test(const Form& form,
                                     std::span<const std::pair<Field, Field>> samples,
                                     const MeasureSpace& space, double tol) {
  if (samples.empty()) throw std::invalid_argument("quadraticity_test: no samples");
  QuadraticityReport rep;
  rep.samples = static_cast<int>(samples.size());
  rep.regular_on_samples = true;
  for (const auto& [u, v] : samples) {
    const SlopeEnclosure uv = slope_enclosure(form, u, v, space, tol);
    const SlopeEnclosure vu = slope_enclosure(form, v, u, space, tol);
    const bool regular = uv.certified && vu.certified && uv.gap() <= tol && vu.gap() <= tol;
    rep.regular_on_samples = rep.regular_on_samples && regular;
    const double luv = 0.5 * (uv.slope_minus + uv.slope_plus);
    const double lvu = 0.5 * (vu.slope_minus + vu.slope_plus);
    rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(luv - lvu));
    const double para = form.evaluate(u + v) + form.evaluate(u - v) - 2.0 * form.evaluate(u) -
                        2.0 * form.evaluate(v);
    rep.parallelogram_defect = std::max(rep.parallelogram_defect, std::abs(para));
  }
  rep.quadratic =
      rep.regular_on_samples && rep.symmetry_defect <= tol && rep.parallelogram_defect <= tol;
  const bool via_slopes = rep.regular_on_samples && rep.symmetry_defect <= std::max(tol, 1e-8);
  const bool via_parallelogram = rep.parallelogram_defect <= std::max(100.0 * tol, 1e-6);
  rep.equivalence_consistent = via_slopes == via_parallelogram;
  return rep;
}

SandwichReport sandwich_check(const Form& form, const Field& u, const Field& v,
                              const MeasureSpace& space, const SolverConfig& cfg, double tol) {
  SandwichReport rep;
  rep.enclosure = slope_enclosure(form, u, v, space, tol);
  const SubgradientResult sg = minimal_subgradient(form, u, space, cfg);
  rep.subgradient_converged = sg.converged;
  rep.cdc2_error = sg.cdc2_error;
  rep.pairing = space.inner(sg.xi, v);
  rep.pass = sg.converged && rep.pairing >= rep.enclosure.lower_bracket - tol &&
             rep.pairing <= rep.enclosure.upper_bracket + tol;
  return rep;
}

YosidaSandwichReport yosida_sandwich_check(const Form& form, const Field& u, const Field& v,
                                           std::span<const double> lambda_schedule,
                                           const MeasureSpace& space, const SolverConfig& cfg,
                                           double tol) {
  std::vector<double> fallback;
  if (lambda_schedule.empty()) {
    fallback = default_lambda_schedule();
    lambda_schedule = fallback;
  }
  YosidaSandwichReport rep;
  rep.enclosure = slope_enclosure(form, u, v, space, tol);
  const double e_u = form.evaluate(u);
  rep.within_widened = true;

  for (double lam : lambda_schedule) {
    const ProxResult pr = prox(form, u, lam, space, cfg);
    if (!pr.converged) {
      throw std::runtime_error("yosida_sandwich_check: prox failed at lambda=" +
                               std::to_string(lam) + ": " + pr.message);
    }
    const double pairing = space.inner(pr.subgradient, v);
    const double slack = std::max(0.0, e_u - pr.envelope_value) / rep.enclosure.sigma_star;
    rep.lambdas.push_back(lam);
    rep.pairings.push_back(pairing);
    rep.finite_slacks.push_back(slack);
    if (pairing < rep.enclosure.lower_bracket - slack - tol ||
        pairing > rep.enclosure.upper_bracket + slack + tol) {
      rep.within_widened = false;
    }
  }

  const std::size_t k = rep.pairings.size();
  if (k >= 2) {
    const double lk = rep.lambdas[k - 1], lp = rep.lambdas[k - 2];
    rep.tail_value =
        rep.pairings[k - 1] + (rep.pairings[k - 1] - rep.pairings[k - 2]) * (lk / (lp - lk));
  } else {
    rep.tail_value = rep.pairings.empty() ? 0.0 : rep.pairings.back();
  }
  rep.tail_within = rep.tail_value >= rep.enclosure.lower_bracket - tol &&
                    rep.tail_value <= rep.enclosure.upper_bracket + tol;
  if (rep.enclosure.certified && rep.enclosure.gap() <= tol) {
    const double mid = 0.5 * (rep.enclosure.slope_minus + rep.enclosure.slope_plus);
    rep.regular_converged = std::abs(rep.tail_value - mid) <= tol + rep.enclosure.width();
  }
  rep.pass = rep.within_widened && rep.tail_within;
  return rep;
}

MembershipReport extended_subdifferential_check(const Form& form, const Field& u, const Field& xi,
                                                std::span<const Field> directions,
                                                const MeasureSpace& space, double tol) {
  if (directions.empty()) {
    throw std::invalid_argument("extended_subdifferential_check: no directions");
  }
  MembershipReport rep;
  rep.accepted = true;
  rep.pairings.reserve(directions.size());
  for (std::size_t k = 0; k < directions.size(); ++k) {
    const SlopeEnclosure enc = slope_enclosure(form, u, directions[k], space, tol);
    const double pairing = space.inner(xi, directions[k]);
    rep.pairings.push_back(pairing);
    const double viol = std::max(enc.lower_bracket - tol - pairing,
                                 pairing - enc.upper_bracket - tol);
    if (viol > 0.0) {
      rep.accepted = false;
      if (viol > rep.worst_violation) {
        rep.worst_violation = viol;
        rep.witness_direction = static_cast<int>(k);
      }
    }
  }
  return rep;
}

ClosureReport extended_subdifferential_closure_check(const Form& form, const Field& u,
                                                     const Field& xi1, const Field& xi2,
                                                     std::span<const Field> directions,
                                                     const MeasureSpace& space, double tol) {
  ClosureReport rep;
  rep.convex_combinations_ok = true;
  for (double t : {0.25, 0.5, 0.75}) {
    const Field mix = t * xi1 + (1.0 - t) * xi2;
    rep.convex_combinations_ok =
        rep.convex_combinations_ok &&
        extended_subdifferential_check(form, u, mix, directions, space, tol).accepted;
  }
  rep.scaling_ok = true;
  for (double c : {0.5, 2.0}) {
    rep.scaling_ok = rep.scaling_ok &&
                     extended_subdifferential_check(form, c * u, Field(c * xi1.values()),
                                                    directions, space, tol)
                         .accepted;
  }
  return rep;
}

}  // namespace ndf
