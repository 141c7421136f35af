#include "ndf/calculus.hpp"

#include "ndf/sampler.hpp"

#include "doctest.h"

#include <cmath>

using namespace ndf;

namespace {

Form one_edge_quadratic() { return Form(2, QuadraticGraphSpec{{{0, 1, 1.0}}}); }

Form path3_tv() { return Form(3, PowerSumSpec{{{0, 1, 1.0}, {1, 2, 1.0}}, 1.0}); }

Form aniso14() { return Form(2, AnisotropicGraphSpec{{{0, 1, 1.0, 4.0}}}); }

}  // namespace

TEST_CASE("enclosure along the field itself certifies twice the energy") {
  const MeasureSpace m11 = MeasureSpace::uniform(2);
  const Field u{1, -1};
  const SlopeEnclosure enc = slope_enclosure(one_edge_quadratic(), u, u, m11, 1e-7);
  CHECK(enc.certified);
  CHECK(enc.slope_minus == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(enc.slope_plus == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(enc.lower_bracket <= enc.slope_minus + 1e-12);
  CHECK(enc.slope_plus <= enc.upper_bracket + 1e-12);
}

TEST_CASE("a kink produces a persistent certified gap") {
  const MeasureSpace m = MeasureSpace::uniform(3);
  const SlopeEnclosure enc =
      slope_enclosure(path3_tv(), Field{0, 0, 1}, Field{1, 0, 0}, m, 1e-6);
  CHECK(enc.oracle_used);
  CHECK(enc.certified);  // the closed form pins both slopes
  CHECK(enc.slope_minus == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(enc.slope_plus == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(enc.gap() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(enc.lower_bracket <= -2.0 + 1e-9);
  CHECK(enc.upper_bracket >= 2.0 - 1e-9);
}

TEST_CASE("disjoint uncoupled supports give zero slopes for local forms") {
  const MeasureSpace m = MeasureSpace::uniform(4);
  const Form aniso(4, AnisotropicGraphSpec{{{0, 1, 1.0, 2.0}, {2, 3, 3.0, 0.5}}});
  const Field u{1.0, -0.5, 0.0, 0.0};
  const Field v{0.0, 0.0, 2.0, -1.0};
  const SlopeEnclosure enc = slope_enclosure(aniso, u, v, m, 1e-9);
  CHECK(std::abs(enc.slope_minus) <= 1e-9);
  CHECK(std::abs(enc.slope_plus) <= 1e-9);
}

TEST_CASE("difference quotients are monotone in sigma") {
  FieldSampler sampler(103);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = sampler.uniform_int(2, 6);
    for (FormFamily family : {FormFamily::kQuadraticGraph, FormFamily::kAnisotropicGraph,
                              FormFamily::kPowerSumSquared}) {
      const Form form = random_form(sampler, family, n);
      const Field u = sampler.mixed_field(n);
      const Field v = sampler.mixed_field(n);
      const double e0 = form.evaluate(u);
      double prev = -std::numeric_limits<double>::infinity();
      for (double sigma : {-0.8, -0.4, -0.1, 0.1, 0.4, 0.8}) {
        const double g = (form.evaluate(u + sigma * v) - e0) / sigma;
        CHECK(g >= prev - 1e-12 * (1.0 + std::abs(g)));
        prev = g;
      }
    }
  }
}

TEST_CASE("slope bound and equality at the diagonal") {
  // upper slopes are bounded through sqrt(E(v)); for sign-asymmetric
  // energies the lower side sees the reversed direction, so the sharp
  // two-sided bound is -2 sqrt(E(u) E(-v)) <= slopes <= 2 sqrt(E(u) E(v))
  FieldSampler sampler(107);
  for (FormFamily family : {FormFamily::kQuadraticGraph, FormFamily::kAnisotropicGraph,
                            FormFamily::kPowerSumSquared, FormFamily::kQuadraticMatrix}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::Index n = sampler.uniform_int(2, 7);
      const MeasureSpace space = random_space(sampler, n);
      const Form form = random_form(sampler, family, n);
      for (int k = 0; k < 25; ++k) {
        const Field u = sampler.mixed_field(n);
        const Field v = sampler.mixed_field(n);
        const SlopeEnclosure enc = slope_enclosure(form, u, v, space, 1e-6);
        const double up = 2.0 * std::sqrt(form.evaluate(u) * form.evaluate(v));
        const double down = 2.0 * std::sqrt(form.evaluate(u) * form.evaluate(-v));
        CHECK(enc.slope_plus <= up + 1e-7);
        CHECK(enc.slope_minus >= -down - 1e-7);
        CHECK(enc.slope_minus <= enc.slope_plus + 1e-12);
        if (family != FormFamily::kAnisotropicGraph) {
          CHECK(std::abs(enc.slope_plus) <= up + 1e-7);
          CHECK(std::abs(enc.slope_minus) <= up + 1e-7);
        }
      }
      const Field w = sampler.mixed_field(n);
      const SlopeEnclosure diag = slope_enclosure(form, w, w, space, 1e-7);
      const double e2 = 2.0 * form.evaluate(w);
      CHECK(std::abs(diag.slope_plus - e2) <= 1e-7 * (1.0 + e2));
      CHECK(std::abs(diag.slope_minus - e2) <= 1e-7 * (1.0 + e2));
    }
  }
}

TEST_CASE("one-homogeneity in both slots and the reflection identity") {
  FieldSampler sampler(109);
  for (FormFamily family : {FormFamily::kQuadraticGraph, FormFamily::kAnisotropicGraph,
                            FormFamily::kPowerSumSquared}) {
    const Eigen::Index n = 5;
    const MeasureSpace space = random_space(sampler, n);
    const Form form = random_form(sampler, family, n);
    for (int k = 0; k < 10; ++k) {
      const Field u = sampler.mixed_field(n);
      const Field v = sampler.mixed_field(n);
      const SlopeEnclosure base = slope_enclosure(form, u, v, space, 1e-6);
      for (double c : {0.5, 2.0, 10.0}) {
        const SlopeEnclosure su = slope_enclosure(form, c * u, v, space, 1e-6);
        const SlopeEnclosure sv = slope_enclosure(form, u, c * v, space, 1e-6);
        CHECK(su.slope_plus ==
              doctest::Approx(c * base.slope_plus).epsilon(1e-6).scale(1.0));
        CHECK(su.slope_minus ==
              doctest::Approx(c * base.slope_minus).epsilon(1e-6).scale(1.0));
        CHECK(sv.slope_plus ==
              doctest::Approx(c * base.slope_plus).epsilon(1e-6).scale(1.0));
        CHECK(sv.slope_minus ==
              doctest::Approx(c * base.slope_minus).epsilon(1e-6).scale(1.0));
      }
      const SlopeEnclosure refl = slope_enclosure(form, u, -v, space, 1e-6);
      CHECK(std::abs(refl.slope_plus + base.slope_minus) <=
            refl.width() + base.width() + 1e-9);
    }
  }
}

TEST_CASE("regularity probes") {
  const MeasureSpace m2 = MeasureSpace::uniform(2);
  FieldSampler sampler(113);

  CHECK(regularity_probe(one_edge_quadratic(), sampler.gaussian_field(2), m2, 1e-6).regular);
  CHECK(regularity_probe(aniso14(), sampler.gaussian_field(2), m2, 1e-6).regular);
  CHECK(regularity_probe(aniso14(), Field{0, 0}, m2, 1e-6).regular);  // kink of (t+)^2 is C1

  const MeasureSpace m3 = MeasureSpace::uniform(3);
  const RegularityReport tv = regularity_probe(path3_tv(), Field{0, 0, 1}, m3, 1e-6);
  CHECK_FALSE(tv.regular);
  CHECK(tv.max_gap > 1.0);
  CHECK(tv.worst_direction >= 0);
}

TEST_CASE("second-argument structure of the slopes") {
  const MeasureSpace m2 = MeasureSpace::uniform(2);
  // bilinear case: exact linearity
  const SecondArgumentReport lin = second_argument_linearity_check(
      one_edge_quadratic(), Field{1, -1}, Field{0, 1}, Field{1, 1}, 0.3, m2, 1e-8);
  CHECK(lin.treated_regular);
  CHECK(lin.linearity_defect <= 1e-8);
  CHECK(lin.homogeneity_defect <= 1e-8);
  CHECK(lin.reflection_defect <= 1e-8);

  // kink: the right slope is convex but not linear; the chosen pair makes
  // the inequality strict
  const MeasureSpace m3 = MeasureSpace::uniform(3);
  const Field u{0, 0, 1};
  const Field v1{1, 0, 0};
  const Field v2{-1, 0, 0};
  const SecondArgumentReport kink =
      second_argument_linearity_check(path3_tv(), u, v1, v2, 0.5, m3, 1e-8);
  CHECK_FALSE(kink.treated_regular);
  CHECK(kink.convexity_violation <= 1e-8);
  CHECK(kink.concavity_violation <= 1e-8);
  const auto s1 = path3_tv().analytic_slopes(u, v1);
  const auto sm = path3_tv().analytic_slopes(u, Field{0, 0, 0});
  CHECK(sm->second < 0.5 * s1->second + 0.5 * path3_tv().analytic_slopes(u, v2)->second);

  // reflection on the kink example: plus slope at -v equals 2
  const auto refl = path3_tv().analytic_slopes(u, v2);
  CHECK(refl->second == doctest::Approx(2.0));
  CHECK(refl->second == doctest::Approx(-s1->first));
}

TEST_CASE("quadraticity verdicts") {
  FieldSampler sampler(127);
  const MeasureSpace m2 = MeasureSpace::uniform(2);

  std::vector<std::pair<Field, Field>> pairs2;
  pairs2.emplace_back(Field{0, 1}, Field{1, 0});
  for (int k = 0; k < 15; ++k) {
    pairs2.emplace_back(sampler.mixed_field(2), sampler.mixed_field(2));
  }

  const QuadraticityReport quad = quadraticity_test(one_edge_quadratic(), pairs2, m2, 1e-7);
  CHECK(quad.quadratic);
  CHECK(quad.regular_on_samples);
  CHECK(quad.symmetry_defect <= 1e-8);
  CHECK(quad.parallelogram_defect <= 1e-8);
  CHECK(quad.equivalence_consistent);

  // asymmetric weights: regular, but slopes are not symmetric. On the
  // witness pair the defect is |Lambda(u,v) - Lambda(v,u)| = |-2 - (-8)|.
  const QuadraticityReport aniso = quadraticity_test(aniso14(), pairs2, m2, 1e-7);
  CHECK_FALSE(aniso.quadratic);
  CHECK(aniso.regular_on_samples);
  CHECK(aniso.symmetry_defect >= 5.9);
  CHECK(aniso.parallelogram_defect >= 5.9);
  CHECK(aniso.equivalence_consistent);

  const MeasureSpace m3 = MeasureSpace::uniform(3);
  std::vector<std::pair<Field, Field>> pairs3;
  pairs3.emplace_back(Field{0, 0, 1}, Field{1, 0, 0});
  const QuadraticityReport tv = quadraticity_test(path3_tv(), pairs3, m3, 1e-7);
  CHECK_FALSE(tv.quadratic);
  CHECK_FALSE(tv.regular_on_samples);
}

TEST_CASE("subdifferential sandwich") {
  const MeasureSpace m2 = MeasureSpace::uniform(2);
  SolverConfig cfg;

  // regular point: slope, bracket, and pairing all coincide at -4
  const SandwichReport reg =
      sandwich_check(one_edge_quadratic(), Field{1, -1}, Field{0, 1}, m2, cfg, 1e-6);
  CHECK(reg.pass);
  CHECK(reg.pairing == doctest::Approx(-4.0).epsilon(1e-6));

  // kink: the minimal selection sits strictly inside the slope interval
  const MeasureSpace m3 = MeasureSpace::uniform(3);
  const SandwichReport kink =
      sandwich_check(path3_tv(), Field{0, 0, 1}, Field{1, 0, 0}, m3, cfg, 1e-6);
  CHECK(kink.pass);
  CHECK(kink.pairing == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(kink.pairing > kink.enclosure.slope_minus + 0.5);
  CHECK(kink.pairing < kink.enclosure.slope_plus - 0.5);

  // along the field the sandwich collapses to the pairing identity
  const SandwichReport diag =
      sandwich_check(one_edge_quadratic(), Field{1, -1}, Field{1, -1}, m2, cfg, 1e-6);
  CHECK(diag.pass);
  CHECK(diag.pairing == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("resolvent pairings respect the slope interval") {
  const MeasureSpace m2 = MeasureSpace::uniform(2);
  SolverConfig cfg;
  const std::vector<double> schedule = default_lambda_schedule();

  const YosidaSandwichReport quad = yosida_sandwich_check(
      one_edge_quadratic(), Field{1, -1}, Field{0, 1}, schedule, m2, cfg, 1e-6);
  CHECK(quad.pass);
  CHECK(quad.tail_value == doctest::Approx(-4.0).epsilon(1e-5));
  // the recorded pairings follow -4 / (1 + 4 lambda)
  for (std::size_t k = 0; k < quad.lambdas.size(); ++k) {
    CHECK(quad.pairings[k] ==
          doctest::Approx(-4.0 / (1.0 + 4.0 * quad.lambdas[k])).epsilon(1e-8));
  }

  const Form zero(2, QuadraticGraphSpec{});
  const YosidaSandwichReport trivial =
      yosida_sandwich_check(zero, Field{1, -1}, Field{0, 1}, schedule, m2, cfg, 1e-6);
  CHECK(trivial.pass);
  CHECK(trivial.tail_value == doctest::Approx(0.0).epsilon(1e-12));

  const YosidaSandwichReport aniso =
      yosida_sandwich_check(aniso14(), Field{0, 1}, Field{1, 1}, schedule, m2, cfg, 1e-4);
  CHECK(aniso.pass);
  const double want = aniso14().euclidean_gradient(Field{0, 1})->values().dot(
      Field{1, 1}.values());
  CHECK(aniso.regular_converged);
  CHECK(aniso.tail_value == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("extended subdifferential membership") {
  const MeasureSpace m3({2.0, 5.0, 1.0});
  const Form tv = path3_tv();
  const Field u{0, 0, 1};
  SolverConfig cfg;
  FieldSampler sampler(131);
  auto directions = sampler.probe_directions(3, 10);
  for (Eigen::Index i = 0; i < 3; ++i) {
    Field e = Field::zeros(3);
    e[i] = -1.0;
    directions.push_back(e);  // both coordinate signs
  }

  const SubgradientResult sg = minimal_subgradient(tv, u, m3, cfg);
  REQUIRE(sg.converged);
  const MembershipReport ok =
      extended_subdifferential_check(tv, u, sg.xi, directions, m3, 1e-4);
  CHECK(ok.accepted);

  Field bad = sg.xi;
  bad[0] += 3.0;
  const MembershipReport rejected =
      extended_subdifferential_check(tv, u, bad, directions, m3, 1e-4);
  CHECK_FALSE(rejected.accepted);
  CHECK(rejected.witness_direction >= 0);

  // closure under convex combinations and under scaling both arguments
  Field other = sg.xi;
  other[0] += 0.4;  // still inside: kink slack covers coordinate 0
  other[1] -= 0.4 * 2.0 / 5.0;
  const MembershipReport other_ok =
      extended_subdifferential_check(tv, u, other, directions, m3, 1e-4);
  CHECK(other_ok.accepted);
  const ClosureReport closure =
      extended_subdifferential_closure_check(tv, u, sg.xi, other, directions, m3, 1e-4);
  CHECK(closure.convex_combinations_ok);
  CHECK(closure.scaling_ok);

  // at regular points membership pins the density: two accepted candidates
  // agree in the weighted norm
  const MeasureSpace m2 = MeasureSpace::uniform(2);
  const Form quad = one_edge_quadratic();
  const Field w{1, -1};
  auto dirs2 = sampler.probe_directions(2, 10);
  const SubgradientResult a = minimal_subgradient(quad, w, m2, cfg);
  SolverConfig tight;
  tight.tolerance = 1e-11;
  const std::vector<double> alt_schedule{5e-2, 1e-2, 2e-3, 4e-4, 8e-5, 1.6e-5, 3.2e-6};
  const SubgradientResult b = minimal_subgradient(quad, w, m2, tight, alt_schedule);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(extended_subdifferential_check(quad, w, a.xi, dirs2, m2, 1e-5).accepted);
  CHECK(extended_subdifferential_check(quad, w, b.xi, dirs2, m2, 1e-5).accepted);
  CHECK(m2.norm(a.xi - b.xi) <= 1e-5);
}
