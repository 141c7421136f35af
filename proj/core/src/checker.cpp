#include "ndf/checker.hpp"

#include "ndf/calculus.hpp"
#include "ndf/contraction.hpp"
#include "ndf/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ndf {

namespace {

std::vector<double> to_std(const Field& f) {
  return std::vector<double>(f.values().data(), f.values().data() + f.size());
}

Counterexample make_counterexample(std::string description, double margin,
                                   std::initializer_list<std::pair<const char*, const Field*>> fs,
                                   std::initializer_list<std::pair<const char*, double>> scalars = {}) {
  Counterexample ce;
  ce.description = std::move(description);
  ce.margin = margin;
  for (const auto& [name, f] : fs) ce.fields[name] = to_std(*f);
  for (const auto& [name, s] : scalars) ce.scalars[name] = s;
  return ce;
}

/// Deterministic spiky profiles that make the lattice inequalities tight.
std::vector<Field> adversarial_fields(Eigen::Index n) {
  std::vector<Field> out;
  auto push = [&](Field f) { out.push_back(std::move(f)); };
  Field a = Field::zeros(n);
  a[0] = 2.0;
  if (n > 1) a[1] = -2.0;
  push(a);
  Field b = Field::zeros(n);
  b[0] = 1.0;
  push(b);
  Field c = Field::zeros(n);
  c[n - 1] = 1.0;
  push(c);
  Eigen::VectorXd alt(n);
  for (Eigen::Index i = 0; i < n; ++i) alt[i] = (i % 2 == 0) ? 1.0 : -1.0;
  push(Field(alt));
  push(Field::constant(n, 1.0));
  return out;
}

std::vector<std::pair<Field, Field>> sample_pairs(FieldSampler& sampler, Eigen::Index n,
                                                  int count) {
  std::vector<std::pair<Field, Field>> pairs;
  const auto adv = adversarial_fields(n);
  for (std::size_t i = 0; i + 1 < adv.size(); i += 2) pairs.emplace_back(adv[i], adv[i + 1]);
  while (static_cast<int>(pairs.size()) < count) {
    switch (sampler.uniform_int(0, 3)) {
      case 0:
        pairs.emplace_back(sampler.mixed_field(n), sampler.mixed_field(n));
        break;
      case 1: {
        auto [hi, lo] = sampler.ordered_pair(n);
        pairs.emplace_back(std::move(hi), std::move(lo));
        break;
      }
      case 2: {  // disjoint supports
        Field u = Field::zeros(n), v = Field::zeros(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          if (sampler.uniform() < 0.5) {
            u[i] = sampler.uniform(-2.0, 2.0);
          } else {
            v[i] = sampler.uniform(-2.0, 2.0);
          }
        }
        pairs.emplace_back(std::move(u), std::move(v));
        break;
      }
      default: {
        Field u = sampler.mixed_field(n);
        pairs.emplace_back(u, u);  // equality case
        break;
      }
    }
  }
  pairs.resize(static_cast<std::size_t>(count), pairs.front());
  return pairs;
}

}  // namespace

PropertyRecord check_minmax(const Form& form, const MeasureSpace& space, int n_samples,
                            double tol, FieldSampler& sampler) {
  PropertyRecord rec;
  rec.property = "min_max_inequality";
  rec.tolerance = tol;
  rec.worst_margin = -std::numeric_limits<double>::infinity();
  const auto pairs = sample_pairs(sampler, space.size(), n_samples);
  for (const auto& [u, v] : pairs) {
    const auto [lo, hi] = meet_join(u, v);
    const double margin =
        form.evaluate(hi) + form.evaluate(lo) - form.evaluate(u) - form.evaluate(v);
    ++rec.samples;
    if (margin > rec.worst_margin) rec.worst_margin = margin;
    if (margin > tol) {
      ++rec.violations;
      if (!rec.counterexample || margin > rec.counterexample->margin) {
        rec.counterexample = make_counterexample(
            "energy of join plus energy of meet exceeds the pair", margin, {{"u", &u}, {"v", &v}});
      }
    }
  }
  rec.pass = rec.violations == 0;
  return rec;
}

std::pair<PropertyRecord, PropertyRecord> check_h_alpha(const Form& form,
                                                        const MeasureSpace& space, int n_samples,
                                                        const std::vector<double>& alpha_grid,
                                                        double tol, FieldSampler& sampler) {
  PropertyRecord sym;
  sym.property = "truncation_shift_inequality";
  sym.tolerance = tol;
  sym.worst_margin = -std::numeric_limits<double>::infinity();
  PropertyRecord lit;
  lit.property = "truncation_shift_inequality_one_sided";
  lit.tolerance = tol;
  lit.worst_margin = -std::numeric_limits<double>::infinity();
  lit.note = "recorded for information; not part of the verdict";

  const auto pairs = sample_pairs(sampler, space.size(), n_samples);
  for (const auto& [u, v] : pairs) {
    std::vector<double> alphas = alpha_grid;
    alphas.push_back(0.0);
    alphas.push_back(1.05 * (u.values() - v.values()).cwiseAbs().maxCoeff() + 1e-9);
    const double base = form.evaluate(u) + form.evaluate(v);
    for (double alpha : alphas) {
      const Field huv = h_alpha(u, v, alpha);
      const Field hvu = h_alpha(v, u, alpha);
      const double sym_margin = form.evaluate(huv) + form.evaluate(hvu) - base;
      const double lit_margin = 2.0 * form.evaluate(huv) - base;
      ++sym.samples;
      ++lit.samples;
      if (sym_margin > sym.worst_margin) sym.worst_margin = sym_margin;
      if (lit_margin > lit.worst_margin) lit.worst_margin = lit_margin;
      if (sym_margin > tol) {
        ++sym.violations;
        if (!sym.counterexample || sym_margin > sym.counterexample->margin) {
          sym.counterexample =
              make_counterexample("shifted truncation raised the pair energy", sym_margin,
                                  {{"u", &u}, {"v", &v}}, {{"alpha", alpha}});
        }
      }
      if (lit_margin > tol) {
        ++lit.violations;
        if (!lit.counterexample || lit_margin > lit.counterexample->margin) {
          lit.counterexample =
              make_counterexample("one-sided truncation reading violated", lit_margin,
                                  {{"u", &u}, {"v", &v}}, {{"alpha", alpha}});
        }
      }
    }
  }
  sym.pass = sym.violations == 0;
  lit.pass = lit.violations == 0;
  return {sym, lit};
}

ContractionRecords check_normal_contraction(const Form& form, const MeasureSpace& space,
                                            int n_samples, int n_phi, double tol,
                                            FieldSampler& sampler) {
  ContractionRecords out;
  out.pool.property = "normal_contraction";
  out.pool.tolerance = tol;
  out.pool.worst_margin = -std::numeric_limits<double>::infinity();
  out.negation.property = "negation_symmetry";
  out.negation.tolerance = tol;
  out.negation.worst_margin = -std::numeric_limits<double>::infinity();

  std::vector<std::pair<std::string, PiecewiseLinear>> pool;
  pool.emplace_back("identity", NormalContraction::identity().map());
  pool.emplace_back("clamp_unit", NormalContraction::clamp_unit().map());
  pool.emplace_back("absolute_value", NormalContraction::absolute_value().map());
  pool.emplace_back("positive_part", NormalContraction::positive_part().map());
  for (int k = 0; k < n_phi; ++k) {
    pool.emplace_back("sampled_" + std::to_string(k), sampler.random_contraction());
  }

  std::vector<Field> fields = adversarial_fields(space.size());
  while (static_cast<int>(fields.size()) < n_samples) {
    fields.push_back(sampler.mixed_field(space.size()));
  }
  fields.resize(static_cast<std::size_t>(n_samples), fields.front());

  for (const auto& u : fields) {
    const double base = form.evaluate(u);
    for (const auto& [name, phi] : pool) {
      const Field pu = apply(phi, u);
      const double margin = form.evaluate(pu) - base;
      ++out.pool.samples;
      if (margin > out.pool.worst_margin) out.pool.worst_margin = margin;
      if (margin > tol) {
        ++out.pool.violations;
        if (!out.pool.counterexample || margin > out.pool.counterexample->margin) {
          Counterexample ce = make_counterexample(
              "1-Lipschitz map " + name + " raised the energy", margin, {{"u", &u}});
          ce.fields["phi_breakpoints"] = phi.breakpoints();
          ce.fields["phi_slopes"] = phi.slopes();
          out.pool.counterexample = std::move(ce);
        }
      }
    }
    const double neg_margin = form.evaluate(-u) - base;
    ++out.negation.samples;
    if (neg_margin > out.negation.worst_margin) out.negation.worst_margin = neg_margin;
    if (neg_margin > tol) {
      ++out.negation.violations;
      if (!out.negation.counterexample || neg_margin > out.negation.counterexample->margin) {
        out.negation.counterexample =
            make_counterexample("negation raised the energy", neg_margin, {{"u", &u}});
      }
    }
  }
  out.pool.pass = out.pool.violations == 0;
  out.negation.pass = out.negation.violations == 0;
  return out;
}

HomogeneityLocalityRecords check_homogeneity_and_locality(const Form& form,
                                                          const MeasureSpace& space,
                                                          int n_samples, double tol,
                                                          FieldSampler& sampler) {
  HomogeneityLocalityRecords out;
  out.homogeneity.property = "two_homogeneity";
  out.homogeneity.tolerance = tol;
  out.homogeneity.worst_margin = 0.0;
  out.negative_scaling.property = "two_homogeneity_negative_scalings";
  out.negative_scaling.tolerance = tol;
  out.negative_scaling.worst_margin = 0.0;
  out.negative_scaling.note =
      "fails exactly when negation symmetry fails; not part of the verdict";
  const Eigen::Index n = space.size();

  for (int k = 0; k < n_samples; ++k) {
    const Field u = sampler.mixed_field(n);
    const double e = form.evaluate(u);
    for (double nu : {-2.0, -1.0, 0.0, 0.5, 3.0}) {
      PropertyRecord& rec = nu < 0.0 ? out.negative_scaling : out.homogeneity;
      const double margin =
          std::abs(form.evaluate(nu * u) - nu * nu * e) / (1.0 + nu * nu * std::abs(e));
      ++rec.samples;
      if (margin > rec.worst_margin) rec.worst_margin = margin;
      if (margin > tol) {
        ++rec.violations;
        if (!rec.counterexample || margin > rec.counterexample->margin) {
          rec.counterexample = make_counterexample("scaling defect of the energy", margin,
                                                   {{"u", &u}}, {{"nu", nu}});
        }
      }
    }
  }
  out.homogeneity.pass = out.homogeneity.violations == 0;
  out.negative_scaling.pass = out.negative_scaling.violations == 0;

  // locality: split the points into components of the term-coupling graph
  out.locality.property = "locality";
  out.locality.tolerance = tol;
  out.locality.worst_margin = 0.0;
  const LocalityStructure structure = form.locality();
  std::vector<int> comp(static_cast<std::size_t>(n));
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&comp](int x) {
    while (comp[static_cast<std::size_t>(x)] != x) {
      comp[static_cast<std::size_t>(x)] = comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(x)])];
      x = comp[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& support : structure.term_supports) {
    for (std::size_t i = 1; i < support.size(); ++i) {
      comp[static_cast<std::size_t>(find(support[i]))] = find(support[0]);
    }
  }
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (find(i) == i) roots.push_back(i);
  }
  if (roots.size() < 2) {
    out.locality.applicable = false;
    out.locality.pass = true;
    out.locality.note = "space has no uncoupled disjoint supports";
    return out;
  }
  for (int k = 0; k < n_samples; ++k) {
    const int ra = find(roots[static_cast<std::size_t>(sampler.uniform_int(
        0, static_cast<int>(roots.size()) - 1))]);
    const double level = (k % 2 == 0) ? 0.0 : sampler.uniform(-2.0, 2.0);
    Field u = Field::zeros(n), v = Field::zeros(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (find(static_cast<int>(i)) == ra) {
        v[i] = sampler.uniform(-2.0, 2.0);
        u[i] = level;  // constant on the support closure of v
      } else {
        u[i] = sampler.uniform(-2.0, 2.0);
      }
    }
    const double margin =
        std::abs(form.evaluate(u + v) - form.evaluate(u) - form.evaluate(v));
    ++out.locality.samples;
    if (margin > out.locality.worst_margin) out.locality.worst_margin = margin;
    if (margin > tol) {
      ++out.locality.violations;
      if (!out.locality.counterexample || margin > out.locality.counterexample->margin) {
        out.locality.counterexample = make_counterexample(
            "energy not additive over uncoupled supports", margin, {{"u", &u}, {"v", &v}});
      }
    }
  }
  out.locality.pass = out.locality.violations == 0;
  if (!structure.is_local && !out.locality.pass) {
    out.locality.note = "form is declared non-local; violation expected";
  }
  return out;
}

PropertyRecord check_energy_norm(const Form& form, const MeasureSpace& space, int n_samples,
                                 double tol, FieldSampler& sampler) {
  PropertyRecord rec;
  rec.property = "energy_norm";
  rec.tolerance = tol;
  rec.worst_margin = -std::numeric_limits<double>::infinity();
  const Eigen::Index n = space.size();
  auto energy_norm = [&](const Field& f) {
    return std::sqrt(space.inner(f, f) + form.evaluate(f));
  };

  auto record = [&](double margin, const char* what, const Field& u, const Field& v) {
    ++rec.samples;
    if (margin > rec.worst_margin) rec.worst_margin = margin;
    if (margin > tol) {
      ++rec.violations;
      if (!rec.counterexample || margin > rec.counterexample->margin) {
        rec.counterexample = make_counterexample(what, margin, {{"u", &u}, {"v", &v}});
      }
    }
  };

  for (int k = 0; k < n_samples; ++k) {
    const Field u = sampler.mixed_field(n);
    const Field v = sampler.mixed_field(n);
    record(energy_norm(u + v) - energy_norm(u) - energy_norm(v), "triangle inequality failed", u,
           v);
    const double nu = sampler.uniform(-3.0, 3.0);
    record(std::abs(energy_norm(nu * u) - std::abs(nu) * energy_norm(u)) /
               (1.0 + std::abs(nu) * energy_norm(u)),
           "norm homogeneity failed", u, v);
    for (double L : {0.5, 2.0, 7.0}) {
      const PiecewiseLinear phi = sampler.random_lipschitz(L);
      const double margin = (form.evaluate(apply(phi, u)) - L * L * form.evaluate(u)) /
                            (1.0 + L * L * std::abs(form.evaluate(u)));
      record(margin, "Lipschitz action bound failed", u, v);
    }
    // product identity behind the bounded algebra property
    double prod_defect = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lhs = u[i] * v[i];
      const double sq = (u[i] + v[i]) * (u[i] + v[i]) - u[i] * u[i] - v[i] * v[i];
      prod_defect = std::max(prod_defect,
                             std::abs(lhs - 0.5 * sq) / (1.0 + std::abs(lhs)));
    }
    record(prod_defect, "polarization product identity failed", u, v);
    const double uv_energy = form.evaluate(Field(u.values().cwiseProduct(v.values())));
    record(std::isfinite(uv_energy) ? 0.0 : 1.0, "product left the domain", u, v);
  }
  rec.pass = rec.violations == 0;
  return rec;
}

PropertyReport full_audit(const Form& form, const MeasureSpace& space,
                          const AuditOptions& options) {
  FieldSampler sampler(options.seed);
  PropertyReport report;
  report.form_label = form.label();
  report.seed = options.seed;
  report.space_size = space.size();
  report.space_weights.assign(space.weights().data(),
                              space.weights().data() + space.size());

  const int scale = std::max(1, options.budget_scale);
  const double tol = options.closed_form_tol;
  const double ptol = options.prox_tol;
  const Eigen::Index n = space.size();

  report.records.push_back(check_minmax(form, space, 500 * scale, tol, sampler));
  auto [h_sym, h_lit] =
      check_h_alpha(form, space, 100 * scale, {0.1, 0.5, 1.0, 2.0}, tol, sampler);
  report.records.push_back(h_sym);
  report.records.push_back(h_lit);
  auto contraction = check_normal_contraction(form, space, 150 * scale, 25 * scale, tol, sampler);
  report.records.push_back(contraction.pool);
  report.records.push_back(contraction.negation);
  auto homloc = check_homogeneity_and_locality(form, space, 100 * scale, tol, sampler);
  report.records.push_back(homloc.homogeneity);
  report.records.push_back(homloc.negative_scaling);
  report.records.push_back(homloc.locality);
  report.records.push_back(check_energy_norm(form, space, 50 * scale, tol, sampler));

  // first-order calculus spot checks
  {
    PropertyRecord rec;
    rec.property = "slope_bound";
    rec.tolerance = 1e-7;
    rec.worst_margin = -std::numeric_limits<double>::infinity();
    rec.note = "upper side via E(v), lower side via E(-v)";
    for (int k = 0; k < 100 * scale; ++k) {
      const Field u = sampler.mixed_field(n);
      const Field v = sampler.mixed_field(n);
      const SlopeEnclosure enc = slope_enclosure(form, u, v, space, 1e-6);
      const double e_u = std::max(form.evaluate(u), 0.0);
      const double up = 2.0 * std::sqrt(e_u * std::max(form.evaluate(v), 0.0));
      const double down = 2.0 * std::sqrt(e_u * std::max(form.evaluate(-v), 0.0));
      const double margin = std::max(enc.slope_plus - up, -down - enc.slope_minus);
      ++rec.samples;
      if (margin > rec.worst_margin) rec.worst_margin = margin;
      if (margin > rec.tolerance) {
        ++rec.violations;
        if (!rec.counterexample || margin > rec.counterexample->margin) {
          rec.counterexample = make_counterexample("slope exceeded the seminorm bound", margin,
                                                   {{"u", &u}, {"v", &v}});
        }
      }
    }
    rec.pass = rec.violations == 0;
    report.records.push_back(rec);
  }
  {
    PropertyRecord rec;
    rec.property = "slope_diagonal_identity";
    rec.tolerance = 1e-7;
    rec.worst_margin = 0.0;
    for (int k = 0; k < 50 * scale; ++k) {
      const Field u = sampler.mixed_field(n);
      const SlopeEnclosure enc = slope_enclosure(form, u, u, space, 1e-7);
      const double e2 = 2.0 * form.evaluate(u);
      const double margin = std::max(std::abs(enc.slope_plus - e2), std::abs(enc.slope_minus - e2)) /
                            (1.0 + std::abs(e2));
      ++rec.samples;
      if (margin > rec.worst_margin) rec.worst_margin = margin;
      if (margin > rec.tolerance) {
        ++rec.violations;
        if (!rec.counterexample) {
          rec.counterexample =
              make_counterexample("slope along the field is not twice the energy", margin,
                                  {{"u", &u}});
        }
      }
    }
    rec.pass = rec.violations == 0;
    report.records.push_back(rec);
  }

  bool regular = true;
  {
    PropertyRecord rec;
    rec.property = "regularity";
    rec.tolerance = 1e-6;
    for (int k = 0; k < 3; ++k) {
      const Field u = sampler.mixed_field(n);
      const RegularityReport rr = regularity_probe(form, u, space, 1e-6, options.seed + k);
      ++rec.samples;
      if (rr.max_gap > rec.worst_margin) rec.worst_margin = rr.max_gap;
      if (!rr.regular) {
        ++rec.violations;
        regular = false;
        if (!rec.counterexample) {
          rec.counterexample = make_counterexample("one-sided slopes disagree", rr.max_gap,
                                                   {{"u", &u}});
        }
      }
    }
    // fields with exact kinks (sampled fields rarely hit them)
    for (const Field& u : adversarial_fields(n)) {
      const RegularityReport rr = regularity_probe(form, u, space, 1e-6, options.seed + 11);
      ++rec.samples;
      if (rr.max_gap > rec.worst_margin) rec.worst_margin = rr.max_gap;
      if (!rr.regular) {
        ++rec.violations;
        regular = false;
        if (!rec.counterexample) {
          rec.counterexample = make_counterexample("one-sided slopes disagree", rr.max_gap,
                                                   {{"u", &u}});
        }
      }
    }
    rec.pass = rec.violations == 0;
    rec.note = "classification, not part of the dirichlet verdict";
    report.records.push_back(rec);
  }

  QuadraticityReport quad;
  {
    std::vector<std::pair<Field, Field>> samples;
    for (int k = 0; k < 20; ++k) {
      samples.emplace_back(sampler.mixed_field(n), sampler.mixed_field(n));
    }
    const auto adv = adversarial_fields(n);
    for (std::size_t i = 0; i + 1 < adv.size(); ++i) samples.emplace_back(adv[i], adv[i + 1]);
    quad = quadraticity_test(form, samples, space, 1e-7);
    PropertyRecord rec;
    rec.property = "quadraticity";
    rec.tolerance = 1e-7;
    rec.samples = quad.samples;
    rec.worst_margin = std::max(quad.symmetry_defect, quad.parallelogram_defect);
    rec.pass = quad.quadratic;
    rec.violations = quad.quadratic ? 0 : 1;
    rec.note = quad.equivalence_consistent ? "slope and parallelogram routes agree"
                                           : "slope and parallelogram routes disagree";
    rec.applicable = true;
    report.records.push_back(rec);
    if (!quad.equivalence_consistent) {
      report.inconsistencies.push_back(
          {"bug", "regularity+symmetry and the parallelogram identity disagree"});
    }
  }

  // second-order spot checks through the prox engine
  {
    PropertyRecord rec;
    rec.property = "pairing_identity";
    rec.tolerance = 1e-4;
    rec.worst_margin = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Field u = sampler.mixed_field(n);
      const SubgradientResult sg = minimal_subgradient(form, u, space, options.solver);
      ++rec.samples;
      if (!sg.converged) {
        ++rec.violations;
        rec.note = sg.message;
        if (!rec.counterexample) {
          rec.counterexample = make_counterexample("extraction did not converge", 0.0, {{"u", &u}});
        }
        continue;
      }
      if (sg.cdc2_error > rec.worst_margin) rec.worst_margin = sg.cdc2_error;
      if (sg.cdc2_error > rec.tolerance) {
        ++rec.violations;
        if (!rec.counterexample || sg.cdc2_error > rec.counterexample->margin) {
          rec.counterexample =
              make_counterexample("pairing identity defect", sg.cdc2_error, {{"u", &u}});
        }
      }
    }
    rec.pass = rec.violations == 0;
    report.records.push_back(rec);
  }
  {
    PropertyRecord rec;
    rec.property = "envelope_identity";
    rec.tolerance = 1e-6;
    rec.worst_margin = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Field u = sampler.mixed_field(n);
      const double e = form.evaluate(u);
      for (double lam : {1e-1, 1e-2, 1e-3}) {
        const ProxResult pr = prox(form, u, lam, space, options.solver);
        ++rec.samples;
        if (!pr.converged) {
          ++rec.violations;
          rec.note = pr.message;
          continue;
        }
        const double lhs = pr.envelope_value;
        const double rhs = 0.5 * space.inner(pr.subgradient, u);
        const double margin = std::abs(lhs - rhs) / (1.0 + std::abs(e));
        if (margin > rec.worst_margin) rec.worst_margin = margin;
        if (margin > rec.tolerance) {
          ++rec.violations;
          if (!rec.counterexample || margin > rec.counterexample->margin) {
            rec.counterexample = make_counterexample("envelope identity defect", margin,
                                                     {{"u", &u}}, {{"lambda", lam}});
          }
        }
      }
    }
    rec.pass = rec.violations == 0;
    report.records.push_back(rec);
  }
  {
    PropertyRecord rec;
    rec.property = "subdifferential_sandwich";
    rec.tolerance = ptol;
    rec.worst_margin = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Field u = sampler.mixed_field(n);
      const Field v = sampler.mixed_field(n);
      const SandwichReport sr = sandwich_check(form, u, v, space, options.solver, ptol);
      ++rec.samples;
      const double overshoot = std::max(sr.enclosure.lower_bracket - sr.pairing,
                                        sr.pairing - sr.enclosure.upper_bracket);
      if (overshoot > rec.worst_margin) rec.worst_margin = overshoot;
      if (!sr.pass) {
        ++rec.violations;
        if (!rec.counterexample) {
          rec.counterexample = make_counterexample("subgradient pairing left the slope interval",
                                                   overshoot, {{"u", &u}, {"v", &v}});
        }
      }
    }
    rec.pass = rec.violations == 0;
    report.records.push_back(rec);
  }

  // flow probes
  {
    std::vector<ProbePair> pairs;
    const auto adv = adversarial_fields(n);
    pairs.push_back({adv[1], Field::zeros(n), true});  // spike above zero
    pairs.push_back({adv[0], -adv[0], false});
    for (int k = 0; k < options.markov_pairs; ++k) {
      if (k % 2 == 0) {
        auto [hi, lo] = sampler.ordered_pair(n);
        pairs.push_back({std::move(hi), std::move(lo), true});
      } else {
        pairs.push_back({sampler.mixed_field(n), sampler.mixed_field(n), false});
      }
    }
    report.markov = markov_probe(form, pairs, options.t_grid, options.p_grid, space,
                                 options.solver);
    report.markov_ran = true;
  }

  // verdict and cross-validation
  const PropertyRecord* minmax = report.find("min_max_inequality");
  const PropertyRecord* hsym = report.find("truncation_shift_inequality");
  const PropertyRecord* negation = report.find("negation_symmetry");
  const PropertyRecord* pool = report.find("normal_contraction");
  const PropertyRecord* locality = report.find("locality");

  const bool inequalities = minmax->pass && hsym->pass;
  const bool probes = report.markov.pass();
  report.verdict.dirichlet_consistent = inequalities && probes;
  report.verdict.quadratic = quad.quadratic;
  report.verdict.regular = regular;
  report.verdict.negation_symmetric = negation->pass;
  report.verdict.local = locality->applicable ? locality->pass : form.locality().is_local;

  if (inequalities && !probes) {
    report.inconsistencies.push_back(
        {"bug", "lattice inequalities hold on samples but a flow probe failed"});
  } else if (!inequalities && probes) {
    report.inconsistencies.push_back(
        {"bug",
         "a lattice inequality fails but no flow violation was located; the sampled probes "
         "may simply have missed it"});
  }
  if (negation->pass && !pool->pass && report.verdict.dirichlet_consistent) {
    report.inconsistencies.push_back(
        {"bug", "negation symmetry holds but a sampled 1-Lipschitz map raised the energy"});
  }

  std::string summary = report.verdict.dirichlet_consistent ? "dirichlet-consistent"
                                                            : "not-dirichlet";
  summary += report.verdict.quadratic ? ", quadratic" : ", non-quadratic";
  summary += report.verdict.regular ? ", regular" : ", irregular";
  summary += report.verdict.negation_symmetric ? ", symmetric" : ", non-symmetric";
  summary += report.verdict.local ? ", local" : ", non-local";
  report.verdict.summary = std::move(summary);
  return report;
}

}  // namespace ndf
