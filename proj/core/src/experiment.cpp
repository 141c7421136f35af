#include "ndf/experiment.hpp"

#include "ndf/calculus.hpp"
#include "ndf/checker.hpp"
#include "ndf/report.hpp"
#include "ndf/sampler.hpp"
#include "ndf/semigroup.hpp"

#include "json.hpp"

#include <fstream>
#include <ostream>

namespace ndf {

namespace {

using json = nlohmann::ordered_json;

std::filesystem::path write_file(const std::filesystem::path& dir, const char* name,
                                 const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json enclosure_json(const SlopeEnclosure& enc) {
  return json::parse(enclosure_to_json(enc));
}

}  // namespace

RunOutcome run_audit(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     std::ostream& log) {
  RunOutcome outcome;
  const MeasureSpace space = cfg.make_space();
  const Form form = cfg.make_form();

  AuditOptions options;
  options.seed = cfg.seed;
  options.budget_scale = cfg.audit.budget_scale;
  options.closed_form_tol = cfg.closed_form_tol;
  options.prox_tol = cfg.prox_tol;
  options.solver = cfg.solver;
  options.t_grid = cfg.audit.t_grid;
  options.p_grid = cfg.audit.p_grid;
  options.markov_pairs = cfg.audit.markov_pairs;

  const PropertyReport report = full_audit(form, space, options);
  outcome.files.push_back(write_file(out_dir, "report.json", report_to_json(report)));
  outcome.files.push_back(write_file(out_dir, "report.txt", report_to_text(report)));
  log << report_to_text(report);

  if (!cfg.expect.empty()) {
    const bool matched = expectation_matches(
        cfg.expect, report.verdict.dirichlet_consistent, report.verdict.quadratic,
        report.verdict.regular, report.verdict.negation_symmetric, report.verdict.local);
    if (!matched) {
      outcome.exit_code = kExitExpectationMismatch;
      outcome.message = "verdict '" + report.verdict.summary + "' does not match expectation '" +
                        cfg.expect + "'";
      return outcome;
    }
  }
  outcome.message = report.verdict.summary;
  return outcome;
}

RunOutcome run_flow(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                    std::ostream& log) {
  RunOutcome outcome;
  if (!cfg.flow) throw ConfigError("flow: config section missing");
  const MeasureSpace space = cfg.make_space();
  const Form form = cfg.make_form();
  const Field u0{Eigen::Map<const Eigen::VectorXd>(
      cfg.flow->initial.data(), static_cast<Eigen::Index>(cfg.flow->initial.size()))};

  const Trajectory traj = flow(form, u0, cfg.flow->t_final, cfg.flow->steps, space, cfg.solver);
  outcome.files.push_back(write_file(out_dir, "trajectory.csv", trajectory_to_csv(traj)));
  outcome.files.push_back(write_file(out_dir, "trajectory.json", trajectory_to_json(traj)));

  const std::size_t stride = std::max<std::size_t>(1, (traj.times.size() - 1) / 16);
  log.precision(12);
  for (std::size_t k = 0; k < traj.times.size(); k += stride) {
    log << "t=" << traj.times[k] << "  energy=" << traj.energies[k] << "\n";
  }
  if (stride > 1 && (traj.times.size() - 1) % stride != 0) {
    log << "t=" << traj.times.back() << "  energy=" << traj.energies.back() << "\n";
  }

  if (!traj.complete) {
    outcome.exit_code = kExitSolverFailure;
    outcome.message = traj.failure;
  }
  return outcome;
}

RunOutcome run_slopes(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log) {
  RunOutcome outcome;
  if (!cfg.slopes) throw ConfigError("slopes: config section missing");
  const MeasureSpace space = cfg.make_space();
  const Form form = cfg.make_form();
  const auto& sp = *cfg.slopes;
  const Field u{Eigen::Map<const Eigen::VectorXd>(sp.u.data(),
                                                  static_cast<Eigen::Index>(sp.u.size()))};
  const Field v{Eigen::Map<const Eigen::VectorXd>(sp.v.data(),
                                                  static_cast<Eigen::Index>(sp.v.size()))};

  const SlopeEnclosure enc = slope_enclosure(form, u, v, space, sp.tol);
  const SlopeEnclosure refl = slope_enclosure(form, u, -v, space, sp.tol);
  const double reflection_defect = std::abs(refl.slope_plus + enc.slope_minus);

  FieldSampler sampler(cfg.seed);
  const auto directions = sampler.probe_directions(space.size(), sp.extra_directions);
  const RegularityReport reg = regularity_probe(form, u, directions, space, sp.tol);

  std::vector<std::pair<Field, Field>> samples;
  samples.emplace_back(u, v);
  for (int k = 1; k < sp.quadraticity_samples; ++k) {
    samples.emplace_back(sampler.mixed_field(space.size()), sampler.mixed_field(space.size()));
  }
  const QuadraticityReport quad = quadraticity_test(form, samples, space, sp.tol);

  json j;
  j["schema"] = "dirichlet-lab/enclosures/v1";
  j["form"] = form.label();
  j["pair"] = {{"u", sp.u}, {"v", sp.v}};
  j["enclosure"] = enclosure_json(enc);
  j["reflection"] = {{"defect", number(reflection_defect)},
                     {"bracket_width", number(enc.width() + refl.width())},
                     {"pass", reflection_defect <= enc.width() + refl.width() + sp.tol}};
  j["regularity"] = {{"regular", reg.regular},
                     {"all_certified", reg.all_certified},
                     {"max_gap", number(reg.max_gap)},
                     {"worst_direction", reg.worst_direction}};
  j["quadraticity"] = {{"samples", quad.samples},
                       {"regular_on_samples", quad.regular_on_samples},
                       {"symmetry_defect", number(quad.symmetry_defect)},
                       {"parallelogram_defect", number(quad.parallelogram_defect)},
                       {"quadratic", quad.quadratic},
                       {"equivalence_consistent", quad.equivalence_consistent}};
  outcome.files.push_back(write_file(out_dir, "enclosures.json", j.dump(2) + "\n"));

  log << "slopes in [" << enc.slope_minus << ", " << enc.slope_plus << "], bracket ["
      << enc.lower_bracket << ", " << enc.upper_bracket << "]"
      << (enc.certified ? " (certified)" : " (" + enc.flag + ")") << "\n";
  log << "regular: " << (reg.regular ? "yes" : "no")
      << ", quadratic: " << (quad.quadratic ? "yes" : "no") << "\n";
  return outcome;
}

}  // namespace ndf
