#include "ndf/report.hpp"

#include "json.hpp"

#include <cmath>
#include <sstream>

namespace ndf {

namespace {

using ordered_json = nlohmann::ordered_json;

// JSON has no infinities; keep the grid values readable instead of null
ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

ordered_json numbers(const std::vector<double>& xs) {
  ordered_json arr = ordered_json::array();
  for (double x : xs) arr.push_back(number(x));
  return arr;
}

ordered_json field_values(const Field& f) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < f.size(); ++i) arr.push_back(number(f[i]));
  return arr;
}

ordered_json counterexample_json(const Counterexample& ce) {
  ordered_json j;
  j["description"] = ce.description;
  j["margin"] = number(ce.margin);
  ordered_json fields;
  for (const auto& [name, values] : ce.fields) fields[name] = numbers(values);
  j["fields"] = fields;
  ordered_json scalars;
  for (const auto& [name, value] : ce.scalars) scalars[name] = number(value);
  j["scalars"] = scalars;
  return j;
}

ordered_json record_json(const PropertyRecord& r) {
  ordered_json j;
  j["property"] = r.property;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["worst_margin"] = number(r.worst_margin);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  j["applicable"] = r.applicable;
  if (!r.note.empty()) j["note"] = r.note;
  j["counterexample"] = r.counterexample ? counterexample_json(*r.counterexample)
                                         : ordered_json(nullptr);
  return j;
}

ordered_json markov_json(const MarkovProbeRecord& m) {
  ordered_json j;
  j["pairs"] = m.pairs;
  j["checks"] = m.checks;
  j["t_grid"] = numbers(m.t_grid);
  j["p_grid"] = numbers(m.p_grid);
  j["steps_per_time"] = m.steps_per_time;
  j["worst_contraction_margin"] = number(m.worst_contraction_margin);
  j["worst_order_margin"] = number(m.worst_order_margin);
  j["tolerance"] = number(m.tolerance);
  j["solver_trouble"] = m.solver_trouble;
  j["pass"] = m.pass();
  ordered_json viols = ordered_json::array();
  for (const auto& v : m.violations) {
    ordered_json jv;
    jv["kind"] = v.kind;
    jv["t"] = number(v.t);
    if (v.kind == "lp_contraction") jv["p"] = number(v.p);
    jv["margin"] = number(v.margin);
    jv["u"] = field_values(v.u);
    jv["v"] = field_values(v.v);
    viols.push_back(jv);
  }
  j["violations"] = viols;
  return j;
}

}  // namespace

const PropertyRecord* PropertyReport::find(const std::string& property) const {
  for (const auto& r : records) {
    if (r.property == property) return &r;
  }
  return nullptr;
}

std::string report_to_json(const PropertyReport& report) {
  ordered_json j;
  j["schema"] = "dirichlet-lab/report/v1";
  j["evidence"] = "sampled evidence, not a proof";
  j["form"] = report.form_label;
  j["seed"] = report.seed;
  j["space"] = {{"size", report.space_size}, {"weights", numbers(report.space_weights)}};
  ordered_json recs = ordered_json::array();
  for (const auto& r : report.records) recs.push_back(record_json(r));
  j["records"] = recs;
  j["markov"] = report.markov_ran ? markov_json(report.markov) : ordered_json(nullptr);
  j["verdict"] = {
      {"dirichlet_consistent", report.verdict.dirichlet_consistent},
      {"quadratic", report.verdict.quadratic},
      {"regular", report.verdict.regular},
      {"negation_symmetric", report.verdict.negation_symmetric},
      {"local", report.verdict.local},
      {"summary", report.verdict.summary},
  };
  ordered_json inc = ordered_json::array();
  for (const auto& i : report.inconsistencies) {
    inc.push_back({{"severity", i.severity}, {"message", i.message}});
  }
  j["inconsistencies"] = inc;
  return j.dump(2) + "\n";
}

std::string report_to_text(const PropertyReport& report) {
  std::ostringstream os;
  os << "audit of " << report.form_label << " (seed " << report.seed << ")\n";
  os << "sampled evidence, not a proof\n\n";
  for (const auto& r : report.records) {
    os << (r.pass ? "  pass  " : r.applicable ? "  FAIL  " : "  n/a   ") << r.property << "  ("
       << r.samples << " samples, " << r.violations << " violations, worst margin "
       << r.worst_margin << ")";
    if (!r.note.empty()) os << "  [" << r.note << "]";
    os << "\n";
  }
  if (report.markov_ran) {
    os << (report.markov.pass() ? "  pass  " : "  FAIL  ") << "markov_probe  ("
       << report.markov.pairs << " pairs, " << report.markov.violations.size()
       << " violations)\n";
  }
  os << "\nverdict: " << report.verdict.summary << "\n";
  for (const auto& i : report.inconsistencies) {
    os << "inconsistency [" << i.severity << "]: " << i.message << "\n";
  }
  return os.str();
}

std::string trajectory_to_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "time,point,value\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (Eigen::Index i = 0; i < traj.states[k].size(); ++i) {
      os << traj.times[k] << ',' << i << ',' << traj.states[k][i] << "\n";
    }
  }
  return os.str();
}

std::string trajectory_to_json(const Trajectory& traj) {
  ordered_json j;
  j["schema"] = "dirichlet-lab/trajectory/v1";
  j["step_size"] = number(traj.step_size);
  j["complete"] = traj.complete;
  if (!traj.failure.empty()) j["failure"] = traj.failure;
  j["times"] = numbers(traj.times);
  ordered_json states = ordered_json::array();
  for (const auto& s : traj.states) states.push_back(field_values(s));
  j["states"] = states;
  j["energies"] = numbers(traj.energies);
  j["max_prox_residual"] = number(traj.max_prox_residual);
  return j.dump(2) + "\n";
}

std::string enclosure_to_json(const SlopeEnclosure& enc) {
  ordered_json j;
  j["lower_bracket"] = number(enc.lower_bracket);
  j["upper_bracket"] = number(enc.upper_bracket);
  j["slope_minus"] = number(enc.slope_minus);
  j["slope_plus"] = number(enc.slope_plus);
  j["sigma_star"] = number(enc.sigma_star);
  j["certified"] = enc.certified;
  j["oracle_used"] = enc.oracle_used;
  j["noise_estimate"] = number(enc.noise_estimate);
  j["flag"] = enc.flag;
  return j.dump(2) + "\n";
}

}  // namespace ndf
