#include "ndf/config.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ndf {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail(path + "." + key, "unknown key");
  }
}

const json* get(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number");
}

double require_number(const json& obj, const std::string& path, const char* key) {
  const json* j = get(obj, key);
  if (!j) fail(path + "." + key, "missing");
  return as_number(*j, path + "." + key);
}

std::vector<double> as_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

int as_int(const json& j, const std::string& path) {
  const double x = as_number(j, path);
  if (x != std::floor(x)) fail(path, "expected an integer");
  return static_cast<int>(x);
}

json number_out(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? json("inf") : json("-inf");
}

json numbers_out(const std::vector<double>& xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(number_out(x));
  return arr;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  check_keys(root, "config",
             {"space", "form", "seed", "expect", "tolerances", "solver", "audit", "flow",
              "slopes"});

  ExperimentConfig cfg;

  const json* space = get(root, "space");
  if (!space || !space->is_object()) fail("config.space", "required object");
  check_keys(*space, "space", {"size", "weights"});
  const json* weights = get(*space, "weights");
  if (weights) {
    cfg.weights = as_numbers(*weights, "space.weights");
  }
  if (const json* size = get(*space, "size")) {
    const int n = as_int(*size, "space.size");
    if (n < 1) fail("space.size", "must be at least 1");
    if (cfg.weights.empty()) {
      cfg.weights.assign(static_cast<std::size_t>(n), 1.0);
    } else if (static_cast<int>(cfg.weights.size()) != n) {
      fail("space.weights", "length does not match space.size");
    }
  }
  if (cfg.weights.empty()) fail("space", "needs size or weights");
  for (std::size_t i = 0; i < cfg.weights.size(); ++i) {
    if (!(cfg.weights[i] > 0.0)) {
      fail("space.weights[" + std::to_string(i) + "]", "must be strictly positive");
    }
  }
  const auto n_points = static_cast<int>(cfg.weights.size());

  const json* form = get(root, "form");
  if (!form || !form->is_object()) fail("config.form", "required object");
  const json* family = get(*form, "family");
  if (!family || !family->is_string()) fail("form.family", "required string");
  cfg.family = family->get<std::string>();

  auto parse_edges = [&](std::size_t arity) {
    const json* edges = get(*form, "edges");
    if (!edges || !edges->is_array()) fail("form.edges", "required array");
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const std::string path = "form.edges[" + std::to_string(i) + "]";
      const auto vals = as_numbers((*edges)[i], path);
      if (vals.size() != arity) {
        fail(path, "expected " + std::to_string(arity) + " entries");
      }
      std::array<double, 4> e{0, 0, 0, 0};
      for (std::size_t k = 0; k < vals.size(); ++k) e[k] = vals[k];
      for (int k = 0; k < 2; ++k) {
        if (e[static_cast<std::size_t>(k)] != std::floor(e[static_cast<std::size_t>(k)]) ||
            e[static_cast<std::size_t>(k)] < 0 || e[static_cast<std::size_t>(k)] >= n_points) {
          fail(path, "endpoint out of range");
        }
      }
      cfg.edges.push_back(e);
    }
  };

  if (cfg.family == "quadratic_graph") {
    check_keys(*form, "form", {"family", "edges"});
    parse_edges(3);
  } else if (cfg.family == "anisotropic_graph") {
    check_keys(*form, "form", {"family", "edges"});
    parse_edges(4);
  } else if (cfg.family == "power_sum_squared") {
    check_keys(*form, "form", {"family", "edges", "exponent"});
    parse_edges(3);
    cfg.exponent = require_number(*form, "form", "exponent");
    if (!(cfg.exponent >= 1.0 && cfg.exponent <= 2.0)) {
      fail("form.exponent", "must lie in [1, 2]");
    }
  } else if (cfg.family == "quadratic_matrix") {
    check_keys(*form, "form", {"family", "matrix"});
    const json* matrix = get(*form, "matrix");
    if (!matrix || !matrix->is_array()) fail("form.matrix", "required array of rows");
    for (std::size_t i = 0; i < matrix->size(); ++i) {
      cfg.matrix.push_back(as_numbers((*matrix)[i], "form.matrix[" + std::to_string(i) + "]"));
      if (cfg.matrix.back().size() != static_cast<std::size_t>(n_points)) {
        fail("form.matrix[" + std::to_string(i) + "]", "row length must match the space size");
      }
    }
    if (static_cast<int>(cfg.matrix.size()) != n_points) {
      fail("form.matrix", "must be square and match the space size");
    }
  } else {
    fail("form.family", "unknown family '" + cfg.family + "'");
  }

  if (const json* seed = get(root, "seed")) {
    const int s = as_int(*seed, "config.seed");
    if (s < 0) fail("config.seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  if (const json* expect = get(root, "expect")) {
    if (!expect->is_string()) fail("config.expect", "expected a string");
    cfg.expect = expect->get<std::string>();
  }
  if (const json* tolerances = get(root, "tolerances")) {
    check_keys(*tolerances, "tolerances", {"closed_form", "prox"});
    if (get(*tolerances, "closed_form")) {
      cfg.closed_form_tol = require_number(*tolerances, "tolerances", "closed_form");
    }
    if (get(*tolerances, "prox")) {
      cfg.prox_tol = require_number(*tolerances, "tolerances", "prox");
    }
  }
  if (const json* solver = get(root, "solver")) {
    check_keys(*solver, "solver", {"tolerance", "max_iterations"});
    if (get(*solver, "tolerance")) {
      cfg.solver.tolerance = require_number(*solver, "solver", "tolerance");
    }
    if (get(*solver, "max_iterations")) {
      cfg.solver.max_iterations = as_int(*get(*solver, "max_iterations"), "solver.max_iterations");
    }
    try {
      cfg.solver.validate();
    } catch (const std::exception& e) {
      fail("solver", e.what());
    }
  }
  if (const json* audit = get(root, "audit")) {
    check_keys(*audit, "audit", {"budget_scale", "markov_pairs", "t_grid", "p_grid"});
    if (get(*audit, "budget_scale")) {
      cfg.audit.budget_scale = as_int(*get(*audit, "budget_scale"), "audit.budget_scale");
      if (cfg.audit.budget_scale < 1) fail("audit.budget_scale", "must be >= 1");
    }
    if (get(*audit, "markov_pairs")) {
      cfg.audit.markov_pairs = as_int(*get(*audit, "markov_pairs"), "audit.markov_pairs");
      if (cfg.audit.markov_pairs < 1) fail("audit.markov_pairs", "must be >= 1");
    }
    if (get(*audit, "t_grid")) cfg.audit.t_grid = as_numbers(*get(*audit, "t_grid"), "audit.t_grid");
    if (get(*audit, "p_grid")) cfg.audit.p_grid = as_numbers(*get(*audit, "p_grid"), "audit.p_grid");
    for (double p : cfg.audit.p_grid) {
      if (!(p >= 1.0)) fail("audit.p_grid", "entries must lie in [1, inf]");
    }
  }
  if (const json* flow = get(root, "flow")) {
    check_keys(*flow, "flow", {"initial", "t_final", "steps"});
    FlowParams fp;
    const json* initial = get(*flow, "initial");
    if (!initial) fail("flow.initial", "missing");
    fp.initial = as_numbers(*initial, "flow.initial");
    if (static_cast<int>(fp.initial.size()) != n_points) {
      fail("flow.initial", "length must match the space size");
    }
    fp.t_final = require_number(*flow, "flow", "t_final");
    if (!(fp.t_final >= 0.0)) fail("flow.t_final", "must be nonnegative");
    fp.steps = as_int(*get(*flow, "steps"), "flow.steps");
    if (fp.steps < 1) fail("flow.steps", "must be >= 1");
    cfg.flow = std::move(fp);
  }
  if (const json* slopes = get(root, "slopes")) {
    check_keys(*slopes, "slopes", {"u", "v", "tol", "quadraticity_samples", "extra_directions"});
    SlopesParams sp;
    const json* u = get(*slopes, "u");
    const json* v = get(*slopes, "v");
    if (!u || !v) fail("slopes", "needs fields u and v");
    sp.u = as_numbers(*u, "slopes.u");
    sp.v = as_numbers(*v, "slopes.v");
    if (static_cast<int>(sp.u.size()) != n_points || static_cast<int>(sp.v.size()) != n_points) {
      fail("slopes", "field lengths must match the space size");
    }
    if (get(*slopes, "tol")) sp.tol = require_number(*slopes, "slopes", "tol");
    if (!(sp.tol > 0.0)) fail("slopes.tol", "must be positive");
    if (get(*slopes, "quadraticity_samples")) {
      sp.quadraticity_samples =
          as_int(*get(*slopes, "quadraticity_samples"), "slopes.quadraticity_samples");
    }
    if (get(*slopes, "extra_directions")) {
      sp.extra_directions = as_int(*get(*slopes, "extra_directions"), "slopes.extra_directions");
    }
    cfg.slopes = std::move(sp);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ExperimentConfig::dump() const {
  json root;
  root["space"] = {{"size", weights.size()}, {"weights", numbers_out(weights)}};
  json form;
  form["family"] = family;
  if (family == "quadratic_matrix") {
    json rows = json::array();
    for (const auto& row : matrix) rows.push_back(numbers_out(row));
    form["matrix"] = rows;
  } else {
    json es = json::array();
    for (const auto& e : edges) {
      json entry = json::array();
      entry.push_back(static_cast<int>(e[0]));
      entry.push_back(static_cast<int>(e[1]));
      entry.push_back(e[2]);
      if (family == "anisotropic_graph") entry.push_back(e[3]);
      es.push_back(entry);
    }
    form["edges"] = es;
    if (family == "power_sum_squared") form["exponent"] = exponent;
  }
  root["form"] = form;
  root["seed"] = seed;
  if (!expect.empty()) root["expect"] = expect;
  root["tolerances"] = {{"closed_form", closed_form_tol}, {"prox", prox_tol}};
  root["solver"] = {{"tolerance", solver.tolerance}, {"max_iterations", solver.max_iterations}};
  root["audit"] = {{"budget_scale", audit.budget_scale},
                   {"markov_pairs", audit.markov_pairs},
                   {"t_grid", numbers_out(audit.t_grid)},
                   {"p_grid", numbers_out(audit.p_grid)}};
  if (flow) {
    root["flow"] = {{"initial", numbers_out(flow->initial)},
                    {"t_final", flow->t_final},
                    {"steps", flow->steps}};
  }
  if (slopes) {
    root["slopes"] = {{"u", numbers_out(slopes->u)},
                      {"v", numbers_out(slopes->v)},
                      {"tol", slopes->tol},
                      {"quadraticity_samples", slopes->quadraticity_samples},
                      {"extra_directions", slopes->extra_directions}};
  }
  return root.dump(2) + "\n";
}

MeasureSpace ExperimentConfig::make_space() const { return MeasureSpace(weights); }

Form ExperimentConfig::make_form() const {
  const auto n = static_cast<Eigen::Index>(weights.size());
  if (family == "quadratic_graph") {
    QuadraticGraphSpec spec;
    for (const auto& e : edges) {
      spec.edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), e[2]});
    }
    return Form(n, std::move(spec));
  }
  if (family == "anisotropic_graph") {
    AnisotropicGraphSpec spec;
    for (const auto& e : edges) {
      spec.edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), e[2], e[3]});
    }
    return Form(n, std::move(spec));
  }
  if (family == "power_sum_squared") {
    PowerSumSpec spec;
    spec.exponent = exponent;
    for (const auto& e : edges) {
      spec.edges.push_back({static_cast<int>(e[0]), static_cast<int>(e[1]), e[2]});
    }
    return Form(n, std::move(spec));
  }
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      q(i, j) = matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return Form(n, QuadraticMatrixSpec{std::move(q)});
}

bool expectation_matches(const std::string& expect, bool dirichlet, bool quadratic, bool regular,
                         bool symmetric, bool local) {
  std::stringstream ss(expect);
  std::string token;
  bool all = true;
  while (std::getline(ss, token, ',')) {
    const auto begin = token.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = token.find_last_not_of(" \t");
    token = token.substr(begin, end - begin + 1);
    if (token == "dirichlet" || token == "dirichlet-consistent") {
      all = all && dirichlet;
    } else if (token == "not-dirichlet") {
      all = all && !dirichlet;
    } else if (token == "quadratic") {
      all = all && quadratic;
    } else if (token == "non-quadratic") {
      all = all && !quadratic;
    } else if (token == "regular") {
      all = all && regular;
    } else if (token == "irregular") {
      all = all && !regular;
    } else if (token == "symmetric") {
      all = all && symmetric;
    } else if (token == "non-symmetric") {
      all = all && !symmetric;
    } else if (token == "local") {
      all = all && local;
    } else if (token == "non-local") {
      all = all && !local;
    } else {
      throw ConfigError("config.expect: unknown token '" + token + "'");
    }
  }
  return all;
}

}  // namespace ndf
