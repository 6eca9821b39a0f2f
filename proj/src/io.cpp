#include "cscp/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cscp {

namespace {

using nlohmann::json;

constexpr const char* kSchemaVersion = "1";

// Pulls a scalar from a section, leaving the default in place when absent,
// and tracks consumed keys so unknown ones can be rejected.
template <typename T>
void take(const json& section, std::set<std::string>& seen, const char* key, T& value) {
  seen.insert(key);
  if (section.contains(key)) value = section.at(key).get<T>();
}

void reject_unknown(const json& section, const std::set<std::string>& seen,
                    const std::string& name) {
  for (const auto& [key, _] : section.items())
    if (!seen.count(key))
      throw std::invalid_argument("scenario: unknown key '" + name + "." + key + "'");
}

json section_of(const json& root, std::set<std::string>& top_seen, const char* name) {
  top_seen.insert(name);
  return root.contains(name) ? root.at(name) : json::object();
}

}  // namespace

ScenarioSpec parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: parse error: ") + e.what());
  }
  ScenarioSpec s;
  std::set<std::string> top;
  top.insert("schema_version");
  if (!root.contains("schema_version"))
    throw std::invalid_argument("scenario: missing schema_version");
  if (root.at("schema_version").get<std::string>() != kSchemaVersion)
    throw std::invalid_argument("scenario: unsupported schema_version");

  {
    json sec = section_of(root, top, "workspace");
    std::set<std::string> seen;
    take(sec, seen, "half_extent", s.half_extent);
    take(sec, seen, "grid_side", s.grid_side);
    take(sec, seen, "start", s.start);
    take(sec, seen, "goal", s.goal);
    reject_unknown(sec, seen, "workspace");
  }
  {
    json sec = section_of(root, top, "basis");
    std::set<std::string> seen;
    take(sec, seen, "per_side", s.basis_per_side);
    take(sec, seen, "width", s.basis_width);
    take(sec, seen, "support_threshold", s.support_threshold);
    reject_unknown(sec, seen, "basis");
  }
  {
    json sec = section_of(root, top, "dynamics");
    std::set<std::string> seen;
    take(sec, seen, "kind", s.dynamics_kind);
    take(sec, seen, "alpha", s.alpha);
    take(sec, seen, "sigma_p", s.sigma_p);
    take(sec, seen, "dt", s.dt);
    take(sec, seen, "order", s.order);
    reject_unknown(sec, seen, "dynamics");
    if (s.dynamics_kind != "heat" && s.dynamics_kind != "static")
      throw std::invalid_argument("scenario: dynamics.kind must be 'heat' or 'static'");
  }
  {
    json sec = section_of(root, top, "sensing");
    std::set<std::string> seen;
    take(sec, seen, "num_sensors", s.num_sensors);
    take(sec, seen, "sigma_r2", s.sigma_r2);
    take(sec, seen, "initial_config", s.initial_config);
    reject_unknown(sec, seen, "sensing");
  }
  {
    json sec = section_of(root, top, "method");
    std::set<std::string> seen;
    take(sec, seen, "name", s.method);
    take(sec, seen, "alpha1", s.alpha1);
    take(sec, seen, "alpha2", s.alpha2);
    reject_unknown(sec, seen, "method");
    method_from_name(s.method);  // validates the name
  }
  {
    json sec = section_of(root, top, "termination");
    std::set<std::string> seen;
    take(sec, seen, "epsilon", s.epsilon);
    take(sec, seen, "max_iterations", s.max_iterations);
    reject_unknown(sec, seen, "termination");
  }
  {
    json sec = section_of(root, top, "estimator");
    std::set<std::string> seen;
    take(sec, seen, "chi", s.chi);
    take(sec, seen, "ukf_alpha", s.ukf_alpha);
    take(sec, seen, "ukf_beta", s.ukf_beta);
    take(sec, seen, "ukf_kappa", s.ukf_kappa);
    reject_unknown(sec, seen, "estimator");
  }
  {
    json sec = section_of(root, top, "planner");
    std::set<std::string> seen;
    take(sec, seen, "horizon_cap", s.horizon_cap);
    take(sec, seen, "c_floor", s.c_floor);
    reject_unknown(sec, seen, "planner");
  }
  {
    json sec = section_of(root, top, "truth");
    std::set<std::string> seen;
    take(sec, seen, "theta_min", s.theta_min);
    take(sec, seen, "theta_max", s.theta_max);
    reject_unknown(sec, seen, "truth");
  }
  {
    json sec = section_of(root, top, "output");
    std::set<std::string> seen;
    take(sec, seen, "emit_fields", s.emit_fields);
    reject_unknown(sec, seen, "output");
    if (s.emit_fields != "none" && s.emit_fields != "terminal" && s.emit_fields != "all")
      throw std::invalid_argument("scenario: output.emit_fields must be none|terminal|all");
  }
  reject_unknown(root, top, "<root>");
  build_scenario(s);  // surface constraint violations at load time
  return s;
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string emit_scenario(const ScenarioSpec& s) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["workspace"] = {{"half_extent", s.half_extent},
                       {"grid_side", s.grid_side},
                       {"start", s.start},
                       {"goal", s.goal}};
  root["basis"] = {{"per_side", s.basis_per_side},
                   {"width", s.basis_width},
                   {"support_threshold", s.support_threshold}};
  root["dynamics"] = {{"kind", s.dynamics_kind},
                      {"alpha", s.alpha},
                      {"sigma_p", s.sigma_p},
                      {"dt", s.dt},
                      {"order", s.order}};
  root["sensing"] = {{"num_sensors", s.num_sensors},
                     {"sigma_r2", s.sigma_r2},
                     {"initial_config", s.initial_config}};
  root["method"] = {{"name", s.method}, {"alpha1", s.alpha1}, {"alpha2", s.alpha2}};
  root["termination"] = {{"epsilon", s.epsilon}, {"max_iterations", s.max_iterations}};
  root["estimator"] = {{"chi", s.chi},
                       {"ukf_alpha", s.ukf_alpha},
                       {"ukf_beta", s.ukf_beta},
                       {"ukf_kappa", s.ukf_kappa}};
  root["planner"] = {{"horizon_cap", s.horizon_cap}, {"c_floor", s.c_floor}};
  root["truth"] = {{"theta_min", s.theta_min}, {"theta_max", s.theta_max}};
  root["output"] = {{"emit_fields", s.emit_fields}};
  return root.dump(2) + "\n";
}

Scenario build_scenario(const ScenarioSpec& spec) {
  Scenario sc;
  sc.ws = Workspace(spec.half_extent, spec.grid_side);
  sc.basis = BasisSet::uniform(spec.basis_per_side, sc.ws, spec.basis_width,
                               spec.support_threshold);
  const int np = sc.basis.size();
  const Eigen::MatrixXd qc =
      spec.sigma_p * spec.sigma_p * Eigen::MatrixXd::Identity(np, np);
  const Eigen::MatrixXd ac = spec.dynamics_kind == "heat"
                                 ? heat_diffusion_Ac(sc.basis, spec.alpha)
                                 : Eigen::MatrixXd::Zero(np, np);
  sc.dyn = discretize(ac, qc, spec.dt, spec.order);
  sc.start = spec.start;
  sc.goal = spec.goal >= 0 ? spec.goal : sc.ws.num_points() - 1;
  sc.num_sensors = spec.num_sensors;
  sc.sigma_r2 = spec.sigma_r2;
  sc.initial_config = spec.initial_config;
  sc.method = method_from_name(spec.method);
  sc.alpha1 = spec.alpha1 >= 0.0 ? spec.alpha1
                                 : 2.0 * std::sqrt(2.0) * spec.half_extent;
  sc.alpha2 = spec.alpha2;
  sc.epsilon = spec.epsilon;
  sc.max_iterations = spec.max_iterations;
  sc.chi = spec.chi;
  sc.ukf = UkfParams{spec.ukf_alpha, spec.ukf_beta, spec.ukf_kappa};
  sc.horizon_cap = spec.horizon_cap;
  sc.c_floor = spec.c_floor;
  sc.theta_min = spec.theta_min;
  sc.theta_max = spec.theta_max;
  sc.validate();
  return sc;
}

namespace {

std::string join(const std::vector<int>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
  return out.str();
}

std::string join(const Eigen::VectorXd& v) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
  return out.str();
}

}  // namespace

void write_trace_csv(const CscpTrace& trace, std::ostream& out) {
  out << "k,q,z,trace_p,j_hat,true_j,var_j,rho,objective,margin,travel,millis\n";
  out.precision(17);
  for (const auto& r : trace.records) {
    out << r.k << ',' << join(r.config) << ',' << join(r.z) << ',' << r.trace_p << ','
        << r.j_hat << ',' << r.true_j << ',' << r.var_j << ',' << r.risk << ','
        << r.objective << ',' << r.margin << ',' << r.travel << ',' << r.millis << '\n';
  }
}

FieldKind field_kind_from_name(const std::string& name) {
  if (name == "true") return FieldKind::True;
  if (name == "estimated") return FieldKind::Estimated;
  if (name == "error") return FieldKind::Error;
  if (name == "objective-map") return FieldKind::ObjectiveMap;
  throw std::invalid_argument("unknown field kind: " + name);
}

std::string field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::True: return "true";
    case FieldKind::Estimated: return "estimated";
    case FieldKind::Error: return "error";
    case FieldKind::ObjectiveMap: return "objective-map";
  }
  throw std::logic_error("field_kind_name: unknown kind");
}

std::string field_dump_filename(const std::string& run_id, int k, FieldKind kind) {
  return run_id + "_k" + std::to_string(k) + "_" + field_kind_name(kind) + ".csv";
}

void emit_field_dump(const CscpTrace& trace, int k, FieldKind kind, const Scenario& scenario,
                     std::ostream& out) {
  if (k < 0 || k >= static_cast<int>(trace.records.size()))
    throw std::out_of_range("emit_field_dump: iteration not in trace");
  const IterationRecord& rec = trace.records[k];
  const Workspace& ws = scenario.ws;
  const int ng = ws.num_points();

  Eigen::VectorXd values(ng);
  if (kind == FieldKind::ObjectiveMap) {
    GaussianBelief belief{rec.theta_hat, rec.cov, rec.k, BeliefPhase::Updated};
    const GaussianBelief predicted = ukf_predict(belief, scenario.dyn, scenario.ukf);
    const PathHorizonStats stats =
        predict_horizon(predicted, scenario.dyn, static_cast<int>(rec.path.size()) - 1);
    ObjectiveContext ctx;
    ctx.belief = &predicted;
    ctx.dyn = &scenario.dyn;
    ctx.basis = &scenario.basis;
    ctx.ws = &ws;
    ctx.path = &rec.path;
    ctx.stats = &stats;
    ctx.previous_config = rec.config;
    ctx.alpha1 = scenario.alpha1;
    ctx.alpha2 = scenario.alpha2;
    ctx.sigma_r2 = scenario.sigma_r2;
    const PlacementEvaluator evaluator(ctx);
    const bool use_smi =
        scenario.method == Method::Smi || scenario.method == Method::SmiGreedy;
    for (int i = 0; i < ng; ++i)
      values[i] = use_smi ? evaluator.smi({i}) : evaluator.crmi({i});
  } else {
    for (int i = 0; i < ng; ++i) {
      const double truth = field_value(ws.point(i), rec.theta_true, scenario.basis);
      const double estimated = field_value(ws.point(i), rec.theta_hat, scenario.basis);
      switch (kind) {
        case FieldKind::True: values[i] = truth; break;
        case FieldKind::Estimated: values[i] = estimated; break;
        case FieldKind::Error: values[i] = std::abs(truth - estimated); break;
        default: break;
      }
    }
  }

  out.precision(17);
  for (int row = 0; row < ws.grid_side; ++row) {
    for (int col = 0; col < ws.grid_side; ++col)
      out << (col ? "," : "") << values[row * ws.grid_side + col];
    out << '\n';
  }
}

}  // namespace cscp
