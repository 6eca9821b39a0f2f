#include "cscp/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cscp {

std::string method_name(Method m) {
  switch (m) {
    case Method::Crmi: return "crmi";
    case Method::Smi: return "smi";
    case Method::CrmiGreedy: return "crmi-greedy";
    case Method::SmiGreedy: return "smi-greedy";
    case Method::CrmiReconfig: return "crmi-reconfig";
  }
  throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
  if (name == "crmi") return Method::Crmi;
  if (name == "smi") return Method::Smi;
  if (name == "crmi-greedy") return Method::CrmiGreedy;
  if (name == "smi-greedy") return Method::SmiGreedy;
  if (name == "crmi-reconfig") return Method::CrmiReconfig;
  throw std::invalid_argument("unknown method: " + name);
}

void Scenario::validate() const {
  basis.validate(ws);
  if (!(epsilon > 0.0)) throw std::invalid_argument("scenario: epsilon must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("scenario: max_iterations must be >= 1");
  if (num_sensors < 1) throw std::invalid_argument("scenario: num_sensors must be >= 1");
  if (num_sensors > ws.num_points())
    throw std::invalid_argument("scenario: more sensors than grid points");
  if (start == goal) throw std::invalid_argument("scenario: start equals goal");
  if (dyn.dim() != basis.size()) throw std::invalid_argument("scenario: dynamics/basis mismatch");
  if (!(sigma_r2 > 0.0)) throw std::invalid_argument("scenario: sigma_r2 must be > 0");
  if (!(chi > 0.0)) throw std::invalid_argument("scenario: chi must be > 0");
}

std::vector<int> Scenario::effective_initial_config() const {
  if (!initial_config.empty()) return initial_config;
  std::vector<int> q0(num_sensors);
  std::iota(q0.begin(), q0.end(), 0);
  return q0;
}

double convergence_margin(const Eigen::MatrixXd& p_prev_updated,
                          const Eigen::MatrixXd& p_predicted, const Eigen::MatrixXd& gain,
                          const Eigen::MatrixXd& c, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& q) {
  const double reduction =
      c.rows() > 0 ? (gain * c * p_predicted).trace() : 0.0;
  const double growth =
      (a * p_prev_updated * a.transpose() - p_prev_updated + q).trace();
  return reduction - growth;
}

double reconfiguration_travel(const std::vector<int>& previous, const std::vector<int>& next,
                              const Workspace& ws) {
  if (previous.size() != next.size())
    throw std::invalid_argument("reconfiguration_travel: configuration sizes differ");
  const int n = static_cast<int>(previous.size());
  if (n > 9) throw std::invalid_argument("reconfiguration_travel: too many sensors");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      total += (ws.point(previous[i]) - ws.point(next[perm[i]])).norm();
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::pair<std::vector<double>, double> sensor_travel(const CscpTrace& trace) {
  std::vector<double> per_iteration;
  double cumulative = 0.0;
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    per_iteration.push_back(trace.records[i].travel);
    cumulative += trace.records[i].travel;
  }
  return {per_iteration, cumulative};
}

namespace {

// True cost of a planned path under the current true state, propagated
// forward noise-free over the path stages.
double true_path_cost(const std::vector<int>& path, const Eigen::VectorXd& theta_true,
                      const LinearDynamics& dyn, const BasisSet& basis, const Workspace& ws) {
  const int steps = static_cast<int>(path.size()) - 1;
  Eigen::VectorXd theta = theta_true;
  double sum = 0.0;
  for (int l = 1; l <= steps; ++l) {
    theta = (dyn.A * theta).eval();
    sum += basis_eval(ws.point(path[l]), basis).dot(theta);
  }
  return ws.delta() * (steps + sum);
}

}  // namespace

CscpTrace run(const Scenario& scenario, RngBundle& rngs) {
  scenario.validate();
  const Workspace& ws = scenario.ws;
  const BasisSet& basis = scenario.basis;
  const LinearDynamics& dyn = scenario.dyn;
  const GridGraph graph{ws, scenario.start, scenario.goal};
  const int cap = scenario.effective_horizon_cap();

  CscpTrace trace;
  ThreatTruth truth{draw_initial_theta(basis, ws, scenario.theta_min, scenario.theta_max,
                                       rngs.truth),
                    0};
  GaussianBelief belief;
  belief.mean = Eigen::VectorXd::Zero(basis.size());
  belief.cov = scenario.chi * Eigen::MatrixXd::Identity(basis.size(), basis.size());
  belief.time_index = 0;
  belief.phase = BeliefPhase::Updated;

  std::vector<int> config = scenario.effective_initial_config();

  // Record 0: the optimistic initial plan, before any measurement.
  {
    IterationRecord rec;
    rec.k = 0;
    rec.config = config;
    rec.theta_hat = belief.mean;
    rec.cov = belief.cov;
    rec.theta_true = truth.theta;
    rec.trace_p = belief.cov.trace();
    PathPlan plan = plan_min_expected_cost(graph, belief, dyn, basis, cap, scenario.c_floor);
    rec.path = plan.vertices;
    rec.j_hat = plan.j_hat;
    rec.var_j = plan.var_j;
    rec.risk = plan.risk;
    rec.true_j = true_path_cost(plan.vertices, truth.theta, dyn, basis, ws);
    rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.margin = std::numeric_limits<double>::quiet_NaN();
    trace.records.push_back(std::move(rec));
  }

  try {
    while (trace.records.back().var_j > scenario.epsilon &&
           static_cast<int>(trace.records.size()) <= scenario.max_iterations) {
      const auto t0 = std::chrono::steady_clock::now();
      IterationRecord rec;
      rec.k = static_cast<int>(trace.records.size());

      const GaussianBelief predicted = ukf_predict(belief, dyn, scenario.ukf);
      const std::vector<int>& context_path = trace.records.back().path;
      const PathHorizonStats context_stats =
          predict_horizon(predicted, dyn, static_cast<int>(context_path.size()) - 1);

      ObjectiveContext ctx;
      ctx.belief = &predicted;
      ctx.dyn = &dyn;
      ctx.basis = &basis;
      ctx.ws = &ws;
      ctx.path = &context_path;
      ctx.stats = &context_stats;
      ctx.previous_config = config;
      ctx.alpha1 = scenario.alpha1;
      ctx.alpha2 = scenario.alpha2;
      ctx.sigma_r2 = scenario.sigma_r2;
      const PlacementEvaluator evaluator(ctx);

      PlacementResult placed;
      const int ng = ws.num_points();
      switch (scenario.method) {
        case Method::Crmi:
          placed = optimize_exhaustive(
              [&](const std::vector<int>& q) { return evaluator.crmi(q); },
              scenario.num_sensors, ng, scenario.exhaustive_budget);
          break;
        case Method::Smi:
          placed = optimize_exhaustive(
              [&](const std::vector<int>& q) { return evaluator.smi(q); },
              scenario.num_sensors, ng, scenario.exhaustive_budget);
          break;
        case Method::CrmiGreedy:
          placed = optimize_greedy(
              [&](const std::vector<int>& q) { return evaluator.crmi(q); },
              scenario.num_sensors, ng);
          break;
        case Method::SmiGreedy:
          placed = optimize_greedy(
              [&](const std::vector<int>& q) { return evaluator.smi(q); },
              scenario.num_sensors, ng);
          break;
        case Method::CrmiReconfig:
          placed = optimize_exhaustive(
              [&](const std::vector<int>& q) {
                return evaluator.modified_crmi(q, ReconfigMode::PerCandidate);
              },
              scenario.num_sensors, ng, scenario.exhaustive_budget);
          break;
      }
      trace.objective_evaluations += placed.evaluations;

      std::vector<int> new_config = placed.config;
      std::sort(new_config.begin(), new_config.end());
      rec.travel = reconfiguration_travel(config, new_config, ws);
      trace.cumulative_travel += rec.travel;
      config = new_config;
      rec.config = config;
      rec.objective = placed.objective_value;

      truth = step_truth(truth, dyn, rngs.truth);
      const MeasurementModel model = measurement_matrix(config, basis, ws, scenario.sigma_r2);
      rec.z = simulate_measurement(truth, model, rngs.measurement);

      UkfUpdateInfo info;
      const GaussianBelief updated = ukf_update(predicted, rec.z, model, scenario.ukf, &info);
      rec.margin = convergence_margin(belief.cov, predicted.cov, info.gain, model.C, dyn.A,
                                      dyn.Q);
      belief = updated;

      PathPlan plan = plan_min_expected_cost(graph, belief, dyn, basis, cap, scenario.c_floor);
      rec.path = plan.vertices;
      rec.j_hat = plan.j_hat;
      rec.var_j = plan.var_j;
      rec.risk = plan.risk;
      rec.true_j = true_path_cost(plan.vertices, truth.theta, dyn, basis, ws);
      rec.theta_hat = belief.mean;
      rec.cov = belief.cov;
      rec.theta_true = truth.theta;
      rec.trace_p = belief.cov.trace();
      rec.millis = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
      trace.records.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    trace.status = RunStatus::Error;
    trace.error = "iteration " + std::to_string(trace.records.size()) + ": " + e.what();
    return trace;
  }

  trace.status = trace.records.back().var_j <= scenario.epsilon ? RunStatus::Converged
                                                                : RunStatus::MaxIterations;
  return trace;
}

}  // namespace cscp
