#include "cscp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace cscp {

std::vector<int> GridGraph::neighbors(int v) const {
  const int side = ws.grid_side;
  const int row = v / side;
  const int col = v % side;
  std::vector<int> out;
  out.reserve(4);
  if (row + 1 < side) out.push_back(v + side);
  if (row > 0) out.push_back(v - side);
  if (col > 0) out.push_back(v - 1);
  if (col + 1 < side) out.push_back(v + 1);
  return out;
}

Eigen::MatrixXd PathHorizonStats::cross(int l, int m) const {
  if (l > m) throw std::invalid_argument("cross: requires l <= m");
  return covs[l] * a_pow[m - l].transpose();
}

Eigen::MatrixXd PathHorizonStats::cross_base(int l) const { return a_pow[l] * covs[0]; }

PathHorizonStats predict_horizon(const GaussianBelief& belief, const LinearDynamics& dyn,
                                 int steps) {
  if (steps < 1) throw std::invalid_argument("predict_horizon: steps must be >= 1");
  PathHorizonStats stats;
  stats.means.reserve(steps + 1);
  stats.covs.reserve(steps + 1);
  stats.a_pow.reserve(steps + 1);
  stats.means.push_back(belief.mean);
  stats.covs.push_back(belief.cov);
  stats.a_pow.push_back(Eigen::MatrixXd::Identity(dyn.dim(), dyn.dim()));
  for (int l = 1; l <= steps; ++l) {
    stats.means.push_back(dyn.A * stats.means.back());
    Eigen::MatrixXd p = dyn.A * stats.covs.back() * dyn.A.transpose() + dyn.Q;
    stats.covs.push_back(0.5 * (p + p.transpose()));
    stats.a_pow.push_back(dyn.A * stats.a_pow.back());
  }
  return stats;
}

double path_cost_mean(const std::vector<int>& vertices, const PathHorizonStats& stats,
                      const BasisSet& basis, const Workspace& ws) {
  const int steps = static_cast<int>(vertices.size()) - 1;
  if (stats.horizon() < steps) throw std::invalid_argument("path_cost_mean: horizon too short");
  double sum = 0.0;
  for (int l = 1; l <= steps; ++l)
    sum += basis_eval(ws.point(vertices[l]), basis).dot(stats.means[l]);
  return ws.delta() * (steps + sum);
}

double path_cost_variance(const std::vector<int>& vertices, const PathHorizonStats& stats,
                          const BasisSet& basis, const Workspace& ws) {
  const int steps = static_cast<int>(vertices.size()) - 1;
  if (stats.horizon() < steps)
    throw std::invalid_argument("path_cost_variance: horizon too short");
  std::vector<Eigen::VectorXd> phi(steps + 1);
  for (int l = 1; l <= steps; ++l) phi[l] = basis_eval(ws.point(vertices[l]), basis);

  const double d2 = ws.delta() * ws.delta();
  double var = 0.0;
  for (int l = 1; l <= steps; ++l) {
    // P_l phi_l reused for the diagonal term and all cross terms with m > l.
    const Eigen::VectorXd p_phi = stats.covs[l] * phi[l];
    var += d2 * phi[l].dot(p_phi);
    Eigen::VectorXd propagated = p_phi;  // (A^{m-l} P_l' phi_l) built incrementally
    for (int m = l + 1; m <= steps; ++m) {
      propagated = (stats.a_pow[1] * propagated).eval();
      var += 2.0 * d2 * phi[m].dot(propagated);
    }
  }
  if (var < -1e-9)
    throw std::runtime_error("path_cost_variance: inconsistent horizon statistics");
  return std::max(var, 0.0);
}

double risk_of(double j_hat, double var_j) {
  if (var_j < 0.0) throw std::invalid_argument("risk_of: variance must be >= 0");
  return j_hat + std::sqrt(var_j);
}

std::vector<int> path_relevant_set(const std::vector<int>& vertices, const BasisSet& basis,
                                   const Workspace& ws) {
  std::vector<int> relevant;
  for (int m = 0; m < basis.size(); ++m) {
    for (int v : vertices) {
      const double d2 = (ws.point(v) - basis.centers[m]).squaredNorm();
      if (std::exp(-d2 / (2.0 * basis.widths[m])) >= basis.support_threshold) {
        relevant.push_back(m);
        break;
      }
    }
  }
  return relevant;
}

namespace {

// Walks parent pointers back to the start state and returns the vertex
// sequence. States are flattened as t * num_vertices + v.
std::vector<int> reconstruct(const std::vector<int>& parent, int state, int nv) {
  std::vector<int> seq;
  while (state >= 0) {
    seq.push_back(state % nv);
    state = parent[state];
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

}  // namespace

PathPlan plan_min_expected_cost(const GridGraph& graph, const GaussianBelief& belief,
                                const LinearDynamics& dyn, const BasisSet& basis,
                                int horizon_cap, double c_floor) {
  const int nv = graph.ws.num_points();
  if (graph.start == graph.goal)
    throw std::invalid_argument("plan_min_expected_cost: start equals goal");
  if (graph.start < 0 || graph.start >= nv || graph.goal < 0 || graph.goal >= nv)
    throw std::invalid_argument("plan_min_expected_cost: start/goal out of range");
  const int manhattan = std::abs(graph.start / graph.ws.grid_side - graph.goal / graph.ws.grid_side) +
                        std::abs(graph.start % graph.ws.grid_side - graph.goal % graph.ws.grid_side);
  if (horizon_cap < manhattan)
    throw std::invalid_argument("plan_min_expected_cost: horizon_cap below manhattan distance");

  // Stage-indexed estimated field at every vertex, floored to keep the
  // search well-posed when early estimates dip negative.
  const double delta = graph.ws.delta();
  std::vector<Eigen::VectorXd> mean_at(horizon_cap + 1);
  mean_at[0] = belief.mean;
  for (int l = 1; l <= horizon_cap; ++l) mean_at[l] = dyn.A * mean_at[l - 1];
  std::vector<std::vector<double>> stage_cost(horizon_cap + 1, std::vector<double>(nv));
  for (int v = 0; v < nv; ++v) {
    const Eigen::VectorXd phi = basis_eval(graph.ws.point(v), basis);
    for (int l = 1; l <= horizon_cap; ++l)
      stage_cost[l][v] = delta * std::max(1.0 + phi.dot(mean_at[l]), c_floor);
  }

  const int num_states = (horizon_cap + 1) * nv;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(num_states, inf);
  std::vector<int> parent(num_states, -1);
  std::vector<char> done(num_states, 0);

  using QueueItem = std::pair<double, int>;
  std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> queue;
  const int start_state = graph.start;
  cost[start_state] = 0.0;
  queue.emplace(0.0, start_state);

  while (!queue.empty()) {
    const auto [c, state] = queue.top();
    queue.pop();
    if (done[state] || c > cost[state]) continue;
    done[state] = 1;
    const int t = state / nv;
    const int v = state % nv;
    if (t == horizon_cap) continue;
    for (int n : graph.neighbors(v)) {
      const int next = (t + 1) * nv + n;
      const double nc = c + stage_cost[t + 1][n];
      if (nc < cost[next]) {
        cost[next] = nc;
        parent[next] = state;
        queue.emplace(nc, next);
      } else if (nc == cost[next] && parent[next] != state) {
        // Equal cost: keep the lexicographically smaller vertex sequence.
        auto candidate = reconstruct(parent, state, nv);
        candidate.push_back(n);
        if (candidate < reconstruct(parent, next, nv)) parent[next] = state;
      }
    }
  }

  int best_state = -1;
  for (int t = 1; t <= horizon_cap; ++t) {
    const int state = t * nv + graph.goal;
    if (cost[state] == inf) continue;
    if (best_state < 0 || cost[state] < cost[best_state]) {
      best_state = state;
    } else if (cost[state] == cost[best_state]) {
      if (reconstruct(parent, state, nv) < reconstruct(parent, best_state, nv))
        best_state = state;
    }
  }
  if (best_state < 0)
    throw std::runtime_error("plan_min_expected_cost: goal unreachable within horizon cap");

  PathPlan plan;
  plan.vertices = reconstruct(parent, best_state, nv);
  const PathHorizonStats stats = predict_horizon(belief, dyn, plan.steps());
  plan.j_hat = path_cost_mean(plan.vertices, stats, basis, graph.ws);
  plan.var_j = path_cost_variance(plan.vertices, stats, basis, graph.ws);
  plan.risk = risk_of(plan.j_hat, plan.var_j);
  plan.relevant_set = path_relevant_set(plan.vertices, basis, graph.ws);
  return plan;
}

}  // namespace cscp
