#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "cscp/planner.hpp"
#include "helpers.hpp"

using namespace cscp;

namespace {

struct SmallProblem {
  Workspace ws{1.0, 4};
  BasisSet basis;
  LinearDynamics dyn;
  GaussianBelief belief;

  explicit SmallProblem(RngStream& rng, int per_side = 3) {
    basis = BasisSet::uniform(per_side, ws);
    const int n = basis.size();
    Eigen::MatrixXd ac = testing::random_matrix(n, n, rng, 0.03);
    dyn = discretize(ac, testing::random_spd(n, rng, 0.05), 1.0, 4);
    belief = {rng.normal_vector(n), testing::random_spd(n, rng), 0, BeliefPhase::Predicted};
  }
};

/// Brute force over every walk of length <= horizon by depth-first search on
/// the raw grid moves; completely independent of the time-expanded search.
struct WalkEnumerator {
  const GridGraph& graph;
  const std::vector<std::vector<double>>& stage_cost;  // [stage l][vertex], l >= 1
  int horizon;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_walk;
  std::vector<int> walk;

  void dfs(int v, int step, double cost) {
    if (v == graph.goal && step > 0) {
      if (cost < best || (cost == best && walk < best_walk)) {
        best = cost;
        best_walk = walk;
      }
      return;  // extending past the goal only adds positive cost
    }
    if (step == horizon) return;
    for (int u : graph.neighbors(v)) {
      walk.push_back(u);
      dfs(u, step + 1, cost + stage_cost[step + 1][u]);
      walk.pop_back();
    }
  }
};

}  // namespace

TEST_CASE("grid neighbors are the 4-connected moves") {
  GridGraph graph{Workspace(1.0, 4), 0, 15};
  auto sorted = [&](int v) {
    auto n = graph.neighbors(v);
    std::sort(n.begin(), n.end());
    return n;
  };
  CHECK(sorted(0) == std::vector<int>{1, 4});           // bottom-left corner
  CHECK(sorted(3) == std::vector<int>{2, 7});           // bottom-right corner
  CHECK(sorted(5) == std::vector<int>{1, 4, 6, 9});     // interior
  CHECK(sorted(12) == std::vector<int>{8, 13});         // top-left corner
}

TEST_CASE("horizon statistics match direct propagation") {
  RngStream rng(51, 0);
  const SmallProblem p(rng);
  const int horizon = 6;
  const PathHorizonStats stats = predict_horizon(p.belief, p.dyn, horizon);
  REQUIRE(stats.horizon() == horizon);

  Eigen::VectorXd mean = p.belief.mean;
  Eigen::MatrixXd cov = p.belief.cov;
  Eigen::MatrixXd a_pow = Eigen::MatrixXd::Identity(p.dyn.dim(), p.dyn.dim());
  for (int l = 0; l <= horizon; ++l) {
    CHECK((stats.means[l] - mean).norm() < 1e-12);
    CHECK((stats.covs[l] - cov).norm() < 1e-12);
    CHECK((stats.a_pow[l] - a_pow).norm() < 1e-12);
    mean = p.dyn.A * mean;
    cov = p.dyn.A * cov * p.dyn.A.transpose() + p.dyn.Q;
    a_pow = p.dyn.A * a_pow;
  }
  // Cross-covariances against the joint-trajectory construction.
  const Eigen::MatrixXd joint =
      testing::joint_trajectory_cov(p.dyn.A, p.dyn.Q, p.belief.cov, horizon);
  const int n = p.dyn.dim();
  for (int l = 1; l <= horizon; ++l)
    for (int m = l; m <= horizon; ++m)
      CHECK((stats.cross(l, m) - joint.block((l - 1) * n, (m - 1) * n, n, n)).norm() <
            1e-9);
  for (int l = 0; l <= horizon; ++l)
    CHECK((stats.cross_base(l) - stats.a_pow[l] * p.belief.cov).norm() < 1e-12);
}

TEST_CASE("path cost mean and variance match the joint-Gaussian oracle") {
  RngStream rng(53, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const SmallProblem p(rng);
    const int horizon = 5;
    const PathHorizonStats stats = predict_horizon(p.belief, p.dyn, horizon);
    // A fixed wiggly walk on the 4x4 grid.
    const std::vector<int> path{0, 1, 5, 6, 10, 11};
    const double delta = p.ws.delta();
    const int n = p.dyn.dim();

    double mean_expect = static_cast<double>(horizon);
    Eigen::VectorXd stacked_phi = Eigen::VectorXd::Zero(horizon * n);
    for (int l = 1; l <= horizon; ++l) {
      const Eigen::VectorXd phi = basis_eval(p.ws.point(path[l]), p.basis);
      mean_expect += phi.dot(stats.means[l]);
      stacked_phi.segment((l - 1) * n, n) = phi;
    }
    mean_expect *= delta;
    const Eigen::MatrixXd joint =
        testing::joint_trajectory_cov(p.dyn.A, p.dyn.Q, p.belief.cov, horizon);
    const double var_expect = delta * delta * stacked_phi.dot(joint * stacked_phi);

    CHECK(path_cost_mean(path, stats, p.basis, p.ws) ==
          doctest::Approx(mean_expect).epsilon(1e-10));
    CHECK(path_cost_variance(path, stats, p.basis, p.ws) ==
          doctest::Approx(var_expect).epsilon(1e-9));
  }
}

TEST_CASE("variance agrees with Monte Carlo sampling of trajectories") {
  RngStream rng(55, 0);
  const SmallProblem p(rng);
  const int horizon = 4;
  const std::vector<int> path{0, 4, 5, 9, 10};
  const PathHorizonStats stats = predict_horizon(p.belief, p.dyn, horizon);
  const double analytic = path_cost_variance(path, stats, p.basis, p.ws);

  const Eigen::MatrixXd l0 = robust_cholesky(p.belief.cov);
  const Eigen::MatrixXd lq = robust_cholesky(p.dyn.Q);
  const double delta = p.ws.delta();
  const int n = p.dyn.dim();
  std::vector<Eigen::VectorXd> phis;
  for (int l = 1; l <= horizon; ++l) phis.push_back(basis_eval(p.ws.point(path[l]), p.basis));

  const int samples = 100000;
  double sum = 0.0, sum2 = 0.0;
  RngStream mc(55, 1);
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd theta = p.belief.mean + l0 * mc.normal_vector(n);
    double j = horizon;
    for (int l = 1; l <= horizon; ++l) {
      theta = p.dyn.A * theta + lq * mc.normal_vector(n);
      j += phis[l - 1].dot(theta);
    }
    j *= delta;
    sum += j;
    sum2 += j * j;
  }
  const double mc_var = sum2 / samples - (sum / samples) * (sum / samples);
  CHECK(mc_var == doctest::Approx(analytic).epsilon(0.05));
}

TEST_CASE("risk is mean plus one standard deviation") {
  CHECK(risk_of(2.0, 0.25) == doctest::Approx(2.5));
  CHECK(risk_of(1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("path-relevant set is the union of intersecting supports") {
  const Workspace ws(1.0, 4);
  const BasisSet basis = BasisSet::uniform(3, ws, 0.05);
  const std::vector<int> path{0, 1, 2, 3};  // bottom edge
  const std::vector<int> relevant = path_relevant_set(path, basis, ws);
  for (int n = 0; n < basis.size(); ++n) {
    const std::vector<int> support = significant_support(n, basis, ws);
    const bool hits = std::any_of(path.begin(), path.end(), [&](int v) {
      return std::find(support.begin(), support.end(), v) != support.end();
    });
    const bool listed = std::find(relevant.begin(), relevant.end(), n) != relevant.end();
    CHECK(hits == listed);
  }
}

TEST_CASE("time-expanded search matches walk enumeration") {
  RngStream rng(57, 0);
  const int horizon = 8;
  for (int trial = 0; trial < 10; ++trial) {
    const SmallProblem p(rng);
    GridGraph graph{p.ws, 0, 0};
    graph.start = rng.uniform_int(0, p.ws.num_points() - 1);
    do {
      graph.goal = rng.uniform_int(0, p.ws.num_points() - 1);
    } while (graph.goal == graph.start);

    const PathPlan plan =
        plan_min_expected_cost(graph, p.belief, p.dyn, p.basis, horizon);
    REQUIRE(plan.vertices.front() == graph.start);
    REQUIRE(plan.vertices.back() == graph.goal);

    const PathHorizonStats stats = predict_horizon(p.belief, p.dyn, horizon);
    std::vector<std::vector<double>> stage_cost(horizon + 1,
                                                std::vector<double>(p.ws.num_points()));
    const double delta = p.ws.delta();
    for (int l = 1; l <= horizon; ++l)
      for (int v = 0; v < p.ws.num_points(); ++v)
        stage_cost[l][v] =
            delta * std::max(field_value(p.ws.point(v), stats.means[l], p.basis), 1e-3);

    WalkEnumerator oracle{graph, stage_cost, horizon};
    oracle.walk.push_back(graph.start);
    oracle.best_walk = oracle.walk;
    oracle.dfs(graph.start, 0, 0.0);

    double plan_cost = 0.0;
    for (int l = 1; l < static_cast<int>(plan.vertices.size()); ++l)
      plan_cost += stage_cost[l][plan.vertices[l]];
    CHECK(plan_cost == doctest::Approx(oracle.best).epsilon(1e-12));
    // Same floored objective implies the same walk under lexicographic ties.
    CHECK(plan.vertices == oracle.best_walk);
  }
}

TEST_CASE("planner validates its inputs") {
  RngStream rng(59, 0);
  const SmallProblem p(rng);
  GridGraph graph{p.ws, 0, 0};
  CHECK_THROWS(plan_min_expected_cost(graph, p.belief, p.dyn, p.basis, 10));
  graph.goal = 15;
  CHECK_THROWS(plan_min_expected_cost(graph, p.belief, p.dyn, p.basis, 2));  // < Manhattan
}
