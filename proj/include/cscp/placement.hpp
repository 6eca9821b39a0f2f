#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cscp/basis.hpp"
#include "cscp/dynamics.hpp"
#include "cscp/estimator.hpp"
#include "cscp/planner.hpp"
#include "cscp/rng.hpp"
#include "cscp/workspace.hpp"

namespace cscp {

/// Everything an information objective needs to score a candidate sensor
/// configuration: predicted belief, dynamics, the current path with its
/// horizon statistics, and the reconfiguration-penalty parameters.
struct ObjectiveContext {
  const GaussianBelief* belief{nullptr};  // predicted phase
  const LinearDynamics* dyn{nullptr};
  const BasisSet* basis{nullptr};
  const Workspace* ws{nullptr};
  const std::vector<int>* path{nullptr};
  const PathHorizonStats* stats{nullptr};
  std::vector<int> previous_config;
  double alpha1{0.0};
  double alpha2{0.0};
  double sigma_r2{0.01};
};

/// Standard MI between the threat state and the measurements, computed as
/// (1/2) log(|C P C' + R| / |R|), which equals the Schur-complement form
/// by the matrix determinant lemma.
double smi(const std::vector<int>& config, const GaussianBelief& belief, const BasisSet& basis,
           const Workspace& ws, const Eigen::MatrixXd& R);

/// Context-relevant MI between the path cost and the measurements.
double crmi(const std::vector<int>& config, const ObjectiveContext& ctx);

/// How the reconfiguration penalty's min over sensor pairs is read: Joint
/// takes the global minimum over (candidate, previous) pairs; PerCandidate
/// (default) charges each candidate its distance to the nearest previous
/// sensor and sums, so a greedy marginal gain sees exactly the added
/// candidate's own distance.
enum class ReconfigMode { PerCandidate, Joint };

/// CRMI plus the affine sensor-travel penalty alpha1 - alpha2 * distance.
double modified_crmi(const std::vector<int>& config, const ObjectiveContext& ctx,
                     ReconfigMode mode = ReconfigMode::PerCandidate);

struct PlacementResult {
  std::vector<int> config;
  double objective_value{0.0};
  std::string method;
  long evaluations{0};
  std::optional<double> bound_certificate;  // (1 - 1/e) * best known value
};

using SetObjective = std::function<double(const std::vector<int>&)>;

/// True argmax by enumeration of all size-ns subsets of [0, ng).
/// Ties resolve to the lexicographically smallest index set.
PlacementResult optimize_exhaustive(const SetObjective& objective, int ns, int ng,
                                    long budget = 2'000'000);

/// One-sensor-at-a-time greedy maximization of the joint objective.
PlacementResult optimize_greedy(const SetObjective& objective, int ns, int ng);

struct SubmodularityReport {
  int samples{0};
  int violations{0};
  double min_margin{0.0};
};

/// Samples nested pairs A subset of B and x outside B, recording the
/// diminishing-returns margin f(A+x) - f(A) - (f(B+x) - f(B)). Violations
/// are margins below -1e-9.
SubmodularityReport submodularity_probe(const SetObjective& objective, int ng, int samples,
                                        RngStream& rng);

/// Precomputed per-iteration quantities that make SMI/CRMI evaluation over
/// many grid-point subsets cheap: the grid Gram matrix S = G P G', the path
/// cross-covariance row u, and the scalar path-cost variance.
class PlacementEvaluator {
 public:
  PlacementEvaluator(const ObjectiveContext& ctx);

  double smi(const std::vector<int>& config) const;
  double crmi(const std::vector<int>& config) const;
  double modified_crmi(const std::vector<int>& config,
                       ReconfigMode mode = ReconfigMode::PerCandidate) const;

  double path_cost_variance() const { return p_jj_; }

 private:
  Eigen::MatrixXd s_;  // G P G' over all grid points
  Eigen::VectorXd u_;  // per-grid-point cross covariance of J and z
  double p_jj_{0.0};
  double sigma_r2_{0.01};
  double alpha1_{0.0};
  double alpha2_{0.0};
  std::vector<Eigen::Vector2d> grid_points_;
  std::vector<Eigen::Vector2d> previous_points_;
};

}  // namespace cscp
