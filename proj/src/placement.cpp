#include "cscp/placement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cscp {

namespace {

double log_det_llt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error(std::string(what) + ": matrix not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Row vector w with P_Jz = w C': delta * sum_l Phi_l' A^l P_0.
Eigen::RowVectorXd path_cross_row(const ObjectiveContext& ctx) {
  const auto& path = *ctx.path;
  const auto& stats = *ctx.stats;
  const int steps = static_cast<int>(path.size()) - 1;
  if (stats.horizon() < steps) throw std::invalid_argument("crmi: horizon too short for path");
  Eigen::RowVectorXd w = Eigen::RowVectorXd::Zero(ctx.basis->size());
  for (int l = 1; l <= steps; ++l)
    w += basis_eval(ctx.ws->point(path[l]), *ctx.basis).transpose() * stats.a_pow[l];
  return ctx.ws->delta() * w * stats.covs[0];
}

double crmi_from_parts(double p_jj, const Eigen::RowVectorXd& p_jz, const Eigen::MatrixXd& p_zz) {
  if (!(p_jj > 0.0)) throw std::invalid_argument("crmi: path cost variance must be positive");
  Eigen::LLT<Eigen::MatrixXd> llt(p_zz);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("crmi: measurement covariance not positive definite");
  const double explained = p_jz * llt.solve(p_jz.transpose());
  const double ratio = p_jj / (p_jj - explained);
  if (!(ratio > 1.0 + 1e-15)) return 0.0;
  return 0.5 * std::log(ratio);
}

double reconfig_distance(const std::vector<int>& config, const Workspace& ws,
                         const std::vector<int>& previous, ReconfigMode mode) {
  if (previous.empty()) throw std::invalid_argument("modified_crmi: previous config required");
  auto nearest_prev = [&](int q) {
    double best = std::numeric_limits<double>::infinity();
    for (int p : previous) best = std::min(best, (ws.point(q) - ws.point(p)).norm());
    return best;
  };
  if (mode == ReconfigMode::PerCandidate) {
    double sum = 0.0;
    for (int q : config) sum += nearest_prev(q);
    return sum;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int q : config) best = std::min(best, nearest_prev(q));
  return best;
}

}  // namespace

double smi(const std::vector<int>& config, const GaussianBelief& belief, const BasisSet& basis,
           const Workspace& ws, const Eigen::MatrixXd& R) {
  const MeasurementModel model = measurement_matrix(config, basis, ws, 1.0);
  if (R.rows() != model.C.rows() || R.cols() != model.C.rows())
    throw std::invalid_argument("smi: R dimension mismatch");
  const double log_det_r = log_det_llt(R, "smi: R");
  const Eigen::MatrixXd p_zz = model.C * belief.cov * model.C.transpose() + R;
  return 0.5 * (log_det_llt(p_zz, "smi: P_zz") - log_det_r);
}

double crmi(const std::vector<int>& config, const ObjectiveContext& ctx) {
  const MeasurementModel model = measurement_matrix(config, *ctx.basis, *ctx.ws, ctx.sigma_r2);
  const double p_jj = path_cost_variance(*ctx.path, *ctx.stats, *ctx.basis, *ctx.ws);
  const Eigen::RowVectorXd p_jz = path_cross_row(ctx) * model.C.transpose();
  const Eigen::MatrixXd p_zz = model.C * ctx.belief->cov * model.C.transpose() + model.R;
  return crmi_from_parts(p_jj, p_jz, p_zz);
}

double modified_crmi(const std::vector<int>& config, const ObjectiveContext& ctx,
                     ReconfigMode mode) {
  return crmi(config, ctx) + ctx.alpha1 -
         ctx.alpha2 * reconfig_distance(config, *ctx.ws, ctx.previous_config, mode);
}

PlacementResult optimize_exhaustive(const SetObjective& objective, int ns, int ng, long budget) {
  if (ns < 1 || ns > ng) throw std::invalid_argument("optimize_exhaustive: invalid sensor count");
  double combos = 1.0;
  for (int i = 0; i < ns; ++i) combos = combos * (ng - i) / (i + 1);
  if (combos > static_cast<double>(budget))
    throw std::runtime_error(
        "optimize_exhaustive: configuration count exceeds budget; use optimize_greedy");

  PlacementResult result;
  result.method = "exhaustive";
  std::vector<int> config(ns);
  for (int i = 0; i < ns; ++i) config[i] = i;
  bool first = true;
  while (true) {
    const double value = objective(config);
    ++result.evaluations;
    if (first || value > result.objective_value) {  // lex-first wins ties
      result.objective_value = value;
      result.config = config;
      first = false;
    }
    // Next combination in lexicographic order.
    int i = ns - 1;
    while (i >= 0 && config[i] == ng - ns + i) --i;
    if (i < 0) break;
    ++config[i];
    for (int j = i + 1; j < ns; ++j) config[j] = config[j - 1] + 1;
  }
  result.bound_certificate = (1.0 - 1.0 / std::exp(1.0)) * result.objective_value;
  return result;
}

PlacementResult optimize_greedy(const SetObjective& objective, int ns, int ng) {
  if (ns < 1 || ns > ng) throw std::invalid_argument("optimize_greedy: invalid sensor count");
  PlacementResult result;
  result.method = "greedy";
  std::vector<char> used(ng, 0);
  std::vector<int> current;
  for (int round = 0; round < ns; ++round) {
    int best_index = -1;
    double best_value = 0.0;
    for (int candidate = 0; candidate < ng; ++candidate) {
      if (used[candidate]) continue;
      current.push_back(candidate);
      const double value = objective(current);
      current.pop_back();
      ++result.evaluations;
      if (best_index < 0 || value > best_value) {  // lowest index wins ties
        best_value = value;
        best_index = candidate;
      }
    }
    used[best_index] = 1;
    current.push_back(best_index);
    result.objective_value = best_value;
  }
  result.config = current;
  return result;
}

SubmodularityReport submodularity_probe(const SetObjective& objective, int ng, int samples,
                                        RngStream& rng) {
  if (samples < 1) throw std::invalid_argument("submodularity_probe: samples must be >= 1");
  SubmodularityReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    // Random nested pair A subset of B plus an element outside B.
    const int b_size = rng.uniform_int(1, std::min(ng - 1, 5));
    std::vector<int> pool(ng);
    for (int i = 0; i < ng; ++i) pool[i] = i;
    for (int i = 0; i < ng - 1; ++i) std::swap(pool[i], pool[rng.uniform_int(i, ng - 1)]);
    std::vector<int> b(pool.begin(), pool.begin() + b_size);
    const int a_size = rng.uniform_int(1, b_size);
    std::vector<int> a(b.begin(), b.begin() + a_size);
    const int x = pool[b_size];

    auto with = [](std::vector<int> set, int extra) {
      set.push_back(extra);
      return set;
    };
    const double margin = (objective(with(a, x)) - objective(a)) -
                          (objective(with(b, x)) - objective(b));
    report.min_margin = std::min(report.min_margin, margin);
    if (margin < -1e-9) ++report.violations;
    ++report.samples;
  }
  return report;
}

PlacementEvaluator::PlacementEvaluator(const ObjectiveContext& ctx)
    : sigma_r2_(ctx.sigma_r2), alpha1_(ctx.alpha1), alpha2_(ctx.alpha2) {
  const int ng = ctx.ws->num_points();
  const int np = ctx.basis->size();
  Eigen::MatrixXd g(ng, np);
  grid_points_.reserve(ng);
  for (int i = 0; i < ng; ++i) {
    g.row(i) = basis_eval(ctx.ws->point(i), *ctx.basis).transpose();
    grid_points_.push_back(ctx.ws->point(i));
  }
  s_ = g * ctx.belief->cov * g.transpose();
  u_ = g * path_cross_row(ctx).transpose();
  p_jj_ = cscp::path_cost_variance(*ctx.path, *ctx.stats, *ctx.basis, *ctx.ws);
  for (int p : ctx.previous_config) previous_points_.push_back(ctx.ws->point(p));
}

double PlacementEvaluator::smi(const std::vector<int>& config) const {
  const int ns = static_cast<int>(config.size());
  Eigen::MatrixXd p_zz(ns, ns);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      p_zz(i, j) = s_(config[i], config[j]) + (i == j ? sigma_r2_ : 0.0);
  return 0.5 * (log_det_llt(p_zz, "smi: P_zz") - ns * std::log(sigma_r2_));
}

double PlacementEvaluator::crmi(const std::vector<int>& config) const {
  const int ns = static_cast<int>(config.size());
  Eigen::MatrixXd p_zz(ns, ns);
  Eigen::RowVectorXd p_jz(ns);
  for (int i = 0; i < ns; ++i) {
    p_jz[i] = u_[config[i]];
    for (int j = 0; j < ns; ++j)
      p_zz(i, j) = s_(config[i], config[j]) + (i == j ? sigma_r2_ : 0.0);
  }
  return crmi_from_parts(p_jj_, p_jz, p_zz);
}

double PlacementEvaluator::modified_crmi(const std::vector<int>& config,
                                         ReconfigMode mode) const {
  auto nearest_prev = [&](const Eigen::Vector2d& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : previous_points_) best = std::min(best, (x - p).norm());
    return best;
  };
  double dist;
  if (mode == ReconfigMode::PerCandidate) {
    dist = 0.0;
    for (int q : config) dist += nearest_prev(grid_points_[q]);
  } else {
    dist = std::numeric_limits<double>::infinity();
    for (int q : config) dist = std::min(dist, nearest_prev(grid_points_[q]));
  }
  return crmi(config) + alpha1_ - alpha2_ * dist;
}

}  // namespace cscp
