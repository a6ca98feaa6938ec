#pragma once

#include "gmbe/elimination.hpp"
#include "gmbe/gauge.hpp"
#include "gmbe/minibucket_engine.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace gmbe {

/// Factor marginals of the auxiliary distribution q (over |f|).
struct AuxMarginals {
  std::vector<Eigen::ArrayXd> factor;  // per factor, in the factor's entry order
  double log_bound = 0.0;
};

struct OptimizerConfig {
  bool gauges = false;
  bool weights = false;
  bool reparam = false;
  double mu_g = 0.01;
  double mu_w = 0.1;
  double mu_theta = 0.1;
  int iterations = 150;
  double backtrack = 0.5;
  int max_halvings = 20;
  double weight_floor = 1e-3;
  double weight_fd_step = 1e-4;
  // Stop once the bound improved by less than stop_tol (relative) over the
  // last stop_window iterations; 0 disables.
  double stop_tol = 0.0;
  int stop_window = 10;

  std::string method() const;
};

/// Parses wmbe, wmbe-w, wmbe-theta, wmbe-wtheta, wmbe-g, wmbe-wg.
OptimizerConfig config_for_method(const std::string& method);

/// Working copy of the model and tree. Accepted gauge and reparameterisation
/// steps are absorbed into the factors, so the gauges are always identity here
/// and Z is unchanged.
class OptState {
 public:
  OptState(ForneyGraph g, MiniBucketTree tree);

  const ForneyGraph& graph() const { return graph_; }
  const MiniBucketTree& tree() const { return tree_; }
  const Reparam& theta() const { return theta_; }
  double log_bound() const { return log_bound_; }

  /// Forward and backward pass on the current state.
  AuxMarginals aux_marginals();

  bool gauge_step(VariableId v, const OptimizerConfig& cfg);
  bool weight_step(const OptimizerConfig& cfg);
  bool reparam_step(VariableId v, const OptimizerConfig& cfg);

  MiniBucketEngine& engine() { return engine_; }

 private:
  double evaluate();
  void refresh();
  double try_factors(FactorId a, Factor fa, FactorId b, Factor fb);

  ForneyGraph graph_;
  MiniBucketTree tree_;
  Reparam theta_;
  MiniBucketEngine engine_;
  double log_bound_ = 0.0;
  bool engine_current_ = false;  // engine tables match graph_ and weights
  bool q_current_ = false;
};

/// d log Z_WMBE / d G_{v,a}(x', x'') at G = I, with the conjugate gauge on the
/// other edge coupled through (G^T)^{-1}. Requires a backward pass on `engine`
/// for the current factors. Throws ZeroFactorEntry where the derivative does
/// not exist (a zero entry under a negative mini-bucket weight).
Matrix gauge_gradient(const ForneyGraph& g, const MiniBucketEngine& engine, VariableId v);

/// d log Z_WMBE / d theta_{v,a}: q_a(x_v) - q_b(x_v), with a the free edge.
Eigen::VectorXd reparam_gradient(const ForneyGraph& g, const AuxMarginals& q, VariableId v);

/// Marginal of a factor table along one scope position.
Eigen::VectorXd marginal_along(const Factor& f, const Eigen::ArrayXd& table, int pos);

/// Algorithm 3 with the enabled parameter groups, upper bounds only. Each
/// iteration sweeps the variables in elimination order with gauge steps, then
/// one weight step, then reparameterisation steps. trace[0] is the initial bound.
BoundResult optimize_bound(OptState& state, const OptimizerConfig& cfg);
BoundResult optimize_bound(const ForneyGraph& g, const MiniBucketTree& tree,
                           const OptimizerConfig& cfg);

}  // namespace gmbe
