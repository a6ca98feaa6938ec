#include "gmbe/optimize.hpp"

#include "gmbe/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace gmbe {

std::string OptimizerConfig::method() const {
  std::string tag = "wmbe";
  if (!weights && !reparam && !gauges) return tag;
  tag += "-";
  if (weights) tag += "w";
  if (gauges) tag += "g";
  if (reparam) tag += "theta";
  return tag;
}

OptimizerConfig config_for_method(const std::string& method) {
  OptimizerConfig cfg;
  if (method == "wmbe") return cfg;
  if (method == "wmbe-w") {
    cfg.weights = true;
  } else if (method == "wmbe-theta") {
    cfg.reparam = true;
  } else if (method == "wmbe-wtheta") {
    cfg.weights = cfg.reparam = true;
  } else if (method == "wmbe-g") {
    cfg.gauges = true;
  } else if (method == "wmbe-wg") {
    cfg.weights = cfg.gauges = true;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown optimizer method '" + method + "'");
  }
  return cfg;
}

OptState::OptState(ForneyGraph g, MiniBucketTree tree)
    : graph_(std::move(g)),
      tree_(std::move(tree)),
      theta_(Reparam::zero(graph_)),
      engine_(graph_, tree_) {
  tree_.check_weights();
  refresh();
}

double OptState::evaluate() {
  engine_current_ = true;
  q_current_ = false;
  return engine_.forward(graph_, tree_.weights);
}

void OptState::refresh() {
  if (!engine_current_) log_bound_ = evaluate();
}

AuxMarginals OptState::aux_marginals() {
  refresh();
  if (!q_current_) {
    engine_.backward();
    q_current_ = true;
  }
  AuxMarginals q;
  q.log_bound = log_bound_;
  for (FactorId a = 0; a < graph_.num_factors(); ++a) q.factor.push_back(engine_.factor_marginal(a));
  return q;
}

// Swap in candidate factors; keep them if the bound did not go up.
double OptState::try_factors(FactorId a, Factor fa, FactorId b, Factor fb) {
  Factor old_a = graph_.factor(a), old_b = graph_.factor(b);
  graph_.set_factor(a, std::move(fa));
  graph_.set_factor(b, std::move(fb));
  const double bound = evaluate();
  if (std::isfinite(bound) && bound <= log_bound_) {
    log_bound_ = bound;
    return bound;
  }
  graph_.set_factor(a, std::move(old_a));
  graph_.set_factor(b, std::move(old_b));
  engine_current_ = false;
  return kPosInf;
}

Eigen::VectorXd marginal_along(const Factor& f, const Eigen::ArrayXd& table, int pos) {
  const int d = f.cards()[pos];
  const Eigen::Index stride = f.stride(pos);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < table.size(); ++i) out[(i / stride) % d] += table[i];
  return out;
}

namespace {

// sum_r s(r, x') c(r, x') f(r, x'') over the entries of one factor, where c is
// the cavity d log Z / d|f|. Adds `scale` times it into grad(x', x'').
void accumulate_ratio(const Factor& f, const Eigen::ArrayXd& log_cavity, int pos, double scale,
                      bool transpose, FactorId id, Matrix& grad) {
  const int d = f.cards()[pos];
  const Eigen::Index stride = f.stride(pos);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const int a = static_cast<int>((i / stride) % d);
    const double lc = log_cavity[i];
    if (lc == kNegInf) continue;
    for (int b = 0; b < d; ++b) {
      const Eigen::Index j = i + (b - a) * stride;
      if (f.sign()[j] == 0) continue;
      if (lc == kPosInf)
        throw Error(ErrorKind::ZeroFactorEntry,
                    "factor " + std::to_string(id) + " entry " + std::to_string(i) +
                        " is zero where the gradient is unbounded");
      // A zero entry has no sign to differentiate through; its kink contributes 0.
      if (f.sign()[i] == 0) continue;
      const double term = f.sign()[i] * f.sign()[j] * std::exp(lc + f.log_abs()[j]);
      if (transpose) {
        grad(b, a) += scale * term;
      } else {
        grad(a, b) += scale * term;
      }
    }
  }
}

}  // namespace

Matrix gauge_gradient(const ForneyGraph& g, const MiniBucketEngine& engine, VariableId v) {
  const auto [alpha, beta] = g.edges(v);
  const int d = g.card(v);
  Matrix grad = Matrix::Zero(d, d);
  const Factor& fa = g.factor(alpha);
  const Factor& fb = g.factor(beta);
  // G on alpha moves f_a(r, x') by f_a(r, x''); the conjugate on beta moves
  // f_b(r, x'') by -f_b(r, x') to first order.
  accumulate_ratio(fa, engine.factor_log_cavity(g, alpha), fa.position(v), 1.0, false, alpha, grad);
  accumulate_ratio(fb, engine.factor_log_cavity(g, beta), fb.position(v), -1.0, true, beta, grad);
  return grad;
}

Eigen::VectorXd reparam_gradient(const ForneyGraph& g, const AuxMarginals& q, VariableId v) {
  const auto [alpha, beta] = g.edges(v);
  const Factor& fa = g.factor(alpha);
  const Factor& fb = g.factor(beta);
  return marginal_along(fa, q.factor[alpha], fa.position(v)) -
         marginal_along(fb, q.factor[beta], fb.position(v));
}

bool OptState::gauge_step(VariableId v, const OptimizerConfig& cfg) {
  aux_marginals();
  const Matrix grad = gauge_gradient(graph_, engine_, v);
  if (grad.isZero(0.0)) return true;
  const auto [alpha, beta] = graph_.edges(v);
  const int pa = graph_.factor(alpha).position(v);
  const int pb = graph_.factor(beta).position(v);
  const int d = graph_.card(v);
  double mu = cfg.mu_g;
  bool any_regular = false;
  for (int h = 0; h <= cfg.max_halvings; ++h, mu *= cfg.backtrack) {
    const Matrix G = Matrix::Identity(d, d) - mu * grad;
    Matrix C;
    try {
      C = conjugate_of(G);
    } catch (const Error&) {
      continue;
    }
    any_regular = true;
    Factor fa = gauge_transform_axis(graph_.factor(alpha), pa, G);
    Factor fb = gauge_transform_axis(graph_.factor(beta), pb, C);
    if (std::isfinite(try_factors(alpha, std::move(fa), beta, std::move(fb)))) return true;
  }
  if (!any_regular)
    throw Error(ErrorKind::SingularGaugeStep,
                "gauge step for variable " + std::to_string(v) + " stayed ill-conditioned");
  return false;
}

bool OptState::reparam_step(VariableId v, const OptimizerConfig& cfg) {
  const AuxMarginals q = aux_marginals();
  const Eigen::VectorXd grad = reparam_gradient(graph_, q, v);
  if (grad.isZero(0.0)) return true;
  const auto [alpha, beta] = graph_.edges(v);
  const int pa = graph_.factor(alpha).position(v);
  const int pb = graph_.factor(beta).position(v);
  double mu = cfg.mu_theta;
  for (int h = 0; h <= cfg.max_halvings; ++h, mu *= cfg.backtrack) {
    const Eigen::ArrayXd step = -mu * grad.array();
    Factor fa = graph_.factor(alpha);
    Factor fb = graph_.factor(beta);
    fa.scale_along(pa, step);
    fb.scale_along(pb, -step);
    if (std::isfinite(try_factors(alpha, std::move(fa), beta, std::move(fb)))) {
      theta_.free[v] += step.matrix();
      return true;
    }
  }
  return false;
}

bool OptState::weight_step(const OptimizerConfig& cfg) {
  if (tree_.direction != Direction::Upper)
    throw Error(ErrorKind::InvalidArgument, "weight optimisation is for upper bounds");
  refresh();
  bool accepted = false;
  for (VariableId v : tree_.split_variables()) {
    const std::vector<int>& nodes = tree_.var_nodes[v];
    const std::vector<double> saved = tree_.weights;
    const double h = cfg.weight_fd_step;
    Eigen::VectorXd grad(nodes.size());
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      const double w = saved[nodes[r]];
      tree_.weights[nodes[r]] = w * std::exp(h);
      const double up = evaluate();
      tree_.weights[nodes[r]] = w * std::exp(-h);
      const double down = evaluate();
      tree_.weights[nodes[r]] = w;
      grad[r] = (up - down) / (2 * h);
    }
    engine_current_ = false;
    if (!grad.allFinite()) continue;

    double mu = cfg.mu_w;
    bool done = false;
    for (int k = 0; k <= cfg.max_halvings && !done; ++k, mu *= cfg.backtrack) {
      Eigen::VectorXd w(nodes.size());
      for (std::size_t r = 0; r < nodes.size(); ++r)
        w[r] = saved[nodes[r]] * std::exp(-mu * grad[r]);
      w /= w.sum();
      w = w.cwiseMax(cfg.weight_floor);
      w /= w.sum();
      for (std::size_t r = 0; r < nodes.size(); ++r) tree_.weights[nodes[r]] = w[r];
      const double bound = evaluate();
      if (std::isfinite(bound) && bound <= log_bound_) {
        log_bound_ = bound;
        done = true;
      }
    }
    if (done) {
      accepted = true;
    } else {
      tree_.weights = saved;
      engine_current_ = false;
    }
    refresh();
  }
  return accepted;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BoundResult optimize_bound(OptState& state, const OptimizerConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (state.tree().direction != Direction::Upper && (cfg.gauges || cfg.weights || cfg.reparam))
    throw Error(ErrorKind::InvalidArgument, "optimisers keep only upper bounds valid");
  BoundResult result;
  result.method = cfg.method();
  result.direction = state.tree().direction;
  result.trace.push_back(state.log_bound());
  const EliminationOrder order = state.tree().order;
  const bool any = cfg.gauges || cfg.weights || cfg.reparam;
  for (int t = 1; any && t <= cfg.iterations; ++t) {
    if (cfg.gauges)
      for (VariableId v : order) state.gauge_step(v, cfg);
    if (cfg.weights) state.weight_step(cfg);
    if (cfg.reparam)
      for (VariableId v : order) state.reparam_step(v, cfg);
    result.trace.push_back(state.log_bound());
    result.iterations = t;
    if (cfg.stop_tol > 0 && t >= cfg.stop_window) {
      const double past = result.trace[t - cfg.stop_window];
      if (past - state.log_bound() <= cfg.stop_tol * std::max(1.0, std::abs(past))) break;
    }
  }
  result.log_bound = state.log_bound();
  result.wall_time = seconds_since(start);
  return result;
}

BoundResult optimize_bound(const ForneyGraph& g, const MiniBucketTree& tree,
                           const OptimizerConfig& cfg) {
  OptState state(g, tree);
  return optimize_bound(state, cfg);
}

}  // namespace gmbe
