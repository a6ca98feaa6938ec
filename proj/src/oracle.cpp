#include "gmbe/oracle.hpp"

#include "gmbe/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gmbe {

namespace {

std::int64_t checked_states(const std::vector<int>& cards, OracleBudget budget) {
  std::int64_t n = 1;
  for (int d : cards) {
    n *= d;
    if (n > budget.max_states)
      throw Error(ErrorKind::BudgetExceeded,
                  "enumeration needs more than " + std::to_string(budget.max_states) + " states");
  }
  return n;
}

// log|prod f| over the split variables (one per mini-bucket), node 0 fastest.
struct SplitTable {
  std::vector<int> cards;
  Eigen::ArrayXd log_abs;
};

SplitTable split_product(const FactorGraph& g, const MiniBucketTree& tree, OracleBudget budget) {
  SplitTable t;
  for (const auto& node : tree.nodes) t.cards.push_back(g.card(node.var));
  const std::int64_t n = checked_states(t.cards, budget);
  std::vector<std::int64_t> stride(t.cards.size(), 1);
  for (std::size_t k = 1; k < stride.size(); ++k) stride[k] = stride[k - 1] * t.cards[k - 1];

  t.log_abs = Eigen::ArrayXd::Zero(n);
  std::vector<int> x(t.cards.size(), 0);
  for (FactorId a = 0; a < g.num_factors(); ++a) {
    const Factor& f = g.factor(a);
    const auto& copies = tree.factor_copy[a];
    std::vector<int> fx(f.arity());
    for (std::int64_t i = 0; i < n; ++i) {
      std::int64_t rem = i;
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k] = static_cast<int>(rem % t.cards[k]);
        rem /= t.cards[k];
      }
      for (int p = 0; p < f.arity(); ++p) fx[p] = x[copies[p]];
      t.log_abs[i] += f.log_abs()[f.index(fx)];
    }
  }
  return t;
}

// Weighted log-sum over the fastest axis: a table of size n * d -> n.
Eigen::ArrayXd reduce_fastest(const Eigen::ArrayXd& table, int d, double w) {
  const Eigen::Index n = table.size() / d;
  Eigen::ArrayXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = log_wsum(table.segment(i * d, d), w);
  return out;
}

}  // namespace

SignedLog brute_z(const FactorGraph& g, OracleBudget budget) {
  const std::int64_t n = checked_states(g.cards(), budget);
  std::vector<int> x(g.num_vars(), 0);
  std::vector<int> fx;
  auto term = [&](std::int64_t i, int& sign) {
    std::int64_t rem = i;
    for (int v = g.num_vars() - 1; v >= 0; --v) {
      x[v] = static_cast<int>(rem % g.card(v));
      rem /= g.card(v);
    }
    double l = 0.0;
    sign = 1;
    for (const Factor& f : g.factors()) {
      fx.resize(f.arity());
      for (int p = 0; p < f.arity(); ++p) fx[p] = x[f.scope()[p]];
      const Eigen::Index idx = f.index(fx);
      sign *= f.sign()[idx];
      if (sign == 0) return kNegInf;
      l += f.log_abs()[idx];
    }
    return l;
  };

  double mx = kNegInf;
  int sign = 0;
  for (std::int64_t i = 0; i < n; ++i) mx = std::max(mx, term(i, sign));
  if (mx == kNegInf) return {};

  // Kahan summation of the scaled terms.
  double sum = 0.0, carry = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double l = term(i, sign);
    if (sign == 0) continue;
    const double y = sign * std::exp(l - mx) - carry;
    const double s = sum + y;
    carry = (s - sum) - y;
    sum = s;
  }
  return SignedLog{sum > 0 ? 1 : (sum < 0 ? -1 : 0),
                   sum == 0 ? kNegInf : mx + std::log(std::abs(sum))};
}

double brute_wmbe(const FactorGraph& g, const MiniBucketTree& tree, OracleBudget budget) {
  SplitTable t = split_product(g, tree, budget);
  Eigen::ArrayXd table = std::move(t.log_abs);
  for (int k = 0; k < tree.num_nodes(); ++k) table = reduce_fastest(table, t.cards[k], tree.weights[k]);
  return table[0];
}

std::vector<Eigen::ArrayXd> brute_aux_marginals(const FactorGraph& g, const MiniBucketTree& tree,
                                                OracleBudget budget) {
  SplitTable t = split_product(g, tree, budget);
  const int K = tree.num_nodes();
  // levels[k] is the table before eliminating node k.
  std::vector<Eigen::ArrayXd> levels{t.log_abs};
  for (int k = 0; k < K; ++k) levels.push_back(reduce_fastest(levels.back(), t.cards[k], tree.weights[k]));

  const std::int64_t n = t.log_abs.size();
  std::vector<Eigen::ArrayXd> out;
  for (const Factor& f : g.factors()) out.push_back(Eigen::ArrayXd::Zero(f.size()));
  std::vector<int> x(K);
  for (std::int64_t i = 0; i < n; ++i) {
    // q(x) = prod_k (Z_k(x_{k:}) / Z_{k+1}(x_{k+1:}))^{1/w_k}
    double log_q = 0.0;
    std::int64_t idx = i;
    for (int k = 0; k < K; ++k) {
      x[k] = static_cast<int>(idx % t.cards[k]);
      const std::int64_t next = idx / t.cards[k];
      const double num = levels[k][idx], den = levels[k + 1][next];
      log_q += (num - den) / tree.weights[k];
      idx = next;
    }
    if (!std::isfinite(log_q)) continue;
    const double q = std::exp(log_q);
    for (FactorId a = 0; a < g.num_factors(); ++a) {
      const Factor& f = g.factor(a);
      std::vector<int> fx(f.arity());
      for (int p = 0; p < f.arity(); ++p) fx[p] = x[tree.factor_copy[a][p]];
      out[a][f.index(fx)] += q;
    }
  }
  return out;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = fn(probe);
    probe[i] = x[i] - h;
    const double down = fn(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw Error(ErrorKind::NonFiniteEvaluation,
                  "function not finite around coordinate " + std::to_string(i));
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

}  // namespace gmbe
