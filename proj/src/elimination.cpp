#include "gmbe/elimination.hpp"

#include "gmbe/error.hpp"
#include "gmbe/minibucket_engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <string>

namespace gmbe {

const char* to_string(Direction d) { return d == Direction::Upper ? "upper" : "lower"; }

void check_order(const FactorGraph& g, const EliminationOrder& o) {
  if (static_cast<int>(o.size()) != g.num_vars())
    throw Error(ErrorKind::InvalidArgument, "elimination order has wrong length");
  std::vector<char> seen(g.num_vars(), 0);
  for (VariableId v : o) {
    if (v < 0 || v >= g.num_vars() || seen[v])
      throw Error(ErrorKind::InvalidArgument, "elimination order is not a permutation");
    seen[v] = 1;
  }
}

namespace {

std::vector<std::set<VariableId>> primal_graph(const FactorGraph& g) {
  std::vector<std::set<VariableId>> adj(g.num_vars());
  for (const Factor& f : g.factors())
    for (VariableId u : f.scope())
      for (VariableId v : f.scope())
        if (u != v) adj[u].insert(v);
  return adj;
}

std::size_t fill_in(const std::vector<std::set<VariableId>>& adj, VariableId v) {
  std::size_t fill = 0;
  for (auto i = adj[v].begin(); i != adj[v].end(); ++i)
    for (auto j = std::next(i); j != adj[v].end(); ++j)
      if (!adj[*i].count(*j)) ++fill;
  return fill;
}

void eliminate(std::vector<std::set<VariableId>>& adj, VariableId v) {
  for (VariableId a : adj[v]) {
    adj[a].erase(v);
    for (VariableId b : adj[v])
      if (a != b) adj[a].insert(b);
  }
  adj[v].clear();
}

}  // namespace

EliminationOrder default_order(const FactorGraph& g) {
  auto adj = primal_graph(g);
  const int n = g.num_vars();
  std::vector<std::size_t> fill(n);
  for (VariableId v = 0; v < n; ++v) fill[v] = fill_in(adj, v);
  std::vector<char> done(n, 0);
  EliminationOrder order;
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    VariableId best = -1;
    for (VariableId v = 0; v < n; ++v)
      if (!done[v] && (best < 0 || fill[v] < fill[best])) best = v;
    // Only the neighbourhood of `best` and its neighbours' neighbours can
    // change their fill counts.
    std::set<VariableId> touched;
    for (VariableId a : adj[best]) {
      touched.insert(a);
      for (VariableId b : adj[a]) touched.insert(b);
    }
    eliminate(adj, best);
    done[best] = 1;
    order.push_back(best);
    for (VariableId v : touched)
      if (!done[v]) fill[v] = fill_in(adj, v);
  }
  return order;
}

int induced_width(const FactorGraph& g, const EliminationOrder& o) {
  check_order(g, o);
  auto adj = primal_graph(g);
  int width = 0;
  for (VariableId v : o) {
    width = std::max(width, static_cast<int>(adj[v].size()));
    eliminate(adj, v);
  }
  return width;
}

double log_wsum(const Eigen::ArrayXd& log_abs, double w) {
  if (w == 0.0) throw Error(ErrorKind::ZeroWeight, "Hölder weight must be non-zero");
  if (w == 1.0) return logsumexp(log_abs);
  const double inner = logsumexp(log_abs / w);
  // w < 0 with a zero entry: the inner sum is +inf and the result is 0.
  return w * inner;
}

bool MiniBucketTree::has_splits() const {
  return std::any_of(var_nodes.begin(), var_nodes.end(),
                     [](const auto& n) { return n.size() > 1; });
}

std::vector<VariableId> MiniBucketTree::split_variables() const {
  std::vector<VariableId> out;
  for (VariableId v : order)
    if (var_nodes[v].size() > 1) out.push_back(v);
  return out;
}

void MiniBucketTree::check_weights() const {
  for (VariableId v = 0; v < static_cast<VariableId>(var_nodes.size()); ++v) {
    double sum = 0.0;
    int positive = 0;
    for (int k : var_nodes[v]) {
      const double w = weights[k];
      if (w == 0.0 || !std::isfinite(w))
        throw Error(ErrorKind::InvalidArgument, "Hölder weights must be finite and non-zero");
      sum += w;
      if (w > 0) ++positive;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw Error(ErrorKind::InvalidArgument,
                  "weights of variable " + std::to_string(v) + " sum to " + std::to_string(sum));
    const int r = static_cast<int>(var_nodes[v].size());
    if (direction == Direction::Upper && positive != r)
      throw Error(ErrorKind::InvalidArgument, "upper bounds need all weights positive");
    if (direction == Direction::Lower && positive != 1)
      throw Error(ErrorKind::InvalidArgument, "lower bounds need exactly one positive weight");
  }
}

void reset_weights(MiniBucketTree& tree) {
  tree.weights.assign(tree.nodes.size(), 1.0);
  for (const auto& copies : tree.var_nodes) {
    const int r = static_cast<int>(copies.size());
    for (int c = 0; c < r; ++c) {
      double w;
      if (tree.direction == Direction::Upper) {
        w = 1.0 / r;
      } else {
        w = c == 0 ? 1.0 + 0.5 * (r - 1) : -0.5;
      }
      tree.weights[copies[c]] = w;
    }
  }
}

MiniBucketTree build_minibucket_tree(const FactorGraph& g, const EliminationOrder& o, int ibound,
                                     Direction direction) {
  check_order(g, o);
  for (FactorId a = 0; a < g.num_factors(); ++a)
    if (g.factor(a).arity() > ibound)
      throw Error(ErrorKind::IboundTooSmall, "factor " + std::to_string(a) + " has arity " +
                                                 std::to_string(g.factor(a).arity()) +
                                                 " > ibound " + std::to_string(ibound));

  MiniBucketTree tree;
  tree.direction = direction;
  tree.ibound = ibound;
  tree.order = o;
  tree.var_nodes.resize(g.num_vars());
  tree.factor_node.assign(g.num_factors(), -1);
  tree.factor_copy.resize(g.num_factors());
  for (FactorId a = 0; a < g.num_factors(); ++a)
    tree.factor_copy[a].assign(g.factor(a).arity(), -1);

  std::vector<int> pos(g.num_vars());
  for (int i = 0; i < g.num_vars(); ++i) pos[o[i]] = i;
  auto by_position = [&](VariableId a, VariableId b) { return pos[a] < pos[b]; };

  // A pending function: an original factor or the message of a mini-bucket.
  struct Function {
    bool is_factor;
    int id;
    std::vector<VariableId> scope;   // sorted by elimination position
    std::vector<FactorId> contained; // original factors folded into it
  };
  std::vector<std::vector<Function>> pending(g.num_vars());
  auto place = [&](Function fn) {
    if (fn.scope.empty()) return false;
    pending[fn.scope.front()].push_back(std::move(fn));
    return true;
  };
  for (FactorId a = 0; a < g.num_factors(); ++a) {
    std::vector<VariableId> s = g.factor(a).scope();
    std::sort(s.begin(), s.end(), by_position);
    place(Function{true, a, s, {a}});
  }

  for (VariableId v : o) {
    auto bucket = std::move(pending[v]);
    std::stable_sort(bucket.begin(), bucket.end(), [](const Function& x, const Function& y) {
      if (x.scope.size() != y.scope.size()) return x.scope.size() > y.scope.size();
      if (x.is_factor != y.is_factor) return x.is_factor;
      return x.id < y.id;
    });
    std::vector<std::vector<Function>> groups;
    std::vector<std::set<VariableId>> group_vars;
    for (auto& fn : bucket) {
      bool placed = false;
      for (std::size_t r = 0; r < groups.size() && !placed; ++r) {
        std::set<VariableId> merged = group_vars[r];
        merged.insert(fn.scope.begin(), fn.scope.end());
        if (static_cast<int>(merged.size()) <= ibound) {
          group_vars[r] = std::move(merged);
          groups[r].push_back(std::move(fn));
          placed = true;
        }
      }
      if (!placed) {
        group_vars.emplace_back(fn.scope.begin(), fn.scope.end());
        groups.emplace_back();
        groups.back().push_back(std::move(fn));
      }
    }
    if (groups.empty()) {
      // Unreachable for valid graphs (every variable has a factor).
      groups.emplace_back();
      group_vars.push_back({v});
    }

    for (std::size_t r = 0; r < groups.size(); ++r) {
      const int k = tree.num_nodes();
      MiniBucket node;
      node.var = v;
      node.copy = static_cast<int>(r);
      std::vector<VariableId> rest;
      for (VariableId u : group_vars[r])
        if (u != v) rest.push_back(u);
      std::sort(rest.begin(), rest.end(), by_position);
      node.scope.push_back(v);
      node.scope.insert(node.scope.end(), rest.begin(), rest.end());

      std::vector<FactorId> contained;
      for (auto& fn : groups[r]) {
        if (fn.is_factor) {
          node.factors.push_back(fn.id);
          tree.factor_node[fn.id] = k;
        } else {
          node.children.push_back(fn.id);
          tree.nodes[fn.id].parent = k;
        }
        contained.insert(contained.end(), fn.contained.begin(), fn.contained.end());
      }
      for (FactorId a : contained) {
        const int p = g.factor(a).position(v);
        if (p >= 0) tree.factor_copy[a][p] = k;
      }
      tree.nodes.push_back(std::move(node));
      tree.var_nodes[v].push_back(k);
      place(Function{false, k, rest, std::move(contained)});
    }
  }
  reset_weights(tree);
  return tree;
}

SignedLog run_be(const FactorGraph& g, const EliminationOrder& o, Eigen::Index max_entries) {
  const MiniBucketTree tree =
      build_minibucket_tree(g, o, std::numeric_limits<int>::max(), Direction::Upper);
  for (const auto& node : tree.nodes) {
    Eigen::Index entries = 1;
    for (VariableId u : node.scope) {
      entries *= g.card(u);
      if (entries > max_entries)
        throw Error(ErrorKind::WidthExceeded,
                    "bucket of variable " + std::to_string(node.var) + " needs more than " +
                        std::to_string(max_entries) + " entries (width >= " +
                        std::to_string(node.scope.size() - 1) + ")");
    }
  }
  MiniBucketEngine engine(g, tree);
  return engine.forward_signed(g);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

BoundResult run_wmbe(const FactorGraph& g, const MiniBucketTree& tree) {
  const auto start = std::chrono::steady_clock::now();
  tree.check_weights();
  MiniBucketEngine engine(g, tree);
  BoundResult result;
  result.method = "wmbe";
  result.direction = tree.direction;
  result.log_bound = engine.forward(g, tree.weights);
  result.trace = {result.log_bound};
  result.wall_time = seconds_since(start);
  return result;
}

BoundResult run_mbe(const FactorGraph& g, const MiniBucketTree& tree) {
  const auto start = std::chrono::steady_clock::now();
  MiniBucketEngine engine(g, tree);
  BoundResult result;
  result.method = "mbe";
  result.direction = tree.direction;
  result.log_bound = engine.forward(g, tree.weights,
                                    tree.direction == Direction::Upper
                                        ? MiniBucketEngine::Reduce::Max
                                        : MiniBucketEngine::Reduce::Min);
  result.trace = {result.log_bound};
  result.wall_time = seconds_since(start);
  return result;
}

}  // namespace gmbe
