#pragma once

#include "gmbe/factor_graph.hpp"

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

namespace gmbe {

enum class Direction { Upper, Lower };

const char* to_string(Direction d);

using EliminationOrder = std::vector<VariableId>;

/// Throws InvalidArgument unless `o` is a permutation of the variables.
void check_order(const FactorGraph& g, const EliminationOrder& o);

/// Greedy min-fill on the primal graph, ties broken by smallest variable id.
EliminationOrder default_order(const FactorGraph& g);

/// Largest number of other variables sharing a bucket with the eliminated one.
int induced_width(const FactorGraph& g, const EliminationOrder& o);

/// log of (sum_x |psi(x)|^{1/w})^w. The result is always non-negative, so
/// only its log is returned. Throws ZeroWeight for w == 0.
double log_wsum(const Eigen::ArrayXd& log_abs, double w);

/// Exact signed partition function by bucket elimination.
/// Throws WidthExceeded if a bucket table would exceed `max_entries`.
SignedLog run_be(const FactorGraph& g, const EliminationOrder& o,
                 Eigen::Index max_entries = Eigen::Index{1} << 24);

/// One mini-bucket: the split copy of `var` and everything eliminated with it.
struct MiniBucket {
  VariableId var = -1;
  int copy = 0;                      // r in 0..R_v-1
  std::vector<FactorId> factors;     // original factors placed here
  std::vector<int> children;         // mini-buckets whose message arrives here
  std::vector<VariableId> scope;     // var first, then the message scope
  int parent = -1;                   // receiver of this bucket's message; -1 if scalar
};

/// Elimination order, bucket partition, split-variable bookkeeping and Hölder
/// weights. Nodes are stored in the modified elimination order: the copies of
/// o[0], then the copies of o[1], and so on.
struct MiniBucketTree {
  Direction direction = Direction::Upper;
  int ibound = 0;
  EliminationOrder order;
  std::vector<MiniBucket> nodes;
  std::vector<double> weights;                  // per node
  std::vector<std::vector<int>> var_nodes;      // variable -> its copies (node ids)
  std::vector<int> factor_node;                 // factor -> node that consumes it (-1: constant)
  std::vector<std::vector<int>> factor_copy;    // factor, scope position -> node of that copy

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int copies(VariableId v) const { return static_cast<int>(var_nodes[v].size()); }
  bool has_splits() const;
  std::vector<VariableId> split_variables() const;

  /// Throws InvalidArgument when weights violate the direction's sign pattern
  /// or do not sum to one per variable.
  void check_weights() const;
};

/// Partition buckets into mini-buckets of at most `ibound` variables.
/// Functions enter in arity-descending order (factors before messages, then by
/// id) and go to the first mini-bucket that stays within the bound. Weights
/// start uniform (upper) or as (1 + (R-1)/2, -1/2, ..., -1/2) (lower).
MiniBucketTree build_minibucket_tree(const FactorGraph& g, const EliminationOrder& o, int ibound,
                                     Direction direction = Direction::Upper);

void reset_weights(MiniBucketTree& tree);

struct BoundResult {
  std::string method;
  Direction direction = Direction::Upper;
  double log_bound = 0.0;
  std::vector<double> trace;  // log bound after each outer iteration, trace[0] initial
  int iterations = 0;
  double wall_time = 0.0;     // seconds
};

BoundResult run_wmbe(const FactorGraph& g, const MiniBucketTree& tree);

/// Mini-bucket elimination: the first mini-bucket of each variable is summed,
/// the others are maximised (upper) or minimised (lower).
BoundResult run_mbe(const FactorGraph& g, const MiniBucketTree& tree);

}  // namespace gmbe
