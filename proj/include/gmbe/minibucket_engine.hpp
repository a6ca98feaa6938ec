#pragma once

#include "gmbe/elimination.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace gmbe {

/// Message-passing evaluator for a fixed mini-bucket tree.
///
/// Index maps from each mini-bucket's table to its inputs are built once, so
/// repeated evaluations (changing factor values or weights, never scopes) cost
/// one gather and one reduction per mini-bucket.
///
/// The forward pass evaluates the nested weighted sum and keeps every
/// mini-bucket's table; the backward pass turns them into the auxiliary
/// distribution q: each mini-bucket's conditional of its variable given its
/// message scope, times the marginal handed down from its parent.
class MiniBucketEngine {
 public:
  enum class Reduce { Weighted, Max, Min };

  MiniBucketEngine(const FactorGraph& g, const MiniBucketTree& tree);

  /// log Z_WMBE for the given factor values and weights (|f| is used).
  double forward(const FactorGraph& g, const std::vector<double>& weights,
                 Reduce mode = Reduce::Weighted);

  /// Signed exact elimination; the tree must have no splits.
  SignedLog forward_signed(const FactorGraph& g);

  /// Requires a preceding Weighted forward pass.
  void backward();

  /// q over the factor's scope (row-major in the factor's scope order).
  Eigen::ArrayXd factor_marginal(FactorId a) const;

  /// log of d log Z_WMBE / d|f_a(x)|, with the limits at zero entries taken
  /// per mini-bucket weight (0 for w < 1, finite for w = 1, +inf for w > 1).
  Eigen::ArrayXd factor_log_cavity(const FactorGraph& g, FactorId a) const;

  /// q over a mini-bucket's scope.
  const Eigen::ArrayXd& node_marginal(int k) const { return q_[k]; }

  double last_log_bound() const { return log_bound_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Input {
    bool is_factor;
    int id;                           // factor id or child node id
    std::vector<std::int32_t> map;    // node entry -> input entry
  };
  struct Node {
    int d = 1;                        // cardinality of the eliminated variable
    bool later_copy = false;          // not the first copy of its variable
    Eigen::Index msg_size = 1;
    int parent = -1;
    int parent_slot = -1;             // index into parent's inputs
    std::vector<Input> inputs;
  };

  void gather(const FactorGraph& g, int k, Eigen::ArrayXd& joint, int skip_slot = -1) const;

  std::vector<Node> nodes_;
  std::vector<int> factor_slot_;       // factor -> slot within its node
  std::vector<int> factor_node_;
  std::vector<FactorId> constants_;    // arity-0 factors
  std::vector<double> weights_;
  std::vector<Eigen::ArrayXd> joint_;  // per node, log |product of inputs|
  std::vector<Eigen::ArrayXd> msg_;    // per node, log message
  std::vector<Eigen::ArrayXd> q_;      // per node, linear
  std::vector<Eigen::ArrayXd> parent_marginal_;
  double log_bound_ = 0.0;
  bool forward_valid_ = false;
};

}  // namespace gmbe
