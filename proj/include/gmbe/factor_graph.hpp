#pragma once

#include "gmbe/factor.hpp"

#include <map>
#include <utility>
#include <vector>

namespace gmbe {

/// Bipartite variable/factor graph with dense factor tables.
class FactorGraph {
 public:
  FactorGraph() = default;
  FactorGraph(std::vector<int> cards, std::vector<Factor> factors);

  int num_vars() const { return static_cast<int>(cards_.size()); }
  int num_factors() const { return static_cast<int>(factors_.size()); }
  int card(VariableId v) const { return cards_[v]; }
  const std::vector<int>& cards() const { return cards_; }

  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(FactorId a) const { return factors_[a]; }

  /// Factors adjacent to `v`, ascending.
  const std::vector<FactorId>& neighbors(VariableId v) const { return adjacency_[v]; }
  int degree(VariableId v) const { return static_cast<int>(adjacency_[v].size()); }

  int max_arity() const;
  bool has_negative() const;

  /// Replace factor values; the scope must be unchanged.
  void set_factor(FactorId a, Factor f);

 private:
  std::vector<int> cards_;
  std::vector<Factor> factors_;
  std::vector<std::vector<FactorId>> adjacency_;
};

/// A factor graph in which every variable touches exactly two factors.
///
/// Only obtainable through `validate_forney`, so holding one is proof that the
/// degree check passed. Factor values may change, scopes may not.
class ForneyGraph : public FactorGraph {
 public:
  ForneyGraph() = default;

  /// The two factors adjacent to `v`; `first` is the edge whose gauge is free.
  std::pair<FactorId, FactorId> edges(VariableId v) const {
    return {neighbors(v)[0], neighbors(v)[1]};
  }

 private:
  explicit ForneyGraph(FactorGraph g) : FactorGraph(std::move(g)) {}
  friend ForneyGraph validate_forney(FactorGraph g);
};

ForneyGraph validate_forney(FactorGraph g);

struct ForneyConversion {
  ForneyGraph graph;
  /// Original variable -> its copies (the first copy keeps the original id).
  /// Only variables that were split appear.
  std::map<VariableId, std::vector<VariableId>> copy_map;
};

/// Equivalent Forney-style model: variables of degree k > 2 are replaced by k
/// copies tied together by an arity-k equality factor; degree-1 variables get
/// a uniform singleton partner.
ForneyConversion to_forney(const FactorGraph& g);

/// Equality factor over `scope` (all cardinalities `d`): 1 on the diagonal.
Factor equality_factor(std::vector<VariableId> scope, int d);

}  // namespace gmbe
