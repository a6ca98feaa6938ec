#include "gmbe/factor_graph.hpp"

#include "gmbe/error.hpp"

#include <algorithm>
#include <string>

namespace gmbe {

FactorGraph::FactorGraph(std::vector<int> cards, std::vector<Factor> factors)
    : cards_(std::move(cards)), factors_(std::move(factors)), adjacency_(cards_.size()) {
  for (FactorId a = 0; a < num_factors(); ++a) {
    const Factor& f = factors_[a];
    for (int k = 0; k < f.arity(); ++k) {
      const VariableId v = f.scope()[k];
      if (v < 0 || v >= num_vars())
        throw Error(ErrorKind::InvalidArgument,
                    "factor " + std::to_string(a) + " references unknown variable " +
                        std::to_string(v));
      if (f.cards()[k] != cards_[v])
        throw Error(ErrorKind::DimensionMismatch,
                    "factor " + std::to_string(a) + " disagrees on cardinality of variable " +
                        std::to_string(v));
      adjacency_[v].push_back(a);
    }
  }
  for (VariableId v = 0; v < num_vars(); ++v) {
    if (adjacency_[v].empty())
      throw Error(ErrorKind::InvalidArgument,
                  "variable " + std::to_string(v) + " appears in no factor");
  }
}

int FactorGraph::max_arity() const {
  int m = 0;
  for (const auto& f : factors_) m = std::max(m, f.arity());
  return m;
}

bool FactorGraph::has_negative() const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [](const Factor& f) { return f.has_negative(); });
}

void FactorGraph::set_factor(FactorId a, Factor f) {
  if (f.scope() != factors_[a].scope() || f.cards() != factors_[a].cards())
    throw Error(ErrorKind::DimensionMismatch, "set_factor must preserve the scope");
  factors_[a] = std::move(f);
}

ForneyGraph validate_forney(FactorGraph g) {
  std::string offenders;
  for (VariableId v = 0; v < g.num_vars(); ++v) {
    if (g.degree(v) != 2) {
      if (!offenders.empty()) offenders += ", ";
      offenders += "(" + std::to_string(v) + ", " + std::to_string(g.degree(v)) + ")";
    }
  }
  if (!offenders.empty())
    throw Error(ErrorKind::DegreeViolation, "variables with degree != 2: " + offenders);
  return ForneyGraph(std::move(g));
}

Factor equality_factor(std::vector<VariableId> scope, int d) {
  std::vector<int> cards(scope.size(), d);
  Eigen::Index n = 1;
  for (int c : cards) n *= c;
  Eigen::ArrayXd values = Eigen::ArrayXd::Zero(n);
  // Diagonal entry x = (s, s, ..., s) sits at s * (1 + d + d^2 + ...).
  Eigen::Index step = 0;
  for (std::size_t k = 0; k < scope.size(); ++k) step = step * d + 1;
  for (int s = 0; s < d; ++s) values[s * step] = 1.0;
  return Factor::from_linear(std::move(scope), std::move(cards), values);
}

ForneyConversion to_forney(const FactorGraph& g) {
  std::vector<int> cards = g.cards();
  std::vector<Factor> factors = g.factors();
  std::map<VariableId, std::vector<VariableId>> copy_map;

  for (VariableId v = 0; v < g.num_vars(); ++v) {
    const auto& nb = g.neighbors(v);
    const int d = g.card(v);
    if (nb.size() == 1) {
      factors.push_back(Factor::ones({v}, {d}));
    } else if (nb.size() > 2) {
      std::vector<VariableId> copies{v};
      for (std::size_t k = 1; k < nb.size(); ++k) {
        const VariableId c = static_cast<VariableId>(cards.size());
        cards.push_back(d);
        copies.push_back(c);
        std::vector<VariableId> scope = factors[nb[k]].scope();
        std::replace(scope.begin(), scope.end(), v, c);
        factors[nb[k]].rename(std::move(scope));
      }
      factors.push_back(equality_factor(copies, d));
      copy_map.emplace(v, std::move(copies));
    }
  }
  return {validate_forney(FactorGraph(std::move(cards), std::move(factors))),
          std::move(copy_map)};
}

}  // namespace gmbe
