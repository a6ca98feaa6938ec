#pragma once

#include "gmbe/elimination.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <vector>

namespace gmbe {

struct OracleBudget {
  std::int64_t max_states = std::int64_t{1} << 20;
};

/// Z by enumerating every joint assignment. Throws BudgetExceeded.
SignedLog brute_z(const FactorGraph& g, OracleBudget budget = {});

/// The nested weighted sum over every assignment of the split variables,
/// without any mini-bucket factorisation.
double brute_wmbe(const FactorGraph& g, const MiniBucketTree& tree, OracleBudget budget = {});

/// Factor marginals of the chain-rule distribution q over the split
/// variables, one array per factor in the factor's own entry order.
std::vector<Eigen::ArrayXd> brute_aux_marginals(const FactorGraph& g, const MiniBucketTree& tree,
                                                OracleBudget budget = {});

/// Central differences (fn(x + h e_i) - fn(x - h e_i)) / 2h.
/// Throws NonFiniteEvaluation if fn is not finite at a probe.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double h);

}  // namespace gmbe
