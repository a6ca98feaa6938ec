#pragma once

#include "gmbe/factor_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace gmbe {

using Matrix = Eigen::MatrixXd;

/// One d x d matrix per (variable, factor) edge of a Forney model. For each
/// variable the edge to its lower-numbered factor is free and the other edge
/// is its conjugate, (G_free^T)^{-1}.
struct GaugeSet {
  std::vector<Matrix> free;       // indexed by variable
  std::vector<Matrix> conjugate;  // indexed by variable

  static GaugeSet identity(const ForneyGraph& g);

  /// Gauge on the edge (v, a); `a` must be adjacent to v.
  const Matrix& on_edge(const ForneyGraph& g, VariableId v, FactorId a) const;
  /// Set the free gauge of v and recompute its conjugate.
  void set_free(VariableId v, const Matrix& G);
};

/// Per-edge log-domain rescalings with theta_{v,free} + theta_{v,conj} = 0.
struct Reparam {
  std::vector<Eigen::VectorXd> free;  // theta on the free edge, indexed by variable

  static Reparam zero(const ForneyGraph& g);
};

struct ConstraintReport {
  std::vector<double> deviation;  // per variable: max |G_a^T G_b - I|
  double max_deviation = 0.0;
};

/// f^(x) = sum_{x'} f(x') prod_k G_k(x_k, x'_k), one matrix per scope position.
Factor gauge_transform_factor(const Factor& f, const std::vector<Matrix>& gauges);

/// Transform along a single scope position (the other gauges are identity).
Factor gauge_transform_axis(const Factor& f, int pos, const Matrix& G);

/// Max-abs deviation of A^T B from the identity.
double conjugacy_deviation(const Matrix& A, const Matrix& B);

ConstraintReport check_constraint(const ForneyGraph& g, const GaugeSet& gs);

/// Transform every factor; requires check_constraint deviation < 1e-8.
ForneyGraph apply_gauges(const ForneyGraph& g, const GaugeSet& gs);

/// Free edges I + scale * U(-1, 1) with condition number < 1e3 (at most 100
/// draws per edge), conjugates by explicit inversion.
GaugeSet random_valid_gauges(const ForneyGraph& g, double scale, std::uint64_t seed);

/// Diagonal gauges diag(exp(theta)).
GaugeSet reparam_as_gauges(const ForneyGraph& g, const Reparam& r);

/// Conjugate partner (G^T)^{-1}; throws SingularMatrix when the 2-norm condition
/// number exceeds `max_condition`.
Matrix conjugate_of(const Matrix& G, double max_condition = 1e8);
double condition_number(const Matrix& G);

/// Debug dump: one line per edge, "v factor d entries..." (row-major).
void write_gauges(std::ostream& os, const ForneyGraph& g, const GaugeSet& gs);

}  // namespace gmbe
