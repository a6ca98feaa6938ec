#pragma once

#include "gmbe/signed_log.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace gmbe {

using VariableId = int;
using FactorId = int;

using SignArray = Eigen::Array<signed char, Eigen::Dynamic, 1>;

/// Dense table over an ordered tuple of discrete variables.
///
/// Entries are stored row-major in scope order (the last scope variable varies
/// fastest) as a sign and a log-magnitude, so negative entries produced by
/// gauge transformations and very large or small magnitudes are representable.
class Factor {
 public:
  Factor() = default;
  Factor(std::vector<VariableId> scope, std::vector<int> cards, Eigen::ArrayXd log_abs,
         SignArray sign);

  static Factor from_linear(std::vector<VariableId> scope, std::vector<int> cards,
                            const Eigen::ArrayXd& values);
  static Factor ones(std::vector<VariableId> scope, std::vector<int> cards);
  static Factor from_log(std::vector<VariableId> scope, std::vector<int> cards,
                         const Eigen::ArrayXd& log_values);

  const std::vector<VariableId>& scope() const { return scope_; }
  const std::vector<int>& cards() const { return cards_; }
  const Eigen::ArrayXd& log_abs() const { return log_abs_; }
  const SignArray& sign() const { return sign_; }

  int arity() const { return static_cast<int>(scope_.size()); }
  Eigen::Index size() const { return log_abs_.size(); }

  /// Position of `v` in the scope, or -1.
  int position(VariableId v) const;
  /// Distance between consecutive values of the scope variable at `pos`.
  Eigen::Index stride(int pos) const;

  Eigen::Index index(std::span<const int> assignment) const;
  void unravel(Eigen::Index index, std::span<int> assignment) const;

  double value(std::span<const int> assignment) const;
  SignedLog entry(Eigen::Index i) const { return {sign_[i], log_abs_[i]}; }

  Eigen::ArrayXd to_linear() const;
  bool has_negative() const { return (sign_ < 0).any(); }

  /// Multiply every entry by exp(log_scale(x_v)) along scope position `pos`.
  void scale_along(int pos, const Eigen::ArrayXd& log_scale);

  /// Relabel scope variables (same order, same cardinalities).
  void rename(std::vector<VariableId> scope);

 private:
  std::vector<VariableId> scope_;
  std::vector<int> cards_;
  Eigen::ArrayXd log_abs_;
  SignArray sign_;
};

}  // namespace gmbe
