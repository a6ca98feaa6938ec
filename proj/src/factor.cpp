#include "gmbe/factor.hpp"

#include "gmbe/error.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace gmbe {

namespace {

Eigen::Index table_size(const std::vector<int>& cards) {
  Eigen::Index n = 1;
  for (int c : cards) n *= c;
  return n;
}

}  // namespace

Factor::Factor(std::vector<VariableId> scope, std::vector<int> cards, Eigen::ArrayXd log_abs,
               SignArray sign)
    : scope_(std::move(scope)),
      cards_(std::move(cards)),
      log_abs_(std::move(log_abs)),
      sign_(std::move(sign)) {
  if (scope_.size() != cards_.size())
    throw Error(ErrorKind::DimensionMismatch, "scope and cardinality lengths differ");
  if (std::set<VariableId>(scope_.begin(), scope_.end()).size() != scope_.size())
    throw Error(ErrorKind::InvalidArgument, "duplicate variable in factor scope");
  for (int c : cards_)
    if (c < 1) throw Error(ErrorKind::InvalidArgument, "cardinality must be positive");
  const Eigen::Index n = table_size(cards_);
  if (log_abs_.size() != n || sign_.size() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "table has " + std::to_string(log_abs_.size()) + " entries, scope needs " +
                    std::to_string(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sign_[i] == 0) {
      log_abs_[i] = kNegInf;
    } else if (!std::isfinite(log_abs_[i])) {
      throw Error(ErrorKind::InvalidArgument, "non-zero entry with non-finite log-magnitude");
    }
  }
}

Factor Factor::from_linear(std::vector<VariableId> scope, std::vector<int> cards,
                           const Eigen::ArrayXd& values) {
  SignArray sign(values.size());
  Eigen::ArrayXd log_abs(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]))
      throw Error(ErrorKind::InvalidArgument, "non-finite factor value");
    sign[i] = values[i] > 0 ? 1 : (values[i] < 0 ? -1 : 0);
    log_abs[i] = sign[i] == 0 ? kNegInf : std::log(std::abs(values[i]));
  }
  return Factor(std::move(scope), std::move(cards), std::move(log_abs), std::move(sign));
}

Factor Factor::ones(std::vector<VariableId> scope, std::vector<int> cards) {
  const Eigen::Index n = table_size(cards);
  return Factor(std::move(scope), std::move(cards), Eigen::ArrayXd::Zero(n),
                SignArray::Ones(n));
}

Factor Factor::from_log(std::vector<VariableId> scope, std::vector<int> cards,
                        const Eigen::ArrayXd& log_values) {
  SignArray sign(log_values.size());
  for (Eigen::Index i = 0; i < log_values.size(); ++i)
    sign[i] = log_values[i] == kNegInf ? 0 : 1;
  return Factor(std::move(scope), std::move(cards), log_values, std::move(sign));
}

int Factor::position(VariableId v) const {
  auto it = std::find(scope_.begin(), scope_.end(), v);
  return it == scope_.end() ? -1 : static_cast<int>(it - scope_.begin());
}

Eigen::Index Factor::stride(int pos) const {
  Eigen::Index s = 1;
  for (int k = arity() - 1; k > pos; --k) s *= cards_[k];
  return s;
}

Eigen::Index Factor::index(std::span<const int> assignment) const {
  Eigen::Index idx = 0;
  for (int k = 0; k < arity(); ++k) idx = idx * cards_[k] + assignment[k];
  return idx;
}

void Factor::unravel(Eigen::Index index, std::span<int> assignment) const {
  for (int k = arity() - 1; k >= 0; --k) {
    assignment[k] = static_cast<int>(index % cards_[k]);
    index /= cards_[k];
  }
}

double Factor::value(std::span<const int> assignment) const {
  return entry(index(assignment)).to_linear();
}

Eigen::ArrayXd Factor::to_linear() const {
  Eigen::ArrayXd out(size());
  for (Eigen::Index i = 0; i < size(); ++i) out[i] = entry(i).to_linear();
  return out;
}

void Factor::scale_along(int pos, const Eigen::ArrayXd& log_scale) {
  const Eigen::Index s = stride(pos);
  const int d = cards_[pos];
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (sign_[i] != 0) log_abs_[i] += log_scale[(i / s) % d];
  }
}

void Factor::rename(std::vector<VariableId> scope) {
  if (scope.size() != scope_.size())
    throw Error(ErrorKind::DimensionMismatch, "rename must keep arity");
  scope_ = std::move(scope);
}

}  // namespace gmbe
