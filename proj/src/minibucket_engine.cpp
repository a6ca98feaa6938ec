#include "gmbe/minibucket_engine.hpp"

#include "gmbe/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gmbe {

namespace {

// Map every entry of a table over `outer` (row-major) to the entry of a table
// over `inner` (row-major, a subset of `outer`) with the same assignment.
std::vector<std::int32_t> build_map(const std::vector<VariableId>& outer,
                                    const std::vector<int>& outer_cards,
                                    const std::vector<VariableId>& inner,
                                    const std::vector<int>& inner_cards) {
  const int s = static_cast<int>(outer.size());
  std::vector<std::int64_t> step(s, 0);
  std::int64_t stride = 1;
  for (int t = static_cast<int>(inner.size()) - 1; t >= 0; --t) {
    int p = 0;
    while (p < s && outer[p] != inner[t]) ++p;
    if (p == s) throw Error(ErrorKind::InvalidArgument, "input scope not inside mini-bucket");
    step[p] = stride;
    stride *= inner_cards[t];
  }
  std::int64_t n = 1;
  for (int c : outer_cards) n *= c;
  std::vector<std::int32_t> map(n);
  std::vector<int> x(s, 0);
  std::int64_t idx = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    map[i] = static_cast<std::int32_t>(idx);
    for (int p = s - 1; p >= 0; --p) {
      if (++x[p] < outer_cards[p]) {
        idx += step[p];
        break;
      }
      idx -= step[p] * (outer_cards[p] - 1);
      x[p] = 0;
    }
  }
  return map;
}

}  // namespace

MiniBucketEngine::MiniBucketEngine(const FactorGraph& g, const MiniBucketTree& tree)
    : nodes_(tree.nodes.size()),
      factor_slot_(g.num_factors(), -1),
      factor_node_(tree.factor_node),
      weights_(tree.weights),
      joint_(tree.nodes.size()),
      msg_(tree.nodes.size()),
      q_(tree.nodes.size()),
      parent_marginal_(tree.nodes.size()) {
  if (static_cast<int>(tree.factor_node.size()) != g.num_factors())
    throw Error(ErrorKind::InvalidArgument, "mini-bucket tree was built for another model");
  for (FactorId a = 0; a < g.num_factors(); ++a)
    if (tree.factor_node[a] < 0) constants_.push_back(a);

  for (int k = 0; k < tree.num_nodes(); ++k) {
    const MiniBucket& mb = tree.nodes[k];
    Node& node = nodes_[k];
    std::vector<int> cards;
    for (VariableId u : mb.scope) cards.push_back(g.card(u));
    node.d = cards.front();
    node.later_copy = mb.copy > 0;
    node.msg_size = 1;
    for (std::size_t p = 1; p < cards.size(); ++p) node.msg_size *= cards[p];
    for (FactorId a : mb.factors) {
      const Factor& f = g.factor(a);
      factor_slot_[a] = static_cast<int>(node.inputs.size());
      node.inputs.push_back({true, a, build_map(mb.scope, cards, f.scope(), f.cards())});
    }
    for (int c : mb.children) {
      const MiniBucket& child = tree.nodes[c];
      std::vector<VariableId> cs(child.scope.begin() + 1, child.scope.end());
      std::vector<int> cc;
      for (VariableId u : cs) cc.push_back(g.card(u));
      nodes_[c].parent = k;
      nodes_[c].parent_slot = static_cast<int>(node.inputs.size());
      node.inputs.push_back({false, c, build_map(mb.scope, cards, cs, cc)});
    }
    joint_[k].resize(static_cast<Eigen::Index>(node.d) * node.msg_size);
  }
}

void MiniBucketEngine::gather(const FactorGraph& g, int k, Eigen::ArrayXd& joint,
                              int skip_slot) const {
  const Node& node = nodes_[k];
  joint.setZero(static_cast<Eigen::Index>(node.d) * node.msg_size);
  for (int s = 0; s < static_cast<int>(node.inputs.size()); ++s) {
    if (s == skip_slot) continue;
    const Input& in = node.inputs[s];
    const Eigen::ArrayXd& table = in.is_factor ? g.factor(in.id).log_abs() : msg_[in.id];
    const std::int32_t* map = in.map.data();
    for (Eigen::Index i = 0; i < joint.size(); ++i) joint[i] += table[map[i]];
  }
}

double MiniBucketEngine::forward(const FactorGraph& g, const std::vector<double>& weights,
                                 Reduce mode) {
  if (weights.size() != nodes_.size())
    throw Error(ErrorKind::InvalidArgument, "one weight per mini-bucket required");
  weights_ = weights;
  double total = 0.0;
  for (FactorId a : constants_) total += g.factor(a).log_abs()[0];
  for (int k = 0; k < num_nodes(); ++k) {
    const Node& node = nodes_[k];
    gather(g, k, joint_[k]);
    const Eigen::ArrayXd& joint = joint_[k];
    Eigen::ArrayXd& msg = msg_[k];
    msg.resize(node.msg_size);
    const double w = weights_[k];
    const bool first_copy = !node.later_copy;
    for (Eigen::Index m = 0; m < node.msg_size; ++m) {
      double out;
      if (mode == Reduce::Weighted || first_copy) {
        const double ww = mode == Reduce::Weighted ? w : 1.0;
        if (ww == 0.0) throw Error(ErrorKind::ZeroWeight, "Hölder weight must be non-zero");
        double mx = kNegInf;
        bool pos_inf = false;
        for (int x = 0; x < node.d; ++x) {
          const double a = joint[x * node.msg_size + m] / ww;
          if (a == kPosInf) pos_inf = true;
          mx = std::max(mx, a);
        }
        if (pos_inf || mx == kNegInf) {
          out = ww * mx;
        } else {
          double s = 0.0;
          for (int x = 0; x < node.d; ++x) s += std::exp(joint[x * node.msg_size + m] / ww - mx);
          out = ww * (mx + std::log(s));
        }
      } else if (mode == Reduce::Max) {
        out = kNegInf;
        for (int x = 0; x < node.d; ++x) out = std::max(out, joint[x * node.msg_size + m]);
      } else {
        out = kPosInf;
        for (int x = 0; x < node.d; ++x) out = std::min(out, joint[x * node.msg_size + m]);
      }
      msg[m] = out;
    }
    if (node.parent < 0) total += msg[0];
  }
  log_bound_ = total;
  forward_valid_ = mode == Reduce::Weighted;
  return total;
}


SignedLog MiniBucketEngine::forward_signed(const FactorGraph& g) {
  SignedLog total{1, 0.0};
  auto mul = [](SignedLog a, SignedLog b) -> SignedLog {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
  };
  for (FactorId a : constants_) total = mul(total, g.factor(a).entry(0));
  std::vector<SignArray> msg_sign(nodes_.size());
  for (int k = 0; k < num_nodes(); ++k) {
    const Node& node = nodes_[k];
    if (node.later_copy) throw Error(ErrorKind::InvalidArgument, "signed elimination needs a tree without splits");
    const Eigen::Index n = static_cast<Eigen::Index>(node.d) * node.msg_size;
    Eigen::ArrayXd log_abs = Eigen::ArrayXd::Zero(n);
    SignArray sign = SignArray::Ones(n);
    for (const Input& in : node.inputs) {
      const Eigen::ArrayXd& t = in.is_factor ? g.factor(in.id).log_abs() : msg_[in.id];
      const SignArray& ts = in.is_factor ? g.factor(in.id).sign() : msg_sign[in.id];
      for (Eigen::Index i = 0; i < n; ++i) {
        log_abs[i] += t[in.map[i]];
        sign[i] *= ts[in.map[i]];
      }
    }
    Eigen::ArrayXd& msg = msg_[k];
    msg.resize(node.msg_size);
    msg_sign[k].resize(node.msg_size);
    for (Eigen::Index m = 0; m < node.msg_size; ++m) {
      // Positive and negative parts summed separately around the largest term.
      double mx = kNegInf;
      for (int x = 0; x < node.d; ++x) {
        const Eigen::Index i = x * node.msg_size + m;
        if (sign[i] != 0) mx = std::max(mx, log_abs[i]);
      }
      double pos = 0.0, neg = 0.0;
      if (mx != kNegInf) {
        for (int x = 0; x < node.d; ++x) {
          const Eigen::Index i = x * node.msg_size + m;
          if (sign[i] > 0) pos += std::exp(log_abs[i] - mx);
          if (sign[i] < 0) neg += std::exp(log_abs[i] - mx);
        }
      }
      const double diff = pos - neg;
      msg_sign[k][m] = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
      msg[m] = diff == 0 ? kNegInf : mx + std::log(std::abs(diff));
    }
    if (node.parent < 0) total = mul(total, {msg_sign[k][0], msg[0]});
  }
  forward_valid_ = false;
  return total;
}

void MiniBucketEngine::backward() {
  if (!forward_valid_)
    throw Error(ErrorKind::InvalidArgument, "backward pass needs a weighted forward pass");
  for (int k = num_nodes() - 1; k >= 0; --k) {
    const Node& node = nodes_[k];
    const double w = weights_[k];
    const Eigen::ArrayXd& joint = joint_[k];
    Eigen::ArrayXd& q = q_[k];
    q.resize(joint.size());
    if (node.parent < 0) parent_marginal_[k] = Eigen::ArrayXd::Ones(1);
    const Eigen::ArrayXd& pm = parent_marginal_[k];
    for (Eigen::Index m = 0; m < node.msg_size; ++m) {
      // q(x | msg scope) proportional to |joint|^{1/w}; +inf terms (a zero
      // entry under a negative weight) take all of the mass.
      double mx = kNegInf;
      int infinite = 0;
      for (int x = 0; x < node.d; ++x) {
        const double a = joint[x * node.msg_size + m] / w;
        if (a == kPosInf) ++infinite;
        mx = std::max(mx, a);
      }
      if (pm[m] == 0.0 || mx == kNegInf) {
        for (int x = 0; x < node.d; ++x) q[x * node.msg_size + m] = 0.0;
        continue;
      }
      if (infinite > 0) {
        for (int x = 0; x < node.d; ++x) {
          const Eigen::Index i = x * node.msg_size + m;
          q[i] = joint[i] / w == kPosInf ? pm[m] / infinite : 0.0;
        }
        continue;
      }
      double s = 0.0;
      for (int x = 0; x < node.d; ++x) s += std::exp(joint[x * node.msg_size + m] / w - mx);
      for (int x = 0; x < node.d; ++x) {
        const Eigen::Index i = x * node.msg_size + m;
        q[i] = pm[m] * std::exp(joint[i] / w - mx) / s;
      }
    }
    for (const Input& in : node.inputs) {
      if (in.is_factor) continue;
      Eigen::ArrayXd& child_pm = parent_marginal_[in.id];
      child_pm.setZero(nodes_[in.id].msg_size);
      for (Eigen::Index i = 0; i < q.size(); ++i) child_pm[in.map[i]] += q[i];
    }
  }
}

Eigen::ArrayXd MiniBucketEngine::factor_marginal(FactorId a) const {
  const int k = factor_node_[a];
  if (k < 0) return Eigen::ArrayXd::Ones(1);
  const Input& in = nodes_[k].inputs[factor_slot_[a]];
  Eigen::Index n = 0;
  for (auto idx : in.map) n = std::max<Eigen::Index>(n, idx + 1);
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = 0; i < q_[k].size(); ++i) out[in.map[i]] += q_[k][i];
  return out;
}

Eigen::ArrayXd MiniBucketEngine::factor_log_cavity(const FactorGraph& g, FactorId a) const {
  const Factor& f = g.factor(a);
  Eigen::ArrayXd out = Eigen::ArrayXd::Constant(f.size(), kNegInf);
  const int k = factor_node_[a];
  if (k < 0) return out;
  const Node& node = nodes_[k];
  const int slot = factor_slot_[a];
  const Input& in = node.inputs[slot];
  const double w = weights_[k];
  const double power = 1.0 / w - 1.0;
  Eigen::ArrayXd rest;
  gather(g, k, rest, slot);
  const Eigen::ArrayXd& joint = joint_[k];
  const Eigen::ArrayXd& pm = parent_marginal_[k];
  for (Eigen::Index m = 0; m < node.msg_size; ++m) {
    if (pm[m] == 0.0) continue;
    double mx = kNegInf;
    for (int x = 0; x < node.d; ++x) mx = std::max(mx, joint[x * node.msg_size + m] / w);
    if (mx == kNegInf || mx == kPosInf) continue;
    double s = 0.0;
    for (int x = 0; x < node.d; ++x) s += std::exp(joint[x * node.msg_size + m] / w - mx);
    const double log_norm = mx + std::log(s);
    for (int x = 0; x < node.d; ++x) {
      const Eigen::Index i = x * node.msg_size + m;
      const double l = f.log_abs()[in.map[i]];
      double scaled;
      if (l != kNegInf) {
        scaled = power * l;
      } else if (power == 0.0) {
        scaled = 0.0;
      } else {
        scaled = power > 0 ? kNegInf : kPosInf;
      }
      const double term = std::log(pm[m]) + rest[i] / w + scaled - log_norm;
      out[in.map[i]] = log_add(out[in.map[i]], term);
    }
  }
  return out;
}

}  // namespace gmbe
