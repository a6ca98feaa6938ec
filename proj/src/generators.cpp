#include "gmbe/generators.hpp"

#include "gmbe/error.hpp"
#include "gmbe/rng.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace gmbe {

namespace {

Factor random_log_normal_factor(std::vector<VariableId> scope, int card, double t, Rng& rng) {
  std::vector<int> cards(scope.size(), card);
  Eigen::Index n = 1;
  for (int c : cards) n *= c;
  Eigen::ArrayXd logs(n);
  for (Eigen::Index i = 0; i < n; ++i) logs[i] = rng.normal(0.0, t);
  return Factor::from_log(std::move(scope), std::move(cards), logs);
}

std::vector<std::vector<VariableId>> three_regular_scopes(int num_factors) {
  if (num_factors < 4 || num_factors % 2 != 0)
    throw Error(ErrorKind::OddFactorCount,
                "3-regular model needs an even factor count >= 4, got " +
                    std::to_string(num_factors));
  std::vector<std::vector<VariableId>> scopes(num_factors);
  VariableId next = 0;
  for (int i = 0; i < num_factors; ++i) {
    scopes[i].push_back(next);
    scopes[(i + 1) % num_factors].push_back(next);
    ++next;
  }
  for (int i = 0; i < num_factors / 2; ++i) {
    scopes[i].push_back(next);
    scopes[i + num_factors / 2].push_back(next);
    ++next;
  }
  for (auto& s : scopes) std::sort(s.begin(), s.end());
  return scopes;
}

}  // namespace

FactorGraph gen_ising_grid(int rows, int cols, double t, double field_sigma,
                           std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidArgument, "grid must be at least 1x1");
  if (t < 0 || field_sigma < 0)
    throw Error(ErrorKind::InvalidArgument, "interaction strengths must be non-negative");
  Rng rng(seed);
  const int n = rows * cols;
  std::vector<Factor> factors;
  const double spin[2] = {-1.0, 1.0};
  for (VariableId v = 0; v < n; ++v) {
    const double phi = rng.normal(0.0, field_sigma);
    Eigen::ArrayXd logs(2);
    logs << phi * spin[0], phi * spin[1];
    factors.push_back(Factor::from_log({v}, {2}, logs));
  }
  auto pairwise = [&](VariableId u, VariableId v) {
    const double phi = rng.normal(0.0, t);
    Eigen::ArrayXd logs(4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) logs[2 * a + b] = phi * spin[a] * spin[b];
    factors.push_back(Factor::from_log({u, v}, {2, 2}, logs));
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const VariableId v = r * cols + c;
      if (c + 1 < cols) pairwise(v, v + 1);
      if (r + 1 < rows) pairwise(v, v + cols);
    }
  }
  return FactorGraph(std::vector<int>(n, 2), std::move(factors));
}

ForneyGraph ising_to_forney(const FactorGraph& grid, int rows, int cols) {
  if (rows < 1 || cols < 1 || grid.num_vars() != rows * cols)
    throw Error(ErrorKind::NotAGrid, "variable count does not match the grid shape");
  auto row = [cols](VariableId v) { return v / cols; };
  auto col = [cols](VariableId v) { return v % cols; };
  auto is_even = [](int i, int j) { return ((i + j) % 2 + 2) % 2 == 0; };

  // Even plaquettes keyed by their lower-left corner, in lexicographic order.
  std::map<std::pair<int, int>, std::vector<const Factor*>> owned;
  for (int i = -1; i < rows; ++i)
    for (int j = -1; j < cols; ++j)
      if (is_even(i, j)) owned[{i, j}];

  for (const Factor& f : grid.factors()) {
    if (f.arity() == 1) {
      const int r = row(f.scope()[0]), c = col(f.scope()[0]);
      // The two even plaquettes covering (r, c) have corners (r-1|r, c-1|c);
      // take the lexicographically smaller one.
      std::pair<int, int> owner{99999, 99999};
      for (int i : {r - 1, r})
        for (int j : {c - 1, c})
          if (is_even(i, j)) owner = std::min(owner, std::pair{i, j});
      owned[owner].push_back(&f);
    } else if (f.arity() == 2) {
      const VariableId u = std::min(f.scope()[0], f.scope()[1]);
      const VariableId v = std::max(f.scope()[0], f.scope()[1]);
      const int r = row(u), c = col(u);
      std::pair<int, int> owner;
      if (v == u + 1 && row(v) == r) {
        owner = is_even(r - 1, c) ? std::pair{r - 1, c} : std::pair{r, c};
      } else if (v == u + cols) {
        owner = is_even(r, c - 1) ? std::pair{r, c - 1} : std::pair{r, c};
      } else {
        throw Error(ErrorKind::NotAGrid, "pairwise factor between non-adjacent grid vertices");
      }
      owned[owner].push_back(&f);
    } else {
      throw Error(ErrorKind::NotAGrid, "grid models hold only singleton and pairwise factors");
    }
    for (int k = 0; k < f.arity(); ++k)
      if (grid.card(f.scope()[k]) != 2)
        throw Error(ErrorKind::NotAGrid, "grid spins must be binary");
  }

  std::vector<Factor> factors;
  for (const auto& [corner, members] : owned) {
    const auto [i, j] = corner;
    std::vector<VariableId> scope;
    for (int r : {i, i + 1})
      for (int c : {j, j + 1})
        if (r >= 0 && r < rows && c >= 0 && c < cols) scope.push_back(r * cols + c);
    std::sort(scope.begin(), scope.end());
    if (scope.empty()) continue;
    const std::vector<int> cards(scope.size(), 2);
    Factor out = Factor::ones(scope, cards);
    Eigen::ArrayXd logs = Eigen::ArrayXd::Zero(out.size());
    std::vector<int> x(scope.size());
    for (Eigen::Index idx = 0; idx < out.size(); ++idx) {
      out.unravel(idx, x);
      for (const Factor* f : members) {
        std::vector<int> sub(f->arity());
        for (int k = 0; k < f->arity(); ++k) sub[k] = x[out.position(f->scope()[k])];
        const SignedLog e = f->entry(f->index(sub));
        logs[idx] += e.sign == 0 ? kNegInf : e.log_abs;
      }
    }
    factors.push_back(Factor::from_log(scope, cards, logs));
  }
  return validate_forney(FactorGraph(grid.cards(), std::move(factors)));
}

ForneyGraph gen_forney_3regular(int num_factors, double t, std::uint64_t seed) {
  auto scopes = three_regular_scopes(num_factors);
  Rng rng(seed);
  std::vector<Factor> factors;
  for (auto& s : scopes) factors.push_back(random_log_normal_factor(s, 2, t, rng));
  return validate_forney(FactorGraph(std::vector<int>(num_factors * 3 / 2, 2), std::move(factors)));
}

ForneyGraph gen_symmetric_forney(int num_factors, double t, std::uint64_t seed) {
  auto scopes = three_regular_scopes(num_factors);
  Rng rng(seed);
  std::vector<Factor> factors;
  for (auto& s : scopes) {
    // Flipping every binary argument maps row-major index i to (size - 1 - i).
    const Eigen::Index n = Eigen::Index{1} << s.size();
    Eigen::ArrayXd logs(n);
    for (Eigen::Index i = 0; i < n / 2; ++i) logs[i] = rng.normal(0.0, t);
    for (Eigen::Index i = n / 2; i < n; ++i) logs[i] = logs[n - 1 - i];
    factors.push_back(Factor::from_log(s, std::vector<int>(s.size(), 2), logs));
  }
  return validate_forney(FactorGraph(std::vector<int>(num_factors * 3 / 2, 2), std::move(factors)));
}

ForneyGraph gen_random_forney(int num_factors, int num_vars, int card, double t,
                              std::uint64_t seed) {
  if (num_factors < 2 || num_vars < 1 || card < 1)
    throw Error(ErrorKind::InvalidArgument, "random Forney model needs >= 2 factors");
  Rng rng(seed);
  std::vector<std::vector<VariableId>> scopes(num_factors);
  for (VariableId v = 0; v < num_vars; ++v) {
    const auto a = static_cast<int>(rng.below(num_factors));
    auto b = static_cast<int>(rng.below(num_factors - 1));
    if (b >= a) ++b;
    scopes[a].push_back(v);
    scopes[b].push_back(v);
  }
  std::vector<Factor> factors;
  for (auto& s : scopes) {
    if (s.empty()) continue;
    factors.push_back(random_log_normal_factor(s, card, t, rng));
  }
  return validate_forney(FactorGraph(std::vector<int>(num_vars, card), std::move(factors)));
}

FactorGraph gen_random_factor_graph(int num_vars, int num_factors, int max_arity, int card,
                                    double t, std::uint64_t seed) {
  if (num_vars < 1 || num_factors < 1 || max_arity < 1)
    throw Error(ErrorKind::InvalidArgument, "random factor graph needs positive sizes");
  Rng rng(seed);
  std::vector<std::set<VariableId>> scopes(num_factors);
  std::vector<bool> covered(num_vars, false);
  for (auto& s : scopes) {
    const int arity = 1 + static_cast<int>(rng.below(std::min(max_arity, num_vars)));
    while (static_cast<int>(s.size()) < arity) s.insert(static_cast<VariableId>(rng.below(num_vars)));
    for (VariableId v : s) covered[v] = true;
  }
  for (VariableId v = 0; v < num_vars; ++v)
    if (!covered[v]) scopes.push_back({v});
  std::vector<Factor> factors;
  for (auto& s : scopes)
    factors.push_back(random_log_normal_factor({s.begin(), s.end()}, card, t, rng));
  return FactorGraph(std::vector<int>(num_vars, card), std::move(factors));
}

}  // namespace gmbe
