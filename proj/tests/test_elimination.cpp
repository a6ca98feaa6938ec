#include "doctest.h"
#include "fixtures.hpp"

#include "gmbe/elimination.hpp"
#include "gmbe/error.hpp"
#include "gmbe/oracle.hpp"

using namespace gmbe;
using fixtures::rel_err;

TEST_CASE("log_wsum limits") {
  Eigen::ArrayXd l(3);
  l << std::log(1.0), std::log(2.0), std::log(3.0);
  CHECK(log_wsum(l, 1.0) == doctest::Approx(std::log(6.0)));
  // w -> 0+ approaches the max
  CHECK(log_wsum(l, 1e-3) == doctest::Approx(std::log(3.0)).epsilon(1e-2));
  CHECK(log_wsum(l, 0.5) == doctest::Approx(0.5 * std::log(1 + 4 + 9.0)));
  CHECK_THROWS_AS(log_wsum(l, 0.0), Error);
}

TEST_CASE("order and induced width") {
  const FactorGraph g = gen_random_factor_graph(7, 6, 3, 2, 1.0, 4);
  const auto o = default_order(g);
  CHECK_NOTHROW(check_order(g, o));
  EliminationOrder bad = o;
  bad[0] = bad[1];
  CHECK_THROWS_AS(check_order(g, bad), Error);
  CHECK(induced_width(g, o) >= g.max_arity() - 1);
}

TEST_CASE("run_be matches enumeration") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FactorGraph g = gen_random_factor_graph(9, 8, 3, 2 + seed % 2, 1.0, seed);
    const SignedLog be = run_be(g, default_order(g));
    const SignedLog bz = brute_z(g);
    CHECK(be.sign == 1);
    CHECK(rel_err(be.log_abs, bz.log_abs) < 1e-10);
  }
}

TEST_CASE("run_be handles negative entries") {
  Eigen::ArrayXd a(2), b(2);
  a << 1.0, -2.0;
  b << 3.0, 4.0;
  const FactorGraph g({2}, {Factor::from_linear({0}, {2}, a), Factor::from_linear({0}, {2}, b)});
  const SignedLog z = run_be(g, {0});
  CHECK(z.sign == -1);
  CHECK(z.to_linear() == doctest::Approx(-5.0));
}

TEST_CASE("wide bucket is refused") {
  const FactorGraph g = gen_random_factor_graph(12, 4, 6, 2, 1.0, 1);
  CHECK_THROWS_AS(run_be(g, default_order(g), 4), Error);
}

TEST_CASE("ibound below factor arity") {
  const FactorGraph g = gen_random_factor_graph(6, 3, 4, 2, 1.0, 2);
  try {
    build_minibucket_tree(g, default_order(g), g.max_arity() - 1);
    FAIL("expected IboundTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IboundTooSmall);
  }
}

TEST_CASE("mini-bucket tree invariants") {
  const ForneyGraph g = fixtures::small_forney(3, 6, 10);
  const int ibound = g.max_arity();
  const auto tree = build_minibucket_tree(g, default_order(g), ibound);
  CHECK_NOTHROW(tree.check_weights());
  CHECK(tree.has_splits());
  for (VariableId v = 0; v < g.num_vars(); ++v) CHECK(tree.copies(v) <= 2);
  for (const auto& node : tree.nodes) CHECK(static_cast<int>(node.scope.size()) <= ibound);
  std::vector<int> seen(g.num_factors(), 0);
  for (const auto& node : tree.nodes)
    for (FactorId a : node.factors) ++seen[a];
  for (int s : seen) CHECK(s == 1);

  auto lower = build_minibucket_tree(g, default_order(g), ibound, Direction::Lower);
  CHECK_NOTHROW(lower.check_weights());
  for (VariableId v : lower.split_variables()) {
    CHECK(lower.weights[lower.var_nodes[v][0]] == doctest::Approx(1.5));
    CHECK(lower.weights[lower.var_nodes[v][1]] == doctest::Approx(-0.5));
  }
}

TEST_CASE("weighted elimination matches the literal nested sum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FactorGraph g = gen_random_factor_graph(8, 8, 3, 2, 1.0, 100 + seed);
    for (Direction dir : {Direction::Upper, Direction::Lower}) {
      auto tree = build_minibucket_tree(g, default_order(g), g.max_arity(), dir);
      const double fast = run_wmbe(g, tree).log_bound;
      const double slow = brute_wmbe(g, tree);
      CHECK(rel_err(fast, slow) < 1e-10);
      const double z = brute_z(g).log_abs;
      if (dir == Direction::Upper) {
        CHECK(fast >= z - 1e-9);
        CHECK(run_mbe(g, tree).log_bound >= fast - 1e-9);
      } else {
        CHECK(fast <= z + 1e-9);
      }
    }
  }
}

TEST_CASE("no splits collapse to exact") {
  const FactorGraph g = gen_random_factor_graph(8, 7, 3, 2, 1.0, 9);
  const auto o = default_order(g);
  const auto tree = build_minibucket_tree(g, o, induced_width(g, o) + 1);
  CHECK(!tree.has_splits());
  CHECK(rel_err(run_wmbe(g, tree).log_bound, brute_z(g).log_abs) < 1e-10);
  CHECK(rel_err(run_mbe(g, tree).log_bound, brute_z(g).log_abs) < 1e-10);
}
