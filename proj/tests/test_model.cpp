#include "doctest.h"
#include "fixtures.hpp"

#include "gmbe/elimination.hpp"
#include "gmbe/error.hpp"
#include "gmbe/oracle.hpp"

#include <cmath>

using namespace gmbe;
using fixtures::rel_err;

namespace {

Factor pair_factor(VariableId u, VariableId v, double a, double b, double c, double d) {
  Eigen::ArrayXd t(4);
  t << a, b, c, d;
  return Factor::from_linear({u, v}, {2, 2}, t);
}

}  // namespace

TEST_CASE("factor indexing is row-major with the last variable fastest") {
  Eigen::ArrayXd t(6);
  t << 0, 1, 2, 3, 4, 5;
  const Factor f = Factor::from_linear({3, 7}, {2, 3}, t);
  const int x[] = {1, 2};
  CHECK(f.index(x) == 5);
  CHECK(f.value(x) == doctest::Approx(5.0));
  CHECK(f.stride(0) == 3);
  CHECK(f.stride(1) == 1);
  CHECK(f.sign()[0] == 0);
  CHECK(f.log_abs()[0] == kNegInf);
  CHECK_THROWS_AS(Factor::from_linear({1, 1}, {2, 2}, Eigen::ArrayXd::Ones(4)), Error);
}

TEST_CASE("validate_forney") {
  SUBCASE("two factors sharing one variable") {
    const FactorGraph g({2}, {Factor::ones({0}, {2}), Factor::ones({0}, {2})});
    CHECK_NOTHROW(validate_forney(g));
  }
  SUBCASE("chain") {
    // f_a - x - f_b - y - f_c, with the end factors unary
    const FactorGraph g({2, 2}, {Factor::ones({0}, {2}), pair_factor(0, 1, 1, 2, 3, 4),
                                 Factor::ones({1}, {2})});
    CHECK_NOTHROW(validate_forney(g));
  }
  SUBCASE("star") {
    const FactorGraph g({2}, {Factor::ones({0}, {2}), Factor::ones({0}, {2}), Factor::ones({0}, {2})});
    try {
      validate_forney(g);
      FAIL("expected DegreeViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegreeViolation);
      CHECK(std::string(e.what()).find("(0, 3)") != std::string::npos);
    }
  }
}

TEST_CASE("to_forney") {
  SUBCASE("degree 3 variable") {
    const FactorGraph g({2, 2, 2, 2}, {pair_factor(0, 1, 1, 2, 3, 4), pair_factor(0, 2, 2, 1, 1, 3),
                                       pair_factor(0, 3, 1, 1, 2, 5)});
    const ForneyConversion c = to_forney(g);
    REQUIRE(c.copy_map.count(0) == 1);
    CHECK(c.copy_map.at(0).size() == 3);
    for (VariableId v = 0; v < c.graph.num_vars(); ++v) CHECK(c.graph.degree(v) == 2);
    int equalities = 0;
    for (FactorId a = g.num_factors(); a < c.graph.num_factors(); ++a)
      if (c.graph.factor(a).arity() == 3) ++equalities;
    CHECK(equalities == 1);
    CHECK(rel_err(brute_z(c.graph).log_abs, brute_z(g).log_abs) < 1e-12);
  }
  SUBCASE("already Forney") {
    const ForneyGraph g = fixtures::small_forney(1);
    const ForneyConversion c = to_forney(g);
    CHECK(c.copy_map.empty());
    CHECK(c.graph.num_vars() == g.num_vars());
    CHECK(c.graph.num_factors() == g.num_factors());
    for (FactorId a = 0; a < g.num_factors(); ++a) {
      CHECK(c.graph.factor(a).scope() == g.factor(a).scope());
      CHECK((c.graph.factor(a).log_abs() == g.factor(a).log_abs()).all());
    }
  }
  SUBCASE("random model keeps Z") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const FactorGraph g = gen_random_factor_graph(5, 4, 3, 2, 1.0, seed);
      const ForneyConversion c = to_forney(g);
      CHECK_NOTHROW(validate_forney(c.graph));
      CHECK(std::abs(brute_z(c.graph).log_abs - brute_z(g).log_abs) <
            1e-12 * std::max(1.0, std::abs(brute_z(g).log_abs)));
    }
  }
}

TEST_CASE("equality factor") {
  const Factor eq = equality_factor({0, 1, 2}, 3);
  CHECK(eq.size() == 27);
  for (Eigen::Index i = 0; i < eq.size(); ++i) {
    int x[3];
    eq.unravel(i, x);
    const bool diag = x[0] == x[1] && x[1] == x[2];
    CHECK(eq.sign()[i] == (diag ? 1 : 0));
    if (diag) CHECK(eq.log_abs()[i] == 0.0);
  }
}

TEST_CASE("Ising grid generator") {
  const FactorGraph g = gen_ising_grid(10, 10, 1.0, 0.1, 7);
  CHECK(g.num_vars() == 100);
  int pairs = 0, singles = 0;
  for (const Factor& f : g.factors()) (f.arity() == 2 ? pairs : singles)++;
  CHECK(pairs == 180);
  CHECK(singles == 100);

  const FactorGraph flat = gen_ising_grid(3, 4, 0.0, 0.0, 1);
  CHECK(brute_z(flat).log_abs == doctest::Approx(12 * std::log(2.0)));

  // 1 x 3 chain against a hand enumeration of the 8 states
  const FactorGraph chain = gen_ising_grid(1, 3, 1.0, 0.1, 0);
  double z = 0.0;
  for (int s = 0; s < 8; ++s) {
    const int x[3] = {s >> 2 & 1, s >> 1 & 1, s & 1};
    double p = 1.0;
    for (const Factor& f : chain.factors()) {
      int fx[2];
      for (int k = 0; k < f.arity(); ++k) fx[k] = x[f.scope()[k]];
      p *= f.value(std::span<const int>(fx, f.arity()));
    }
    z += p;
  }
  CHECK(brute_z(chain).to_linear() == doctest::Approx(z).epsilon(1e-12));

  const FactorGraph again = gen_ising_grid(10, 10, 1.0, 0.1, 7);
  for (FactorId a = 0; a < g.num_factors(); ++a)
    CHECK((g.factor(a).log_abs() == again.factor(a).log_abs()).all());
}

TEST_CASE("Ising pairwise factor is exp(phi x_u x_v)") {
  const FactorGraph g = gen_ising_grid(1, 2, 1.0, 0.0, 3);
  const Factor& f = g.factors().back();
  REQUIRE(f.arity() == 2);
  // equal spins share a value, opposite spins get its reciprocal
  CHECK(f.log_abs()[0] == doctest::Approx(f.log_abs()[3]));
  CHECK(f.log_abs()[1] == doctest::Approx(-f.log_abs()[0]));
}

TEST_CASE("Levin-Nave conversion keeps Z") {
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      const FactorGraph grid = gen_ising_grid(n, m, 1.0, 0.5, 10 * n + m);
      const ForneyGraph f = ising_to_forney(grid, n, m);
      CHECK(f.num_vars() == n * m);
      CHECK(f.max_arity() <= 4);
      const double a = brute_z(grid).log_abs, b = brute_z(f).log_abs;
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, std::abs(a)));
    }
  }
  const ForneyGraph f10 = ising_to_forney(gen_ising_grid(10, 10, 1.0, 0.1, 1), 10, 10);
  CHECK(f10.num_factors() == 61);
  CHECK_THROWS_AS(ising_to_forney(gen_ising_grid(3, 3, 1.0, 0.1, 1), 3, 4), Error);
}

TEST_CASE("3-regular Forney generator") {
  const ForneyGraph g = gen_forney_3regular(180, 1.0, 1);
  CHECK(g.num_vars() == 270);
  CHECK(g.num_factors() == 180);
  for (const Factor& f : g.factors()) CHECK(f.arity() == 3);

  const ForneyGraph small = gen_forney_3regular(4, 1.0, 2);
  CHECK(small.num_vars() == 6);
  const SignedLog z = brute_z(small);
  CHECK(z.sign == 1);
  CHECK(std::isfinite(z.log_abs));

  const ForneyGraph flat = gen_forney_3regular(6, 0.0, 5);
  CHECK(brute_z(flat).log_abs == doctest::Approx(9 * std::log(2.0)));

  CHECK_THROWS_AS(gen_forney_3regular(5, 1.0, 1), Error);
  CHECK_THROWS_AS(gen_forney_3regular(2, 1.0, 1), Error);
}

TEST_CASE("symmetric factors are flip invariant") {
  const ForneyGraph g = gen_symmetric_forney(8, 1.0, 3);
  for (const Factor& f : g.factors()) {
    for (Eigen::Index i = 0; i < f.size(); ++i)
      CHECK(f.log_abs()[i] == f.log_abs()[f.size() - 1 - i]);
    const int a[] = {0, 1, 0}, b[] = {1, 0, 1};
    CHECK(f.value(a) == f.value(b));
  }
}

TEST_CASE("generator outputs have a finite positive Z") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const FactorGraph& g :
         {FactorGraph(gen_forney_3regular(8, 1.0, seed)), FactorGraph(gen_symmetric_forney(8, 1.0, seed)),
          FactorGraph(gen_random_forney(6, 12, 2, 1.0, seed)),
          gen_random_factor_graph(12, 8, 3, 2, 1.0, seed), gen_ising_grid(3, 4, 1.0, 0.1, seed)}) {
      const SignedLog z = brute_z(g);
      CHECK(z.sign == 1);
      CHECK(std::isfinite(z.log_abs));
    }
  }
}

TEST_CASE("random factor graph respects max arity") {
  const FactorGraph g = gen_random_factor_graph(20, 10, 3, 2, 1.0, 4);
  CHECK(g.max_arity() <= 3);
  for (VariableId v = 0; v < g.num_vars(); ++v) CHECK(g.degree(v) >= 1);
}
