#include "doctest.h"
#include "fixtures.hpp"

#include "gmbe/error.hpp"
#include "gmbe/gauge.hpp"
#include "gmbe/oracle.hpp"

#include <sstream>

using namespace gmbe;

namespace {

Matrix mat(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

const Matrix A = mat(0.75, 0.25, 0.25, 0.75);
const Matrix B = mat(1.5, -0.5, -0.5, 1.5);

// Tables are written as two blocks over the third variable, each block a 2x2
// over (first, second).
Factor table3(std::vector<VariableId> scope, const double (&blocks)[2][2][2]) {
  Eigen::ArrayXd t(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) t[i * 4 + j * 2 + k] = blocks[k][i][j];
  return Factor::from_linear(std::move(scope), {2, 2, 2}, t);
}

void check_blocks(const Factor& f, const double (&blocks)[2][2][2], double tol) {
  const Eigen::ArrayXd lin = f.to_linear();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        CHECK(std::abs(lin[i * 4 + j * 2 + k] - blocks[k][i][j]) <= tol * std::abs(blocks[k][i][j]));
}

constexpr double kFa[2][2][2] = {{{2432, 832}, {4672, 640}}, {{4864, 384}, {5120, 4160}}};
constexpr double kFb[2][2][2] = {{{1088, 128}, {4928, 4608}}, {{448, 1664}, {3264, 1344}}};
constexpr double kFc[2][2][2] = {{{1216, 5440}, {768, 1856}}, {{5568, 896}, {640, 512}}};
constexpr double kFd[2][2][2] = {{{5632, 5632}, {6080, 6208}}, {{5568, 896}, {640, 512}}};

}  // namespace

TEST_CASE("worked example: transformed tables") {
  // Our own contractions of the printed factors and gauges (numpy einsum).
  const Factor fa = table3({1, 2, 3}, kFa);
  const Factor fb = table3({1, 4, 5}, kFb);
  const Factor fc = table3({2, 4, 6}, kFc);
  const Factor fd = table3({3, 5, 6}, kFd);

  const double ha[2][2][2] = {{{2837, 1559}, {3591, 2077}}, {{3631, 2005}, {4261, 3143}}};
  const double hb[2][2][2] = {{{-930, -1062}, {6086, 5650}}, {{-486, 398}, {4562, 3254}}};
  const double hc[2][2][2] = {{{1784, 7000}, {-136, 216}}, {{8264, 744}, {-1976, 1000}}};
  const double hd[2][2][2] = {{{2408, 9160}, {10760, 9192}}, {{14536, -6232}, {-7448, -1208}}};
  check_blocks(gauge_transform_factor(fa, {A, A, A}), ha, 1e-12);
  check_blocks(gauge_transform_factor(fb, {B, A, A}), hb, 1e-12);
  check_blocks(gauge_transform_factor(fc, {B, B, A}), hc, 1e-12);
  check_blocks(gauge_transform_factor(fd, {B, B, B}), hd, 1e-12);

  // f_a(1,1,1) and f_d in full agree with the printed tables.
  const int first[] = {0, 0, 0};
  CHECK(gauge_transform_factor(fa, {A, A, A}).value(first) == doctest::Approx(2837));
  // The printed f_b table is what (A, A, B) produces.
  const double printed_b[2][2][2] = {{{2142, 1434}, {4634, 4558}}, {{966, 1490}, {1490, 758}}};
  check_blocks(gauge_transform_factor(fb, {A, A, B}), printed_b, 1e-12);
}

TEST_CASE("identity gauges leave a factor unchanged") {
  const Factor fa = table3({0, 1, 2}, kFa);
  const Matrix I = Matrix::Identity(2, 2);
  const Factor out = gauge_transform_factor(fa, {I, I, I});
  CHECK((out.to_linear() - fa.to_linear()).abs().maxCoeff() < 1e-9);
  CHECK_THROWS_AS(gauge_transform_factor(fa, {I, I}), Error);
  CHECK_THROWS_AS(gauge_transform_axis(fa, 0, Matrix::Identity(3, 3)), Error);
}

TEST_CASE("conjugacy deviation") {
  CHECK(conjugacy_deviation(A, B) < 1e-15);
  CHECK(conjugacy_deviation(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) == 0.0);
  CHECK(conjugacy_deviation(A, Matrix::Identity(2, 2)) == doctest::Approx(0.25));
  CHECK(conjugacy_deviation(B, Matrix::Identity(2, 2)) == doctest::Approx(0.5));
}

TEST_CASE("conjugate_of") {
  CHECK((conjugate_of(A) - B).cwiseAbs().maxCoeff() < 1e-12);
  Matrix M(3, 3);
  M << 2, 1, 0, 0, 1, 3, 1, 0, 1;
  CHECK(conjugacy_deviation(M, conjugate_of(M)) < 1e-12);
  CHECK_THROWS_AS(conjugate_of(mat(1, 2, 2, 4)), Error);
  CHECK(condition_number(Matrix::Identity(2, 2)) == doctest::Approx(1.0));
}

TEST_CASE("gauges keep Z") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ForneyGraph g = fixtures::small_forney(seed, 4, 6);
    const GaugeSet gs = random_valid_gauges(g, 0.3, seed);
    CHECK(check_constraint(g, gs).max_deviation < 1e-12);
    const ForneyGraph h = apply_gauges(g, gs);
    const SignedLog z0 = brute_z(g), z1 = brute_z(h);
    CHECK(z1.sign == 1);
    CHECK(std::abs(z1.log_abs - z0.log_abs) < 1e-9);
  }
}

TEST_CASE("identity and zero-scale gauge sets") {
  const ForneyGraph g = fixtures::small_forney(3);
  const GaugeSet id = random_valid_gauges(g, 0.0, 1);
  for (VariableId v = 0; v < g.num_vars(); ++v) CHECK(id.free[v].isIdentity());
  const ForneyGraph h = apply_gauges(g, GaugeSet::identity(g));
  for (FactorId a = 0; a < g.num_factors(); ++a)
    CHECK((h.factor(a).to_linear() - g.factor(a).to_linear()).abs().maxCoeff() <
          1e-12 * g.factor(a).to_linear().abs().maxCoeff());
}

TEST_CASE("constraint violation is refused") {
  const ForneyGraph g = fixtures::small_forney(3);
  GaugeSet gs = GaugeSet::identity(g);
  gs.free[0] = A;
  CHECK(check_constraint(g, gs).deviation[0] == doctest::Approx(0.25));
  try {
    apply_gauges(g, gs);
    FAIL("expected ConstraintViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConstraintViolated);
  }
}

TEST_CASE("transform is linear and composes") {
  Eigen::ArrayXd t1 = Eigen::ArrayXd::LinSpaced(8, 1, 8), t2(8);
  t2 << 3, -1, 4, 1, -5, 9, 2, 6;
  const Factor f1 = Factor::from_linear({0, 1, 2}, {2, 2, 2}, t1);
  const Factor f2 = Factor::from_linear({0, 1, 2}, {2, 2, 2}, t2);
  const Factor f12 = Factor::from_linear({0, 1, 2}, {2, 2, 2}, t1 + t2);
  const std::vector<Matrix> G = {A, B, mat(1, 0.2, -0.3, 0.9)};
  const Eigen::ArrayXd sum =
      gauge_transform_factor(f1, G).to_linear() + gauge_transform_factor(f2, G).to_linear();
  CHECK((gauge_transform_factor(f12, G).to_linear() - sum).abs().maxCoeff() < 1e-10);

  const std::vector<Matrix> H = {B, mat(0.5, 0.1, 0.0, 2.0), A};
  std::vector<Matrix> GH;
  for (int k = 0; k < 3; ++k) GH.push_back(G[k] * H[k]);
  const Eigen::ArrayXd twice = gauge_transform_factor(gauge_transform_factor(f1, H), G).to_linear();
  const Eigen::ArrayXd once = gauge_transform_factor(f1, GH).to_linear();
  CHECK(((twice - once).abs() / once.abs().max(1e-300)).maxCoeff() < 1e-10);
}

TEST_CASE("reparameterisation as diagonal gauges") {
  const ForneyGraph g = fixtures::small_forney(5);
  Reparam r = Reparam::zero(g);
  for (VariableId v = 0; v < g.num_vars(); ++v) CHECK(reparam_as_gauges(g, r).free[v].isIdentity());

  r.free[0] << std::log(2.0), std::log(3.0);
  const GaugeSet gs = reparam_as_gauges(g, r);
  CHECK(gs.free[0].diagonal()(0) == doctest::Approx(2.0));
  CHECK(gs.free[0].diagonal()(1) == doctest::Approx(3.0));
  CHECK(gs.conjugate[0].diagonal()(0) == doctest::Approx(0.5));
  CHECK(gs.conjugate[0].diagonal()(1) == doctest::Approx(1.0 / 3));
  CHECK(check_constraint(g, gs).max_deviation < 1e-12);

  // same as scaling the two factors along v directly
  const ForneyGraph h = apply_gauges(g, gs);
  const auto [a, b] = g.edges(0);
  Factor fa = g.factor(a), fb = g.factor(b);
  fa.scale_along(fa.position(0), r.free[0].array());
  fb.scale_along(fb.position(0), -r.free[0].array());
  CHECK((h.factor(a).log_abs() - fa.log_abs()).abs().maxCoeff() < 1e-12);
  CHECK((h.factor(b).log_abs() - fb.log_abs()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("gauge dump has one line per edge") {
  const ForneyGraph g = fixtures::small_forney(2);
  std::ostringstream os;
  write_gauges(os, g, GaugeSet::identity(g));
  const std::string s = os.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 2 * g.num_vars());
}
