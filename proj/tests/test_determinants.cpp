#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dgeo/determinants.hpp"
#include "oracles.hpp"

using namespace dgeo;
using doctest::Approx;

namespace {

FiniteMetricSpace pair_space(double d) {
  Eigen::MatrixXd m(2, 2);
  m << 0, d, d, 0;
  return validate_metric(m);
}

FiniteMetricSpace equilateral() {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  return validate_metric(m);
}

FiniteMetricSpace unit_square() {
  const double r = std::sqrt(2.0);
  Eigen::MatrixXd m(4, 4);
  m << 0, 1, r, 1, 1, 0, 1, r, r, 1, 0, 1, 1, r, 1, 0;
  return validate_metric(m);
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

}  // namespace

TEST_CASE("cm_determinant examples") {
  const auto p = cm_determinant(pair_space(3.0), {0, 1});
  CHECK(p.k == 1);
  CHECK(p.value == Approx(18.0));
  CHECK(p.signed_value == Approx(18.0));

  const auto e = cm_determinant(equilateral(), {0, 1, 2});
  CHECK(e.value == Approx(-3.0));
  CHECK(e.signed_value == Approx(3.0));

  const auto sq = unit_square();
  const auto s = cm_determinant(sq, {0, 1, 2, 3});
  CHECK(std::abs(s.value) <= 1e-12 * zero_scale(submatrix(sq, {0, 1, 2, 3})));
  CHECK_THROWS_AS(cm_determinant(pair_space(1.0), {0}), Error);
}

TEST_CASE("cm_determinant matches cofactor expansion") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const DistMatrix m(random_symmetric(rng, n));
    const double ref = oracle::cm_det(m.entries());
    CHECK(cm_determinant(m).value == Approx(ref).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("simplex_volume_sq examples") {
  CHECK(simplex_volume_sq(pair_space(2.0), {0, 1}) == Approx(4.0));
  CHECK(simplex_volume_sq(equilateral(), {0, 1, 2}) == Approx(3.0 / 16.0));
  CHECK(simplex_volume_sq(pair_space(2.0), {0, 0}) == 0.0);
}

TEST_CASE("simplex_volume_sq matches coordinate volume") {
  std::mt19937_64 rng(2);
  for (int k = 1; k <= 5; ++k) {
    const auto pts = oracle::random_cloud(rng, 5, k, k + 1, 0.1);
    const DistMatrix m(oracle::distances(pts));
    CHECK(simplex_volume_sq(m) == Approx(oracle::simplex_volume_sq(pts)).epsilon(1e-8));
  }
}

TEST_CASE("tau_matrix examples") {
  CHECK(tau_matrix(pair_space(1.0), {0, 1}).entries == Eigen::MatrixXd::Constant(1, 1, 2.0));

  Eigen::MatrixXd expect(2, 2);
  expect << 2, 1, 1, 2;
  const auto t = tau_matrix(equilateral(), {0, 1, 2});
  CHECK(t.base == 0);
  CHECK(t.entries == expect);

  const auto dup = tau_matrix(equilateral(), {1, 1, 2});
  CHECK(dup.base == 1);
  CHECK(dup.entries.row(0).isZero());
  CHECK(dup.entries.col(0).isZero());
}

TEST_CASE("sch_determinant examples") {
  CHECK(sch_determinant(pair_space(1.0), {0, 1}) == Approx(2.0));
  CHECK(sch_determinant(equilateral(), {0, 1, 2}) == Approx(3.0));
  CHECK(std::abs(sch_determinant(equilateral(), {0, 2, 2})) <= 1e-15);
  CHECK(std::abs(sch_determinant(unit_square(), {0, 1, 3, 1})) <= 1e-15);
}

TEST_CASE("permutation invariance and duplicate collapse") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto space = validate_metric(oracle::random_metric(rng, 6));
    const double a = cm_determinant(space, {0, 3, 1, 5}).value;
    const double b = cm_determinant(space, {5, 1, 0, 3}).value;
    CHECK(b == Approx(a).epsilon(1e-9).scale(zero_scale(submatrix(space, {0, 3, 1, 5}))));
    const double dup = cm_determinant(space, {0, 3, 3, 5}).value;
    CHECK(std::abs(dup) <= 1e-12 * zero_scale(submatrix(space, {0, 3, 3, 5})));
  }
}

TEST_CASE("cross-engine identity on arbitrary symmetric data, orders 2..6") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 2 + trial % 5;
    const DistMatrix m(random_symmetric(rng, n));
    const double scale = zero_scale(m);
    CHECK(std::abs(sch_determinant(m) - cm_determinant(m).signed_value) <= 1e-9 * scale);
  }
}

TEST_CASE("classify") {
  CHECK(classify(1.0, 1.0) == ZeroClass::Positive);
  CHECK(classify(-1.0, 1.0) == ZeroClass::Negative);
  CHECK(classify(1e-13, 1.0) == ZeroClass::Zero);
  CHECK(classify(-5e-9, 1.0) == ZeroClass::NearZeroNegative);
  CHECK(classify(5e-9, 1.0) == ZeroClass::NearZeroPositive);
  CHECK(classify(5e-11, 100.0) == ZeroClass::Zero);
}

TEST_CASE("psd_check examples") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 2;
  for (auto mode : {PsdMode::AllMinors, PsdMode::Spectral}) {
    const auto r = psd_check(a, mode);
    CHECK(r.psd);
    CHECK(r.rank == 2);
  }
  const auto z = psd_check(Eigen::MatrixXd::Zero(2, 2));
  CHECK(z.psd);
  CHECK(z.rank == 0);

  Eigen::MatrixXd b(2, 2);
  b << 1, 2, 2, 1;
  const auto s = psd_check(b, PsdMode::Spectral);
  CHECK_FALSE(s.psd);
  CHECK(s.min_eigenvalue == Approx(-1.0));
  const auto m = psd_check(b, PsdMode::AllMinors);
  CHECK_FALSE(m.psd);
  CHECK(m.witness_minor == Approx(-3.0));
  CHECK(m.witness_subset == std::vector<int>{0, 1});

  Eigen::MatrixXd ns(2, 2);
  ns << 1, 0, 1, 1;
  CHECK_THROWS_AS(psd_check(ns), Error);
  CHECK_THROWS_AS(psd_check(Eigen::MatrixXd::Identity(21, 21), PsdMode::AllMinors), Error);
  CHECK(psd_check(Eigen::MatrixXd::Identity(21, 21)).mode_used == PsdMode::Spectral);
}

TEST_CASE("psd_check modes agree on small integer matrices") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> u(-2, 2);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + trial % 6;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = u(rng);
    const auto a = psd_check(m, PsdMode::AllMinors);
    const auto s = psd_check(m, PsdMode::Spectral);
    CHECK(a.psd == s.psd);
    CHECK(a.rank == s.rank);
  }
}

TEST_CASE("homogeneity of both engines") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto space = validate_metric(oracle::random_metric(rng, 5));
    const Tuple t{0, 1, 2, 3, 4};
    for (double lambda : {0.1, 0.5, 2.0, 10.0}) {
      const auto scaled = scale_metric(space, lambda);
      const double f = std::pow(lambda, 8);
      const double scale = zero_scale(submatrix(scaled, t));
      CHECK(std::abs(cm_determinant(scaled, t).value - f * cm_determinant(space, t).value) <=
            1e-9 * scale);
      CHECK(std::abs(sch_determinant(scaled, t) - f * sch_determinant(space, t)) <= 1e-9 * scale);
    }
  }
}
