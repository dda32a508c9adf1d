#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dgeo/metric.hpp"
#include "oracles.hpp"

using namespace dgeo;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Errc code_of(const Eigen::MatrixXd& m, double tol = 1e-12) {
  try {
    validate_metric(m, tol);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("validate_metric: smallest metric") {
  const auto s = validate_metric(mat({{0, 1}, {1, 0}}), 1e-12);
  CHECK(s.size() == 2);
  CHECK(s(0, 1) == 1.0);
  CHECK(s.labels() == std::vector<std::string>{"0", "1"});
}

TEST_CASE("validate_metric: triangle violation names (0,2,1)") {
  try {
    validate_metric(mat({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}));
    FAIL("accepted a triangle violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TriangleViolation);
    CHECK(e.indices() == std::vector<std::size_t>{0, 2, 1});
  }
}

TEST_CASE("validate_metric: asymmetric") {
  try {
    validate_metric(mat({{0, 1}, {1.1, 0}}), 1e-12);
    FAIL("accepted an asymmetric matrix");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Asymmetric);
    CHECK(e.indices() == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("validate_metric: other axioms") {
  CHECK(code_of(mat({{0, -1}, {-1, 0}})) == Errc::NegativeDistance);
  CHECK(code_of(mat({{1, 1}, {1, 0}})) == Errc::NonzeroDiagonal);
  CHECK(code_of(mat({{0, 0}, {0, 0}})) == Errc::CoincidentPoints);
  CHECK(code_of(Eigen::MatrixXd::Zero(2, 3)) == Errc::NonSquare);
  CHECK(code_of(mat({{0, NAN}, {NAN, 0}})) == Errc::NonFinite);
}

TEST_CASE("validate_metric: symmetry within tolerance is averaged") {
  const auto s = validate_metric(mat({{0, 1}, {1 + 1e-12, 0}}), 1e-9);
  CHECK(s(0, 1) == s(1, 0));
}

TEST_CASE("validate_metric agrees with a direct axiom loop on random 4-point matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::bernoulli_distribution flip(0.1);
  int accepted = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) m(i, j) = m(j, i) = u(rng);
    if (flip(rng)) m(0, 1) += 0.5;
    if (flip(rng)) m(2, 3) = -m(2, 3);
    bool ok = true;
    try {
      validate_metric(m, 1e-9);
    } catch (const Error&) {
      ok = false;
    }
    CHECK(ok == oracle::is_metric(m, 1e-9));
    accepted += ok;
  }
  CHECK(accepted > 100);
}

TEST_CASE("submatrix") {
  const auto pair = validate_metric(mat({{0, 1}, {1, 0}}));
  CHECK(submatrix(pair, {0, 1}).entries() == mat({{0, 1}, {1, 0}}));
  CHECK(submatrix(pair, {0, 0}).entries() == Eigen::MatrixXd::Zero(2, 2));
  CHECK_THROWS_AS(submatrix(pair, {0, 2}), Error);

  const auto tri = validate_metric(mat({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  CHECK(submatrix(tri, {0, 1, 2}).entries() == mat({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
}

TEST_CASE("submatrix is natural under permutation") {
  std::mt19937_64 rng(5);
  const auto space = validate_metric(oracle::random_metric(rng, 6));
  std::vector<std::size_t> idx{4, 0, 5, 2};
  const auto base = submatrix(space, Tuple(idx)).entries();
  std::vector<int> perm{2, 0, 3, 1};
  std::vector<std::size_t> permuted;
  for (int p : perm) permuted.push_back(idx[std::size_t(p)]);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) P(i, perm[std::size_t(i)]) = 1.0;
  CHECK(submatrix(space, Tuple(permuted)).entries() == P * base * P.transpose());
}

TEST_CASE("scale_metric") {
  const auto pair = validate_metric(mat({{0, 1}, {1, 0}}));
  CHECK(scale_metric(pair, 3.0)(0, 1) == 3.0);
  CHECK(scale_metric(pair, 1.0).dist() == pair.dist());
  const auto tri = validate_metric(mat({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}));
  CHECK(scale_metric(tri, 0.5).dist() == 0.5 * tri.dist());
  CHECK_THROWS_AS(scale_metric(pair, 0.0), Error);
  CHECK_THROWS_AS(scale_metric(pair, -2.0), Error);

  std::mt19937_64 rng(3);
  const auto s = validate_metric(oracle::random_metric(rng, 5));
  const auto twice = scale_metric(scale_metric(s, 2.0), 0.25);
  CHECK((twice.dist() - scale_metric(s, 0.5).dist()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("DistMatrix rejects malformed entries") {
  CHECK_THROWS_AS(DistMatrix(mat({{0, 1}, {2, 0}})), Error);
  CHECK_THROWS_AS(DistMatrix(mat({{1, 1}, {1, 0}})), Error);
  CHECK(DistMatrix(mat({{0, 2}, {2, 0}})).scaled(0.5)(0, 1) == 1.0);
}
