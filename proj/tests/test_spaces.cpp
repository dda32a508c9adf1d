#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dgeo/embeddability.hpp"
#include "dgeo/pretangent.hpp"
#include "dgeo/spaces.hpp"

using namespace dgeo;
using doctest::Approx;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

double delta_of(const MarkedSpace& s, const std::vector<Point>& pts) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, s.to_marked(x));
  return m;
}

}  // namespace

TEST_CASE("euclidean subsets: construction") {
  const auto seg = make_euclidean_subset(1, Region::cube(0, 1), {0.0});
  CHECK(seg.distance({0.2}, {0.7}) == Approx(0.5));
  const auto circle = make_euclidean_subset(2, Region::circle({0, 0}, 1), {1, 0});
  CHECK(circle.contains({0, 1}));
  const auto plane = make_euclidean_subset(2, Region::cube(0, 1), {0, 0});
  CHECK(plane.marked_point() == Point{0, 0});

  CHECK(code_of([] { make_euclidean_subset(1, Region::cube(0, 1), {2.0}); }) ==
        Errc::MarkedPointOutsideRegion);
  CHECK(code_of([] { make_euclidean_subset(2, Region::circle({0, 0}, 1), {0.5, 0}); }) ==
        Errc::MarkedPointOutsideRegion);
  CHECK(code_of([] { make_euclidean_subset(2, Region::parabola(1.0), {1, 0}); }) ==
        Errc::MarkedPointOutsideRegion);
}

TEST_CASE("sampler contract: delta in [s/2, s], reproducible") {
  std::vector<std::unique_ptr<MarkedSpace>> spaces;
  spaces.push_back(std::make_unique<EuclideanSubset>(1, Region::cube(0, 1), Point{0.0}));
  spaces.push_back(std::make_unique<EuclideanSubset>(2, Region::cube(0, 1), Point{0, 0}));
  spaces.push_back(std::make_unique<EuclideanSubset>(3, Region::cube(-1, 1), Point{0, 0, 0}));
  spaces.push_back(std::make_unique<EuclideanSubset>(2, Region::cube(0, 1), Point{0, 0},
                                                     SamplerKind::Grid));
  spaces.push_back(std::make_unique<EuclideanSubset>(2, Region::circle({0, 0}, 1), Point{1, 0}));
  spaces.push_back(std::make_unique<EuclideanSubset>(3, Region::sphere({0, 0, 0}, 1), Point{0, 0, 1}));
  spaces.push_back(std::make_unique<EuclideanSubset>(2, Region::parabola(2.0), Point{0, 0}));
  spaces.push_back(std::make_unique<SnowflakeSpace>(make_snowflake(0.5, 2, {0, 0})));
  spaces.push_back(std::make_unique<UltrametricTree>(make_ultrametric(12, 3)));

  for (const auto& s : spaces) {
    for (double scale : {0.5, 0.1, 0.01, 1e-3}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto pts = s->sample(scale, 4, seed);
        REQUIRE(pts.size() == 4);
        const double d = delta_of(*s, pts);
        CHECK(d >= 0.5 * scale * (1 - 1e-12));
        CHECK(d <= scale * (1 + 1e-12));
        CHECK(s->sample(scale, 4, seed) == pts);
      }
    }
  }
}

TEST_CASE("circle and sphere samples stay on the surface") {
  const auto c = make_euclidean_subset(2, Region::circle({0, 0}, 1), {1, 0});
  const auto s = make_euclidean_subset(3, Region::sphere({0, 0, 0}, 2), {0, 0, 2});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& x : c.sample(0.3, 3, seed)) CHECK(c.contains(x, 1e-12));
    for (const auto& x : s.sample(0.3, 3, seed)) CHECK(s.contains(x, 1e-12));
  }
}

TEST_CASE("finite point regions") {
  const auto grid =
      make_euclidean_subset(1, Region::finite({{0.0}, {0.25}, {0.5}, {1.0}}), {0.0});
  const auto pts = grid.sample(0.5, 3, 1);
  CHECK(delta_of(grid, pts) >= 0.25);
  const auto iso = grid.sample(0.1, 3, 1);
  for (const auto& x : iso) CHECK(x == Point{0.0});
}

TEST_CASE("snowflake") {
  CHECK(code_of([] { make_snowflake(1.0, 1, {0.0}); }) == Errc::AlphaOutOfRange);
  CHECK(code_of([] { make_snowflake(0.0, 1, {0.0}); }) == Errc::AlphaOutOfRange);
  const auto line = make_snowflake(0.5, 1, {0.0});
  CHECK(line.distance({0.0}, {0.25}) == Approx(0.5));
  CHECK(line.distance({0.25}, {0.0}) == line.distance({0.0}, {0.25}));
  CHECK(line.distance({0.3}, {0.3}) == 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto f = freeze(line, 0.3, 4, seed);
    CHECK(f.space.size() == 5);
  }
}

TEST_CASE("ultrametric tree") {
  const auto t = make_ultrametric(3, 2);
  CHECK(t.distance({0, 0, 0}, {0, 0, 1}) == 0.25);
  CHECK(t.distance({0, 0, 0}, {1, 0, 0}) == 1.0);
  CHECK(t.distance({1, 0, 1}, {1, 0, 1}) == 0.0);
  // Eight leaves, every triple ultra-isosceles.
  std::vector<Point> leaves;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) leaves.push_back({double(a), double(b), double(c)});
  CHECK(leaves.size() == 8);
  for (const auto& x : leaves)
    for (const auto& y : leaves)
      for (const auto& z : leaves)
        CHECK(t.distance(x, z) <= std::max(t.distance(x, y), t.distance(y, z)));
  CHECK_THROWS_AS(make_ultrametric(1, 2), Error);
  CHECK_THROWS_AS(make_ultrametric(3, 1), Error);
  CHECK(code_of([&] { t.sample(1e-3, 3, 0); }) == Errc::SamplerScaleMismatch);
}

TEST_CASE("freeze") {
  const auto seg = make_euclidean_subset(1, Region::cube(0, 1), {0.0});
  const auto f = freeze(seg, 0.1, 4, 3);
  CHECK(f.space.size() == 5);
  CHECK(f.marked == 0);
  CHECK(f.points[0] == Point{0.0});

  const auto circle = make_euclidean_subset(2, Region::circle({0, 0}, 1), {1, 0});
  const auto a = freeze(circle, 0.2, 6, 42);
  const auto b = freeze(circle, 0.2, 6, 42);
  CHECK(a.space.dist() == b.space.dist());
  CHECK(a.points == b.points);
  CHECK_THROWS_AS(freeze(seg, 0.1, 0, 1), Error);
}

TEST_CASE("frozen euclidean subsets pass schoenberg_check at the ambient dimension") {
  const auto plane = make_euclidean_subset(2, Region::cube(0, 1), {0, 0});
  const auto ball = make_euclidean_subset(3, Region::sphere({0, 0, 0}, 1), {1, 0, 0});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (double scale : {0.5, 1e-3}) {
      CHECK(schoenberg_check(freeze(plane, scale, 6, seed).space, 2).embeddable == Verdict::Yes);
      CHECK(schoenberg_check(freeze(ball, scale, 6, seed).space, 3).embeddable == Verdict::Yes);
    }
  }
}

TEST_CASE("frozen ultrametric subsets satisfy the ultra-triangle inequality exactly") {
  const auto t = make_ultrametric(10, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = freeze(t, 0.3, 7, seed);
    const auto n = f.space.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          CHECK(f.space(i, k) <= std::max(f.space(i, j), f.space(j, k)));
  }
}

TEST_CASE("space_from_config round-trips describe()") {
  const char* configs[] = {
      R"({"type":"euclidean","dim":2,"region":{"kind":"circle","center":[0,0],"radius":1},"p":[1,0]})",
      R"({"type":"euclidean","dim":2,"region":{"kind":"cube","lo":0,"hi":1},"p":[0,0],"sampler":"grid"})",
      R"({"type":"snowflake","alpha":0.5,"dim":1,"region":{"kind":"cube","lo":-1,"hi":1},"p":[0]})",
      R"({"type":"ultrametric","depth":5,"arity":2,"p":[0,1,0,1,0]})",
      R"({"type":"euclidean","dim":2,"region":{"kind":"parabola","a":1.5},"p":[0,0]})",
  };
  for (const char* c : configs) {
    const auto s = space_from_config(nlohmann::json::parse(c));
    const auto again = space_from_config(nlohmann::json::parse(s->describe().dump()));
    CHECK(again->describe() == s->describe());
    CHECK(again->sample(0.1, 3, 9) == s->sample(0.1, 3, 9));
  }
  CHECK(code_of([] { space_from_config(nlohmann::json::parse(R"({"type":"torus"})")); }) ==
        Errc::Parse);
  CHECK(code_of([] { space_from_config(nlohmann::json::parse(R"({"dim":2})")); }) == Errc::Parse);
}

TEST_CASE("directions lie at the requested distance") {
  const auto plane = make_euclidean_subset(2, Region::cube(0, 1), {0, 0});
  for (const auto& x : plane.directions(0.01)) CHECK(plane.to_marked(x) == Approx(0.01));
  const auto circle = make_euclidean_subset(2, Region::circle({0, 0}, 1), {1, 0});
  for (const auto& x : circle.directions(0.01)) CHECK(circle.to_marked(x) == Approx(0.01));
  const auto para = make_euclidean_subset(2, Region::parabola(1.0), {0, 0});
  for (const auto& x : para.directions(0.01)) CHECK(para.to_marked(x) == Approx(0.01));
  const auto flake = make_snowflake(0.5, 2, {0, 0});
  for (const auto& x : flake.directions(0.01)) CHECK(flake.to_marked(x) == Approx(0.01));
}
