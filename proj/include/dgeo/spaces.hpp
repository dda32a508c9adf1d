#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "dgeo/metric.hpp"

namespace dgeo {

/// Carrier point of an analytic space: coordinates for Euclidean and
/// snowflake spaces, digit strings (one digit per coordinate) for
/// ultrametric trees.
using Point = std::vector<double>;

/// A metric space with a distinguished point p and a seeded sampler of
/// tuples near p. The distance function is the single source of truth.
class MarkedSpace {
 public:
  virtual ~MarkedSpace() = default;

  virtual double distance(const Point& a, const Point& b) const = 0;
  const Point& marked_point() const noexcept { return p_; }
  double to_marked(const Point& x) const { return distance(x, p_); }

  /// `count` points whose largest distance to p lies in [scale/2, scale].
  /// Reproducible for a given seed. Spaces with nothing at that scale near
  /// p (isolated points of finite sets) return copies of p.
  virtual std::vector<Point> sample(double scale, std::size_t count,
                                    std::uint64_t seed) const = 0;

  /// Deterministic points at distance about `scale` from p along the
  /// space's canonical directions; used to build probe sequences.
  virtual std::vector<Point> directions(double scale) const;

  virtual nlohmann::ordered_json describe() const = 0;

 protected:
  Point p_;
};

struct Region {
  enum class Kind { Cube, Sphere, Circle, Parabola, Points };
  Kind kind = Kind::Cube;
  double lo = 0.0;
  double hi = 1.0;
  Point center;
  double radius = 1.0;
  /// Parabola y = a * x^2.
  double a = 1.0;
  std::vector<Point> points;

  static Region cube(double lo, double hi) { return {Kind::Cube, lo, hi, {}, 1.0, 1.0, {}}; }
  static Region sphere(Point center, double radius) {
    return {Kind::Sphere, 0, 1, std::move(center), radius, 1.0, {}};
  }
  static Region circle(Point center, double radius) {
    return {Kind::Circle, 0, 1, std::move(center), radius, 1.0, {}};
  }
  static Region parabola(double a) { return {Kind::Parabola, 0, 1, {}, 1.0, a, {}}; }
  static Region finite(std::vector<Point> pts) {
    return {Kind::Points, 0, 1, {}, 1.0, 1.0, std::move(pts)};
  }
};

/// Uniform draws in the region near p, or (cubes only) draws from a lattice
/// of spacing scale / (sqrt(dim) * 4) anchored at p.
enum class SamplerKind { Uniform, Grid };

class EuclideanSubset : public MarkedSpace {
 public:
  EuclideanSubset(int dim, Region region, Point p, SamplerKind sampler = SamplerKind::Uniform);

  double distance(const Point& a, const Point& b) const override;
  std::vector<Point> sample(double scale, std::size_t count,
                            std::uint64_t seed) const override;
  std::vector<Point> directions(double scale) const override;
  nlohmann::ordered_json describe() const override;

  int dim() const noexcept { return dim_; }
  const Region& region() const noexcept { return region_; }
  bool contains(const Point& x, double tol = 1e-12) const;

 private:
  template <class Rng>
  Point draw(double scale, Rng& rng) const;
  Point on_curve(double offset) const;

  int dim_;
  Region region_;
  SamplerKind sampler_;
};

/// (E, |x - y|^alpha) for 0 < alpha < 1.
class SnowflakeSpace : public MarkedSpace {
 public:
  SnowflakeSpace(double alpha, EuclideanSubset base);

  double distance(const Point& a, const Point& b) const override;
  std::vector<Point> sample(double scale, std::size_t count,
                            std::uint64_t seed) const override;
  std::vector<Point> directions(double scale) const override;
  nlohmann::ordered_json describe() const override;

  double alpha() const noexcept { return alpha_; }

 private:
  double alpha_;
  EuclideanSubset base_;
};

/// Leaves of a complete rooted tree; d(x, y) = 2^-(depth of the lowest
/// common ancestor).
class UltrametricTree : public MarkedSpace {
 public:
  UltrametricTree(int depth, int arity, Point p);

  double distance(const Point& a, const Point& b) const override;
  std::vector<Point> sample(double scale, std::size_t count,
                            std::uint64_t seed) const override;
  nlohmann::ordered_json describe() const override;

  int depth() const noexcept { return depth_; }
  int arity() const noexcept { return arity_; }

 private:
  int depth_;
  int arity_;
};

EuclideanSubset make_euclidean_subset(int dim, Region region, Point p,
                                      SamplerKind sampler = SamplerKind::Uniform);
SnowflakeSpace make_snowflake(double alpha, int base_dim, Point p,
                              Region region = Region::cube(-1.0, 1.0));
UltrametricTree make_ultrametric(int depth, int arity, Point p = {});

struct FrozenSpace {
  FiniteMetricSpace space;
  std::size_t marked = 0;
  std::vector<Point> points;
};

/// p plus up to `count` distinct sampled points near p, materialized and
/// validated.
FrozenSpace freeze(const MarkedSpace& space, double scale, std::size_t count,
                   std::uint64_t seed, double tol = kDefaultMetricTol);

/// Builds a space from its JSON config
/// {"type": "euclidean|snowflake|ultrametric", "dim", "alpha", "region", "p", ...}.
std::unique_ptr<MarkedSpace> space_from_config(const nlohmann::json& config);

/// Seed mixing used by samplers and scanners.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace dgeo
