#include "dgeo/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace dgeo {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

constexpr int kGridSteps = 4;
constexpr int kMaxAttempts = 1000;

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit(rng); }

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit(rng);
  const double u2 = unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double euclid(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double max_to(const MarkedSpace& space, const std::vector<Point>& pts) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, space.to_marked(x));
  return m;
}

void require_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(Errc::InvalidArgument, "sampling scale must be positive");
}

std::string region_name(Region::Kind k) {
  switch (k) {
    case Region::Kind::Cube: return "cube";
    case Region::Kind::Sphere: return "sphere";
    case Region::Kind::Circle: return "circle";
    case Region::Kind::Parabola: return "parabola";
    case Region::Kind::Points: return "points";
  }
  return "?";
}

/// Orthonormal basis of the complement of `normal` (unit), dim - 1 vectors.
std::vector<Point> tangent_basis(const Point& normal) {
  const std::size_t d = normal.size();
  std::vector<Point> basis;
  for (std::size_t axis = 0; axis < d && basis.size() + 1 < d; ++axis) {
    Point v(d, 0.0);
    v[axis] = 1.0;
    auto remove = [&](const Point& u) {
      double dot = 0.0;
      for (std::size_t i = 0; i < d; ++i) dot += v[i] * u[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= dot * u[i];
    };
    remove(normal);
    for (const auto& b : basis) remove(b);
    double len = 0.0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    if (len < 1e-8) continue;
    for (double& x : v) x /= len;
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

std::vector<Point> MarkedSpace::directions(double scale) const {
  std::vector<Point> out;
  for (std::uint64_t i = 0; i < 3; ++i) out.push_back(sample(scale, 1, mix_seed(0xD1EC, i))[0]);
  return out;
}

// ---------------------------------------------------------------------------
// EuclideanSubset

EuclideanSubset::EuclideanSubset(int dim, Region region, Point p, SamplerKind sampler)
    : dim_(dim), region_(std::move(region)), sampler_(sampler) {
  if (dim < 1) throw Error(Errc::DimensionOutOfRange, "ambient dimension must be >= 1");
  if (p.empty()) p.assign(std::size_t(dim), 0.0);
  if (p.size() != std::size_t(dim))
    throw Error(Errc::InvalidArgument, "marked point has the wrong dimension");
  switch (region_.kind) {
    case Region::Kind::Cube:
      if (!(region_.lo < region_.hi)) throw Error(Errc::InvalidArgument, "empty cube");
      break;
    case Region::Kind::Sphere:
    case Region::Kind::Circle:
      if (region_.center.empty()) region_.center.assign(std::size_t(dim), 0.0);
      if (region_.center.size() != std::size_t(dim) || !(region_.radius > 0.0))
        throw Error(Errc::InvalidArgument, "bad sphere/circle parameters");
      if (region_.kind == Region::Kind::Circle && dim != 2)
        throw Error(Errc::InvalidArgument, "circle curves live in dimension 2");
      break;
    case Region::Kind::Parabola:
      if (dim != 2) throw Error(Errc::InvalidArgument, "parabola curves live in dimension 2");
      break;
    case Region::Kind::Points:
      if (region_.points.empty()) throw Error(Errc::InvalidArgument, "empty point list");
      for (const auto& q : region_.points)
        if (q.size() != std::size_t(dim))
          throw Error(Errc::InvalidArgument, "point has the wrong dimension");
      break;
  }
  if (sampler_ == SamplerKind::Grid && region_.kind != Region::Kind::Cube)
    throw Error(Errc::InvalidArgument, "grid sampler requires a cube region");
  p_ = std::move(p);
  if (!contains(p_)) throw Error(Errc::MarkedPointOutsideRegion, "marked point is outside the region");
}

double EuclideanSubset::distance(const Point& a, const Point& b) const { return euclid(a, b); }

bool EuclideanSubset::contains(const Point& x, double tol) const {
  if (x.size() != std::size_t(dim_)) return false;
  switch (region_.kind) {
    case Region::Kind::Cube:
      return std::all_of(x.begin(), x.end(), [&](double v) {
        return v >= region_.lo - tol && v <= region_.hi + tol;
      });
    case Region::Kind::Sphere:
    case Region::Kind::Circle:
      return std::abs(euclid(x, region_.center) - region_.radius) <=
             tol * std::max(1.0, region_.radius);
    case Region::Kind::Parabola:
      return std::abs(x[1] - region_.a * x[0] * x[0]) <= tol * std::max(1.0, std::abs(x[1]));
    case Region::Kind::Points:
      return std::any_of(region_.points.begin(), region_.points.end(),
                         [&](const Point& q) { return euclid(q, x) <= tol; });
  }
  return false;
}

Point EuclideanSubset::on_curve(double offset) const {
  if (region_.kind == Region::Kind::Circle) {
    const double theta =
        std::atan2(p_[1] - region_.center[1], p_[0] - region_.center[0]) + offset;
    return {region_.center[0] + region_.radius * std::cos(theta),
            region_.center[1] + region_.radius * std::sin(theta)};
  }
  const double t = p_[0] + offset;
  return {t, region_.a * t * t};
}

template <class Rng>
Point EuclideanSubset::draw(double scale, Rng& rng) const {
  const std::size_t d = std::size_t(dim_);
  switch (region_.kind) {
    case Region::Kind::Cube: {
      const double half = scale / std::sqrt(double(d));
      Point x(d);
      if (sampler_ == SamplerKind::Grid) {
        const double step = half / kGridSteps;
        for (std::size_t i = 0; i < d; ++i) {
          std::vector<int> ok;
          for (int s = -kGridSteps; s <= kGridSteps; ++s) {
            const double v = p_[i] + s * step;
            if (v >= region_.lo && v <= region_.hi) ok.push_back(s);
          }
          const int s = ok[std::size_t(unit(rng) * double(ok.size()))];
          x[i] = p_[i] + s * step;
        }
      } else {
        for (std::size_t i = 0; i < d; ++i)
          x[i] = uniform(rng, std::max(region_.lo, p_[i] - half),
                         std::min(region_.hi, p_[i] + half));
      }
      return x;
    }
    case Region::Kind::Sphere: {
      const double r = region_.radius;
      Point normal(d);
      for (std::size_t i = 0; i < d; ++i) normal[i] = (p_[i] - region_.center[i]) / r;
      Point u(d);
      double len = 0.0;
      do {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          u[i] = gaussian(rng);
          dot += u[i] * normal[i];
        }
        len = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          u[i] -= dot * normal[i];
          len += u[i] * u[i];
        }
        len = std::sqrt(len);
      } while (d > 1 && len < 1e-12);
      const double chord = uniform(rng, 0.0, std::min(scale, 2.0 * r));
      const double phi = 2.0 * std::asin(std::min(1.0, chord / (2.0 * r)));
      Point x(d);
      for (std::size_t i = 0; i < d; ++i)
        x[i] = region_.center[i] + r * (std::cos(phi) * normal[i] +
                                        (len > 0.0 ? std::sin(phi) * u[i] / len : 0.0));
      if (d == 1) x[0] = region_.center[0] + r * (chord > r ? -normal[0] : normal[0]);
      return x;
    }
    case Region::Kind::Circle: {
      const double r = region_.radius;
      const double chord = uniform(rng, 0.0, std::min(scale, 2.0 * r));
      const double phi = 2.0 * std::asin(std::min(1.0, chord / (2.0 * r)));
      return on_curve(unit(rng) < 0.5 ? -phi : phi);
    }
    case Region::Kind::Parabola: {
      // The x-coordinate is a parameter with chord >= |offset|.
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Point x = on_curve(uniform(rng, -scale, scale));
        if (euclid(x, p_) <= scale) return x;
      }
      return p_;
    }
    case Region::Kind::Points:
      break;
  }
  return p_;
}

std::vector<Point> EuclideanSubset::sample(double scale, std::size_t count,
                                           std::uint64_t seed) const {
  require_scale(scale);
  std::mt19937_64 rng(seed);
  if (count == 0) return {};

  if (region_.kind == Region::Kind::Points) {
    std::vector<const Point*> inner, outer;
    for (const auto& q : region_.points) {
      const double r = euclid(q, p_);
      if (r <= scale) inner.push_back(&q);
      if (r <= scale && r >= 0.5 * scale) outer.push_back(&q);
    }
    if (outer.empty()) return std::vector<Point>(count, p_);
    std::vector<Point> out;
    const std::size_t anchor = std::size_t(unit(rng) * double(count));
    for (std::size_t i = 0; i < count; ++i) {
      const auto& pool = i == anchor ? outer : inner;
      out.push_back(*pool[std::size_t(unit(rng) * double(pool.size()))]);
    }
    return out;
  }

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(draw(scale, rng));
    const double delta = max_to(*this, out);
    if (delta >= 0.5 * scale && delta <= scale * (1.0 + 1e-12)) return out;
  }
  throw Error(Errc::SamplerScaleMismatch, "no tuple with delta in [scale/2, scale] near p");
}

std::vector<Point> EuclideanSubset::directions(double scale) const {
  require_scale(scale);
  const std::size_t d = std::size_t(dim_);
  std::vector<Point> out;
  switch (region_.kind) {
    case Region::Kind::Cube: {
      auto step = [&](std::size_t i, double len) {
        if (p_[i] + len <= region_.hi) return len;
        if (p_[i] - len >= region_.lo) return -len;
        return region_.hi - p_[i];
      };
      for (std::size_t i = 0; i < d; ++i) {
        Point x = p_;
        x[i] += step(i, scale);
        out.push_back(std::move(x));
      }
      if (d > 1) {
        Point x = p_;
        const double len = scale / std::sqrt(double(d));
        for (std::size_t i = 0; i < d; ++i) x[i] += step(i, len);
        out.push_back(std::move(x));
      }
      return out;
    }
    case Region::Kind::Sphere: {
      const double r = region_.radius;
      const double phi = 2.0 * std::asin(std::min(1.0, scale / (2.0 * r)));
      Point normal(d);
      for (std::size_t i = 0; i < d; ++i) normal[i] = (p_[i] - region_.center[i]) / r;
      for (const auto& u : tangent_basis(normal)) {
        Point x(d);
        for (std::size_t i = 0; i < d; ++i)
          x[i] = region_.center[i] + r * (std::cos(phi) * normal[i] + std::sin(phi) * u[i]);
        out.push_back(std::move(x));
      }
      if (out.empty()) out.push_back(p_);
      return out;
    }
    case Region::Kind::Circle: {
      const double phi = 2.0 * std::asin(std::min(1.0, scale / (2.0 * region_.radius)));
      out.push_back(on_curve(phi));
      out.push_back(on_curve(-phi));
      return out;
    }
    case Region::Kind::Parabola: {
      for (double side : {1.0, -1.0}) {
        double lo = 0.0, hi = scale;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (euclid(on_curve(side * mid), p_) < scale ? lo : hi) = mid;
        }
        out.push_back(on_curve(side * lo));
      }
      return out;
    }
    case Region::Kind::Points:
      break;
  }
  return MarkedSpace::directions(scale);
}

nlohmann::ordered_json EuclideanSubset::describe() const {
  nlohmann::ordered_json region{{"kind", region_name(region_.kind)}};
  switch (region_.kind) {
    case Region::Kind::Cube:
      region["lo"] = region_.lo;
      region["hi"] = region_.hi;
      break;
    case Region::Kind::Sphere:
    case Region::Kind::Circle:
      region["center"] = region_.center;
      region["radius"] = region_.radius;
      break;
    case Region::Kind::Parabola:
      region["a"] = region_.a;
      break;
    case Region::Kind::Points:
      region["points"] = region_.points;
      break;
  }
  return {{"type", "euclidean"},
          {"dim", dim_},
          {"region", region},
          {"p", p_},
          {"sampler", sampler_ == SamplerKind::Grid ? "grid" : "uniform"}};
}

// ---------------------------------------------------------------------------
// SnowflakeSpace

SnowflakeSpace::SnowflakeSpace(double alpha, EuclideanSubset base)
    : alpha_(alpha), base_(std::move(base)) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(Errc::AlphaOutOfRange, "snowflake exponent must lie in (0, 1)");
  p_ = base_.marked_point();
}

double SnowflakeSpace::distance(const Point& a, const Point& b) const {
  return std::pow(euclid(a, b), alpha_);
}

std::vector<Point> SnowflakeSpace::sample(double scale, std::size_t count,
                                          std::uint64_t seed) const {
  require_scale(scale);
  // Euclidean delta in [S/2, S] maps to [2^-alpha s, s] inside [s/2, s].
  return base_.sample(std::pow(scale, 1.0 / alpha_), count, seed);
}

std::vector<Point> SnowflakeSpace::directions(double scale) const {
  return base_.directions(std::pow(scale, 1.0 / alpha_));
}

nlohmann::ordered_json SnowflakeSpace::describe() const {
  auto base = base_.describe();
  return {{"type", "snowflake"}, {"alpha", alpha_}, {"dim", base["dim"]},
          {"region", base["region"]}, {"p", p_}, {"sampler", base["sampler"]}};
}

// ---------------------------------------------------------------------------
// UltrametricTree

UltrametricTree::UltrametricTree(int depth, int arity, Point p) : depth_(depth), arity_(arity) {
  if (depth < 2 || arity < 2)
    throw Error(Errc::InvalidArgument, "ultrametric tree needs depth, arity >= 2");
  if (p.empty()) p.assign(std::size_t(depth), 0.0);
  if (p.size() != std::size_t(depth))
    throw Error(Errc::InvalidArgument, "leaf address has the wrong length");
  for (double digit : p)
    if (digit < 0 || digit >= arity || digit != std::floor(digit))
      throw Error(Errc::InvalidArgument, "leaf address digit out of range");
  p_ = std::move(p);
}

double UltrametricTree::distance(const Point& a, const Point& b) const {
  std::size_t common = 0;
  while (common < a.size() && common < b.size() && a[common] == b[common]) ++common;
  if (common == a.size() && a.size() == b.size()) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(common));
}

std::vector<Point> UltrametricTree::sample(double scale, std::size_t count,
                                           std::uint64_t seed) const {
  require_scale(scale);
  if (count == 0) return {};
  // Distances are 2^-L with L the common-prefix length; pick L with
  // 2^-L in (scale/2, scale].
  const int level = scale >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log2(scale)));
  const double d = std::ldexp(1.0, -level);
  if (level > depth_ - 1 || d < 0.5 * scale)
    throw Error(Errc::SamplerScaleMismatch, "tree has no leaves at this scale");

  std::mt19937_64 rng(seed);
  auto digit = [&] { return std::floor(unit(rng) * arity_); };
  const std::size_t anchor = std::size_t(unit(rng) * double(count));
  std::vector<Point> out;
  for (std::size_t i = 0; i < count; ++i) {
    Point x(p_.begin(), p_.begin() + level);
    if (i == anchor) {
      double other = std::floor(unit(rng) * (arity_ - 1));
      if (other >= p_[std::size_t(level)]) other += 1.0;
      x.push_back(other);
    }
    while (x.size() < std::size_t(depth_)) x.push_back(digit());
    out.push_back(std::move(x));
  }
  return out;
}

nlohmann::ordered_json UltrametricTree::describe() const {
  return {{"type", "ultrametric"}, {"depth", depth_}, {"arity", arity_}, {"p", p_}};
}

// ---------------------------------------------------------------------------

EuclideanSubset make_euclidean_subset(int dim, Region region, Point p, SamplerKind sampler) {
  return EuclideanSubset(dim, std::move(region), std::move(p), sampler);
}

SnowflakeSpace make_snowflake(double alpha, int base_dim, Point p, Region region) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(Errc::AlphaOutOfRange, "snowflake exponent must lie in (0, 1)");
  return SnowflakeSpace(alpha, EuclideanSubset(base_dim, std::move(region), std::move(p)));
}

UltrametricTree make_ultrametric(int depth, int arity, Point p) {
  return UltrametricTree(depth, arity, std::move(p));
}

FrozenSpace freeze(const MarkedSpace& space, double scale, std::size_t count,
                   std::uint64_t seed, double tol) {
  if (count < 1) throw Error(Errc::InvalidArgument, "freeze needs at least one sample");
  FrozenSpace out;
  out.points.push_back(space.marked_point());
  auto absorb = [&](const std::vector<Point>& pts) {
    for (const auto& x : pts) {
      if (out.points.size() > count) return;
      const bool fresh = std::all_of(out.points.begin(), out.points.end(),
                                     [&](const Point& y) { return space.distance(x, y) > 0.0; });
      if (fresh) out.points.push_back(x);
    }
  };
  absorb(space.sample(scale, count, seed));
  for (std::uint64_t round = 1; round < 50 && out.points.size() <= count; ++round)
    absorb(space.sample(scale, count, mix_seed(seed, round)));

  const auto n = static_cast<Eigen::Index>(out.points.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = space.distance(out.points[std::size_t(i)], out.points[std::size_t(j)]);
  std::vector<std::string> labels{"p"};
  for (Eigen::Index i = 1; i < n; ++i) labels.push_back("x" + std::to_string(i));
  out.space = validate_metric(d, tol, std::move(labels));
  return out;
}

namespace {

Region region_from_config(const nlohmann::json& r, int dim) {
  const std::string kind = r.value("kind", "cube");
  if (kind == "cube") return Region::cube(r.value("lo", 0.0), r.value("hi", 1.0));
  if (kind == "sphere")
    return Region::sphere(r.value("center", Point(std::size_t(dim), 0.0)), r.value("radius", 1.0));
  if (kind == "circle")
    return Region::circle(r.value("center", Point(2, 0.0)), r.value("radius", 1.0));
  if (kind == "parabola") return Region::parabola(r.value("a", 1.0));
  if (kind == "points") return Region::finite(r.at("points").get<std::vector<Point>>());
  throw Error(Errc::Parse, "unknown region kind '" + kind + "'");
}

}  // namespace

std::unique_ptr<MarkedSpace> space_from_config(const nlohmann::json& config) {
  try {
    const std::string type = config.at("type").get<std::string>();
    if (type == "ultrametric")
      return std::make_unique<UltrametricTree>(config.value("depth", 8), config.value("arity", 2),
                                               config.value("p", Point{}));
    const int dim = config.value("dim", 1);
    const Region region = config.contains("region")
                              ? region_from_config(config.at("region"), dim)
                              : (type == "snowflake" ? Region::cube(-1.0, 1.0) : Region::cube(0.0, 1.0));
    const Point p = config.value("p", Point{});
    const std::string sampler = config.value("sampler", "uniform");
    if (sampler != "uniform" && sampler != "grid")
      throw Error(Errc::Parse, "unknown sampler '" + sampler + "'");
    const SamplerKind kind = sampler == "grid" ? SamplerKind::Grid : SamplerKind::Uniform;
    if (type == "euclidean") return std::make_unique<EuclideanSubset>(dim, region, p, kind);
    if (type == "snowflake")
      return std::make_unique<SnowflakeSpace>(config.at("alpha").get<double>(),
                                              EuclideanSubset(dim, region, p, kind));
    throw Error(Errc::Parse, "unknown space type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("bad space config: ") + e.what());
  }
}

}  // namespace dgeo
