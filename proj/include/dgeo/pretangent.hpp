#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dgeo/determinants.hpp"
#include "dgeo/embeddability.hpp"
#include "dgeo/metric.hpp"
#include "dgeo/spaces.hpp"

namespace dgeo {

/// Distances among the points of a tuple and from each of them to the
/// marked point p.
struct MarkedTuple {
  DistMatrix m;
  std::vector<double> to_marked;

  std::size_t size() const noexcept { return to_marked.size(); }
};

MarkedTuple make_marked_tuple(const MarkedSpace& space, const std::vector<Point>& pts);
MarkedTuple make_marked_tuple(const FiniteMetricSpace& space, std::size_t marked,
                              const Tuple& t);

/// delta = max_i d(x_i, p).
double delta_scale(const MarkedTuple& t);
double delta_scale(const MarkedSpace& space, const std::vector<Point>& pts);

/// (sum_i d(x_i, p)^s)^(1/s). Throws NonpositiveExponent.
double epsilon_scale(const MarkedTuple& t, double s);
double epsilon_scale(const MarkedSpace& space, const std::vector<Point>& pts, double s);

/// A function of the distance matrix of an `arity`-tuple with
/// f(lambda m) = lambda^degree f(m).
struct HomogeneousFunctional {
  std::string name;
  int arity = 0;
  double degree = 0.0;
  std::function<double(const DistMatrix&)> eval;

  double operator()(const DistMatrix& m) const { return eval(m); }
};

/// Raw D_k on (k+1)-tuples; degree 2k.
HomogeneousFunctional cm_functional(int k);
/// (-1)^{k+1} D_k.
HomogeneousFunctional signed_cm_functional(int k);
/// det tau; degree 2k.
HomogeneousFunctional schoenberg_functional(int k);
/// (t13 v t32) - t12 on triples (1-based labels); nonnegative exactly on
/// ultrametric triples. Degree 1.
HomogeneousFunctional ultrametric_functional();
HomogeneousFunctional scaled(HomogeneousFunctional f, double c);

/// f applied to m / delta; 0 at the all-p tuple. Throws ArityMismatch.
double star_transform(const HomogeneousFunctional& f, const MarkedTuple& t);
double star_transform(const HomogeneousFunctional& f, const MarkedSpace& space,
                      const std::vector<Point>& pts);

/// Theta_{k+1} = (-1)^{k+1} D_k / delta^{2k}; TupleTooShort below 2 points.
double theta(const MarkedTuple& t);
double theta(const MarkedSpace& space, const std::vector<Point>& pts);
/// S_{k+1} = Sch / delta^{2k}.
double s_functional(const MarkedTuple& t);
double s_functional(const MarkedSpace& space, const std::vector<Point>& pts);

// ---------------------------------------------------------------------------
// Sequences

class NormalizingSequence {
 public:
  /// r_m = r0 * q^m; requires r0 > 0 and 0 < q < 1.
  static NormalizingSequence geometric(double r0, double q);
  static NormalizingSequence custom(std::string name, std::function<double(std::size_t)> r);

  double operator()(std::size_t m) const { return r_(m); }
  const std::string& name() const noexcept { return name_; }

 private:
  NormalizingSequence(std::string name, std::function<double(std::size_t)> r)
      : name_(std::move(name)), r_(std::move(r)) {}

  std::string name_;
  std::function<double(std::size_t)> r_;
};

struct PointSequence {
  std::string name;
  std::function<Point(std::size_t)> at;

  Point operator()(std::size_t m) const { return at(m); }
};

/// The constant sequence at the marked point.
PointSequence constant_sequence(const MarkedSpace& space);

inline constexpr std::size_t kDefaultDepth = 64;
inline constexpr std::size_t kMinDepth = 16;
inline constexpr double kDefaultStabilityTol = 1e-9;

struct StabilityVerdict {
  enum class Status { Stable, Unstable, Undetermined };
  Status status = Status::Undetermined;
  /// Tail mean of d(x_m, y_m) / r_m; meaningful when stable.
  double limit = 0.0;
  std::size_t depth_used = 0;
  /// max - min of the ratios over the window [depth/2, depth).
  double oscillation = 0.0;

  bool stable() const noexcept { return status == Status::Stable; }
};

std::string_view to_string(StabilityVerdict::Status s);

/// Stable when the window oscillation is at most tol; unstable when the
/// second half of the window still oscillates by more than 10 tol and by at
/// least 3/4 of the first half. Throws DegenerateNormalizer, InvalidArgument.
StabilityVerdict mutual_stability(const MarkedSpace& space, const PointSequence& x,
                                  const PointSequence& y, const NormalizingSequence& r,
                                  std::size_t depth = kDefaultDepth,
                                  double tol = kDefaultStabilityTol);

/// A finite family of sequences; index 0 is always the constant sequence
/// at p.
class SequenceFamily {
 public:
  SequenceFamily(const MarkedSpace& space, std::vector<PointSequence> others = {});

  std::size_t size() const noexcept { return members_.size(); }
  const PointSequence& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<PointSequence>& members() const noexcept { return members_; }

 private:
  std::vector<PointSequence> members_;
};

using VerdictMatrix = std::vector<std::vector<StabilityVerdict>>;

VerdictMatrix pseudometric_matrix(const MarkedSpace& space, const SequenceFamily& family,
                                  const NormalizingSequence& r,
                                  std::size_t depth = kDefaultDepth,
                                  double tol = kDefaultStabilityTol);

bool self_stable(const VerdictMatrix& pm);

struct QuotientSpace {
  /// Family indices per class, each sorted; classes ordered by their
  /// smallest member.
  std::vector<std::vector<std::size_t>> classes;
  FiniteMetricSpace rho;
};

inline constexpr double kDefaultMergeTol = 1e-9;

/// Classes are connected components of {d <= merge_tol}; rho is read off
/// at the smallest index of each class. Throws MergeInconsistency.
QuotientSpace metric_identification(const Eigen::MatrixXd& pseudo,
                                    double merge_tol = kDefaultMergeTol,
                                    double tol = kDefaultMetricTol);
/// Throws UnstableInput unless every verdict is stable.
QuotientSpace metric_identification(const VerdictMatrix& pm,
                                    double merge_tol = kDefaultMergeTol,
                                    double tol = kDefaultMetricTol);

// ---------------------------------------------------------------------------
// Scanners

enum class ScanMode { Theta, S };
enum class ScanVerdict { Supports, Refutes, Inconclusive };

std::string_view to_string(ScanMode m);
std::string_view to_string(ScanVerdict v);

/// s_j = s0 * q^j, j = 0..rungs-1.
struct ScaleLadder {
  double s0 = 0.5;
  double q = 0.5;
  std::size_t rungs = 12;

  std::vector<double> scales() const;
};

struct ScanOptions {
  ScaleLadder ladder;
  std::size_t samples_per_scale = 2000;
  std::uint64_t seed = 0;
  double tol_det = kDefaultTolDet;
  /// Largest magnitude at the two finest rungs still read as decay to 0.
  double vanish_tol = 1e-3;
};

struct ScanReport {
  int k = 0;
  ScanMode mode = ScanMode::Theta;
  /// Sign for k <= n (liminf >= 0), Vanishing for k = n+1, n+2 (limit 0).
  Condition condition = Condition::Sign;
  std::vector<double> scales;
  std::vector<double> per_scale_inf;
  std::vector<double> per_scale_sup;
  /// Minimum / maximum over the tail (finest half) of the ladder.
  double running_liminf = 0.0;
  double running_limsup = 0.0;
  /// Log-log slope of max(|inf|, |sup|), |inf| and |sup| against scale
  /// over every rung; empty when fewer than two rungs are nonzero.
  std::optional<double> trend;
  std::optional<double> trend_inf;
  std::optional<double> trend_sup;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  /// Tuple realizing the most adverse value seen.
  std::vector<Point> witness_points;
  double witness_value = 0.0;
  double witness_scale = 0.0;
  std::uint64_t seed = 0;
};

/// Per-rung infimum and supremum of Theta_{k+1} (or S_{k+1}) over seeded
/// (k+1)-tuples drawn by the space's sampler. The same per-sample seeds are
/// reused on every rung. Throws EmptySample, SamplerScaleMismatch.
ScanReport liminf_scan(const MarkedSpace& space, int k, ScanMode mode, Condition condition,
                       const ScanOptions& opts = {});

/// Verdict of a report under the tail rules; exposed for testing.
ScanVerdict judge(const ScanReport& r, const ScanOptions& opts);

struct TransferResult {
  enum class Aggregate { Consistent, Refuted, Inconclusive };
  int n = 0;
  Aggregate aggregate = Aggregate::Inconclusive;
  /// k = 1..n+2, Theta then S for each k.
  std::vector<ScanReport> reports;
  /// Index into `reports` of the first refuting scan.
  std::optional<std::size_t> witness_report;
  std::uint64_t seed = 0;
};

std::string_view to_string(TransferResult::Aggregate a);

/// Sign scans for k <= n and vanishing scans for k = n+1, n+2 in both
/// modes, run concurrently. Throws DimensionOutOfRange for n < 1.
TransferResult transfer_check(const MarkedSpace& space, int n, const ScanOptions& opts = {});

struct ProbePair {
  PointSequence y;
  /// Absent for probes of Theta_{n+2} only.
  std::optional<PointSequence> u;
};

struct BlumenthalScanOptions {
  std::size_t depth = kDefaultDepth;
  double tol_det = kDefaultTolDet;
  /// The tangent-space hypothesis is an input, never checked.
  bool tangent_assumed = true;
};

struct BlumenthalScanResult {
  int n = 0;
  /// Tail infimum of Theta_{k+1}(x^0..x^k), k = 1..n.
  std::vector<double> basis_tail_inf;
  /// Tail suprema of |Theta_{n+2}(x, y)| and |Theta_{n+3}(x, y, u)| over probes.
  double max_probe_n2 = 0.0;
  double max_probe_n3 = 0.0;
  bool condition_i = false;
  bool condition_ii = false;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
  bool tangent_assumed = true;
  std::size_t probes_checked = 0;
};

/// Probe sequences: the space's directions at r_m and at sqrt(r_m), used
/// alone and in all unordered pairs.
std::vector<ProbePair> default_probe_battery(const MarkedSpace& space,
                                             const NormalizingSequence& r);

/// Throws NonconvergentSequence when some sequence does not approach p over
/// the window, InvalidArgument when x_seqs is empty.
BlumenthalScanResult blumenthal_sequence_scan(const MarkedSpace& space,
                                              const std::vector<PointSequence>& x_seqs,
                                              const std::vector<ProbePair>& probes,
                                              const NormalizingSequence& r,
                                              const BlumenthalScanOptions& opts = {});

}  // namespace dgeo
