#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dgeo/determinants.hpp"
#include "dgeo/metric.hpp"

namespace dgeo {

enum class Criterion { Menger, Schoenberg, Blumenthal };
enum class Verdict { Yes, No, Undetermined };

std::string_view to_string(Criterion c);
std::string_view to_string(Verdict v);

/// Which requirement a witness tuple failed.
enum class Condition {
  /// (-1)^{k+1} D_k >= 0 (or Sch >= 0) for k <= n.
  Sign,
  /// D_k = 0 (or Sch = 0) for k = n+1, n+2.
  Vanishing,
  /// Strict sign of a Blumenthal basis prefix.
  StrictSign,
};

std::string_view to_string(Condition c);

struct Witness {
  Tuple tuple;
  int k = 0;
  double value = 0.0;
  Condition condition = Condition::Sign;
};

struct Realization {
  /// One row per point; point 0 sits at the origin.
  Eigen::MatrixXd coords;
  int m = 0;
  double max_residual = 0.0;
};

struct EmbedVerdict {
  Verdict embeddable = Verdict::Undetermined;
  int dim_tested = 0;
  Criterion criterion = Criterion::Menger;
  /// Violating tuple for No; the ambiguous tuple for Undetermined; the
  /// basis for a Blumenthal Yes.
  std::optional<Witness> witness;
  std::optional<Realization> realization;
  bool exhaustive = true;
  std::uint64_t tuples_checked = 0;
};

struct EmbedOptions {
  double tol_det = kDefaultTolDet;
  double tol_exact = kDefaultTolExact;
  /// Exhaustive enumeration is used when |X| <= max_points and n <= max_dim,
  /// or when the total tuple count is at most max_tuples; otherwise tuples
  /// are sampled.
  std::size_t max_points = 24;
  int max_dim = 4;
  std::uint64_t max_tuples = 2'000'000;
  std::uint64_t samples_per_order = 200'000;
  std::uint64_t seed = 0;
};

EmbedVerdict menger_check(const FiniteMetricSpace& space, int n,
                          const EmbedOptions& opts = {});
EmbedVerdict schoenberg_check(const FiniteMetricSpace& space, int n,
                              const EmbedOptions& opts = {});
/// Embeddable in E^n iff the space is a single point or a Blumenthal basis
/// exists for some m <= n. Undetermined when no basis is found but some
/// candidate failed only inside the zero band.
EmbedVerdict blumenthal_check(const FiniteMetricSpace& space, int n,
                              const EmbedOptions& opts = {});

EmbedVerdict check_embedding(const FiniteMetricSpace& space, int n, Criterion c,
                             const EmbedOptions& opts = {});

struct MinDimResult {
  bool feasible = false;
  int m = 0;
  int base = 0;
  PsdResult psd;
  /// schoenberg_check(space, m) outcome; Yes unless the space is a point.
  Verdict verified = Verdict::Yes;
};

MinDimResult min_embedding_dimension(const FiniteMetricSpace& space,
                                     const EmbedOptions& opts = {});

/// Point minimizing its largest distance to the rest.
std::size_t central_point(const FiniteMetricSpace& space);

inline constexpr double kRealizationTol = 1e-9;

/// Coordinates in R^m (m <= n) from the spectral factorization of the
/// Gram matrix tau/2. Throws NotEmbeddable / RankExceedsRequested.
Realization realize_coordinates(const FiniteMetricSpace& space, int n,
                                double tol = kRealizationTol);

struct BasisSearchResult {
  std::optional<Tuple> basis;
  /// Failed check of the last candidate basis, or the stalled prefix.
  std::optional<Witness> failure;
  bool used_exhaustive_fallback = false;
  /// Some candidate failed only through a determinant inside the zero band;
  /// the absence of a basis is then not conclusive.
  bool ambiguous = false;
};

BasisSearchResult blumenthal_basis_search(const FiniteMetricSpace& space, int n,
                                          const EmbedOptions& opts = {});

}  // namespace dgeo
