#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dgeo/metric.hpp"

namespace dgeo {

inline constexpr double kDefaultTolDet = 1e-8;
/// Below this relative magnitude a determinant is indistinguishable from
/// floating-point noise and is treated as an exact zero.
inline constexpr double kDefaultTolExact = 1e-12;

/// Cayley–Menger determinant of a (k+1)-point tuple.
struct CMValue {
  int k = 0;
  double value = 0.0;
  /// (-1)^{k+1} * value; nonnegative on realizable data.
  double signed_value = 0.0;
};

/// tau_ij = d^2(x0,xi) + d^2(x0,xj) - d^2(xi,xj), i,j = 1..k; the matrix of
/// the Schoenberg quadratic form (twice the Gram matrix of x_i - x_0).
struct TauMatrix {
  int base = 0;
  Eigen::MatrixXd entries;
};

// Engines on an explicit distance matrix of order k+1.
CMValue cm_determinant(const DistMatrix& m);
double simplex_volume_sq(const DistMatrix& m);
TauMatrix tau_matrix(const DistMatrix& m);
double sch_determinant(const DistMatrix& m);

// Same engines addressed by tuple.
CMValue cm_determinant(const FiniteMetricSpace& space, const Tuple& t);
double simplex_volume_sq(const FiniteMetricSpace& space, const Tuple& t);
TauMatrix tau_matrix(const FiniteMetricSpace& space, const Tuple& t);
double sch_determinant(const FiniteMetricSpace& space, const Tuple& t);

/// The (k+2)x(k+2) bordered matrix whose determinant is D_k.
Eigen::MatrixXd bordered_matrix(const DistMatrix& m);

/// Scale on which D_k and Sch of this tuple are compared against zero:
/// (largest squared distance)^k. D_k and Sch are homogeneous of degree 2k,
/// so `tol * zero_scale(m)` is a scale-free zero band.
double zero_scale(const DistMatrix& m);

enum class ZeroClass {
  Positive,
  Negative,
  /// |v| within the noise floor; counts as an exact zero.
  Zero,
  /// Within the zero band but above the noise floor.
  NearZeroPositive,
  NearZeroNegative,
};

ZeroClass classify(double value, double scale, double tol_det = kDefaultTolDet,
                   double tol_exact = kDefaultTolExact);

enum class PsdMode { Auto, AllMinors, Spectral };

struct PsdResult {
  bool psd = false;
  int rank = 0;
  PsdMode mode_used = PsdMode::Spectral;
  /// Violating principal subset (all-minors mode) and its minor.
  std::vector<int> witness_subset;
  double witness_minor = 0.0;
  /// Smallest eigenvalue; the witness in spectral mode.
  double min_eigenvalue = 0.0;
};

/// Positive-semidefiniteness and rank of a symmetric matrix. All-minors
/// mode checks every principal minor (of size s) against -tol * |m|^s with
/// |m| the largest absolute entry; spectral mode checks the smallest
/// eigenvalue against -tol * |m|. Rank always counts eigenvalues above
/// tol * |m|. Auto picks all-minors for order <= 8.
PsdResult psd_check(const Eigen::MatrixXd& m, PsdMode mode = PsdMode::Auto,
                    double tol = 1e-9);

inline constexpr int kMaxMinorOrder = 20;
inline constexpr int kAutoMinorOrder = 8;

}  // namespace dgeo
