#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dgeo/error.hpp"

namespace dgeo {

inline constexpr double kDefaultMetricTol = 1e-9;

/// Ordered selection of points from a space. Repeats are allowed: the
/// functionals range over X^{k+1}, not over subsets.
class Tuple {
 public:
  Tuple() = default;
  Tuple(std::initializer_list<std::size_t> idx) : idx_(idx) {}
  explicit Tuple(std::vector<std::size_t> idx) : idx_(std::move(idx)) {}

  std::size_t size() const noexcept { return idx_.size(); }
  std::size_t operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<std::size_t>& indices() const noexcept { return idx_; }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }

  bool operator==(const Tuple&) const = default;

 private:
  std::vector<std::size_t> idx_;
};

/// Symmetric, zero-diagonal matrix of pairwise distances between the
/// entries of a tuple.
class DistMatrix {
 public:
  DistMatrix() = default;
  /// Throws NotSymmetric / NonzeroDiagonal / NonFinite.
  explicit DistMatrix(Eigen::MatrixXd entries);

  int order() const noexcept { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double max_entry() const;

  DistMatrix scaled(double factor) const;

 private:
  Eigen::MatrixXd entries_;
};

/// A validated finite metric space. Instances are only produced by
/// validate_metric (or operations that preserve the axioms).
class FiniteMetricSpace {
 public:
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Eigen::MatrixXd& dist() const noexcept { return dist_; }
  double operator()(std::size_t i, std::size_t j) const {
    return dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double tol() const noexcept { return tol_; }

 private:
  friend FiniteMetricSpace validate_metric(const Eigen::MatrixXd&, double,
                                           std::vector<std::string>);
  friend FiniteMetricSpace scale_metric(const FiniteMetricSpace&, double);

  std::vector<std::string> labels_;
  Eigen::MatrixXd dist_;
  double tol_ = kDefaultMetricTol;
};

/// Checks the metric axioms and builds a space. `tol` is relative to the
/// largest entry. On failure throws Error naming the worst offender of the
/// first failing axiom, in the order: shape/finiteness, diagonal,
/// negativity, symmetry, coincidence, triangle inequality.
FiniteMetricSpace validate_metric(const Eigen::MatrixXd& raw,
                                  double tol = kDefaultMetricTol,
                                  std::vector<std::string> labels = {});

DistMatrix submatrix(const FiniteMetricSpace& space, const Tuple& t);

FiniteMetricSpace scale_metric(const FiniteMetricSpace& space, double lambda);

}  // namespace dgeo
