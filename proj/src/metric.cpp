#include "dgeo/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dgeo {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonSquare: return "NonSquare";
    case Errc::NonFinite: return "NonFinite";
    case Errc::Asymmetric: return "Asymmetric";
    case Errc::NegativeDistance: return "NegativeDistance";
    case Errc::NonzeroDiagonal: return "NonzeroDiagonal";
    case Errc::TriangleViolation: return "TriangleViolation";
    case Errc::CoincidentPoints: return "CoincidentPoints";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonpositiveScale: return "NonpositiveScale";
    case Errc::TupleTooShort: return "TupleTooShort";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::MinorModeTooLarge: return "MinorModeTooLarge";
    case Errc::DimensionOutOfRange: return "DimensionOutOfRange";
    case Errc::NotEmbeddable: return "NotEmbeddable";
    case Errc::RankExceedsRequested: return "RankExceedsRequested";
    case Errc::NonpositiveExponent: return "NonpositiveExponent";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::DegenerateNormalizer: return "DegenerateNormalizer";
    case Errc::UnstableInput: return "UnstableInput";
    case Errc::MergeInconsistency: return "MergeInconsistency";
    case Errc::EmptySample: return "EmptySample";
    case Errc::SamplerScaleMismatch: return "SamplerScaleMismatch";
    case Errc::NonconvergentSequence: return "NonconvergentSequence";
    case Errc::MarkedPointOutsideRegion: return "MarkedPointOutsideRegion";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Parse: return "Parse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string describe(std::string_view what, std::initializer_list<std::size_t> idx,
                     double amount) {
  std::ostringstream os;
  os << what << '(';
  bool first = true;
  for (auto i : idx) {
    os << (first ? "" : ",") << i;
    first = false;
  }
  os << ')';
  if (amount != 0.0) os << " by " << amount;
  return os.str();
}

}  // namespace

DistMatrix::DistMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    throw Error(Errc::NonSquare, "distance matrix is not square");
  const auto n = entries_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries_(i, i) != 0.0)
      throw Error(Errc::NonzeroDiagonal, describe("NonzeroDiagonal", {std::size_t(i)}, 0),
                  {std::size_t(i)});
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(entries_(i, j)))
        throw Error(Errc::NonFinite, "non-finite distance entry");
      if (entries_(i, j) != entries_(j, i))
        throw Error(Errc::NotSymmetric,
                    describe("NotSymmetric", {std::size_t(i), std::size_t(j)}, 0),
                    {std::size_t(i), std::size_t(j)});
    }
  }
}

double DistMatrix::max_entry() const {
  return entries_.size() == 0 ? 0.0 : entries_.maxCoeff();
}

DistMatrix DistMatrix::scaled(double factor) const {
  DistMatrix out;
  out.entries_ = entries_ * factor;
  return out;
}

FiniteMetricSpace validate_metric(const Eigen::MatrixXd& raw, double tol,
                                  std::vector<std::string> labels) {
  if (raw.rows() != raw.cols())
    throw Error(Errc::NonSquare, "distance matrix is not square");
  if (!(tol >= 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be nonnegative");
  const auto n = static_cast<std::size_t>(raw.rows());
  if (n == 0) throw Error(Errc::NonSquare, "distance matrix is empty");
  if (!labels.empty() && labels.size() != n)
    throw Error(Errc::InvalidArgument, "label count does not match matrix order");
  if (!raw.allFinite()) throw Error(Errc::NonFinite, "distance matrix has non-finite entries");

  auto at = [&](std::size_t i, std::size_t j) {
    return raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  const double scale = raw.cwiseAbs().maxCoeff();
  const double abs_tol = tol * scale;

  for (std::size_t i = 0; i < n; ++i)
    if (at(i, i) != 0.0)
      throw Error(Errc::NonzeroDiagonal, describe("NonzeroDiagonal", {i}, at(i, i)), {i});

  // Each remaining axiom reports its worst offender.
  {
    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (at(i, j) < -worst) {
          worst = -at(i, j);
          wi = i;
          wj = j;
        }
    if (worst > 0.0)
      throw Error(Errc::NegativeDistance, describe("NegativeDistance", {wi, wj}, worst),
                  {wi, wj});
  }
  {
    double worst = abs_tol;
    bool found = false;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double gap = std::abs(at(i, j) - at(j, i));
        if (gap > worst) {
          worst = gap;
          wi = i;
          wj = j;
          found = true;
        }
      }
    if (found)
      throw Error(Errc::Asymmetric, describe("Asymmetric", {wi, wj}, worst), {wi, wj});
  }

  Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (sym(Eigen::Index(i), Eigen::Index(j)) == 0.0)
        throw Error(Errc::CoincidentPoints, describe("CoincidentPoints", {i, j}, 0), {i, j});

  {
    double worst = abs_tol;
    bool found = false;
    std::size_t wi = 0, wj = 0, wk = 0;
    for (Eigen::Index i = 0; i < Eigen::Index(n); ++i)
      for (Eigen::Index j = i + 1; j < Eigen::Index(n); ++j)
        for (Eigen::Index k = 0; k < Eigen::Index(n); ++k) {
          if (k == i || k == j) continue;
          const double excess = sym(i, j) - sym(i, k) - sym(k, j);
          if (excess > worst) {
            worst = excess;
            wi = std::size_t(i);
            wj = std::size_t(j);
            wk = std::size_t(k);
            found = true;
          }
        }
    if (found)
      throw Error(Errc::TriangleViolation,
                  describe("TriangleViolation", {wi, wj, wk}, worst), {wi, wj, wk});
  }

  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  FiniteMetricSpace out;
  out.labels_ = std::move(labels);
  out.dist_ = std::move(sym);
  out.tol_ = tol;
  return out;
}

DistMatrix submatrix(const FiniteMetricSpace& space, const Tuple& t) {
  const auto k = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    if (t[std::size_t(a)] >= space.size())
      throw Error(Errc::IndexOutOfRange, "tuple index out of range", {t[std::size_t(a)]});
  }
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) m(a, b) = space(t[std::size_t(a)], t[std::size_t(b)]);
  return DistMatrix(std::move(m));
}

FiniteMetricSpace scale_metric(const FiniteMetricSpace& space, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw Error(Errc::NonpositiveScale, "scale factor must be positive");
  FiniteMetricSpace out = space;
  out.dist_ *= lambda;
  return out;
}

}  // namespace dgeo
