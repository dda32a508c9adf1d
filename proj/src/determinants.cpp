#include "dgeo/determinants.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace dgeo {
namespace {

void require_tuple(int order) {
  if (order < 2) throw Error(Errc::TupleTooShort, "tuple needs at least two points");
}

double det(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 1.0;
  return a.partialPivLu().determinant();
}

}  // namespace

Eigen::MatrixXd bordered_matrix(const DistMatrix& m) {
  const int n = m.order();
  Eigen::MatrixXd b(n + 1, n + 1);
  b(0, 0) = 0.0;
  b.row(0).tail(n).setOnes();
  b.col(0).tail(n).setOnes();
  b.bottomRightCorner(n, n) = m.entries().cwiseAbs2();
  return b;
}

CMValue cm_determinant(const DistMatrix& m) {
  require_tuple(m.order());
  CMValue out;
  out.k = m.order() - 1;
  out.value = det(bordered_matrix(m));
  out.signed_value = (out.k % 2 == 1) ? out.value : -out.value;
  return out;
}

double simplex_volume_sq(const DistMatrix& m) {
  const CMValue cm = cm_determinant(m);
  double denom = std::ldexp(1.0, cm.k);
  double fact = 1.0;
  for (int i = 2; i <= cm.k; ++i) fact *= i;
  denom *= fact * fact;
  return cm.signed_value / denom;
}

TauMatrix tau_matrix(const DistMatrix& m) {
  require_tuple(m.order());
  const int k = m.order() - 1;
  TauMatrix out;
  out.base = 0;
  out.entries.resize(k, k);
  const auto sq = m.entries().cwiseAbs2();
  for (int i = 1; i <= k; ++i)
    for (int j = i; j <= k; ++j) {
      const double v = sq(0, i) + sq(0, j) - sq(i, j);
      out.entries(i - 1, j - 1) = v;
      out.entries(j - 1, i - 1) = v;
    }
  return out;
}

double sch_determinant(const DistMatrix& m) { return det(tau_matrix(m).entries); }

CMValue cm_determinant(const FiniteMetricSpace& space, const Tuple& t) {
  require_tuple(static_cast<int>(t.size()));
  return cm_determinant(submatrix(space, t));
}

double simplex_volume_sq(const FiniteMetricSpace& space, const Tuple& t) {
  require_tuple(static_cast<int>(t.size()));
  return simplex_volume_sq(submatrix(space, t));
}

TauMatrix tau_matrix(const FiniteMetricSpace& space, const Tuple& t) {
  require_tuple(static_cast<int>(t.size()));
  TauMatrix out = tau_matrix(submatrix(space, t));
  out.base = static_cast<int>(t[0]);
  return out;
}

double sch_determinant(const FiniteMetricSpace& space, const Tuple& t) {
  require_tuple(static_cast<int>(t.size()));
  return sch_determinant(submatrix(space, t));
}

double zero_scale(const DistMatrix& m) {
  const double dmax = m.max_entry();
  return std::pow(dmax * dmax, m.order() - 1);
}

ZeroClass classify(double value, double scale, double tol_det, double tol_exact) {
  const double mag = std::abs(value);
  if (mag <= tol_exact * scale) return ZeroClass::Zero;
  if (mag <= tol_det * scale)
    return value > 0 ? ZeroClass::NearZeroPositive : ZeroClass::NearZeroNegative;
  return value > 0 ? ZeroClass::Positive : ZeroClass::Negative;
}

PsdResult psd_check(const Eigen::MatrixXd& m, PsdMode mode, double tol) {
  if (m.rows() != m.cols()) throw Error(Errc::NotSymmetric, "matrix is not square");
  const int n = static_cast<int>(m.rows());
  const double norm = n == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol * norm)
        throw Error(Errc::NotSymmetric, "matrix is not symmetric",
                    {std::size_t(i), std::size_t(j)});

  if (mode == PsdMode::Auto) mode = n <= kAutoMinorOrder ? PsdMode::AllMinors : PsdMode::Spectral;
  if (mode == PsdMode::AllMinors && n > kMaxMinorOrder)
    throw Error(Errc::MinorModeTooLarge, "all-minors mode supports order <= 20");

  PsdResult out;
  out.mode_used = mode;
  if (n == 0) {
    out.psd = true;
    return out;
  }

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  out.min_eigenvalue = ev(0);
  for (int i = 0; i < n; ++i)
    if (ev(i) > tol * norm) ++out.rank;

  if (mode == PsdMode::Spectral) {
    out.psd = ev(0) >= -tol * norm;
    return out;
  }

  // Every principal minor, subsets encoded as bitmasks.
  out.psd = true;
  double worst = 0.0;
  const std::uint32_t subsets = std::uint32_t(1) << n;
  std::vector<int> idx;
  for (std::uint32_t mask = 1; mask < subsets; ++mask) {
    idx.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (std::uint32_t(1) << i)) idx.push_back(i);
    const int s = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) sub(a, b) = sym(idx[a], idx[b]);
    const double minor = det(sub);
    const double floor = tol * std::pow(norm, s);
    if (minor < -floor) {
      const double rel = minor / std::pow(norm, s);
      if (out.psd || rel < worst) {
        worst = rel;
        out.witness_subset = idx;
        out.witness_minor = minor;
      }
      out.psd = false;
    }
  }
  return out;
}

}  // namespace dgeo
