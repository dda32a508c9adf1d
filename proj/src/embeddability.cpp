#include "dgeo/embeddability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <variant>

namespace dgeo {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Menger: return "menger";
    case Criterion::Schoenberg: return "schoenberg";
    case Criterion::Blumenthal: return "blumenthal";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::Sign: return "sign";
    case Condition::Vanishing: return "vanishing";
    case Condition::StrictSign: return "strict-sign";
  }
  return "?";
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  long double acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) acc = acc * (n - r + i) / i;
  return static_cast<std::uint64_t>(std::llround(acc));
}

/// Calls `visit` on every r-subset of {0..n-1} in lexicographic order until
/// it returns false.
void for_each_combination(std::size_t n, std::size_t r,
                          const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  if (r > n || r == 0) return;
  std::vector<std::size_t> c(r);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    if (!visit(c)) return;
    std::size_t i = r;
    while (i > 0 && c[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < r; ++j) c[j] = c[j - 1] + 1;
  }
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t r, std::mt19937_64& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < r; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(r);
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Quantity whose sign/vanishing the criterion constrains, and the raw
/// value reported in witnesses.
struct Engine {
  std::function<double(const DistMatrix&)> constrained;
  std::function<double(const DistMatrix&)> reported;
};

Engine menger_engine() {
  return {[](const DistMatrix& m) { return cm_determinant(m).signed_value; },
          [](const DistMatrix& m) { return cm_determinant(m).value; }};
}

Engine schoenberg_engine() {
  auto sch = [](const DistMatrix& m) { return sch_determinant(m); };
  return {sch, sch};
}

EmbedVerdict run_criterion(const FiniteMetricSpace& space, int n, Criterion criterion,
                           const Engine& engine, const EmbedOptions& opts) {
  if (n < 1) throw Error(Errc::DimensionOutOfRange, "dimension must be >= 1");
  const std::size_t count = space.size();
  const int kmax = static_cast<int>(std::min<std::size_t>(std::size_t(n) + 2, count - 1));

  std::uint64_t total = 0;
  for (int k = 1; k <= kmax; ++k) total += binomial(count, std::size_t(k) + 1);

  EmbedVerdict out;
  out.dim_tested = n;
  out.criterion = criterion;
  out.embeddable = Verdict::Yes;
  out.exhaustive = (count <= opts.max_points && n <= opts.max_dim) || total <= opts.max_tuples;

  std::optional<Witness> ambiguous;
  bool rejected = false;

  auto visit = [&](int k, const std::vector<std::size_t>& subset) {
    ++out.tuples_checked;
    const Tuple t(subset);
    const DistMatrix dm = submatrix(space, t);
    const double v = engine.constrained(dm);
    const ZeroClass cls = classify(v, zero_scale(dm), opts.tol_det, opts.tol_exact);
    const bool sign_condition = k <= n;
    const Condition cond = sign_condition ? Condition::Sign : Condition::Vanishing;
    bool violation = false;
    bool near = false;
    if (sign_condition) {
      violation = cls == ZeroClass::Negative;
      near = cls == ZeroClass::NearZeroNegative;
    } else {
      violation = cls == ZeroClass::Positive || cls == ZeroClass::Negative;
      near = cls == ZeroClass::NearZeroPositive || cls == ZeroClass::NearZeroNegative;
    }
    if (violation) {
      out.witness = Witness{t, k, engine.reported(dm), cond};
      rejected = true;
      return false;
    }
    if (near && !ambiguous) ambiguous = Witness{t, k, engine.reported(dm), cond};
    return true;
  };

  for (int k = 1; k <= kmax && !rejected; ++k) {
    const std::size_t r = std::size_t(k) + 1;
    if (out.exhaustive) {
      for_each_combination(count, r, [&](const std::vector<std::size_t>& c) { return visit(k, c); });
    } else {
      std::mt19937_64 rng(opts.seed * 1000003ULL + r);
      const std::uint64_t budget = std::min(binomial(count, r), opts.samples_per_order);
      for (std::uint64_t s = 0; s < budget; ++s)
        if (!visit(k, random_subset(count, r, rng))) break;
    }
  }

  if (rejected) {
    out.embeddable = Verdict::No;
  } else if (ambiguous) {
    out.embeddable = Verdict::Undetermined;
    out.witness = ambiguous;
  }
  return out;
}

double signed_cm(const FiniteMetricSpace& space, const std::vector<std::size_t>& idx) {
  return cm_determinant(submatrix(space, Tuple(idx))).signed_value;
}

/// Orders `candidates` greedily: farthest pair first, then repeatedly the
/// point maximizing the signed Cayley–Menger determinant of the prefix.
/// Returns the prefix of length n+1, or the failing step as a witness.
std::variant<std::vector<std::size_t>, Witness> greedy_basis(
    const FiniteMetricSpace& space, const std::vector<std::size_t>& candidates, int n,
    const EmbedOptions& opts) {
  std::size_t bi = candidates[0], bj = candidates[1];
  double best = -1.0;
  for (std::size_t a = 0; a < candidates.size(); ++a)
    for (std::size_t b = a + 1; b < candidates.size(); ++b)
      if (space(candidates[a], candidates[b]) > best) {
        best = space(candidates[a], candidates[b]);
        bi = candidates[a];
        bj = candidates[b];
      }
  std::vector<std::size_t> prefix{bi, bj};
  for (int k = 2; k <= n; ++k) {
    double best_val = -std::numeric_limits<double>::infinity();
    std::size_t best_pt = 0;
    bool any = false;
    for (auto y : candidates) {
      if (std::find(prefix.begin(), prefix.end(), y) != prefix.end()) continue;
      auto trial = prefix;
      trial.push_back(y);
      const double v = signed_cm(space, trial);
      if (!any || v > best_val) {
        best_val = v;
        best_pt = y;
        any = true;
      }
    }
    auto trial = prefix;
    trial.push_back(best_pt);
    const DistMatrix dm = submatrix(space, Tuple(trial));
    const CMValue cm = cm_determinant(dm);
    if (classify(cm.signed_value, zero_scale(dm), opts.tol_det, opts.tol_exact) !=
        ZeroClass::Positive)
      return Witness{Tuple(trial), k, cm.value, Condition::StrictSign};
    prefix = std::move(trial);
  }
  return prefix;
}

/// D_{n+1}(basis, y) = 0 and D_{n+2}(basis, y, z) = 0 for all y, z outside
/// the basis; zero means below the noise floor. Values inside the band but
/// above the floor fail too, and are flagged as ambiguous by the caller.
std::optional<Witness> check_vanishing(const FiniteMetricSpace& space,
                                       const std::vector<std::size_t>& basis,
                                       const EmbedOptions& opts) {
  std::vector<std::size_t> rest;
  for (std::size_t y = 0; y < space.size(); ++y)
    if (std::find(basis.begin(), basis.end(), y) == basis.end()) rest.push_back(y);
  const int n = static_cast<int>(basis.size()) - 1;
  auto fails = [&](const std::vector<std::size_t>& idx, int k) -> std::optional<Witness> {
    const DistMatrix dm = submatrix(space, Tuple(idx));
    const CMValue cm = cm_determinant(dm);
    const ZeroClass cls = classify(cm.value, zero_scale(dm), opts.tol_det, opts.tol_exact);
    if (cls != ZeroClass::Zero) return Witness{Tuple(idx), k, cm.value, Condition::Vanishing};
    return std::nullopt;
  };
  for (auto y : rest) {
    auto idx = basis;
    idx.push_back(y);
    if (auto w = fails(idx, n + 1)) return w;
  }
  for (std::size_t a = 0; a < rest.size(); ++a)
    for (std::size_t b = a + 1; b < rest.size(); ++b) {
      auto idx = basis;
      idx.push_back(rest[a]);
      idx.push_back(rest[b]);
      if (auto w = fails(idx, n + 2)) return w;
    }
  return std::nullopt;
}

}  // namespace

EmbedVerdict menger_check(const FiniteMetricSpace& space, int n, const EmbedOptions& opts) {
  return run_criterion(space, n, Criterion::Menger, menger_engine(), opts);
}

EmbedVerdict schoenberg_check(const FiniteMetricSpace& space, int n, const EmbedOptions& opts) {
  return run_criterion(space, n, Criterion::Schoenberg, schoenberg_engine(), opts);
}

BasisSearchResult blumenthal_basis_search(const FiniteMetricSpace& space, int n,
                                          const EmbedOptions& opts) {
  if (n < 1) throw Error(Errc::DimensionOutOfRange, "dimension must be >= 1");
  if (space.size() < std::size_t(n) + 1)
    throw Error(Errc::DimensionOutOfRange, "space has fewer than n+1 points");

  BasisSearchResult out;
  std::vector<std::size_t> all(space.size());
  std::iota(all.begin(), all.end(), 0);

  auto near_zero = [&](const Witness& w) {
    const DistMatrix dm = submatrix(space, w.tuple);
    const ZeroClass c = classify(w.value, zero_scale(dm), opts.tol_det, opts.tol_exact);
    return c == ZeroClass::NearZeroPositive || c == ZeroClass::NearZeroNegative;
  };
  auto attempt = [&](const std::vector<std::size_t>& candidates) -> bool {
    auto g = greedy_basis(space, candidates, n, opts);
    if (auto* w = std::get_if<Witness>(&g)) {
      out.failure = *w;
      out.ambiguous |= near_zero(*w);
      return false;
    }
    const auto& basis = std::get<std::vector<std::size_t>>(g);
    if (auto w = check_vanishing(space, basis, opts)) {
      out.failure = w;
      out.ambiguous |= near_zero(*w);
      return false;
    }
    out.basis = Tuple(basis);
    return true;
  };

  if (attempt(all)) return out;
  if (space.size() <= 16 && space.size() > std::size_t(n) + 1) {
    const auto greedy_failure = out.failure;
    out.used_exhaustive_fallback = true;
    for_each_combination(space.size(), std::size_t(n) + 1,
                         [&](const std::vector<std::size_t>& c) { return !attempt(c); });
    if (!out.basis) out.failure = greedy_failure;
  }
  if (out.basis) out.ambiguous = false;
  return out;
}

EmbedVerdict blumenthal_check(const FiniteMetricSpace& space, int n, const EmbedOptions& opts) {
  if (n < 1) throw Error(Errc::DimensionOutOfRange, "dimension must be >= 1");
  EmbedVerdict out;
  out.dim_tested = n;
  out.criterion = Criterion::Blumenthal;
  out.embeddable = Verdict::Yes;
  if (space.size() == 1) return out;

  const int top = static_cast<int>(std::min<std::size_t>(std::size_t(n), space.size() - 1));
  std::optional<Witness> last_failure;
  bool ambiguous = false;
  for (int m = 1; m <= top; ++m) {
    const BasisSearchResult r = blumenthal_basis_search(space, m, opts);
    ++out.tuples_checked;
    if (r.basis) {
      const DistMatrix dm = submatrix(space, *r.basis);
      out.witness = Witness{*r.basis, m, cm_determinant(dm).value, Condition::StrictSign};
      return out;
    }
    last_failure = r.failure;
    ambiguous |= r.ambiguous;
  }
  out.embeddable = ambiguous ? Verdict::Undetermined : Verdict::No;
  out.witness = last_failure;
  return out;
}

EmbedVerdict check_embedding(const FiniteMetricSpace& space, int n, Criterion c,
                             const EmbedOptions& opts) {
  switch (c) {
    case Criterion::Menger: return menger_check(space, n, opts);
    case Criterion::Schoenberg: return schoenberg_check(space, n, opts);
    case Criterion::Blumenthal: return blumenthal_check(space, n, opts);
  }
  throw Error(Errc::InvalidArgument, "unknown criterion");
}

std::size_t central_point(const FiniteMetricSpace& space) {
  std::size_t best = 0;
  double best_ecc = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double ecc = space.dist().row(Eigen::Index(i)).maxCoeff();
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = i;
    }
  }
  return best;
}

namespace {

Tuple base_first_tuple(const FiniteMetricSpace& space, std::size_t base) {
  std::vector<std::size_t> idx{base};
  for (std::size_t i = 0; i < space.size(); ++i)
    if (i != base) idx.push_back(i);
  return Tuple(std::move(idx));
}

}  // namespace

MinDimResult min_embedding_dimension(const FiniteMetricSpace& space, const EmbedOptions& opts) {
  MinDimResult out;
  out.base = static_cast<int>(central_point(space));
  if (space.size() == 1) {
    out.feasible = true;
    out.psd.psd = true;
    return out;
  }
  const TauMatrix tau = tau_matrix(space, base_first_tuple(space, std::size_t(out.base)));
  out.psd = psd_check(tau.entries, PsdMode::Auto, kRealizationTol);
  out.feasible = out.psd.psd;
  if (!out.feasible) return out;
  out.m = out.psd.rank;
  out.verified = out.m >= 1 ? schoenberg_check(space, out.m, opts).embeddable : Verdict::Yes;
  return out;
}

Realization realize_coordinates(const FiniteMetricSpace& space, int n, double tol) {
  if (n < 1) throw Error(Errc::DimensionOutOfRange, "dimension must be >= 1");
  const auto count = static_cast<Eigen::Index>(space.size());
  Realization out;
  if (count == 1) {
    out.coords = Eigen::MatrixXd::Zero(1, 0);
    return out;
  }
  const std::size_t base = central_point(space);
  const Tuple order = base_first_tuple(space, base);
  const Eigen::MatrixXd gram = 0.5 * tau_matrix(space, order).entries;
  const double norm = gram.cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const auto& ev = eig.eigenvalues();
  if (ev(0) < -tol * norm)
    throw Error(Errc::NotEmbeddable, "Gram matrix has a negative eigenvalue");
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = ev.size() - 1; i >= 0; --i)
    if (ev(i) > tol * norm) kept.push_back(i);
  if (static_cast<int>(kept.size()) > n)
    throw Error(Errc::RankExceedsRequested, "realization needs more than n dimensions");

  out.m = static_cast<int>(kept.size());
  out.coords = Eigen::MatrixXd::Zero(count, out.m);
  for (int c = 0; c < out.m; ++c) {
    const Eigen::VectorXd col = eig.eigenvectors().col(kept[std::size_t(c)]) *
                                std::sqrt(ev(kept[std::size_t(c)]));
    for (Eigen::Index r = 1; r < count; ++r)
      out.coords(Eigen::Index(order[std::size_t(r)]), c) = col(r - 1);
  }
  const Eigen::RowVectorXd origin = out.coords.row(0);
  out.coords.rowwise() -= origin;

  for (Eigen::Index i = 0; i < count; ++i)
    for (Eigen::Index j = i + 1; j < count; ++j) {
      const double got = (out.coords.row(i) - out.coords.row(j)).norm();
      out.max_residual =
          std::max(out.max_residual, std::abs(got - space(std::size_t(i), std::size_t(j))));
    }
  return out;
}

}  // namespace dgeo
