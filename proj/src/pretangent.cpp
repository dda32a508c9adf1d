#include "dgeo/pretangent.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

namespace dgeo {

namespace {

void require_pair(std::size_t n) {
  if (n < 2) throw Error(Errc::TupleTooShort, "tuple needs at least two points");
}

DistMatrix pairwise(const MarkedSpace& space, const std::vector<Point>& pts) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      d(i, j) = d(j, i) = space.distance(pts[std::size_t(i)], pts[std::size_t(j)]);
  return DistMatrix(std::move(d));
}

/// Least-squares slope of log v against log s over the entries with v > 0.
std::optional<double> loglog_slope(const std::vector<double>& s, const std::vector<double>& v) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (v[i] > 0.0 && std::isfinite(v[i])) {
      xs.push_back(std::log(s[i]));
      ys.push_back(std::log(v[i]));
    }
  if (xs.size() < 2) return std::nullopt;
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

void check_normalizer(const NormalizingSequence& r, std::size_t depth) {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < depth; ++m) {
    const double v = r(m);
    if (!(v > 0.0) || !std::isnormal(v) || !(v < prev))
      throw Error(Errc::DegenerateNormalizer,
                  "normalizing sequence is not positive and decreasing at m = " +
                      std::to_string(m));
    prev = v;
  }
}

void check_depth(std::size_t depth) {
  if (depth < kMinDepth) throw Error(Errc::InvalidArgument, "depth must be at least 16");
}

}  // namespace

// ---------------------------------------------------------------------------
// Tuples and functionals

MarkedTuple make_marked_tuple(const MarkedSpace& space, const std::vector<Point>& pts) {
  MarkedTuple t{pairwise(space, pts), {}};
  for (const auto& x : pts) t.to_marked.push_back(space.to_marked(x));
  return t;
}

MarkedTuple make_marked_tuple(const FiniteMetricSpace& space, std::size_t marked,
                              const Tuple& t) {
  if (marked >= space.size()) throw Error(Errc::IndexOutOfRange, "marked index out of range");
  MarkedTuple out{submatrix(space, t), {}};
  for (std::size_t i : t) out.to_marked.push_back(space(i, marked));
  return out;
}

double delta_scale(const MarkedTuple& t) {
  double m = 0.0;
  for (double d : t.to_marked) m = std::max(m, d);
  return m;
}

double delta_scale(const MarkedSpace& space, const std::vector<Point>& pts) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, space.to_marked(x));
  return m;
}

double epsilon_scale(const MarkedTuple& t, double s) {
  if (!(s > 0.0)) throw Error(Errc::NonpositiveExponent, "exponent must be positive");
  // Factor out the largest distance so small s does not overflow.
  const double delta = delta_scale(t);
  if (delta == 0.0) return 0.0;
  double sum = 0.0;
  for (double d : t.to_marked) sum += std::pow(d / delta, s);
  return delta * std::pow(sum, 1.0 / s);
}

double epsilon_scale(const MarkedSpace& space, const std::vector<Point>& pts, double s) {
  MarkedTuple t{DistMatrix{}, {}};
  for (const auto& x : pts) t.to_marked.push_back(space.to_marked(x));
  return epsilon_scale(t, s);
}

HomogeneousFunctional cm_functional(int k) {
  return {"D_" + std::to_string(k), k + 1, 2.0 * k,
          [](const DistMatrix& m) { return cm_determinant(m).value; }};
}

HomogeneousFunctional signed_cm_functional(int k) {
  return {"signed D_" + std::to_string(k), k + 1, 2.0 * k,
          [](const DistMatrix& m) { return cm_determinant(m).signed_value; }};
}

HomogeneousFunctional schoenberg_functional(int k) {
  return {"Sch_" + std::to_string(k), k + 1, 2.0 * k,
          [](const DistMatrix& m) { return sch_determinant(m); }};
}

HomogeneousFunctional ultrametric_functional() {
  return {"ultra", 3, 1.0,
          [](const DistMatrix& m) { return std::max(m(0, 2), m(2, 1)) - m(0, 1); }};
}

HomogeneousFunctional scaled(HomogeneousFunctional f, double c) {
  auto inner = std::move(f.eval);
  f.name = std::to_string(c) + "*" + f.name;
  f.eval = [inner = std::move(inner), c](const DistMatrix& m) { return c * inner(m); };
  return f;
}

double star_transform(const HomogeneousFunctional& f, const MarkedTuple& t) {
  if (static_cast<int>(t.size()) != f.arity || t.m.order() != f.arity)
    throw Error(Errc::ArityMismatch, "tuple size " + std::to_string(t.size()) +
                                         " does not match arity " + std::to_string(f.arity));
  const double delta = delta_scale(t);
  if (delta == 0.0) return 0.0;
  return f(t.m.scaled(1.0 / delta));
}

double star_transform(const HomogeneousFunctional& f, const MarkedSpace& space,
                      const std::vector<Point>& pts) {
  return star_transform(f, make_marked_tuple(space, pts));
}

double theta(const MarkedTuple& t) {
  require_pair(t.size());
  return star_transform(signed_cm_functional(static_cast<int>(t.size()) - 1), t);
}

double theta(const MarkedSpace& space, const std::vector<Point>& pts) {
  require_pair(pts.size());
  return theta(make_marked_tuple(space, pts));
}

double s_functional(const MarkedTuple& t) {
  require_pair(t.size());
  return star_transform(schoenberg_functional(static_cast<int>(t.size()) - 1), t);
}

double s_functional(const MarkedSpace& space, const std::vector<Point>& pts) {
  require_pair(pts.size());
  return s_functional(make_marked_tuple(space, pts));
}

// ---------------------------------------------------------------------------
// Sequences and stability

NormalizingSequence NormalizingSequence::geometric(double r0, double q) {
  if (!(r0 > 0.0) || !(q > 0.0 && q < 1.0))
    throw Error(Errc::InvalidArgument, "geometric sequence needs r0 > 0 and 0 < q < 1");
  return NormalizingSequence("geometric", [r0, q](std::size_t m) {
    return r0 * std::pow(q, static_cast<double>(m));
  });
}

NormalizingSequence NormalizingSequence::custom(std::string name,
                                                std::function<double(std::size_t)> r) {
  return NormalizingSequence(std::move(name), std::move(r));
}

PointSequence constant_sequence(const MarkedSpace& space) {
  Point p = space.marked_point();
  return {"p", [p](std::size_t) { return p; }};
}

std::string_view to_string(StabilityVerdict::Status s) {
  switch (s) {
    case StabilityVerdict::Status::Stable: return "stable";
    case StabilityVerdict::Status::Unstable: return "unstable";
    case StabilityVerdict::Status::Undetermined: return "undetermined";
  }
  return "?";
}

StabilityVerdict mutual_stability(const MarkedSpace& space, const PointSequence& x,
                                  const PointSequence& y, const NormalizingSequence& r,
                                  std::size_t depth, double tol) {
  check_depth(depth);
  check_normalizer(r, depth);
  const std::size_t start = depth / 2;
  std::vector<double> ratio;
  for (std::size_t m = start; m < depth; ++m) ratio.push_back(space.distance(x(m), y(m)) / r(m));

  auto osc = [](auto first, auto last) {
    const auto [lo, hi] = std::minmax_element(first, last);
    return *hi - *lo;
  };
  const auto mid = ratio.begin() + std::ptrdiff_t(ratio.size() / 2);

  StabilityVerdict v;
  v.depth_used = depth;
  v.oscillation = osc(ratio.begin(), ratio.end());
  v.limit = std::accumulate(ratio.begin(), ratio.end(), 0.0) / double(ratio.size());
  const double early = osc(ratio.begin(), mid);
  const double late = osc(mid, ratio.end());
  if (v.oscillation <= tol)
    v.status = StabilityVerdict::Status::Stable;
  else if (late > 10.0 * tol && late >= 0.75 * early)
    v.status = StabilityVerdict::Status::Unstable;
  else
    v.status = StabilityVerdict::Status::Undetermined;
  return v;
}

SequenceFamily::SequenceFamily(const MarkedSpace& space, std::vector<PointSequence> others) {
  members_.reserve(others.size() + 1);
  members_.push_back(constant_sequence(space));
  for (auto& s : others) members_.push_back(std::move(s));
}

VerdictMatrix pseudometric_matrix(const MarkedSpace& space, const SequenceFamily& family,
                                  const NormalizingSequence& r, std::size_t depth, double tol) {
  check_depth(depth);
  check_normalizer(r, depth);
  const std::size_t n = family.size();
  VerdictMatrix pm(n, std::vector<StabilityVerdict>(n));
  for (std::size_t i = 0; i < n; ++i) {
    pm[i][i] = {StabilityVerdict::Status::Stable, 0.0, depth, 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      pm[i][j] = mutual_stability(space, family[i], family[j], r, depth, tol);
      pm[j][i] = pm[i][j];
    }
  }
  return pm;
}

bool self_stable(const VerdictMatrix& pm) {
  for (const auto& row : pm)
    for (const auto& v : row)
      if (!v.stable()) return false;
  return true;
}

QuotientSpace metric_identification(const Eigen::MatrixXd& pseudo, double merge_tol,
                                    double tol) {
  if (pseudo.rows() != pseudo.cols() || pseudo.rows() == 0)
    throw Error(Errc::NonSquare, "pseudometric matrix must be square and nonempty");
  const auto n = static_cast<std::size_t>(pseudo.rows());
  auto at = [&](std::size_t i, std::size_t j) {
    return pseudo(Eigen::Index(i), Eigen::Index(j));
  };

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::max(at(i, j), at(j, i)) <= merge_tol) {
        const std::size_t a = find(i), b = find(j);
        parent[std::max(a, b)] = std::min(a, b);
      }

  QuotientSpace q;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = find(i);
    if (slot[root] == n) {
      slot[root] = q.classes.size();
      q.classes.emplace_back();
    }
    q.classes[slot[root]].push_back(i);
  }

  const double scale = std::max(1.0, pseudo.cwiseAbs().maxCoeff());
  for (const auto& cls : q.classes) {
    const double bound = double(cls.size() - 1) * merge_tol + tol * scale;
    for (std::size_t a : cls)
      for (std::size_t b : cls)
        if (at(a, b) > bound)
          throw Error(Errc::MergeInconsistency,
                      "merged sequences " + std::to_string(a) + " and " + std::to_string(b) +
                          " are at pseudodistance " + std::to_string(at(a, b)),
                      {a, b});
  }

  const auto c = static_cast<Eigen::Index>(q.classes.size());
  Eigen::MatrixXd rho(c, c);
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < c; ++i) {
    labels.push_back(std::to_string(q.classes[std::size_t(i)].front()));
    for (Eigen::Index j = 0; j < c; ++j)
      rho(i, j) = i == j ? 0.0
                         : at(q.classes[std::size_t(i)].front(), q.classes[std::size_t(j)].front());
  }
  q.rho = validate_metric(rho, tol, std::move(labels));
  return q;
}

QuotientSpace metric_identification(const VerdictMatrix& pm, double merge_tol, double tol) {
  const auto n = static_cast<Eigen::Index>(pm.size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pm[std::size_t(i)].size() != pm.size())
      throw Error(Errc::NonSquare, "verdict matrix must be square");
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& v = pm[std::size_t(i)][std::size_t(j)];
      if (!v.stable())
        throw Error(Errc::UnstableInput, "pair is not mutually stable",
                    {std::size_t(i), std::size_t(j)});
      d(i, j) = v.limit;
    }
  }
  return metric_identification(d, merge_tol, tol);
}

// ---------------------------------------------------------------------------
// Scanners

std::string_view to_string(ScanMode m) { return m == ScanMode::Theta ? "theta" : "s"; }

std::string_view to_string(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::Supports: return "supports";
    case ScanVerdict::Refutes: return "refutes";
    case ScanVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(TransferResult::Aggregate a) {
  switch (a) {
    case TransferResult::Aggregate::Consistent: return "consistent";
    case TransferResult::Aggregate::Refuted: return "refuted";
    case TransferResult::Aggregate::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> ScaleLadder::scales() const {
  if (!(s0 > 0.0) || !(q > 0.0 && q < 1.0) || rungs == 0)
    throw Error(Errc::InvalidArgument, "scale ladder needs s0 > 0, 0 < q < 1, rungs >= 1");
  std::vector<double> out;
  for (std::size_t j = 0; j < rungs; ++j) out.push_back(s0 * std::pow(q, double(j)));
  return out;
}

ScanVerdict judge(const ScanReport& r, const ScanOptions& opts) {
  const std::size_t rungs = r.scales.size();
  const std::size_t start = rungs < 2 ? 0 : rungs / 2;
  const double band = 10.0 * opts.tol_det;

  if (r.condition != Condition::Vanishing) {
    if (r.running_liminf >= -band) return ScanVerdict::Supports;
    bool persistent = true;
    for (std::size_t j = start; j < rungs; ++j) persistent &= r.per_scale_inf[j] < -band;
    return persistent ? ScanVerdict::Refutes : ScanVerdict::Inconclusive;
  }

  std::vector<double> mag(rungs);
  for (std::size_t j = 0; j < rungs; ++j)
    mag[j] = std::max(std::abs(r.per_scale_inf[j]), std::abs(r.per_scale_sup[j]));
  bool all_zero = true, all_large = true;
  for (std::size_t j = start; j < rungs; ++j) {
    all_zero &= mag[j] <= band;
    all_large &= mag[j] > opts.vanish_tol;
  }
  if (all_zero) return ScanVerdict::Supports;
  const bool decaying = r.trend && *r.trend > 0.5;
  const bool small_end = mag[rungs - 1] <= opts.vanish_tol &&
                         (rungs < 2 || mag[rungs - 2] <= opts.vanish_tol);
  if (decaying && small_end) return ScanVerdict::Supports;
  if (!decaying && all_large) return ScanVerdict::Refutes;
  return ScanVerdict::Inconclusive;
}

ScanReport liminf_scan(const MarkedSpace& space, int k, ScanMode mode, Condition condition,
                       const ScanOptions& opts) {
  if (k < 1) throw Error(Errc::TupleTooShort, "scan needs k >= 1");
  if (opts.samples_per_scale == 0) throw Error(Errc::EmptySample, "no samples per scale");

  ScanReport r;
  r.k = k;
  r.mode = mode;
  r.condition = condition;
  r.seed = opts.seed;
  r.scales = opts.ladder.scales();
  const std::size_t rungs = r.scales.size();
  const std::size_t start = rungs < 2 ? 0 : rungs / 2;
  const std::uint64_t base = mix_seed(opts.seed, std::uint64_t(k));
  double worst = condition == Condition::Vanishing ? -1.0 : std::numeric_limits<double>::infinity();

  for (std::size_t j = 0; j < rungs; ++j) {
    const double s = r.scales[j];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < opts.samples_per_scale; ++i) {
      const auto pts = space.sample(s, std::size_t(k) + 1, mix_seed(base, i));
      const MarkedTuple t = make_marked_tuple(space, pts);
      const double delta = delta_scale(t);
      if (delta != 0.0 && (delta < 0.25 * s || delta > 2.0 * s))
        throw Error(Errc::SamplerScaleMismatch,
                    "sampled tuple has delta " + std::to_string(delta) + " at scale " +
                        std::to_string(s));
      const double v = mode == ScanMode::Theta ? theta(t) : s_functional(t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      const bool adverse = condition == Condition::Vanishing
                               ? (j + 1 == rungs && std::abs(v) > worst)
                               : (j >= start && v < worst);
      if (adverse) {
        worst = condition == Condition::Vanishing ? std::abs(v) : v;
        r.witness_points = pts;
        r.witness_value = v;
        r.witness_scale = s;
      }
    }
    r.per_scale_inf.push_back(lo);
    r.per_scale_sup.push_back(hi);
  }

  r.running_liminf = *std::min_element(r.per_scale_inf.begin() + std::ptrdiff_t(start),
                                       r.per_scale_inf.end());
  r.running_limsup = *std::max_element(r.per_scale_sup.begin() + std::ptrdiff_t(start),
                                       r.per_scale_sup.end());

  std::vector<double> mag(rungs), ainf(rungs), asup(rungs);
  for (std::size_t j = 0; j < rungs; ++j) {
    ainf[j] = std::abs(r.per_scale_inf[j]);
    asup[j] = std::abs(r.per_scale_sup[j]);
    mag[j] = std::max(ainf[j], asup[j]);
  }
  r.trend = loglog_slope(r.scales, mag);
  r.trend_inf = loglog_slope(r.scales, ainf);
  r.trend_sup = loglog_slope(r.scales, asup);
  r.verdict = judge(r, opts);
  return r;
}

TransferResult transfer_check(const MarkedSpace& space, int n, const ScanOptions& opts) {
  if (n < 1) throw Error(Errc::DimensionOutOfRange, "transfer check needs n >= 1");
  TransferResult out;
  out.n = n;
  out.seed = opts.seed;

  std::vector<std::future<ScanReport>> jobs;
  for (int k = 1; k <= n + 2; ++k)
    for (ScanMode mode : {ScanMode::Theta, ScanMode::S}) {
      const Condition c = k <= n ? Condition::Sign : Condition::Vanishing;
      jobs.push_back(std::async(std::launch::async, [&space, k, mode, c, &opts] {
        return liminf_scan(space, k, mode, c, opts);
      }));
    }
  for (auto& j : jobs) out.reports.push_back(j.get());

  bool all_support = true;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const ScanVerdict v = out.reports[i].verdict;
    if (v == ScanVerdict::Refutes && !out.witness_report) out.witness_report = i;
    all_support &= v == ScanVerdict::Supports;
  }
  out.aggregate = out.witness_report ? TransferResult::Aggregate::Refuted
                  : all_support      ? TransferResult::Aggregate::Consistent
                                     : TransferResult::Aggregate::Inconclusive;
  return out;
}

std::vector<ProbePair> default_probe_battery(const MarkedSpace& space,
                                             const NormalizingSequence& r) {
  const std::size_t count = space.directions(r(0)).size();
  std::vector<PointSequence> seqs;
  for (std::size_t j = 0; j < count; ++j) {
    seqs.push_back({"dir" + std::to_string(j) + "@r", [&space, r, j](std::size_t m) {
                      return space.directions(r(m)).at(j);
                    }});
    seqs.push_back({"dir" + std::to_string(j) + "@sqrt(r)", [&space, r, j](std::size_t m) {
                      return space.directions(std::sqrt(r(m))).at(j);
                    }});
  }
  std::vector<ProbePair> out;
  for (const auto& y : seqs) out.push_back({y, std::nullopt});
  for (std::size_t a = 0; a < seqs.size(); ++a)
    for (std::size_t b = a + 1; b < seqs.size(); ++b) out.push_back({seqs[a], seqs[b]});
  return out;
}

BlumenthalScanResult blumenthal_sequence_scan(const MarkedSpace& space,
                                              const std::vector<PointSequence>& x_seqs,
                                              const std::vector<ProbePair>& probes,
                                              const NormalizingSequence& r,
                                              const BlumenthalScanOptions& opts) {
  if (x_seqs.size() < 2)
    throw Error(Errc::InvalidArgument, "need at least two basis sequences");
  check_depth(opts.depth);
  check_normalizer(r, opts.depth);
  const std::size_t start = opts.depth / 2;
  const std::size_t mid = start + (opts.depth - start) / 2;

  auto require_convergent = [&](const PointSequence& s) {
    double early = 0.0, late = 0.0;
    for (std::size_t m = start; m < opts.depth; ++m)
      (m < mid ? early : late) = std::max(m < mid ? early : late, space.to_marked(s(m)));
    if (late > 0.0 && late > 0.5 * early)
      throw Error(Errc::NonconvergentSequence,
                  "sequence '" + s.name + "' does not approach the marked point");
  };
  for (const auto& s : x_seqs) require_convergent(s);
  for (const auto& pr : probes) {
    require_convergent(pr.y);
    if (pr.u) require_convergent(*pr.u);
  }

  BlumenthalScanResult out;
  out.n = static_cast<int>(x_seqs.size()) - 1;
  out.tangent_assumed = opts.tangent_assumed;
  out.basis_tail_inf.assign(std::size_t(out.n), std::numeric_limits<double>::infinity());

  for (std::size_t m = start; m < opts.depth; ++m) {
    std::vector<Point> basis;
    for (const auto& s : x_seqs) basis.push_back(s(m));
    for (int k = 1; k <= out.n; ++k) {
      const std::vector<Point> prefix(basis.begin(), basis.begin() + k + 1);
      auto& slot = out.basis_tail_inf[std::size_t(k - 1)];
      slot = std::min(slot, theta(space, prefix));
    }
    for (const auto& pr : probes) {
      std::vector<Point> t = basis;
      t.push_back(pr.y(m));
      if (pr.u) {
        t.push_back((*pr.u)(m));
        out.max_probe_n3 = std::max(out.max_probe_n3, std::abs(theta(space, t)));
      } else {
        out.max_probe_n2 = std::max(out.max_probe_n2, std::abs(theta(space, t)));
      }
    }
  }
  out.probes_checked = probes.size();

  const double band = 10.0 * opts.tol_det;
  out.condition_i = *std::min_element(out.basis_tail_inf.begin(), out.basis_tail_inf.end()) > band;
  out.condition_ii = out.max_probe_n2 <= band && out.max_probe_n3 <= band;
  out.verdict = out.condition_i && out.condition_ii ? ScanVerdict::Supports : ScanVerdict::Refutes;
  return out;
}

}  // namespace dgeo
