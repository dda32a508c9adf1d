// dgeo: embeddability decisions and infinitesimal scans from the command line.
//
// Exit codes: 0 positive, 1 negative, 2 invalid metric, 3 I/O or parse
// error, 4 undetermined or inconclusive.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dgeo/embeddability.hpp"
#include "dgeo/io.hpp"
#include "dgeo/pretangent.hpp"
#include "dgeo/spaces.hpp"

namespace {

enum Exit { kPositive = 0, kNegative = 1, kInvalidMetric = 2, kIoError = 3, kUndetermined = 4 };

struct RunConfig {
  std::string input;
  int dim = 1;
  std::string criterion = "menger";
  double tol_det = dgeo::kDefaultTolDet;
  double tol_metric = dgeo::kDefaultMetricTol;
  std::string scales = "0.5:0.5:12";
  std::size_t samples = 2000;
  std::size_t depth = dgeo::kDefaultDepth;
  std::uint64_t seed = 0;
  std::string format = "text";
  bool realize = false;
  std::string out;
};

bool is_metric_error(dgeo::Errc c) {
  using dgeo::Errc;
  switch (c) {
    case Errc::NonSquare:
    case Errc::NonFinite:
    case Errc::Asymmetric:
    case Errc::NegativeDistance:
    case Errc::NonzeroDiagonal:
    case Errc::TriangleViolation:
    case Errc::CoincidentPoints:
      return true;
    default:
      return false;
  }
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

dgeo::Json header(const std::string& command, const RunConfig& cfg) {
  return {{"command", command}, {"input", cfg.input}, {"seed", cfg.seed}};
}

void emit(const RunConfig& cfg, const dgeo::Json& doc, const std::string& text) {
  const std::string body = cfg.format == "json" ? doc.dump(2) + "\n" : text;
  if (cfg.out.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw dgeo::Error(dgeo::Errc::Io, "cannot write '" + cfg.out + "'");
  f << body;
}

int exit_for(dgeo::Verdict v) {
  switch (v) {
    case dgeo::Verdict::Yes: return kPositive;
    case dgeo::Verdict::No: return kNegative;
    case dgeo::Verdict::Undetermined: return kUndetermined;
  }
  return kUndetermined;
}

std::string verdict_text(const dgeo::EmbedVerdict& v) {
  std::ostringstream os;
  os << to_string(v.criterion) << " n=" << v.dim_tested << ": " << to_string(v.embeddable);
  if (v.witness) {
    os << "  witness (" << join(v.witness->tuple.indices()) << ") k=" << v.witness->k
       << " value=" << v.witness->value << " [" << to_string(v.witness->condition) << "]";
  }
  if (!v.exhaustive) os << "  (sampled, " << v.tuples_checked << " tuples)";
  os << "\n";
  if (v.realization) os << "max residual " << v.realization->max_residual << "\n";
  return os.str();
}

int cmd_validate(const RunConfig& cfg) {
  const auto raw = dgeo::read_matrix_file(cfg.input);
  dgeo::Json doc = header("validate", cfg);
  try {
    const auto space = dgeo::validate_metric(raw.values, cfg.tol_metric, raw.labels);
    doc["valid"] = true;
    doc["points"] = space.size();
    emit(cfg, doc, "valid metric on " + std::to_string(space.size()) + " points\n");
    return kPositive;
  } catch (const dgeo::Error& e) {
    if (!is_metric_error(e.code())) throw;
    doc["valid"] = false;
    doc["error"] = to_string(e.code());
    doc["indices"] = e.indices();
    doc["message"] = e.what();
    emit(cfg, doc,
         "invalid: " + std::string(to_string(e.code())) + " (" + join(e.indices()) + ") " +
             e.what() + "\n");
    return kInvalidMetric;
  }
}

dgeo::EmbedOptions embed_options(const RunConfig& cfg) {
  dgeo::EmbedOptions o;
  o.tol_det = cfg.tol_det;
  o.seed = cfg.seed;
  return o;
}

int cmd_check_embed(const RunConfig& cfg) {
  const auto space = dgeo::load_space(cfg.input, cfg.tol_metric);
  const auto opts = embed_options(cfg);
  dgeo::Json doc = header("check-embed", cfg);

  auto attach_realization = [&](dgeo::EmbedVerdict& v) {
    if (cfg.realize && v.embeddable == dgeo::Verdict::Yes)
      v.realization = dgeo::realize_coordinates(space, cfg.dim);
  };

  if (cfg.criterion == "all") {
    auto m = dgeo::menger_check(space, cfg.dim, opts);
    auto s = dgeo::schoenberg_check(space, cfg.dim, opts);
    attach_realization(m);
    doc["results"] = {dgeo::to_json(m), dgeo::to_json(s)};
    const bool agree = m.embeddable == s.embeddable;
    doc["agree"] = agree;
    emit(cfg, doc, verdict_text(m) + verdict_text(s));
    if (!agree) {
      std::cerr << "menger and schoenberg disagree; diagnostics:\n"
                << dgeo::Json{{"menger", dgeo::to_json(m)}, {"schoenberg", dgeo::to_json(s)}}.dump(2)
                << "\n";
      return kUndetermined;
    }
    return exit_for(m.embeddable);
  }

  dgeo::Criterion c;
  if (cfg.criterion == "menger")
    c = dgeo::Criterion::Menger;
  else if (cfg.criterion == "schoenberg")
    c = dgeo::Criterion::Schoenberg;
  else
    c = dgeo::Criterion::Blumenthal;
  auto v = dgeo::check_embedding(space, cfg.dim, c, opts);
  attach_realization(v);
  doc["result"] = dgeo::to_json(v);
  emit(cfg, doc, verdict_text(v));
  return exit_for(v.embeddable);
}

int cmd_min_dim(const RunConfig& cfg) {
  const auto space = dgeo::load_space(cfg.input, cfg.tol_metric);
  const auto r = dgeo::min_embedding_dimension(space, embed_options(cfg));
  dgeo::Json doc = header("min-dim", cfg);
  doc["result"] = dgeo::to_json(r);
  std::ostringstream text;
  if (r.feasible)
    text << r.m << "\n";
  else
    text << "infeasible\n";
  if (cfg.realize && r.feasible) {
    const auto real = dgeo::realize_coordinates(space, std::max(r.m, 1));
    doc["realization"] = dgeo::to_json(real);
    for (Eigen::Index i = 0; i < real.coords.rows(); ++i) {
      text << space.labels()[std::size_t(i)];
      for (Eigen::Index j = 0; j < real.coords.cols(); ++j) text << " " << real.coords(i, j);
      text << "\n";
    }
    text << "max residual " << real.max_residual << "\n";
  }
  emit(cfg, doc, text.str());
  return r.feasible ? kPositive : kNegative;
}

dgeo::ScaleLadder parse_ladder(const std::string& s) {
  dgeo::ScaleLadder l;
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  try {
    if (b == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    l.s0 = std::stod(s.substr(0, a));
    l.q = std::stod(s.substr(a + 1, b - a - 1));
    l.rungs = std::stoul(s.substr(b + 1), &used);
  } catch (const std::exception&) {
    throw dgeo::Error(dgeo::Errc::Parse, "--scales expects r0:q:count, got '" + s + "'");
  }
  l.scales();  // validates
  return l;
}

int cmd_scan(const RunConfig& cfg) {
  nlohmann::json config;
  try {
    config = nlohmann::json::parse(dgeo::read_text_file(cfg.input));
  } catch (const nlohmann::json::exception& e) {
    throw dgeo::Error(dgeo::Errc::Parse, std::string("malformed space config: ") + e.what());
  }
  const auto space = dgeo::space_from_config(config);

  dgeo::ScanOptions opts;
  opts.ladder = parse_ladder(cfg.scales);
  opts.samples_per_scale = cfg.samples;
  opts.seed = cfg.seed;
  opts.tol_det = cfg.tol_det;
  const auto result = dgeo::transfer_check(*space, cfg.dim, opts);

  dgeo::Json doc = header("scan", cfg);
  doc["space"] = space->describe();
  doc["samples_per_scale"] = cfg.samples;
  doc["depth"] = cfg.depth;
  doc["result"] = dgeo::to_json(result);

  std::ostringstream text;
  for (const auto& r : result.reports) {
    text << (r.mode == dgeo::ScanMode::Theta ? "Theta_" : "S_") << r.k + 1 << " ["
         << to_string(r.condition) << "] liminf " << r.running_liminf << " limsup "
         << r.running_limsup << " trend ";
    if (r.trend)
      text << *r.trend;
    else
      text << "n/a";
    text << " -> " << to_string(r.verdict) << "\n";
  }
  text << "aggregate: " << to_string(result.aggregate);
  if (result.witness_report) {
    const auto& w = result.reports[*result.witness_report];
    text << " (witness value " << w.witness_value << " at scale " << w.witness_scale << ")";
  }
  text << "\nseed " << cfg.seed << "\n";
  emit(cfg, doc, text.str());

  switch (result.aggregate) {
    case dgeo::TransferResult::Aggregate::Consistent: return kPositive;
    case dgeo::TransferResult::Aggregate::Refuted: return kNegative;
    case dgeo::TransferResult::Aggregate::Inconclusive: return kUndetermined;
  }
  return kUndetermined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance geometry: Euclidean embeddability and pretangent scans"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "Distance matrix (.json/.csv) or space config")->required();
    sub->add_option("--tol-metric", cfg.tol_metric, "Relative tolerance for the metric axioms")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-det", cfg.tol_det, "Relative zero band for determinants")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Seed for sampled enumeration and scans");
    sub->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", cfg.out, "Write the report here instead of stdout");
  };

  auto* validate = app.add_subcommand("validate", "Check the metric axioms");
  common(validate);

  auto* check = app.add_subcommand("check-embed", "Decide embeddability in E^n");
  common(check);
  check->add_option("--dim,-n", cfg.dim, "Target dimension n")->check(CLI::PositiveNumber);
  check->add_option("--criterion", cfg.criterion, "Criterion")
      ->check(CLI::IsMember({"menger", "schoenberg", "blumenthal", "all"}));
  check->add_flag("--realize", cfg.realize, "Emit coordinates when embeddable");

  auto* mindim = app.add_subcommand("min-dim", "Smallest embedding dimension");
  common(mindim);
  mindim->add_flag("--realize", cfg.realize, "Emit coordinates and residual");

  auto* scan = app.add_subcommand("scan", "Transfer-condition scans on an analytic space");
  common(scan);
  scan->add_option("--dim,-n", cfg.dim, "Target dimension n")->check(CLI::PositiveNumber);
  scan->add_option("--scales", cfg.scales, "Scale ladder r0:q:count");
  scan->add_option("--samples", cfg.samples, "Samples per scale")->check(CLI::PositiveNumber);
  scan->add_option("--depth", cfg.depth, "Sequence depth (recorded with the run)")
      ->check(CLI::Range(std::size_t(dgeo::kMinDepth), std::size_t(1) << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kIoError;
  }

  try {
    if (*validate) return cmd_validate(cfg);
    if (*check) return cmd_check_embed(cfg);
    if (*mindim) return cmd_min_dim(cfg);
    return cmd_scan(cfg);
  } catch (const dgeo::Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what();
    if (!e.indices().empty()) std::cerr << " (" << join(e.indices()) << ")";
    std::cerr << "\n";
    return is_metric_error(e.code()) ? kInvalidMetric : kIoError;
  }
}
