#include "dgeo/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace dgeo {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Json tuple_json(const Tuple& t) { return Json(t.indices()); }

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

RawMatrix parse_matrix_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    RawMatrix out;
    const auto& rows = doc.at("distances");
    if (!rows.is_array()) throw Error(Errc::Parse, "\"distances\" must be an array of rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto cols = n == 0 ? Eigen::Index(0) : static_cast<Eigen::Index>(rows[0].size());
    out.values.resize(n, cols);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[std::size_t(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
        throw Error(Errc::Parse, "row " + std::to_string(i) + " has the wrong length");
      for (Eigen::Index j = 0; j < cols; ++j) out.values(i, j) = row[std::size_t(j)].get<double>();
    }
    if (doc.contains("labels")) out.labels = doc.at("labels").get<std::vector<std::string>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("malformed JSON space file: ") + e.what());
  }
}

RawMatrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  RawMatrix out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find('\n', pos);
    const auto line = trim(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    pos = next == std::string_view::npos ? text.size() + 1 : next + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, ',');
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric &= parse_double(fields[i], row[i]);
    if (!numeric) {
      if (rows.empty() && out.labels.empty()) {
        for (auto f : fields) out.labels.emplace_back(f);
        continue;
      }
      throw Error(Errc::Parse, "non-numeric entry on line " + std::to_string(line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(Errc::Parse, "line " + std::to_string(line_no) + " has the wrong length");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::Parse, "no numeric rows");
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.values(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RawMatrix read_matrix_file(const std::string& path) {
  const std::string text = read_text_file(path);
  if (ends_with(path, ".json")) return parse_matrix_json(text);
  if (ends_with(path, ".csv")) return parse_matrix_csv(text);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_matrix_json(text);
  return parse_matrix_csv(text);
}

FiniteMetricSpace load_space(const std::string& path, double tol) {
  RawMatrix raw = read_matrix_file(path);
  return validate_metric(raw.values, tol, std::move(raw.labels));
}

Json to_json(const FiniteMetricSpace& space) {
  return {{"labels", space.labels()}, {"distances", matrix_json(space.dist())}};
}

Json to_json(const EmbedVerdict& v) {
  Json j{{"criterion", to_string(v.criterion)},
         {"n", v.dim_tested},
         {"verdict", to_string(v.embeddable)}};
  if (v.witness) {
    j["witness_tuple"] = tuple_json(v.witness->tuple);
    j["witness_k"] = v.witness->k;
    j["witness_value"] = v.witness->value;
    j["witness_condition"] = to_string(v.witness->condition);
  } else {
    j["witness_tuple"] = nullptr;
    j["witness_value"] = nullptr;
  }
  j["residual"] = v.realization ? Json(v.realization->max_residual) : Json(nullptr);
  j["exhaustive"] = v.exhaustive;
  j["tuples_checked"] = v.tuples_checked;
  if (v.realization) j["realization"] = to_json(*v.realization);
  return j;
}

Json to_json(const MinDimResult& r) {
  Json j{{"feasible", r.feasible}};
  j["m"] = r.feasible ? Json(r.m) : Json(nullptr);
  j["base"] = r.base;
  j["psd_mode"] = r.psd.mode_used == PsdMode::AllMinors ? "all-minors" : "spectral";
  j["min_eigenvalue"] = r.psd.min_eigenvalue;
  if (!r.psd.witness_subset.empty()) {
    j["witness_subset"] = r.psd.witness_subset;
    j["witness_minor"] = r.psd.witness_minor;
  }
  j["verified"] = to_string(r.verified);
  return j;
}

Json to_json(const Realization& r) {
  return {{"m", r.m}, {"max_residual", r.max_residual}, {"coordinates", matrix_json(r.coords)}};
}

Json to_json(const ScanReport& r) {
  Json j{{"k", r.k},
         {"functional", (r.mode == ScanMode::Theta ? "Theta_" : "S_") + std::to_string(r.k + 1)},
         {"mode", to_string(r.mode)},
         {"condition", to_string(r.condition)},
         {"seed", r.seed},
         {"scales", r.scales},
         {"per_scale_inf", r.per_scale_inf},
         {"per_scale_sup", r.per_scale_sup},
         {"running_liminf", r.running_liminf},
         {"running_limsup", r.running_limsup},
         {"trend", optional_json(r.trend)},
         {"trend_inf", optional_json(r.trend_inf)},
         {"trend_sup", optional_json(r.trend_sup)},
         {"verdict", to_string(r.verdict)}};
  j["witness"] = {{"points", r.witness_points},
                  {"value", r.witness_value},
                  {"scale", r.witness_scale}};
  return j;
}

Json to_json(const TransferResult& r) {
  Json reports = Json::array();
  for (const auto& s : r.reports) reports.push_back(to_json(s));
  Json j{{"n", r.n}, {"seed", r.seed}, {"aggregate", to_string(r.aggregate)}};
  j["witness_report"] = r.witness_report ? Json(*r.witness_report) : Json(nullptr);
  j["reports"] = std::move(reports);
  return j;
}

Json to_json(const BlumenthalScanResult& r) {
  return {{"n", r.n},
          {"basis_tail_inf", r.basis_tail_inf},
          {"max_probe_n2", r.max_probe_n2},
          {"max_probe_n3", r.max_probe_n3},
          {"condition_i", r.condition_i},
          {"condition_ii", r.condition_ii},
          {"tangent_assumed", r.tangent_assumed},
          {"probes_checked", r.probes_checked},
          {"verdict", to_string(r.verdict)}};
}

}  // namespace dgeo
