#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dgeo/embeddability.hpp"
#include "dgeo/metric.hpp"
#include "dgeo/pretangent.hpp"

namespace dgeo {

/// Distance data as read from disk, before validation.
struct RawMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
};

/// {"labels": [...], "distances": [[...], ...]}; labels optional.
RawMatrix parse_matrix_json(std::string_view text);
/// Rows of comma separated numbers, with an optional header row of labels.
RawMatrix parse_matrix_csv(std::string_view text);
/// Picks the format from the extension (.json / .csv), falling back to
/// sniffing a leading '{'. Throws Io or Parse.
RawMatrix read_matrix_file(const std::string& path);

/// read_matrix_file followed by validate_metric.
FiniteMetricSpace load_space(const std::string& path, double tol = kDefaultMetricTol);

std::string read_text_file(const std::string& path);

using Json = nlohmann::ordered_json;

Json to_json(const FiniteMetricSpace& space);
Json to_json(const EmbedVerdict& v);
Json to_json(const MinDimResult& r);
Json to_json(const Realization& r);
Json to_json(const ScanReport& r);
Json to_json(const TransferResult& r);
Json to_json(const BlumenthalScanResult& r);

}  // namespace dgeo
