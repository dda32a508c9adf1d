#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dgeo {

enum class Errc {
  NonSquare,
  NonFinite,
  Asymmetric,
  NegativeDistance,
  NonzeroDiagonal,
  TriangleViolation,
  CoincidentPoints,
  IndexOutOfRange,
  NonpositiveScale,
  TupleTooShort,
  NotSymmetric,
  MinorModeTooLarge,
  DimensionOutOfRange,
  NotEmbeddable,
  RankExceedsRequested,
  NonpositiveExponent,
  ArityMismatch,
  DegenerateNormalizer,
  UnstableInput,
  MergeInconsistency,
  EmptySample,
  SamplerScaleMismatch,
  NonconvergentSequence,
  MarkedPointOutsideRegion,
  AlphaOutOfRange,
  InvalidArgument,
  Parse,
  Io,
};

std::string_view to_string(Errc code);

/// Exception carrying a machine-readable code plus the point indices that
/// triggered it (e.g. (i, j, k) for a triangle violation).
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, std::vector<std::size_t> indices = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        indices_(std::move(indices)) {}

  Errc code() const noexcept { return code_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

 private:
  Errc code_;
  std::vector<std::size_t> indices_;
};

}  // namespace dgeo
