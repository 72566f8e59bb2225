// Copyright 2026 The pairnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAIRNAS_ERROR_HPP_
#define PAIRNAS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace pairnas {

enum class Errc {
  // space
  EmptyDomain,
  DuplicateFeature,
  DuplicateValue,
  NonIncreasingDomain,
  NonPositiveOrdinal,
  DepthOutOfRange,
  FixedValueOutOfDomain,
  UnknownFeature,
  IncompleteAssignment,
  InvalidArchitecture,
  // oracle
  UnknownWeightedFeature,
  MissingDimensionFeature,
  UnknownProfile,
  EmptyInput,
  UnknownArchitecture,
  // pairs
  TooFewRecords,
  MissingMetric,
  DegenerateSplit,
  // ranker
  ShapeMismatch,
  EmptyPairSet,
  FormatVersionMismatch,
  // metrics
  DegenerateInput,
  // search
  NoFeasibleCandidate,
  KExceedsCandidates,
  // general
  InvalidArgument,
  IoError,
  ParseError,
};

inline constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyDomain: return "EmptyDomain";
    case Errc::DuplicateFeature: return "DuplicateFeature";
    case Errc::DuplicateValue: return "DuplicateValue";
    case Errc::NonIncreasingDomain: return "NonIncreasingDomain";
    case Errc::NonPositiveOrdinal: return "NonPositiveOrdinal";
    case Errc::DepthOutOfRange: return "DepthOutOfRange";
    case Errc::FixedValueOutOfDomain: return "FixedValueOutOfDomain";
    case Errc::UnknownFeature: return "UnknownFeature";
    case Errc::IncompleteAssignment: return "IncompleteAssignment";
    case Errc::InvalidArchitecture: return "InvalidArchitecture";
    case Errc::UnknownWeightedFeature: return "UnknownWeightedFeature";
    case Errc::MissingDimensionFeature: return "MissingDimensionFeature";
    case Errc::UnknownProfile: return "UnknownProfile";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnknownArchitecture: return "UnknownArchitecture";
    case Errc::TooFewRecords: return "TooFewRecords";
    case Errc::MissingMetric: return "MissingMetric";
    case Errc::DegenerateSplit: return "DegenerateSplit";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptyPairSet: return "EmptyPairSet";
    case Errc::FormatVersionMismatch: return "FormatVersionMismatch";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::NoFeasibleCandidate: return "NoFeasibleCandidate";
    case Errc::KExceedsCandidates: return "KExceedsCandidates";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures surface as this exception; `code()` names the failure.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pairnas

#endif  // PAIRNAS_ERROR_HPP_
