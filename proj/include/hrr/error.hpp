/*
 * Copyright 2026 The HRR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hrr {

enum class ErrorCode {
  InvalidInput,
  InvalidConfig,
  UnknownChunk,
  LevelViolation,
  EmptyDocument,
  InvalidCorpus,
  EmptyCorpus,
  DimensionMismatch,
  ProviderUnavailable,
  InvalidResponse,
  InvalidRequest,
  MissingIndex,
  GoldNotInCorpus,
  EmptyQuerySet,
  SpecInfeasible,
  NoDocuments,
  Io,
  Format,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownChunk: return "UnknownChunk";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::InvalidCorpus: return "InvalidCorpus";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::InvalidResponse: return "InvalidResponse";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::MissingIndex: return "MissingIndex";
    case ErrorCode::GoldNotInCorpus: return "GoldNotInCorpus";
    case ErrorCode::EmptyQuerySet: return "EmptyQuerySet";
    case ErrorCode::SpecInfeasible: return "SpecInfeasible";
    case ErrorCode::NoDocuments: return "NoDocuments";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hrr
