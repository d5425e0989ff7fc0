#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netquery {

enum class ErrorCode {
  // snapshot
  EmptySnapshot,
  DuplicateRouter,
  InvalidTopology,
  // chunker
  CyclicReference,
  // extractor
  GrammarUnavailable,
  EndpointUnreachable,
  MalformedResponse,
  FactSyntax,
  SchemaViolation,
  // deducer
  InvalidPrefix,
  RuleSyntax,
  UnsafeRule,
  // factgraph
  DanglingReference,
  EmptyReference,
  GraphFormat,
  // routing
  UnknownRouter,
  NoPath,
  NotAdjacent,
  // querylang
  SyntaxError,
  UnknownPredicate,
  ArityMismatch,
  BudgetExceeded,
  TypeError,
  NameError,
  IndexError,
  NoResult,
  Unparseable,
  UnknownKind,
  // bench
  InsufficientRequirements,
  // corpus
  MissingFixture,
  // generic
  Io,
  Usage,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySnapshot: return "EmptySnapshot";
    case ErrorCode::DuplicateRouter: return "DuplicateRouter";
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::CyclicReference: return "CyclicReference";
    case ErrorCode::GrammarUnavailable: return "GrammarUnavailable";
    case ErrorCode::EndpointUnreachable: return "EndpointUnreachable";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::FactSyntax: return "FactSyntax";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidPrefix: return "InvalidPrefix";
    case ErrorCode::RuleSyntax: return "RuleSyntax";
    case ErrorCode::UnsafeRule: return "UnsafeRule";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::GraphFormat: return "GraphFormat";
    case ErrorCode::UnknownRouter: return "UnknownRouter";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::NameError: return "NameError";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::NoResult: return "NoResult";
    case ErrorCode::Unparseable: return "Unparseable";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::InsufficientRequirements: return "InsufficientRequirements";
    case ErrorCode::MissingFixture: return "MissingFixture";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

/// Exception carrying a machine-checkable code. `stage()` is filled in by the
/// pipeline so CLI output can say which step failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const {
    Error copy = *this;
    copy.stage_ = std::move(stage);
    return copy;
  }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace netquery
