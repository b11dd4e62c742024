#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "coarsemed/json_io.hpp"

namespace coarsemed::report {

/// An emitted certificate failed to re-verify against its input.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 1,
  kExitLimit = 2,
  kExitCertificate = 3,
};

std::string version();

enum class InputKind { Tubular, Fbc, Median, Rbf };

std::string to_string(InputKind kind);
/// Throws InputError on anything but tubular|fbc|median|rbf.
InputKind parse_kind(const std::string& text);

using Spec = std::variant<tubular::TubularGroupSpec, fbc::IrttSpec, median::FiniteMedianAlgebra,
                          rbf::RbfSpec>;

struct ParsedInput {
  InputKind kind = InputKind::Tubular;
  Spec spec;
  /// SHA-256 of the canonical JSON encoding of `spec`.
  std::string input_digest;
};

struct ParseOptions {
  median::Limits limits;
  /// When false, a median table is only checked structurally so that
  /// `median verify` can report the failing axiom.
  bool check_median_axioms = true;
};

/// Reads, schema-checks and validates a spec file. Throws InputError (IO,
/// syntax with line/column, schema with field path, validator message) or
/// LimitError.
ParsedInput parse_input(const std::string& path, InputKind kind, const ParseOptions& options = {});

/// Wraps an in-memory spec, computing its digest.
ParsedInput from_spec(Spec spec);

std::string sha256_hex(const std::string& bytes);

enum class MedianQuery { Verify, Rank, Hull };

struct ReportOptions {
  bool json = false;
  bool witness = false;
  MedianQuery median_query = MedianQuery::Rank;
  std::vector<std::string> hull_set;
  median::Limits limits;
  /// Radius and depth for a discrete RBF model; rbf inputs only.
  std::optional<std::pair<std::int64_t, std::int64_t>> rbf_model;
  rbf::ModelLimits model_limits;
};

struct AnalysisReport {
  std::string input_digest;
  std::string kind;
  io::json verdict;
  /// Null unless the witness option was on.
  io::json certificates;
  std::string version;

  bool operator==(const AnalysisReport&) const = default;
};

/// Dispatches to the owning module. With `witness`, certificates are embedded
/// and re-verified first; failure throws CertificateError.
AnalysisReport run_report(const ParsedInput& input, const ReportOptions& options);

io::json to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const io::json& j);

/// Human-readable rendering with the reasoning trail.
std::string render_text(const AnalysisReport& report);

}  // namespace coarsemed::report
