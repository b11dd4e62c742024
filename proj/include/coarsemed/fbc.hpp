#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsemed/rbf.hpp"

namespace coarsemed::fbc {

struct GraphEdge {
  std::string id;
  std::string from;
  std::string to;

  bool operator==(const GraphEdge&) const = default;
};

/// One edge of an edge path; `reversed` is written with a trailing '~'.
struct EdgeStep {
  std::string edge;
  bool reversed = false;

  bool operator==(const EdgeStep&) const = default;
};

using EdgePath = std::vector<EdgeStep>;

enum class StratumKind { Invariant, Exponential, Linear, Polynomial, Zero };

std::string to_string(StratumKind kind);

/// f#(e) = e u with u a power of a cyclic permutation of a Nielsen cycle:
/// u = rotate(cycle, offset)^exponent.
struct Suffix {
  std::string cycle;
  std::int64_t exponent = 1;
  std::size_t offset = 0;

  bool operator==(const Suffix&) const = default;
};

/// `Polynomial` marks a non-exponential stratum whose suffix is not a Nielsen
/// path (quadratic or faster growth); it carries no suffix data.
struct Stratum {
  StratumKind kind = StratumKind::Exponential;
  std::vector<std::string> edges;
  std::optional<Suffix> suffix;

  bool operator==(const Stratum&) const = default;
};

struct DeclaredPath {
  std::string id;
  EdgePath path;

  bool operator==(const DeclaredPath&) const = default;
};

/// Declared improved-relative-train-track data. Strata are listed in
/// filtration order. Nielsen paths and cycles are inputs, not computed.
struct IrttSpec {
  std::vector<std::string> vertices;
  std::vector<GraphEdge> edges;
  /// Vertices fixed by f; every vertex when absent.
  std::optional<std::vector<std::string>> fixed_vertices;
  std::vector<Stratum> strata;
  std::vector<DeclaredPath> nielsen_cycles;
  std::vector<DeclaredPath> nielsen_paths;

  bool operator==(const IrttSpec&) const = default;
};

struct IrttIssue {
  std::string location;
  std::string message;

  bool operator==(const IrttIssue&) const = default;
};

struct IrttValidation {
  bool ok = true;
  std::vector<IrttIssue> issues;
};

IrttValidation validate_irtt(const IrttSpec& spec);

/// Edge ids of the linear strata whose suffix references `cycle`, in
/// filtration order. Throws InputError on an undeclared cycle.
std::vector<std::string> supports(const IrttSpec& spec, const std::string& cycle);

/// One hop of a linear Gamma-path or Nielsen-path chain.
struct Link {
  enum class Kind { NielsenPath, InvariantEdge, LinearEdge };
  Kind kind = Kind::NielsenPath;
  std::string id;
  bool reversed = false;
  std::string from;
  std::string to;

  bool operator==(const Link&) const = default;
};

struct InternalResult {
  bool internal = false;
  /// Links from e- to `target_vertex`; empty when e- already lies on a cycle.
  std::vector<Link> path;
  std::string target_vertex;
  std::string target_cycle;

  bool operator==(const InternalResult&) const = default;
};

/// Whether a linear Gamma-path (Nielsen paths and linear strata other than
/// `edge` itself, either direction, possibly empty) joins e- to a vertex of a
/// declared Nielsen cycle. Throws InputError unless `edge` is a linear stratum.
InternalResult is_internal(const IrttSpec& spec, const std::string& edge);

struct NearbySource {
  std::string cycle_vertex;
  std::string source;
  /// Linear stratum whose initial vertex is `source`.
  std::string source_stratum;
  std::vector<Link> path;

  bool operator==(const NearbySource&) const = default;
};

/// Nielsen-path chain (possibly empty) from a vertex of `cycle` to a source.
std::optional<NearbySource> nearby_source(const IrttSpec& spec, const std::string& cycle);

bool has_nearby_source(const IrttSpec& spec, const std::string& cycle);

struct RichLinearityWitness {
  std::string cycle;
  /// Internal linear strata supported by the cycle, filtration order.
  std::vector<std::string> internal_strata;
  std::optional<NearbySource> source;

  bool operator==(const RichLinearityWitness&) const = default;
};

/// First Nielsen cycle (ordered by the last stratum its edges reach, then
/// declaration order) supporting three internal linear strata, or two and a
/// nearby source.
std::optional<RichLinearityWitness> rich_linearity(const IrttSpec& spec);

/// Re-confirms supports / is_internal / nearby-source claims in the witness.
bool verify_witness(const IrttSpec& spec, const RichLinearityWitness& witness);

/// Branching data for the RBF built from a witness.
rbf::LinearBranching branching_data(const IrttSpec& spec, const RichLinearityWitness& witness);

enum class FbcBranch {
  Hyperbolic_CocompactlyCubulated,
  RelHyp_over_F_times_Z,
  Virtually_Colourable_HHG,
  NoCoarseMedian_RichLinearity,
  Inconclusive,
};

std::string to_string(FbcBranch branch);

struct FbcVerdict {
  FbcBranch branch = FbcBranch::Inconclusive;
  std::optional<RichLinearityWitness> witness;
  std::optional<rbf::RbfSpec> rbf;
  std::vector<std::string> reasons;

  bool operator==(const FbcVerdict&) const = default;
};

/// Throws InputError when the spec fails validate_irtt.
FbcVerdict classify_fbc(const IrttSpec& spec);

/// Re-checks the branch preconditions and any witness against `spec`.
bool verify_verdict(const IrttSpec& spec, const FbcVerdict& verdict);

}  // namespace coarsemed::fbc
