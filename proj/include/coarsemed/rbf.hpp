#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsemed/rational.hpp"
#include "coarsemed/tubular_spec.hpp"

namespace coarsemed::rbf {

using IntVector = std::vector<std::int64_t>;

/// A flat R^n with half-flats glued along the hyperplanes <x, v_i> = p for
/// p ranging over a coarsely dense position set P_i, one family for each of
/// n+1 pairwise independent directions v_0..v_n.
struct RbfSpec {
  std::size_t n = 2;
  std::vector<IntVector> directions;
  /// nullopt: every direction uses the full integer lattice of positions.
  /// Otherwise one explicit position list per direction.
  std::optional<std::vector<std::vector<Rational>>> positions;
  Rational density = 1;
  std::string provenance;

  bool operator==(const RbfSpec&) const = default;
};

struct RbfValidation {
  bool ok = true;
  std::vector<std::string> problems;
  /// First parallel pair of directions found, if any.
  std::optional<std::pair<std::size_t, std::size_t>> parallel_pair;

  bool operator==(const RbfValidation&) const = default;
};

/// Checks shape, pairwise independence, and D-coarse density of explicit
/// position sets over the window they span.
RbfValidation validate_rbf_spec(const RbfSpec& spec);

/// Canonical primitive form: gcd 1, first nonzero coordinate positive.
IntVector primitive(const IntVector& v);

/// Three pairwise non-commensurable incident directions at `vertex`, taken in
/// order of first appearance, or nullopt when the vertex has at most two
/// commensurability classes. Throws InputError on an unknown vertex.
std::optional<RbfSpec> tubular_rbf_directions(const tubular::TubularGroupSpec& spec,
                                              const std::string& vertex);

/// Branching data carried by a rich-linearity witness: the suffix exponents of
/// the chosen internal linear strata on the Nielsen cycle, and whether the
/// cycle has a nearby source.
struct LinearBranching {
  std::string cycle;
  std::vector<std::string> strata;
  std::vector<std::int64_t> exponents;
  bool nearby_source = false;
};

/// Directions in (cycle axis, fibre axis) coordinates: (n_k, 1) per internal
/// stratum with suffix p^{n_k}, and (0, 1) for a nearby source. Uses three
/// strata when available, else two strata and the source. Throws
/// PreconditionError when the data cannot give three independent directions.
RbfSpec fbc_rbf_directions(const LinearBranching& branching);

struct Point2 {
  std::int64_t x = 0;
  std::int64_t y = 0;

  bool operator==(const Point2&) const = default;
  auto operator<=>(const Point2&) const = default;
};

struct Strip {
  std::size_t direction = 0;
  /// Level of the attachment line <x, v> = position.
  std::int64_t position = 0;
  /// Base points on the attachment line, ordered along v-perp.
  std::vector<Point2> attachment;
  /// All vertices of the half-strip including the attachment points.
  std::vector<std::size_t> vertices;
};

/// Vertex of the discrete model: a base point (strip = nullopt) with
/// coordinates (a, b), or a strip point at offset a along the attachment line
/// and depth b >= 1.
struct ModelVertex {
  std::optional<std::size_t> strip;
  std::int64_t a = 0;
  std::int64_t b = 0;
};

struct DiscreteRbfModel {
  std::int64_t radius = 0;
  std::int64_t depth = 0;
  std::size_t base_count = 0;
  std::vector<ModelVertex> vertices;
  std::vector<Strip> strips;
  std::vector<std::pair<std::size_t, std::size_t>> adjacency;
};

struct ModelLimits {
  std::size_t max_vertices = 2'000'000;
};

/// Base box [-R, R]^2 with a half-strip of depth L on every attachment line
/// meeting it. Throws InputError on an invalid spec or n != 2, LimitError when
/// the model would be too large.
DiscreteRbfModel build_discrete_rbf(const RbfSpec& spec, std::int64_t radius, std::int64_t depth,
                                    const ModelLimits& limits = {});

/// Re-verifies the model: strips meet only inside the base, attachment lines
/// run along v_i-perp at their declared level, adjacency is in range.
RbfValidation check_discrete_rbf(const DiscreteRbfModel& model, const RbfSpec& spec);

}  // namespace coarsemed::rbf
