#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coarsemed/rational.hpp"

namespace coarsemed::median {

/// Index into the element list of a FiniteMedianAlgebra. Element order is the
/// canonical order used for every tie-break.
using Element = std::size_t;

/// Sorted, duplicate-free list of elements.
using ElementSet = std::vector<Element>;

/// Size caps for the exponential searches (walls, cube embeddings) and for
/// dense table construction.
struct Limits {
  std::size_t max_elements = 32;
  std::size_t max_table_elements = 256;
};

/// A finite set with a total ternary operation stored as a dense n^3 table,
/// optionally carrying an exact distance table. Immutable once built; nothing
/// here asserts the median axioms, see verify_median_axioms.
class FiniteMedianAlgebra {
 public:
  /// `table` holds med(a,b,c) at (a*n + b)*n + c. `metric`, when present, is
  /// the flat n*n distance table.
  FiniteMedianAlgebra(std::vector<std::string> elements,
                      std::vector<std::uint16_t> table,
                      std::optional<std::vector<Rational>> metric = std::nullopt);

  /// Builds from (a,b,c,m) entries; every ordered triple must appear exactly
  /// once (repeats with the same value are tolerated). Throws InputError.
  static FiniteMedianAlgebra from_entries(
      std::vector<std::string> elements,
      std::span<const std::array<std::size_t, 4>> entries,
      std::optional<std::vector<Rational>> metric = std::nullopt);

  std::size_t size() const { return elements_.size(); }
  const std::vector<std::string>& elements() const { return elements_; }
  const std::string& name(Element e) const { return elements_.at(e); }
  Element index_of(const std::string& name) const;

  Element med(Element a, Element b, Element c) const {
    return table_[(a * n_ + b) * n_ + c];
  }
  std::span<const std::uint16_t> table() const { return table_; }

  bool has_metric() const { return metric_.has_value(); }
  const Rational& distance(Element a, Element b) const;
  const std::optional<std::vector<Rational>>& metric() const { return metric_; }

  /// Copy with one table entry replaced.
  FiniteMedianAlgebra with_entry(Element a, Element b, Element c, Element value) const;

  ElementSet all() const;

  bool operator==(const FiniteMedianAlgebra&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::string> elements_;
  std::vector<std::uint16_t> table_;
  std::optional<std::vector<Rational>> metric_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Axiom { Absorption, Symmetry, FivePoint, Metric, MetricMedian };

std::string to_string(Axiom axiom);

struct MedianValidation {
  bool ok = true;
  std::optional<Axiom> violated;
  /// Counterexample tuple, in the argument order of the violated identity.
  std::vector<Element> tuple;
  std::string message;

  bool operator==(const MedianValidation&) const = default;
};

/// Checks med(a,a,x)=a, full symmetry, the five-point condition, and, when a
/// metric is attached, that it is a metric whose betweenness realises med
/// uniquely. Reports the first failure in that order.
MedianValidation verify_median_axioms(const FiniteMedianAlgebra& m);

// ---------------------------------------------------------------------------
// Intervals, hulls, convexity

ElementSet interval(const FiniteMedianAlgebra& m, Element a, Element b);

/// J(A) = { med(a, a', x) : a, a' in A, x in M }.
ElementSet j_closure(const FiniteMedianAlgebra& m, const ElementSet& a);

struct HullResult {
  ElementSet hull;
  /// Number of J applications that changed the set.
  std::size_t iterations = 0;
};

/// Iterates J to a fixed point.
HullResult convex_hull(const FiniteMedianAlgebra& m, const ElementSet& a);

bool is_convex(const FiniteMedianAlgebra& m, const ElementSet& a);

// ---------------------------------------------------------------------------
// Walls and rank

/// Partition into two nonempty convex halfspaces. `side_a` holds element 0.
struct Wall {
  ElementSet side_a;
  ElementSet side_b;

  bool operator==(const Wall&) const = default;
};

bool crosses(const Wall& u, const Wall& v);

/// Every wall of `m`, sorted by side_b. Throws LimitError above the cap.
std::vector<Wall> enumerate_walls(const FiniteMedianAlgebra& m, const Limits& limits = {});

struct RankReport {
  std::size_t rank_walls = 0;
  std::size_t rank_cube = 0;
  std::vector<Wall> witness_walls;
  /// witness_cube[mask] is the image of the cube vertex whose i-th coordinate
  /// is bit i of mask.
  std::vector<Element> witness_cube;

  bool operator==(const RankReport&) const = default;
};

struct WallRank {
  std::size_t rank = 0;
  std::vector<Wall> witness;
};

struct CubeRank {
  std::size_t rank = 0;
  std::vector<Element> witness;
};

/// Largest pairwise-crossing wall family; lexicographically least witness.
WallRank rank_by_walls(const FiniteMedianAlgebra& m, const Limits& limits = {});

/// Largest n with an injective median morphism {0,1}^n -> m.
CubeRank rank_by_cube_embedding(const FiniteMedianAlgebra& m, const Limits& limits = {});

/// Both rank computations. The two values agree on every median algebra.
RankReport rank(const FiniteMedianAlgebra& m, const Limits& limits = {});

// ---------------------------------------------------------------------------
// Identities

struct DiagonalFrame {
  Element zero;
  Element one;
  Element a_plus;
  Element a_minus;
  Element b;
};

/// Machine-checks the nine-step computation showing that b coincides with
/// a_minus once the six premise identities hold. Throws PreconditionError
/// naming the first failed premise.
bool five_point_chain_check(const FiniteMedianAlgebra& m, const DiagonalFrame& frame);

/// True iff all six premises hold for the frame.
bool diagonal_premises_hold(const FiniteMedianAlgebra& m, const DiagonalFrame& frame);

/// Closed ball of radius r; requires a metric.
ElementSet ball(const FiniteMedianAlgebra& m, Element centre, const Rational& radius);

/// convex_hull(B(x, r)) is contained in B(x, 2^rank * r).
bool ball_hull_bound_check(const FiniteMedianAlgebra& m, Element centre, const Rational& radius,
                           const Limits& limits = {});

/// Same check against a rank the caller already holds, for scans over many
/// (x, r) on one algebra.
bool ball_hull_bound_check(const FiniteMedianAlgebra& m, Element centre, const Rational& radius,
                           std::size_t rank);

// ---------------------------------------------------------------------------
// Constructors

/// {0..d_1-1} x ... x {0..d_k-1} with coordinatewise median and l1 metric.
FiniteMedianAlgebra lattice_box(std::span<const std::size_t> dims, const Limits& limits = {});

/// {0,1}^n, 1 <= n <= 10.
FiniteMedianAlgebra hypercube(std::size_t n, const Limits& limits = {});

/// Median of a finite tree with its graph metric.
FiniteMedianAlgebra tree_median(std::vector<std::string> vertices,
                                std::span<const std::pair<std::size_t, std::size_t>> edges,
                                const Limits& limits = {});

/// Componentwise median; l1 sum of metrics when both factors carry one.
FiniteMedianAlgebra product(const FiniteMedianAlgebra& x, const FiniteMedianAlgebra& y,
                            const Limits& limits = {});

/// Restriction to a med-closed subset. Throws InputError if not closed.
FiniteMedianAlgebra subalgebra(const FiniteMedianAlgebra& m, const ElementSet& subset);

bool is_closed(const FiniteMedianAlgebra& m, const ElementSet& subset);

/// Every nonempty med-closed subset, as element sets in increasing bitmask
/// order. Assumes absorption and symmetry hold. Requires |m| <= 20.
std::vector<ElementSet> closed_subsets(const FiniteMedianAlgebra& m);

}  // namespace coarsemed::median
