#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "coarsemed/rational.hpp"
#include "coarsemed/rbf.hpp"
#include "coarsemed/tubular_spec.hpp"

namespace coarsemed::tubular {

/// (vertex, primitive direction class) pair.
struct TransportNode {
  std::string vertex;
  Vec2 direction{};

  bool operator==(const TransportNode&) const = default;
};

/// Arc for one group edge from (from, [w_from]) to (to, [w_to]) labelled
/// |m_to| / |m_from|. Traversing it backwards multiplies by the reciprocal.
struct TransportArc {
  std::size_t edge = 0;
  std::size_t tail = 0;
  std::size_t head = 0;
  Rational label;

  bool operator==(const TransportArc&) const = default;
};

struct TransportGraph {
  std::vector<TransportNode> nodes;
  std::vector<TransportArc> arcs;

  bool operator==(const TransportGraph&) const = default;
};

TransportGraph build_transport_graph(const TubularGroupSpec& spec);

struct ArcStep {
  std::size_t arc = 0;
  bool forward = true;

  bool operator==(const ArcStep&) const = default;
};

/// Closed walk starting and ending at `start`.
struct UnbalancedCycle {
  std::size_t start = 0;
  std::vector<ArcStep> steps;
  Rational product;

  bool operator==(const UnbalancedCycle&) const = default;
};

/// Label product along a walk, or nullopt if the steps do not chain up
/// starting from `start`.
std::optional<Rational> walk_product(const TransportGraph& tg, std::size_t start,
                                     const std::vector<ArcStep>& steps);

/// Spanning-forest potential propagation; returns the cycle closed by the
/// first non-tree arc whose label disagrees with the potentials.
std::optional<UnbalancedCycle> detect_unbalance(const TransportGraph& tg);

/// Closed, nonempty, and the recomputed product equals the stored one and
/// differs from 1.
bool verify_unbalanced_cycle(const TransportGraph& tg, const UnbalancedCycle& cycle);

/// Integer potentials N with N(head) = label * N(tail) on every arc, primitive
/// in each connected component. Nullopt iff some cycle is unbalanced.
std::optional<std::vector<Rational>> undistortion_certificate(const TransportGraph& tg);

bool verify_potentials(const TransportGraph& tg, const std::vector<Rational>& potentials);

/// Nodes joined by a walk to an unbalanced cycle, ascending.
std::vector<std::size_t> distorted_classes(const TransportGraph& tg);

enum class DehnClass { Quadratic, Exponential, SuperQuadraticUnclassified };

std::string to_string(DehnClass dehn);

DehnClass dehn_class(const TubularGroupSpec& spec);

/// g p^m g^-1 = p^n with m != +-n, realised by `cycle`.
struct BsWitness {
  BigInt m;
  BigInt n;
  UnbalancedCycle cycle;

  bool operator==(const BsWitness&) const = default;
};

std::optional<BsWitness> bs_witness(const TubularGroupSpec& spec);

enum class TubularStatus {
  CoarseMedian_CocompactlyCubulated_VirtuallySpecial,
  NoCoarseMedian_via_RBF,
  NoCoarseMedian_via_Distortion,
};

std::string to_string(TubularStatus status);

struct TubularVerdict {
  TubularStatus status = TubularStatus::CoarseMedian_CocompactlyCubulated_VirtuallySpecial;
  bool distorted = false;
  std::optional<UnbalancedCycle> unbalanced_cycle;
  std::optional<BsWitness> bs;
  std::optional<std::vector<Rational>> potentials;
  DehnClass dehn = DehnClass::Quadratic;
  std::size_t max_classes = 0;
  std::optional<std::string> rbf_vertex;
  std::optional<rbf::RbfSpec> rbf;
  std::vector<std::string> reasons;

  bool operator==(const TubularVerdict&) const = default;
};

TubularVerdict classify_tubular(const TubularGroupSpec& spec);

/// Re-derives every certificate inside `verdict` against `spec`.
bool verify_verdict(const TubularGroupSpec& spec, const TubularVerdict& verdict);

}  // namespace coarsemed::tubular
