#include "coarsemed/tubular.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "coarsemed/errors.hpp"

namespace coarsemed::tubular {

namespace {

Rational abs_rational(std::int64_t v) { return Rational(v < 0 ? -v : v); }

struct Incidence {
  std::size_t arc;
  bool forward;
  std::size_t other;
};

std::vector<std::vector<Incidence>> incidence(const TransportGraph& tg) {
  std::vector<std::vector<Incidence>> adj(tg.nodes.size());
  for (std::size_t i = 0; i < tg.arcs.size(); ++i) {
    const auto& a = tg.arcs[i];
    adj[a.tail].push_back({i, true, a.head});
    if (a.head != a.tail) adj[a.head].push_back({i, false, a.tail});
  }
  return adj;
}

// Breadth-first spanning forest with potentials relative to each root.
struct Forest {
  std::vector<Rational> potential;
  std::vector<std::size_t> component;
  std::vector<std::size_t> depth;
  std::vector<std::optional<Incidence>> parent;  // step from parent into node
  std::vector<bool> tree_arc;
  std::size_t components = 0;
};

Forest spanning_forest(const TransportGraph& tg) {
  const std::size_t n = tg.nodes.size();
  const auto adj = incidence(tg);
  Forest f;
  f.potential.assign(n, Rational(0));
  f.component.assign(n, n);
  f.depth.assign(n, 0);
  f.parent.assign(n, std::nullopt);
  f.tree_arc.assign(tg.arcs.size(), false);
  for (std::size_t root = 0; root < n; ++root) {
    if (f.component[root] != n) continue;
    const std::size_t comp = f.components++;
    f.component[root] = comp;
    f.potential[root] = 1;
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      for (const Incidence& inc : adj[x]) {
        if (f.component[inc.other] != n) continue;
        const Rational& label = tg.arcs[inc.arc].label;
        f.potential[inc.other] = inc.forward ? Rational(f.potential[x] * label) : Rational(f.potential[x] / label);
        f.component[inc.other] = comp;
        f.depth[inc.other] = f.depth[x] + 1;
        f.parent[inc.other] = Incidence{inc.arc, inc.forward, x};
        f.tree_arc[inc.arc] = true;
        q.push(inc.other);
      }
    }
  }
  return f;
}

bool arc_balanced(const TransportGraph& tg, const Forest& f, std::size_t i) {
  const auto& a = tg.arcs[i];
  return f.potential[a.head] == f.potential[a.tail] * a.label;
}

}  // namespace

TransportGraph build_transport_graph(const TubularGroupSpec& spec) {
  validate(spec);
  TransportGraph tg;
  std::map<std::pair<std::string, Vec2>, std::size_t> index;
  auto node = [&](const std::string& vertex, const Vec2& dir) {
    auto [it, inserted] = index.try_emplace({vertex, dir}, tg.nodes.size());
    if (inserted) tg.nodes.push_back({vertex, dir});
    return it->second;
  };
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const auto& e = spec.edges[i];
    const Primitive from = normalize_primitive(e.w_from);
    const Primitive to = normalize_primitive(e.w_to);
    const std::size_t tail = node(e.from, from.direction);
    const std::size_t head = node(e.to, to.direction);
    tg.arcs.push_back({i, tail, head, abs_rational(to.multiple) / abs_rational(from.multiple)});
  }
  return tg;
}

std::optional<Rational> walk_product(const TransportGraph& tg, std::size_t start,
                                     const std::vector<ArcStep>& steps) {
  if (start >= tg.nodes.size()) return std::nullopt;
  Rational product = 1;
  std::size_t at = start;
  for (const ArcStep& s : steps) {
    if (s.arc >= tg.arcs.size()) return std::nullopt;
    const auto& a = tg.arcs[s.arc];
    if (s.forward) {
      if (a.tail != at) return std::nullopt;
      product *= a.label;
      at = a.head;
    } else {
      if (a.head != at) return std::nullopt;
      product /= a.label;
      at = a.tail;
    }
  }
  if (at != start) return std::nullopt;
  return product;
}

std::optional<UnbalancedCycle> detect_unbalance(const TransportGraph& tg) {
  const Forest f = spanning_forest(tg);
  for (std::size_t i = 0; i < tg.arcs.size(); ++i) {
    if (f.tree_arc[i] || arc_balanced(tg, f, i)) continue;
    const auto& a = tg.arcs[i];
    // tail --a--> head, then back to tail through the tree.
    std::vector<ArcStep> up_from_head;
    std::vector<ArcStep> up_from_tail;
    std::size_t x = a.head, y = a.tail;
    while (x != y) {
      if (f.depth[x] >= f.depth[y]) {
        const Incidence& p = *f.parent[x];
        up_from_head.push_back({p.arc, !p.forward});
        x = p.other;
      } else {
        const Incidence& p = *f.parent[y];
        up_from_tail.push_back({p.arc, !p.forward});
        y = p.other;
      }
    }
    UnbalancedCycle cycle;
    cycle.start = a.tail;
    cycle.steps.push_back({i, true});
    cycle.steps.insert(cycle.steps.end(), up_from_head.begin(), up_from_head.end());
    for (auto it = up_from_tail.rbegin(); it != up_from_tail.rend(); ++it) {
      cycle.steps.push_back({it->arc, !it->forward});
    }
    cycle.product = *walk_product(tg, cycle.start, cycle.steps);
    return cycle;
  }
  return std::nullopt;
}

bool verify_unbalanced_cycle(const TransportGraph& tg, const UnbalancedCycle& cycle) {
  if (cycle.steps.empty()) return false;
  const auto product = walk_product(tg, cycle.start, cycle.steps);
  return product && *product == cycle.product && *product != 1;
}

std::optional<std::vector<Rational>> undistortion_certificate(const TransportGraph& tg) {
  if (detect_unbalance(tg)) return std::nullopt;
  const Forest f = spanning_forest(tg);
  std::vector<Rational> out(tg.nodes.size());
  for (std::size_t comp = 0; comp < f.components; ++comp) {
    BigInt den_lcm = 1;
    BigInt num_gcd = 0;
    for (std::size_t v = 0; v < tg.nodes.size(); ++v) {
      if (f.component[v] != comp) continue;
      const BigInt d = denominator(f.potential[v]);
      den_lcm = den_lcm / gcd(den_lcm, d) * d;
    }
    for (std::size_t v = 0; v < tg.nodes.size(); ++v) {
      if (f.component[v] != comp) continue;
      num_gcd = gcd(num_gcd, numerator(Rational(f.potential[v] * den_lcm)));
    }
    for (std::size_t v = 0; v < tg.nodes.size(); ++v) {
      if (f.component[v] == comp) out[v] = f.potential[v] * den_lcm / num_gcd;
    }
  }
  return out;
}

bool verify_potentials(const TransportGraph& tg, const std::vector<Rational>& potentials) {
  if (potentials.size() != tg.nodes.size()) return false;
  for (const Rational& p : potentials) {
    if (p <= 0) return false;
  }
  for (const auto& a : tg.arcs) {
    if (potentials[a.head] != a.label * potentials[a.tail]) return false;
  }
  return true;
}

std::vector<std::size_t> distorted_classes(const TransportGraph& tg) {
  const Forest f = spanning_forest(tg);
  std::vector<bool> bad(f.components, false);
  for (std::size_t i = 0; i < tg.arcs.size(); ++i) {
    if (!arc_balanced(tg, f, i)) bad[f.component[tg.arcs[i].tail]] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < tg.nodes.size(); ++v) {
    if (bad[f.component[v]]) out.push_back(v);
  }
  return out;
}

std::string to_string(DehnClass dehn) {
  switch (dehn) {
    case DehnClass::Quadratic: return "quadratic";
    case DehnClass::Exponential: return "exponential";
    case DehnClass::SuperQuadraticUnclassified: return "super_quadratic_unclassified";
  }
  return "unknown";
}

namespace {

DehnClass dehn_from_graph(const TransportGraph& tg) {
  const auto distorted = distorted_classes(tg);
  if (distorted.empty()) return DehnClass::Quadratic;
  std::map<std::string, std::size_t> per_vertex;
  for (std::size_t v : distorted) {
    if (++per_vertex[tg.nodes[v].vertex] > 1) return DehnClass::SuperQuadraticUnclassified;
  }
  return DehnClass::Exponential;
}

std::optional<BsWitness> bs_from_cycle(const std::optional<UnbalancedCycle>& cycle) {
  if (!cycle) return std::nullopt;
  return BsWitness{denominator(cycle->product), numerator(cycle->product), *cycle};
}

}  // namespace

DehnClass dehn_class(const TubularGroupSpec& spec) {
  return dehn_from_graph(build_transport_graph(spec));
}

std::optional<BsWitness> bs_witness(const TubularGroupSpec& spec) {
  return bs_from_cycle(detect_unbalance(build_transport_graph(spec)));
}

std::string to_string(TubularStatus status) {
  switch (status) {
    case TubularStatus::CoarseMedian_CocompactlyCubulated_VirtuallySpecial:
      return "CoarseMedian_CocompactlyCubulated_VirtuallySpecial";
    case TubularStatus::NoCoarseMedian_via_RBF: return "NoCoarseMedian_via_RBF";
    case TubularStatus::NoCoarseMedian_via_Distortion: return "NoCoarseMedian_via_Distortion";
  }
  return "unknown";
}

TubularVerdict classify_tubular(const TubularGroupSpec& spec) {
  const TransportGraph tg = build_transport_graph(spec);
  TubularVerdict v;
  for (const auto& vertex : spec.vertices) {
    v.max_classes = std::max(v.max_classes, commensurability_classes(spec, vertex).size());
  }
  v.unbalanced_cycle = detect_unbalance(tg);
  v.distorted = v.unbalanced_cycle.has_value();
  v.dehn = dehn_from_graph(tg);

  if (v.distorted) {
    v.status = TubularStatus::NoCoarseMedian_via_Distortion;
    v.bs = bs_from_cycle(v.unbalanced_cycle);
    v.reasons.push_back("transport cycle with label product " +
                        coarsemed::to_string(v.unbalanced_cycle->product) +
                        " != 1: a vertex group is distorted and BS(" + v.bs->m.str() + "," +
                        v.bs->n.str() + ") embeds");
    if (v.dehn == DehnClass::Exponential) {
      v.reasons.push_back(
          "at most one distorted direction class per vertex: exponential Dehn function");
    } else {
      v.reasons.push_back("two distorted direction classes at one vertex: Dehn function is "
                          "super-quadratic, exact growth not classified");
    }
    v.reasons.push_back("distorted tubular groups have no quadratic isoperimetric function, "
                        "which every coarse median group has: no coarse median");
    return v;
  }

  v.potentials = undistortion_certificate(tg);
  v.reasons.push_back("every transport cycle is balanced: vertex groups undistorted, "
                      "quadratic Dehn function");
  if (v.max_classes >= 3) {
    for (const auto& vertex : spec.vertices) {
      if (auto r = rbf::tubular_rbf_directions(spec, vertex)) {
        v.rbf_vertex = vertex;
        v.rbf = std::move(r);
        break;
      }
    }
    v.status = TubularStatus::NoCoarseMedian_via_RBF;
    v.reasons.push_back("vertex " + *v.rbf_vertex + " has " +
                        std::to_string(commensurability_classes(spec, *v.rbf_vertex).size()) +
                        " commensurability classes of incident edge groups: quasi-isometrically "
                        "embedded 2-dimensional richly branching flat");
    v.reasons.push_back("geometric dimension 2 bounds the rank of any coarse median by 2, and a "
                        "2-dimensional richly branching flat excludes rank <= 2: no coarse median");
    return v;
  }
  v.status = TubularStatus::CoarseMedian_CocompactlyCubulated_VirtuallySpecial;
  v.reasons.push_back("at most two commensurability classes at every vertex and no BS(m,n) "
                      "with m != +-n: cocompactly cubulated and virtually compact special");
  v.reasons.push_back("cocompactly cubulated groups are coarse median");
  return v;
}

bool verify_verdict(const TubularGroupSpec& spec, const TubularVerdict& verdict) {
  const TransportGraph tg = build_transport_graph(spec);
  if (verdict.distorted == verdict.potentials.has_value()) return false;
  if (verdict.rbf.has_value() != (verdict.status == TubularStatus::NoCoarseMedian_via_RBF)) {
    return false;
  }
  if (verdict.distorted) {
    if (verdict.status != TubularStatus::NoCoarseMedian_via_Distortion) return false;
    if (!verdict.unbalanced_cycle || !verify_unbalanced_cycle(tg, *verdict.unbalanced_cycle)) {
      return false;
    }
    if (!verdict.bs || verdict.bs->cycle != *verdict.unbalanced_cycle) return false;
    const Rational product = verdict.unbalanced_cycle->product;
    if (verdict.bs->m != denominator(product) || verdict.bs->n != numerator(product)) return false;
    if (verdict.bs->m == verdict.bs->n || verdict.bs->m == -verdict.bs->n) return false;
    if (verdict.dehn == DehnClass::Quadratic) return false;
  } else {
    if (!verify_potentials(tg, *verdict.potentials)) return false;
    if (verdict.dehn != DehnClass::Quadratic) return false;
  }
  if (verdict.rbf) {
    if (!verdict.rbf_vertex) return false;
    if (!rbf::validate_rbf_spec(*verdict.rbf).ok) return false;
    const auto expected = rbf::tubular_rbf_directions(spec, *verdict.rbf_vertex);
    if (!expected || *expected != *verdict.rbf) return false;
  }
  return dehn_from_graph(tg) == verdict.dehn;
}

}  // namespace coarsemed::tubular
