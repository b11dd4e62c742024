#include "coarsemed/fbc.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "coarsemed/errors.hpp"

namespace coarsemed::fbc {

namespace {

const GraphEdge* find_edge(const IrttSpec& spec, const std::string& id) {
  for (const auto& e : spec.edges) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

const DeclaredPath* find_cycle(const IrttSpec& spec, const std::string& id) {
  for (const auto& c : spec.nielsen_cycles) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const DeclaredPath& require_cycle(const IrttSpec& spec, const std::string& id) {
  const DeclaredPath* c = find_cycle(spec, id);
  if (!c) throw InputError("undeclared Nielsen cycle '" + id + "'");
  return *c;
}

std::optional<std::size_t> stratum_of(const IrttSpec& spec, const std::string& edge) {
  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const auto& es = spec.strata[i].edges;
    if (std::find(es.begin(), es.end(), edge) != es.end()) return i;
  }
  return std::nullopt;
}

const Stratum* linear_stratum(const IrttSpec& spec, const std::string& edge) {
  for (const auto& s : spec.strata) {
    if (s.kind == StratumKind::Linear && s.edges.size() == 1 && s.edges[0] == edge) return &s;
  }
  return nullptr;
}

std::string step_start(const GraphEdge& e, const EdgeStep& s) { return s.reversed ? e.to : e.from; }
std::string step_end(const GraphEdge& e, const EdgeStep& s) { return s.reversed ? e.from : e.to; }

struct Walk {
  std::vector<std::string> visited;  // start vertex of each step, then the end
  std::optional<std::string> error;
};

Walk trace(const IrttSpec& spec, const EdgePath& path) {
  Walk w;
  if (path.empty()) {
    w.error = "path is empty";
    return w;
  }
  for (std::size_t i = 0; i < path.size(); ++i) {
    const GraphEdge* e = find_edge(spec, path[i].edge);
    if (!e) {
      w.error = "unknown edge '" + path[i].edge + "'";
      return w;
    }
    const std::string start = step_start(*e, path[i]);
    if (i > 0 && w.visited.back() != start) {
      w.error = "step " + std::to_string(i) + " does not continue from " + w.visited.back();
      return w;
    }
    if (i == 0) w.visited.push_back(start);
    w.visited.push_back(step_end(*e, path[i]));
  }
  return w;
}

bool backtracks(const EdgeStep& a, const EdgeStep& b) {
  return a.edge == b.edge && a.reversed != b.reversed;
}

std::vector<std::string> cycle_vertices(const IrttSpec& spec, const DeclaredPath& cycle) {
  Walk w = trace(spec, cycle.path);
  if (w.error) return {};
  w.visited.pop_back();
  return w.visited;
}

std::set<std::string> sources(const IrttSpec& spec) {
  std::set<std::string> out;
  for (const auto& s : spec.strata) {
    if (s.kind != StratumKind::Linear || s.edges.size() != 1) continue;
    if (const GraphEdge* e = find_edge(spec, s.edges[0])) out.insert(e->from);
  }
  return out;
}

// Links usable in a Nielsen-path chain, optionally extended by linear edges.
std::vector<Link> links(const IrttSpec& spec, bool with_linear, const std::string& excluded) {
  std::vector<Link> out;
  for (const auto& p : spec.nielsen_paths) {
    Walk w = trace(spec, p.path);
    if (w.error) continue;
    out.push_back({Link::Kind::NielsenPath, p.id, false, w.visited.front(), w.visited.back()});
  }
  for (const auto& s : spec.strata) {
    if (s.edges.size() != 1) continue;
    const GraphEdge* e = find_edge(spec, s.edges[0]);
    if (!e) continue;
    if (s.kind == StratumKind::Invariant) {
      out.push_back({Link::Kind::InvariantEdge, e->id, false, e->from, e->to});
    } else if (with_linear && s.kind == StratumKind::Linear && e->id != excluded) {
      out.push_back({Link::Kind::LinearEdge, e->id, false, e->from, e->to});
    }
  }
  return out;
}

struct Found {
  std::string root;
  std::string target;
  std::vector<Link> path;
};

// Breadth-first search over links in either direction from `roots`; the first
// vertex satisfying `is_target` in BFS order wins.
template <class Pred>
std::optional<Found> search(const std::vector<Link>& graph, const std::vector<std::string>& roots,
                            Pred is_target) {
  std::map<std::string, std::pair<std::string, std::optional<Link>>> seen;  // vertex -> (root, link in)
  std::map<std::string, std::string> prev;
  std::queue<std::string> q;
  for (const auto& r : roots) {
    if (seen.count(r)) continue;
    seen[r] = {r, std::nullopt};
    q.push(r);
  }
  while (!q.empty()) {
    const std::string v = q.front();
    q.pop();
    if (is_target(v)) {
      Found f{seen[v].first, v, {}};
      std::string at = v;
      while (seen[at].second) {
        f.path.push_back(*seen[at].second);
        at = prev[at];
      }
      std::reverse(f.path.begin(), f.path.end());
      return f;
    }
    for (const Link& l : graph) {
      for (bool reversed : {false, true}) {
        const std::string& from = reversed ? l.to : l.from;
        const std::string& to = reversed ? l.from : l.to;
        if (from != v || seen.count(to)) continue;
        Link step = l;
        step.reversed = reversed;
        step.from = from;
        step.to = to;
        seen[to] = {seen[v].first, step};
        prev[to] = v;
        q.push(to);
      }
    }
  }
  return std::nullopt;
}

bool link_valid(const IrttSpec& spec, const Link& l, bool allow_linear, const std::string& excluded) {
  for (const Link& known : links(spec, allow_linear, excluded)) {
    if (known.kind != l.kind || known.id != l.id) continue;
    const std::string& from = l.reversed ? known.to : known.from;
    const std::string& to = l.reversed ? known.from : known.to;
    if (from == l.from && to == l.to) return true;
  }
  return false;
}

bool chain_valid(const IrttSpec& spec, const std::vector<Link>& path, const std::string& start,
                 const std::string& end, bool allow_linear, const std::string& excluded) {
  std::string at = start;
  for (const Link& l : path) {
    if (l.from != at || !link_valid(spec, l, allow_linear, excluded)) return false;
    at = l.to;
  }
  return at == end;
}

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

}  // namespace

std::string to_string(StratumKind kind) {
  switch (kind) {
    case StratumKind::Invariant: return "invariant";
    case StratumKind::Exponential: return "exponential";
    case StratumKind::Linear: return "linear";
    case StratumKind::Polynomial: return "polynomial";
    case StratumKind::Zero: return "zero";
  }
  return "unknown";
}

std::string to_string(FbcBranch branch) {
  switch (branch) {
    case FbcBranch::Hyperbolic_CocompactlyCubulated: return "Hyperbolic_CocompactlyCubulated";
    case FbcBranch::RelHyp_over_F_times_Z: return "RelHyp_over_F_times_Z";
    case FbcBranch::Virtually_Colourable_HHG: return "Virtually_Colourable_HHG";
    case FbcBranch::NoCoarseMedian_RichLinearity: return "NoCoarseMedian_RichLinearity";
    case FbcBranch::Inconclusive: return "Inconclusive";
  }
  return "unknown";
}

IrttValidation validate_irtt(const IrttSpec& spec) {
  IrttValidation r;
  auto issue = [&](std::string where, std::string what) {
    r.ok = false;
    r.issues.push_back({std::move(where), std::move(what)});
  };

  if (spec.vertices.empty()) issue("vertices", "graph has no vertices");
  std::set<std::string> vertices;
  for (const auto& v : spec.vertices) {
    if (!vertices.insert(v).second) issue("vertices", "duplicate vertex '" + v + "'");
  }
  std::set<std::string> edge_ids;
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const auto& e = spec.edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!edge_ids.insert(e.id).second) issue(where, "duplicate edge id '" + e.id + "'");
    if (!vertices.count(e.from)) issue(where, "unknown vertex '" + e.from + "'");
    if (!vertices.count(e.to)) issue(where, "unknown vertex '" + e.to + "'");
  }
  std::set<std::string> fixed = vertices;
  if (spec.fixed_vertices) {
    fixed.clear();
    for (const auto& v : *spec.fixed_vertices) {
      if (!vertices.count(v)) issue("fixed_vertices", "unknown vertex '" + v + "'");
      fixed.insert(v);
    }
  }

  // Nielsen cycles and paths.
  std::set<std::string> cycle_ids;
  for (std::size_t i = 0; i < spec.nielsen_cycles.size(); ++i) {
    const auto& c = spec.nielsen_cycles[i];
    const std::string where = "nielsen_cycles[" + std::to_string(i) + "]";
    if (!cycle_ids.insert(c.id).second) issue(where, "duplicate cycle id '" + c.id + "'");
    Walk w = trace(spec, c.path);
    if (w.error) {
      issue(where, *w.error);
      continue;
    }
    if (w.visited.front() != w.visited.back()) issue(where, "cycle is not closed");
    for (std::size_t k = 0; k < c.path.size(); ++k) {
      if (backtracks(c.path[k], c.path[(k + 1) % c.path.size()]) &&
          (c.path.size() > 1 || false)) {
        issue(where, "cycle is not immersed at step " + std::to_string(k));
        break;
      }
    }
  }
  std::set<std::string> path_ids;
  for (std::size_t i = 0; i < spec.nielsen_paths.size(); ++i) {
    const auto& p = spec.nielsen_paths[i];
    const std::string where = "nielsen_paths[" + std::to_string(i) + "]";
    if (!path_ids.insert(p.id).second) issue(where, "duplicate path id '" + p.id + "'");
    Walk w = trace(spec, p.path);
    if (w.error) {
      issue(where, *w.error);
      continue;
    }
    for (std::size_t k = 0; k + 1 < p.path.size(); ++k) {
      if (backtracks(p.path[k], p.path[k + 1])) {
        issue(where, "path is not immersed at step " + std::to_string(k));
        break;
      }
    }
  }

  // Strata.
  std::map<std::string, std::size_t> owner;
  bool seen_non_invariant = false;
  bool any_linear = false;
  bool any_polynomial = false;
  std::set<std::tuple<std::string, std::int64_t, std::size_t>> suffixes;
  for (std::size_t i = 0; i < spec.strata.size(); ++i) {
    const Stratum& s = spec.strata[i];
    const std::string where = "strata[" + std::to_string(i) + "]";
    if (s.edges.empty()) issue(where, "stratum has no edges");
    for (const auto& id : s.edges) {
      if (!edge_ids.count(id)) issue(where, "unknown edge '" + id + "'");
      if (!owner.try_emplace(id, i).second) {
        issue(where, "edge '" + id + "' already belongs to strata[" +
                         std::to_string(owner[id]) + "]");
      }
    }
    const bool single = s.kind == StratumKind::Invariant || s.kind == StratumKind::Linear ||
                        s.kind == StratumKind::Polynomial;
    if (single && s.edges.size() != 1) {
      issue(where, to_string(s.kind) + " stratum must be a single edge");
    }
    if (s.kind == StratumKind::Invariant) {
      if (seen_non_invariant) issue(where, "invariant strata must precede all other strata");
    } else {
      seen_non_invariant = true;
    }
    if (s.kind != StratumKind::Linear && s.suffix) {
      issue(where, to_string(s.kind) + " stratum cannot carry a suffix");
    }
    const GraphEdge* e = s.edges.size() == 1 ? find_edge(spec, s.edges[0]) : nullptr;
    if ((s.kind == StratumKind::Linear || s.kind == StratumKind::Polynomial) && e) {
      if (!fixed.count(e->from) || !fixed.count(e->to)) {
        issue(where, "endpoints of a non-exponential stratum must be fixed vertices");
      }
    }
    if (s.kind == StratumKind::Polynomial) any_polynomial = true;
    if (s.kind != StratumKind::Linear) continue;
    any_linear = true;
    if (!s.suffix) {
      issue(where, "linear stratum needs a suffix");
      continue;
    }
    const Suffix& u = *s.suffix;
    const DeclaredPath* c = find_cycle(spec, u.cycle);
    if (!c) {
      issue(where, "suffix references undeclared Nielsen cycle '" + u.cycle + "'");
      continue;
    }
    if (u.exponent == 0) issue(where, "suffix exponent must be nonzero");
    if (!suffixes.insert({u.cycle, u.exponent, u.offset}).second) {
      issue(where, "suffix duplicates that of another linear stratum");
    }
    if (c->path.empty() || u.offset >= c->path.size()) {
      issue(where, "suffix offset out of range for cycle '" + u.cycle + "'");
      continue;
    }
    for (const auto& step : c->path) {
      auto at = stratum_of(spec, step.edge);
      if (at && *at >= i) {
        issue(where, "suffix cycle '" + u.cycle + "' uses edge '" + step.edge +
                         "' from a stratum that is not lower in the filtration");
        break;
      }
    }
    const auto verts = cycle_vertices(spec, *c);
    if (e && !verts.empty() && verts[u.offset] != e->to) {
      issue(where, "suffix rotation of '" + u.cycle + "' starts at " + verts[u.offset] +
                       ", not at the terminal vertex " + e->to);
    }
  }
  for (const auto& e : spec.edges) {
    if (!owner.count(e.id)) issue("strata", "edge '" + e.id + "' belongs to no stratum");
  }
  if (any_polynomial && !any_linear) {
    issue("strata", "non-exponential strata present but no linear stratum");
  }
  return r;
}

std::vector<std::string> supports(const IrttSpec& spec, const std::string& cycle) {
  require_cycle(spec, cycle);
  std::vector<std::string> out;
  for (const auto& s : spec.strata) {
    if (s.kind == StratumKind::Linear && s.suffix && s.suffix->cycle == cycle &&
        s.edges.size() == 1) {
      out.push_back(s.edges[0]);
    }
  }
  return out;
}

InternalResult is_internal(const IrttSpec& spec, const std::string& edge) {
  if (!linear_stratum(spec, edge)) {
    throw InputError("'" + edge + "' is not a linear stratum");
  }
  const GraphEdge* e = find_edge(spec, edge);
  if (!e) throw InputError("unknown edge '" + edge + "'");
  std::map<std::string, std::string> on_cycle;  // vertex -> first cycle through it
  for (const auto& c : spec.nielsen_cycles) {
    for (const auto& v : cycle_vertices(spec, c)) on_cycle.try_emplace(v, c.id);
  }
  InternalResult r;
  auto found = search(links(spec, true, edge), {e->from},
                      [&](const std::string& v) { return on_cycle.count(v) > 0; });
  if (found) {
    r.internal = true;
    r.path = std::move(found->path);
    r.target_vertex = found->target;
    r.target_cycle = on_cycle[found->target];
  }
  return r;
}

std::optional<NearbySource> nearby_source(const IrttSpec& spec, const std::string& cycle) {
  const DeclaredPath& c = require_cycle(spec, cycle);
  const std::set<std::string> src = sources(spec);
  auto found = search(links(spec, false, ""), cycle_vertices(spec, c),
                      [&](const std::string& v) { return src.count(v) > 0; });
  if (!found) return std::nullopt;
  NearbySource out{found->root, found->target, "", std::move(found->path)};
  for (const auto& s : spec.strata) {
    if (s.kind != StratumKind::Linear || s.edges.size() != 1) continue;
    const GraphEdge* e = find_edge(spec, s.edges[0]);
    if (e && e->from == out.source) {
      out.source_stratum = e->id;
      break;
    }
  }
  return out;
}

bool has_nearby_source(const IrttSpec& spec, const std::string& cycle) {
  return nearby_source(spec, cycle).has_value();
}

std::optional<RichLinearityWitness> rich_linearity(const IrttSpec& spec) {
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (last stratum, declaration)
  for (std::size_t i = 0; i < spec.nielsen_cycles.size(); ++i) {
    std::size_t last = 0;
    for (const auto& step : spec.nielsen_cycles[i].path) {
      if (auto at = stratum_of(spec, step.edge)) last = std::max(last, *at);
    }
    order.emplace_back(last, i);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [last, i] : order) {
    const std::string& id = spec.nielsen_cycles[i].id;
    RichLinearityWitness w;
    w.cycle = id;
    for (const auto& edge : supports(spec, id)) {
      if (is_internal(spec, edge).internal) w.internal_strata.push_back(edge);
    }
    w.source = nearby_source(spec, id);
    if (w.internal_strata.size() >= 3 || (w.internal_strata.size() >= 2 && w.source)) return w;
  }
  return std::nullopt;
}

bool verify_witness(const IrttSpec& spec, const RichLinearityWitness& witness) {
  const DeclaredPath* c = find_cycle(spec, witness.cycle);
  if (!c) return false;
  const auto supported = supports(spec, witness.cycle);
  std::set<std::string> distinct(witness.internal_strata.begin(), witness.internal_strata.end());
  if (distinct.size() != witness.internal_strata.size()) return false;
  for (const auto& edge : witness.internal_strata) {
    if (std::find(supported.begin(), supported.end(), edge) == supported.end()) return false;
    const InternalResult ir = is_internal(spec, edge);
    if (!ir.internal) return false;
    const GraphEdge* e = find_edge(spec, edge);
    if (!chain_valid(spec, ir.path, e->from, ir.target_vertex, true, edge)) return false;
  }
  if (witness.source) {
    const auto& s = *witness.source;
    const auto verts = cycle_vertices(spec, *c);
    if (std::find(verts.begin(), verts.end(), s.cycle_vertex) == verts.end()) return false;
    const Stratum* st = linear_stratum(spec, s.source_stratum);
    const GraphEdge* e = find_edge(spec, s.source_stratum);
    if (!st || !e || e->from != s.source) return false;
    if (!chain_valid(spec, s.path, s.cycle_vertex, s.source, false, "")) return false;
  }
  const std::size_t k = witness.internal_strata.size();
  return k >= 3 || (k >= 2 && witness.source.has_value());
}

rbf::LinearBranching branching_data(const IrttSpec& spec, const RichLinearityWitness& witness) {
  rbf::LinearBranching b;
  b.cycle = witness.cycle;
  b.nearby_source = witness.source.has_value();
  for (const auto& edge : witness.internal_strata) {
    const Stratum* s = linear_stratum(spec, edge);
    if (!s || !s->suffix) throw InputError("'" + edge + "' is not a linear stratum");
    b.strata.push_back(edge);
    b.exponents.push_back(s->suffix->exponent);
  }
  return b;
}

namespace {

bool few_linear_clause_holds(const IrttSpec& spec) {
  for (const auto& s : spec.strata) {
    if (s.kind == StratumKind::Polynomial) return false;
  }
  for (const auto& c : spec.nielsen_cycles) {
    if (supports(spec, c.id).size() > 1) return false;
  }
  return true;
}

bool has_linear(const IrttSpec& spec) {
  return std::any_of(spec.strata.begin(), spec.strata.end(),
                     [](const Stratum& s) { return s.kind == StratumKind::Linear; });
}

}  // namespace

FbcVerdict classify_fbc(const IrttSpec& spec) {
  const IrttValidation valid = validate_irtt(spec);
  if (!valid.ok) {
    throw InputError("invalid IRTT spec: " + valid.issues.front().location + ": " +
                     valid.issues.front().message);
  }
  FbcVerdict v;
  if (auto w = rich_linearity(spec)) {
    v.branch = FbcBranch::NoCoarseMedian_RichLinearity;
    std::string why = "Nielsen cycle " + w->cycle + " supports internal linear strata " +
                      joined(w->internal_strata);
    if (w->source) why += " and has a nearby source at " + w->source->source;
    v.reasons.push_back(why + ": rich linearity");
    try {
      v.rbf = rbf::fbc_rbf_directions(branching_data(spec, *w));
      v.reasons.push_back("branching lines of slopes given by the suffix exponents, plus fibre "
                          "lines for a source, give a 2-dimensional richly branching flat");
    } catch (const PreconditionError& e) {
      v.reasons.push_back(std::string("no explicit RBF directions: ") + e.what());
    }
    v.reasons.push_back("geometric dimension 2 bounds the rank of any coarse median by 2, and a "
                        "2-dimensional richly branching flat excludes rank <= 2: no coarse median");
    v.witness = std::move(w);
    return v;
  }
  if (spec.nielsen_cycles.empty()) {
    v.branch = FbcBranch::Hyperbolic_CocompactlyCubulated;
    v.reasons.push_back("no Nielsen cycles: the automorphism is atoroidal, so the group is "
                        "hyperbolic and cocompactly cubulated");
    return v;
  }
  if (!has_linear(spec)) {
    v.branch = FbcBranch::RelHyp_over_F_times_Z;
    v.reasons.push_back("no linear strata: virtually hyperbolic relative to subgroups F' x Z, "
                        "hence quasi-isometric to a finite-dimensional CAT(0) cube complex");
    return v;
  }
  if (few_linear_clause_holds(spec)) {
    v.branch = FbcBranch::Virtually_Colourable_HHG;
    v.reasons.push_back("all non-exponential strata linear and each Nielsen cycle supports at "
                        "most one linear stratum: virtually a colourable hierarchically "
                        "hyperbolic group, hence quasicubical");
    return v;
  }
  v.branch = FbcBranch::Inconclusive;
  v.reasons.push_back("no rich linearity in the declared data, and some Nielsen cycle supports "
                      "several linear strata or a non-linear polynomial stratum is present");
  return v;
}

bool verify_verdict(const IrttSpec& spec, const FbcVerdict& verdict) {
  if (!validate_irtt(spec).ok) return false;
  const bool rich = verdict.branch == FbcBranch::NoCoarseMedian_RichLinearity;
  if (verdict.witness.has_value() != rich) return false;
  if (rich) {
    if (!verify_witness(spec, *verdict.witness)) return false;
    if (verdict.rbf && !rbf::validate_rbf_spec(*verdict.rbf).ok) return false;
    return true;
  }
  if (verdict.rbf || rich_linearity(spec)) return false;
  switch (verdict.branch) {
    case FbcBranch::Hyperbolic_CocompactlyCubulated: return spec.nielsen_cycles.empty();
    case FbcBranch::RelHyp_over_F_times_Z:
      return !spec.nielsen_cycles.empty() && !has_linear(spec);
    case FbcBranch::Virtually_Colourable_HHG:
      return !spec.nielsen_cycles.empty() && has_linear(spec) && few_linear_clause_holds(spec);
    case FbcBranch::Inconclusive:
      return !spec.nielsen_cycles.empty() && has_linear(spec) && !few_linear_clause_holds(spec);
    case FbcBranch::NoCoarseMedian_RichLinearity: break;
  }
  return false;
}

}  // namespace coarsemed::fbc
