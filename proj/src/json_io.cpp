#include "coarsemed/json_io.hpp"

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <set>

#include "coarsemed/errors.hpp"

namespace coarsemed::io {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw InputError("schema violation at " + (path.empty() ? std::string("<root>") : path) + ": " +
                   what);
}

std::string key_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) schema_error(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) schema_error(key_path(path, it.key()), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(key_path(path, key), "missing required field");
  return *it;
}

const json* optional(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

const json& expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) schema_error(path, "expected a boolean");
  return j.get<bool>();
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_unsigned()) {
    const auto u = j.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      schema_error(path, "integer out of range");
    }
    return static_cast<std::int64_t>(u);
  }
  schema_error(path, "expected an integer");
}

std::size_t as_index(const json& j, const std::string& path) {
  const std::int64_t v = as_int(j, path);
  if (v < 0) schema_error(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> as_string_list(const json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], index_path(path, i)));
  return out;
}

tubular::Vec2 as_vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) schema_error(path, "expected an array of 2 integers");
  return {as_int(j[0], index_path(path, 0)), as_int(j[1], index_path(path, 1))};
}

json vec_to_json(const tubular::Vec2& v) { return json::array({v[0], v[1]}); }

json names(const median::FiniteMedianAlgebra& m, const median::ElementSet& s) {
  json out = json::array();
  for (auto e : s) out.push_back(m.name(e));
  return out;
}

}  // namespace

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto at = what.find(": "); at != std::string::npos) what = what.substr(at + 2);
    throw InputError("JSON syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + what);
  }
}

json rational_to_json(const Rational& q) {
  if (denominator(q) == 1) return bigint_to_json(numerator(q));
  return to_string(q);
}

Rational rational_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer() || j.is_number_unsigned()) return Rational(as_int(j, path));
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const InputError& e) {
      schema_error(path, e.what());
    }
  }
  schema_error(path, "expected an integer or a \"p/q\" string");
}

json bigint_to_json(const BigInt& z) {
  if (z >= std::numeric_limits<std::int64_t>::min() &&
      z <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(z);
  }
  return z.str();
}

BigInt bigint_from_json(const json& j, const std::string& path) {
  const Rational q = rational_from_json(j, path);
  if (denominator(q) != 1) schema_error(path, "expected an integer");
  return numerator(q);
}

// ---------------------------------------------------------------------------
// Median algebras

json to_json(const median::FiniteMedianAlgebra& m) {
  const std::size_t n = m.size();
  json med = json::array();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) med.push_back(json::array({a, b, c, m.med(a, b, c)}));
    }
  }
  json out{{"elements", m.elements()}, {"med", std::move(med)}};
  if (m.metric()) {
    json metric = json::array();
    for (const auto& d : *m.metric()) metric.push_back(rational_to_json(d));
    out["metric"] = std::move(metric);
  }
  return out;
}

median::FiniteMedianAlgebra median_from_json(const json& j, const median::Limits& limits) {
  expect_object(j, "", {"elements", "med", "metric"});
  const auto elements = as_string_list(require(j, "", "elements"), "elements");
  const std::size_t n = elements.size();
  if (n == 0) schema_error("elements", "at least one element is required");
  if (n > limits.max_table_elements) {
    throw LimitError("median algebra has " + std::to_string(n) + " elements; the cap is " +
                     std::to_string(limits.max_table_elements));
  }
  const json& med = expect_array(require(j, "", "med"), "med");
  std::vector<std::array<std::size_t, 4>> entries;
  entries.reserve(med.size());
  for (std::size_t i = 0; i < med.size(); ++i) {
    const std::string p = index_path("med", i);
    if (!med[i].is_array() || med[i].size() != 4) schema_error(p, "expected [i, j, k, m]");
    std::array<std::size_t, 4> e{};
    for (std::size_t k = 0; k < 4; ++k) {
      e[k] = as_index(med[i][k], index_path(p, k));
      if (e[k] >= n) schema_error(index_path(p, k), "element index out of range");
    }
    entries.push_back(e);
  }
  std::optional<std::vector<Rational>> metric;
  if (const json* mj = optional(j, "metric")) {
    expect_array(*mj, "metric");
    if (mj->size() != n * n) {
      schema_error("metric", "expected " + std::to_string(n * n) + " entries");
    }
    metric.emplace();
    for (std::size_t i = 0; i < mj->size(); ++i) {
      metric->push_back(rational_from_json((*mj)[i], index_path("metric", i)));
    }
  }
  return median::FiniteMedianAlgebra::from_entries(elements, entries, std::move(metric));
}

json to_json(const median::FiniteMedianAlgebra& m, const median::Wall& wall) {
  return json{{"side_a", names(m, wall.side_a)}, {"side_b", names(m, wall.side_b)}};
}

// ---------------------------------------------------------------------------
// RBF specs

json to_json(const rbf::RbfSpec& spec) {
  json out{{"n", spec.n},
           {"directions", spec.directions},
           {"density", rational_to_json(spec.density)},
           {"provenance", spec.provenance}};
  if (!spec.positions) {
    out["positions"] = "lattice";
  } else {
    json ps = json::array();
    for (const auto& list : *spec.positions) {
      json row = json::array();
      for (const auto& p : list) row.push_back(rational_to_json(p));
      ps.push_back(std::move(row));
    }
    out["positions"] = std::move(ps);
  }
  return out;
}

rbf::RbfSpec rbf_from_json(const json& j) {
  expect_object(j, "", {"n", "directions", "positions", "density", "provenance"});
  rbf::RbfSpec s;
  const std::int64_t n = as_int(require(j, "", "n"), "n");
  if (n < 1) schema_error("n", "expected a positive integer");
  s.n = static_cast<std::size_t>(n);
  const json& dirs = expect_array(require(j, "", "directions"), "directions");
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const std::string p = index_path("directions", i);
    expect_array(dirs[i], p);
    rbf::IntVector v;
    for (std::size_t k = 0; k < dirs[i].size(); ++k) {
      v.push_back(as_int(dirs[i][k], index_path(p, k)));
    }
    s.directions.push_back(std::move(v));
  }
  if (const json* pj = optional(j, "positions")) {
    if (pj->is_string()) {
      if (pj->get<std::string>() != "lattice") schema_error("positions", "expected \"lattice\"");
    } else {
      expect_array(*pj, "positions");
      s.positions.emplace();
      for (std::size_t i = 0; i < pj->size(); ++i) {
        const std::string p = index_path("positions", i);
        expect_array((*pj)[i], p);
        std::vector<Rational> row;
        for (std::size_t k = 0; k < (*pj)[i].size(); ++k) {
          row.push_back(rational_from_json((*pj)[i][k], index_path(p, k)));
        }
        s.positions->push_back(std::move(row));
      }
    }
  }
  if (const json* dj = optional(j, "density")) s.density = rational_from_json(*dj, "density");
  if (const json* pj = optional(j, "provenance")) s.provenance = as_string(*pj, "provenance");
  return s;
}

// ---------------------------------------------------------------------------
// Tubular groups

json to_json(const tubular::TubularGroupSpec& spec) {
  json edges = json::array();
  for (const auto& e : spec.edges) {
    edges.push_back(json{{"id", e.id},
                         {"from", e.from},
                         {"to", e.to},
                         {"w_from", vec_to_json(e.w_from)},
                         {"w_to", vec_to_json(e.w_to)}});
  }
  return json{{"vertices", spec.vertices}, {"edges", std::move(edges)}};
}

tubular::TubularGroupSpec tubular_from_json(const json& j) {
  expect_object(j, "", {"vertices", "edges"});
  tubular::TubularGroupSpec s;
  s.vertices = as_string_list(require(j, "", "vertices"), "vertices");
  const json& edges = expect_array(require(j, "", "edges"), "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = index_path("edges", i);
    expect_object(edges[i], p, {"id", "from", "to", "w_from", "w_to"});
    tubular::TubularEdge e;
    e.id = as_string(require(edges[i], p, "id"), key_path(p, "id"));
    e.from = as_string(require(edges[i], p, "from"), key_path(p, "from"));
    e.to = as_string(require(edges[i], p, "to"), key_path(p, "to"));
    e.w_from = as_vec2(require(edges[i], p, "w_from"), key_path(p, "w_from"));
    e.w_to = as_vec2(require(edges[i], p, "w_to"), key_path(p, "w_to"));
    s.edges.push_back(std::move(e));
  }
  return s;
}

json to_json(const tubular::TransportGraph& tg) {
  json nodes = json::array();
  for (const auto& n : tg.nodes) {
    nodes.push_back(json{{"vertex", n.vertex}, {"direction", vec_to_json(n.direction)}});
  }
  json arcs = json::array();
  for (const auto& a : tg.arcs) {
    arcs.push_back(json{{"edge", a.edge},
                        {"tail", a.tail},
                        {"head", a.head},
                        {"label", rational_to_json(a.label)}});
  }
  return json{{"nodes", std::move(nodes)}, {"arcs", std::move(arcs)}};
}

json to_json(const tubular::UnbalancedCycle& c) {
  json steps = json::array();
  for (const auto& s : c.steps) steps.push_back(json{{"arc", s.arc}, {"forward", s.forward}});
  return json{{"start", c.start}, {"steps", std::move(steps)}, {"product", rational_to_json(c.product)}};
}

tubular::UnbalancedCycle unbalanced_cycle_from_json(const json& j, const std::string& path) {
  expect_object(j, path, {"start", "steps", "product"});
  tubular::UnbalancedCycle c;
  c.start = as_index(require(j, path, "start"), key_path(path, "start"));
  const std::string sp = key_path(path, "steps");
  const json& steps = expect_array(require(j, path, "steps"), sp);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string p = index_path(sp, i);
    expect_object(steps[i], p, {"arc", "forward"});
    c.steps.push_back({as_index(require(steps[i], p, "arc"), key_path(p, "arc")),
                       as_bool(require(steps[i], p, "forward"), key_path(p, "forward"))});
  }
  c.product = rational_from_json(require(j, path, "product"), key_path(path, "product"));
  return c;
}

namespace {

tubular::TubularStatus tubular_status_from(const std::string& s, const std::string& path) {
  using tubular::TubularStatus;
  for (auto st : {TubularStatus::CoarseMedian_CocompactlyCubulated_VirtuallySpecial,
                  TubularStatus::NoCoarseMedian_via_RBF,
                  TubularStatus::NoCoarseMedian_via_Distortion}) {
    if (tubular::to_string(st) == s) return st;
  }
  schema_error(path, "unknown status '" + s + "'");
}

tubular::DehnClass dehn_from(const std::string& s, const std::string& path) {
  using tubular::DehnClass;
  for (auto d : {DehnClass::Quadratic, DehnClass::Exponential,
                 DehnClass::SuperQuadraticUnclassified}) {
    if (tubular::to_string(d) == s) return d;
  }
  schema_error(path, "unknown Dehn class '" + s + "'");
}

}  // namespace

json to_json(const tubular::TubularVerdict& v) {
  json out{{"status", tubular::to_string(v.status)},
           {"distorted", v.distorted},
           {"unbalanced_cycle", nullptr},
           {"bs", nullptr},
           {"potentials", nullptr},
           {"dehn", tubular::to_string(v.dehn)},
           {"max_classes", v.max_classes},
           {"rbf_vertex", nullptr},
           {"rbf", nullptr},
           {"reasons", v.reasons}};
  if (v.unbalanced_cycle) out["unbalanced_cycle"] = to_json(*v.unbalanced_cycle);
  if (v.bs) {
    out["bs"] = json{{"m", bigint_to_json(v.bs->m)},
                     {"n", bigint_to_json(v.bs->n)},
                     {"cycle", to_json(v.bs->cycle)}};
  }
  if (v.potentials) {
    json ps = json::array();
    for (const auto& p : *v.potentials) ps.push_back(rational_to_json(p));
    out["potentials"] = std::move(ps);
  }
  if (v.rbf_vertex) out["rbf_vertex"] = *v.rbf_vertex;
  if (v.rbf) out["rbf"] = to_json(*v.rbf);
  return out;
}

tubular::TubularVerdict tubular_verdict_from_json(const json& j) {
  expect_object(j, "", {"status", "distorted", "unbalanced_cycle", "bs", "potentials", "dehn",
                        "max_classes", "rbf_vertex", "rbf", "reasons"});
  tubular::TubularVerdict v;
  v.status = tubular_status_from(as_string(require(j, "", "status"), "status"), "status");
  v.distorted = as_bool(require(j, "", "distorted"), "distorted");
  if (const json* c = optional(j, "unbalanced_cycle")) {
    v.unbalanced_cycle = unbalanced_cycle_from_json(*c, "unbalanced_cycle");
  }
  if (const json* b = optional(j, "bs")) {
    expect_object(*b, "bs", {"m", "n", "cycle"});
    v.bs = tubular::BsWitness{bigint_from_json(require(*b, "bs", "m"), "bs.m"),
                              bigint_from_json(require(*b, "bs", "n"), "bs.n"),
                              unbalanced_cycle_from_json(require(*b, "bs", "cycle"), "bs.cycle")};
  }
  if (const json* p = optional(j, "potentials")) {
    expect_array(*p, "potentials");
    v.potentials.emplace();
    for (std::size_t i = 0; i < p->size(); ++i) {
      v.potentials->push_back(rational_from_json((*p)[i], index_path("potentials", i)));
    }
  }
  v.dehn = dehn_from(as_string(require(j, "", "dehn"), "dehn"), "dehn");
  v.max_classes = as_index(require(j, "", "max_classes"), "max_classes");
  if (const json* r = optional(j, "rbf_vertex")) v.rbf_vertex = as_string(*r, "rbf_vertex");
  if (const json* r = optional(j, "rbf")) v.rbf = rbf_from_json(*r);
  v.reasons = as_string_list(require(j, "", "reasons"), "reasons");
  return v;
}

// ---------------------------------------------------------------------------
// Free-by-cyclic specs

namespace {

fbc::StratumKind stratum_kind_from(const std::string& s, const std::string& path) {
  using fbc::StratumKind;
  for (auto k : {StratumKind::Invariant, StratumKind::Exponential, StratumKind::Linear,
                 StratumKind::Polynomial, StratumKind::Zero}) {
    if (fbc::to_string(k) == s) return k;
  }
  schema_error(path, "unknown stratum kind '" + s + "'");
}

fbc::EdgeStep step_from(const json& j, const std::string& path) {
  std::string s = as_string(j, path);
  fbc::EdgeStep step;
  if (!s.empty() && s.back() == '~') {
    step.reversed = true;
    s.pop_back();
  }
  if (s.empty()) schema_error(path, "empty edge name");
  step.edge = std::move(s);
  return step;
}

json path_to_json(const fbc::EdgePath& path) {
  json out = json::array();
  for (const auto& s : path) out.push_back(s.edge + (s.reversed ? "~" : ""));
  return out;
}

std::vector<fbc::DeclaredPath> declared_from(const json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<fbc::DeclaredPath> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index_path(path, i);
    expect_object(j[i], p, {"id", "path"});
    fbc::DeclaredPath d;
    d.id = as_string(require(j[i], p, "id"), key_path(p, "id"));
    const std::string pp = key_path(p, "path");
    const json& steps = expect_array(require(j[i], p, "path"), pp);
    for (std::size_t k = 0; k < steps.size(); ++k) {
      d.path.push_back(step_from(steps[k], index_path(pp, k)));
    }
    out.push_back(std::move(d));
  }
  return out;
}

json declared_to_json(const std::vector<fbc::DeclaredPath>& ds) {
  json out = json::array();
  for (const auto& d : ds) out.push_back(json{{"id", d.id}, {"path", path_to_json(d.path)}});
  return out;
}

bool single_edge_kind(fbc::StratumKind k) {
  return k == fbc::StratumKind::Invariant || k == fbc::StratumKind::Linear ||
         k == fbc::StratumKind::Polynomial;
}

}  // namespace

std::string path_to_string(const fbc::EdgePath& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += " ";
    out += path[i].edge + (path[i].reversed ? "~" : "");
  }
  return out;
}

json to_json(const fbc::IrttSpec& spec) {
  json edges = json::array();
  for (const auto& e : spec.edges) edges.push_back(json{{"id", e.id}, {"from", e.from}, {"to", e.to}});
  json strata = json::array();
  for (const auto& s : spec.strata) {
    json sj{{"kind", fbc::to_string(s.kind)}};
    if (single_edge_kind(s.kind) && s.edges.size() == 1) {
      sj["edge"] = s.edges[0];
    } else {
      sj["edges"] = s.edges;
    }
    if (s.suffix) {
      sj["suffix"] =
          json{{"cycle", s.suffix->cycle}, {"exp", s.suffix->exponent}, {"offset", s.suffix->offset}};
    }
    strata.push_back(std::move(sj));
  }
  json out{{"vertices", spec.vertices},
           {"edges", std::move(edges)},
           {"strata", std::move(strata)},
           {"nielsen_cycles", declared_to_json(spec.nielsen_cycles)},
           {"nielsen_paths", declared_to_json(spec.nielsen_paths)}};
  if (spec.fixed_vertices) out["fixed_vertices"] = *spec.fixed_vertices;
  return out;
}

fbc::IrttSpec fbc_from_json(const json& j) {
  expect_object(j, "", {"vertices", "edges", "fixed_vertices", "strata", "nielsen_cycles",
                        "nielsen_paths"});
  fbc::IrttSpec s;
  s.vertices = as_string_list(require(j, "", "vertices"), "vertices");
  const json& edges = expect_array(require(j, "", "edges"), "edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = index_path("edges", i);
    expect_object(edges[i], p, {"id", "from", "to"});
    s.edges.push_back({as_string(require(edges[i], p, "id"), key_path(p, "id")),
                       as_string(require(edges[i], p, "from"), key_path(p, "from")),
                       as_string(require(edges[i], p, "to"), key_path(p, "to"))});
  }
  if (const json* f = optional(j, "fixed_vertices")) {
    s.fixed_vertices = as_string_list(*f, "fixed_vertices");
  }
  const json& strata = expect_array(require(j, "", "strata"), "strata");
  for (std::size_t i = 0; i < strata.size(); ++i) {
    const std::string p = index_path("strata", i);
    expect_object(strata[i], p, {"kind", "edge", "edges", "suffix"});
    fbc::Stratum st;
    st.kind = stratum_kind_from(as_string(require(strata[i], p, "kind"), key_path(p, "kind")),
                                key_path(p, "kind"));
    const json* one = optional(strata[i], "edge");
    const json* many = optional(strata[i], "edges");
    if (one && many) schema_error(p, "give either \"edge\" or \"edges\", not both");
    if (!one && !many) schema_error(key_path(p, "edge"), "missing required field");
    if (one) {
      st.edges.push_back(as_string(*one, key_path(p, "edge")));
    } else {
      st.edges = as_string_list(*many, key_path(p, "edges"));
    }
    if (const json* u = optional(strata[i], "suffix")) {
      const std::string up = key_path(p, "suffix");
      expect_object(*u, up, {"cycle", "exp", "offset"});
      fbc::Suffix suf;
      suf.cycle = as_string(require(*u, up, "cycle"), key_path(up, "cycle"));
      if (const json* e = optional(*u, "exp")) suf.exponent = as_int(*e, key_path(up, "exp"));
      if (const json* o = optional(*u, "offset")) suf.offset = as_index(*o, key_path(up, "offset"));
      st.suffix = std::move(suf);
    }
    s.strata.push_back(std::move(st));
  }
  if (const json* c = optional(j, "nielsen_cycles")) {
    s.nielsen_cycles = declared_from(*c, "nielsen_cycles");
  }
  if (const json* c = optional(j, "nielsen_paths")) {
    s.nielsen_paths = declared_from(*c, "nielsen_paths");
  }
  return s;
}

namespace {

std::string link_kind_name(fbc::Link::Kind k) {
  switch (k) {
    case fbc::Link::Kind::NielsenPath: return "nielsen_path";
    case fbc::Link::Kind::InvariantEdge: return "invariant_edge";
    case fbc::Link::Kind::LinearEdge: return "linear_edge";
  }
  return "unknown";
}

fbc::Link link_from(const json& j, const std::string& path) {
  expect_object(j, path, {"kind", "id", "reversed", "from", "to"});
  fbc::Link l;
  const std::string kind = as_string(require(j, path, "kind"), key_path(path, "kind"));
  bool found = false;
  for (auto k : {fbc::Link::Kind::NielsenPath, fbc::Link::Kind::InvariantEdge,
                 fbc::Link::Kind::LinearEdge}) {
    if (link_kind_name(k) == kind) {
      l.kind = k;
      found = true;
    }
  }
  if (!found) schema_error(key_path(path, "kind"), "unknown link kind '" + kind + "'");
  l.id = as_string(require(j, path, "id"), key_path(path, "id"));
  l.reversed = as_bool(require(j, path, "reversed"), key_path(path, "reversed"));
  l.from = as_string(require(j, path, "from"), key_path(path, "from"));
  l.to = as_string(require(j, path, "to"), key_path(path, "to"));
  return l;
}

fbc::FbcBranch branch_from(const std::string& s, const std::string& path) {
  using fbc::FbcBranch;
  for (auto b : {FbcBranch::Hyperbolic_CocompactlyCubulated, FbcBranch::RelHyp_over_F_times_Z,
                 FbcBranch::Virtually_Colourable_HHG, FbcBranch::NoCoarseMedian_RichLinearity,
                 FbcBranch::Inconclusive}) {
    if (fbc::to_string(b) == s) return b;
  }
  schema_error(path, "unknown branch '" + s + "'");
}

}  // namespace

json to_json(const fbc::Link& link) {
  return json{{"kind", link_kind_name(link.kind)},
              {"id", link.id},
              {"reversed", link.reversed},
              {"from", link.from},
              {"to", link.to}};
}

json to_json(const fbc::RichLinearityWitness& w) {
  json out{{"cycle", w.cycle}, {"internal_strata", w.internal_strata}, {"source", nullptr}};
  if (w.source) {
    json links = json::array();
    for (const auto& l : w.source->path) links.push_back(to_json(l));
    out["source"] = json{{"cycle_vertex", w.source->cycle_vertex},
                         {"source", w.source->source},
                         {"source_stratum", w.source->source_stratum},
                         {"path", std::move(links)}};
  }
  return out;
}

json to_json(const fbc::FbcVerdict& v) {
  json out{{"branch", fbc::to_string(v.branch)},
           {"witness", nullptr},
           {"rbf", nullptr},
           {"reasons", v.reasons}};
  if (v.witness) out["witness"] = to_json(*v.witness);
  if (v.rbf) out["rbf"] = to_json(*v.rbf);
  return out;
}

fbc::FbcVerdict fbc_verdict_from_json(const json& j) {
  expect_object(j, "", {"branch", "witness", "rbf", "reasons"});
  fbc::FbcVerdict v;
  v.branch = branch_from(as_string(require(j, "", "branch"), "branch"), "branch");
  if (const json* w = optional(j, "witness")) {
    expect_object(*w, "witness", {"cycle", "internal_strata", "source"});
    fbc::RichLinearityWitness rw;
    rw.cycle = as_string(require(*w, "witness", "cycle"), "witness.cycle");
    rw.internal_strata =
        as_string_list(require(*w, "witness", "internal_strata"), "witness.internal_strata");
    if (const json* s = optional(*w, "source")) {
      const std::string sp = "witness.source";
      expect_object(*s, sp, {"cycle_vertex", "source", "source_stratum", "path"});
      fbc::NearbySource ns;
      ns.cycle_vertex = as_string(require(*s, sp, "cycle_vertex"), sp + ".cycle_vertex");
      ns.source = as_string(require(*s, sp, "source"), sp + ".source");
      ns.source_stratum = as_string(require(*s, sp, "source_stratum"), sp + ".source_stratum");
      const json& links = expect_array(require(*s, sp, "path"), sp + ".path");
      for (std::size_t i = 0; i < links.size(); ++i) {
        ns.path.push_back(link_from(links[i], index_path(sp + ".path", i)));
      }
      rw.source = std::move(ns);
    }
    v.witness = std::move(rw);
  }
  if (const json* r = optional(j, "rbf")) v.rbf = rbf_from_json(*r);
  v.reasons = as_string_list(require(j, "", "reasons"), "reasons");
  return v;
}

json to_json(const rbf::DiscreteRbfModel& model) {
  json strips = json::array();
  for (const auto& s : model.strips) {
    json att = json::array();
    for (const auto& p : s.attachment) att.push_back(json::array({p.x, p.y}));
    strips.push_back(json{{"direction", s.direction},
                          {"position", s.position},
                          {"attachment", std::move(att)},
                          {"vertex_count", s.vertices.size()}});
  }
  return json{{"radius", model.radius},
              {"depth", model.depth},
              {"base_count", model.base_count},
              {"vertex_count", model.vertices.size()},
              {"edge_count", model.adjacency.size()},
              {"strips", std::move(strips)}};
}

}  // namespace coarsemed::io
