#include "coarsemed/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "coarsemed/errors.hpp"

#ifndef COARSEMED_VERSION
#define COARSEMED_VERSION "0.0.0"
#endif

namespace coarsemed::report {

using io::json;

std::string version() { return COARSEMED_VERSION; }

std::string to_string(InputKind kind) {
  switch (kind) {
    case InputKind::Tubular: return "tubular";
    case InputKind::Fbc: return "fbc";
    case InputKind::Median: return "median";
    case InputKind::Rbf: return "rbf";
  }
  return "unknown";
}

InputKind parse_kind(const std::string& text) {
  for (auto k : {InputKind::Tubular, InputKind::Fbc, InputKind::Median, InputKind::Rbf}) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown input kind '" + text + "' (expected tubular, fbc, median or rbf)");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return out.str();
}

namespace {

InputKind kind_of(const Spec& spec) {
  return static_cast<InputKind>(spec.index());
}

json spec_to_json(const Spec& spec) {
  return std::visit([](const auto& s) { return io::to_json(s); }, spec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw InputError("error while reading '" + path + "'");
  return buf.str();
}

}  // namespace

ParsedInput from_spec(Spec spec) {
  ParsedInput p;
  p.kind = kind_of(spec);
  p.input_digest = sha256_hex(spec_to_json(spec).dump());
  p.spec = std::move(spec);
  return p;
}

ParsedInput parse_input(const std::string& path, InputKind kind, const ParseOptions& options) {
  const json j = io::parse_json_text(read_file(path));
  switch (kind) {
    case InputKind::Tubular: {
      auto s = io::tubular_from_json(j);
      tubular::validate(s);
      return from_spec(std::move(s));
    }
    case InputKind::Fbc: {
      auto s = io::fbc_from_json(j);
      const auto v = fbc::validate_irtt(s);
      if (!v.ok) {
        throw InputError("invalid IRTT spec: " + v.issues.front().location + ": " +
                         v.issues.front().message);
      }
      return from_spec(std::move(s));
    }
    case InputKind::Median: {
      auto m = io::median_from_json(j, options.limits);
      if (options.check_median_axioms) {
        const auto v = median::verify_median_axioms(m);
        if (!v.ok) throw InputError("not a median algebra: " + v.message);
      }
      return from_spec(std::move(m));
    }
    case InputKind::Rbf: {
      auto s = io::rbf_from_json(j);
      const auto v = rbf::validate_rbf_spec(s);
      if (!v.ok) throw InputError("invalid RBF spec: " + v.problems.front());
      return from_spec(std::move(s));
    }
  }
  throw InputError("unknown input kind");
}

namespace {

json names(const median::FiniteMedianAlgebra& m, const median::ElementSet& s) {
  json out = json::array();
  for (auto e : s) out.push_back(m.name(e));
  return out;
}

void require_certificate(bool ok, const std::string& what) {
  if (!ok) throw CertificateError("certificate failed to re-verify: " + what);
}

bool wall_is_valid(const median::FiniteMedianAlgebra& m, const median::Wall& w) {
  if (w.side_a.empty() || w.side_b.empty()) return false;
  median::ElementSet all;
  std::set_union(w.side_a.begin(), w.side_a.end(), w.side_b.begin(), w.side_b.end(),
                 std::back_inserter(all));
  if (all != m.all() || all.size() != w.side_a.size() + w.side_b.size()) return false;
  return median::is_convex(m, w.side_a) && median::is_convex(m, w.side_b);
}

bool cube_is_valid(const median::FiniteMedianAlgebra& m, const std::vector<median::Element>& f,
                   std::size_t rank) {
  if (f.size() != (std::size_t{1} << rank)) return false;
  std::vector<median::Element> sorted = f;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (std::size_t x = 0; x < f.size(); ++x) {
    for (std::size_t y = 0; y < f.size(); ++y) {
      for (std::size_t z = 0; z < f.size(); ++z) {
        const std::size_t maj = (x & y) | (y & z) | (x & z);
        if (m.med(f[x], f[y], f[z]) != f[maj]) return false;
      }
    }
  }
  return true;
}

void median_report(const median::FiniteMedianAlgebra& m, const ReportOptions& opt,
                   AnalysisReport& r) {
  switch (opt.median_query) {
    case MedianQuery::Verify: {
      const auto v = median::verify_median_axioms(m);
      json tuple = json::array();
      for (auto e : v.tuple) tuple.push_back(m.name(e));
      r.verdict = json{{"query", "verify"},
                       {"size", m.size()},
                       {"ok", v.ok},
                       {"violated", v.violated ? json(median::to_string(*v.violated)) : json()},
                       {"tuple", std::move(tuple)},
                       {"message", v.message}};
      if (opt.witness) {
        require_certificate(median::verify_median_axioms(m) == v, "axiom check is not stable");
        r.certificates = json{{"verified", true}};
      }
      return;
    }
    case MedianQuery::Rank: {
      const auto rk = median::rank(m, opt.limits);
      r.verdict = json{{"query", "rank"},
                       {"size", m.size()},
                       {"rank_walls", rk.rank_walls},
                       {"rank_cube", rk.rank_cube},
                       {"agree", rk.rank_walls == rk.rank_cube}};
      if (opt.witness) {
        require_certificate(rk.witness_walls.size() == rk.rank_walls, "wall witness size");
        for (std::size_t i = 0; i < rk.witness_walls.size(); ++i) {
          require_certificate(wall_is_valid(m, rk.witness_walls[i]),
                              "witness wall " + std::to_string(i) + " is not a wall");
          for (std::size_t k = 0; k < i; ++k) {
            require_certificate(median::crosses(rk.witness_walls[i], rk.witness_walls[k]),
                                "witness walls " + std::to_string(k) + " and " +
                                    std::to_string(i) + " do not cross");
          }
        }
        require_certificate(cube_is_valid(m, rk.witness_cube, rk.rank_cube),
                            "cube witness is not an injective median morphism");
        json walls = json::array();
        for (const auto& w : rk.witness_walls) walls.push_back(io::to_json(m, w));
        json cube = json::array();
        for (auto e : rk.witness_cube) cube.push_back(m.name(e));
        r.certificates = json{{"walls", std::move(walls)}, {"cube", std::move(cube)},
                              {"verified", true}};
      }
      return;
    }
    case MedianQuery::Hull: {
      median::ElementSet set;
      for (const auto& name : opt.hull_set) set.push_back(m.index_of(name));
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
      const auto h = median::convex_hull(m, set);
      r.verdict = json{{"query", "hull"},
                       {"size", m.size()},
                       {"set", names(m, set)},
                       {"hull", names(m, h.hull)},
                       {"iterations", h.iterations}};
      if (opt.witness) {
        require_certificate(median::is_convex(m, h.hull), "hull is not convex");
        require_certificate(std::includes(h.hull.begin(), h.hull.end(), set.begin(), set.end()),
                            "hull does not contain the input set");
        r.certificates = json{{"verified", true}};
      }
      return;
    }
  }
}

void tubular_report(const tubular::TubularGroupSpec& spec, const ReportOptions& opt,
                    AnalysisReport& r) {
  const auto v = tubular::classify_tubular(spec);
  r.verdict = io::to_json(v);
  if (!opt.witness) return;
  require_certificate(tubular::verify_verdict(spec, v), "tubular verdict");
  json classes = json::object();
  for (const auto& vertex : spec.vertices) {
    json dirs = json::array();
    for (const auto& c : tubular::commensurability_classes(spec, vertex)) {
      dirs.push_back(json::array({c.direction[0], c.direction[1]}));
    }
    classes[vertex] = std::move(dirs);
  }
  r.certificates = json{{"transport_graph", io::to_json(tubular::build_transport_graph(spec))},
                        {"commensurability_classes", std::move(classes)},
                        {"verified", true}};
}

void fbc_report(const fbc::IrttSpec& spec, const ReportOptions& opt, AnalysisReport& r) {
  const auto v = fbc::classify_fbc(spec);
  r.verdict = io::to_json(v);
  if (!opt.witness) return;
  require_certificate(fbc::verify_verdict(spec, v), "free-by-cyclic verdict");
  json supports = json::object();
  for (const auto& c : spec.nielsen_cycles) supports[c.id] = fbc::supports(spec, c.id);
  json internal = json::object();
  for (const auto& s : spec.strata) {
    if (s.kind != fbc::StratumKind::Linear) continue;
    const auto ir = fbc::is_internal(spec, s.edges.front());
    json path = json::array();
    for (const auto& l : ir.path) path.push_back(io::to_json(l));
    internal[s.edges.front()] = json{{"internal", ir.internal},
                                     {"target_vertex", ir.target_vertex},
                                     {"target_cycle", ir.target_cycle},
                                     {"path", std::move(path)}};
  }
  r.certificates = json{{"supports", std::move(supports)},
                        {"internal", std::move(internal)},
                        {"verified", true}};
}

void rbf_report(const rbf::RbfSpec& spec, const ReportOptions& opt, AnalysisReport& r) {
  const auto v = rbf::validate_rbf_spec(spec);
  r.verdict = json{{"valid", v.ok}, {"problems", v.problems}, {"spec", io::to_json(spec)}};
  if (opt.rbf_model) {
    const auto model =
        rbf::build_discrete_rbf(spec, opt.rbf_model->first, opt.rbf_model->second, opt.model_limits);
    r.verdict["model"] = io::to_json(model);
    if (opt.witness) {
      const auto check = rbf::check_discrete_rbf(model, spec);
      require_certificate(check.ok, check.ok ? "" : check.problems.front());
      r.certificates = json{{"verified", true}};
    }
  } else if (opt.witness) {
    require_certificate(v.ok, v.ok ? "" : v.problems.front());
    r.certificates = json{{"verified", true}};
  }
}

}  // namespace

AnalysisReport run_report(const ParsedInput& input, const ReportOptions& options) {
  AnalysisReport r;
  r.input_digest = input.input_digest;
  r.kind = to_string(input.kind);
  r.version = version();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, tubular::TubularGroupSpec>) {
          tubular_report(s, options, r);
        } else if constexpr (std::is_same_v<T, fbc::IrttSpec>) {
          fbc_report(s, options, r);
        } else if constexpr (std::is_same_v<T, median::FiniteMedianAlgebra>) {
          median_report(s, options, r);
        } else {
          rbf_report(s, options, r);
        }
      },
      input.spec);
  return r;
}

json to_json(const AnalysisReport& report) {
  return json{{"input_digest", report.input_digest},
              {"kind", report.kind},
              {"verdict", report.verdict},
              {"certificates", report.certificates},
              {"version", report.version}};
}

AnalysisReport report_from_json(const json& j) {
  if (!j.is_object()) throw InputError("schema violation at <root>: expected an object");
  auto field = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("schema violation at ") + key + ": missing");
    return *it;
  };
  AnalysisReport r;
  r.input_digest = field("input_digest").get<std::string>();
  r.kind = field("kind").get<std::string>();
  r.verdict = field("verdict");
  r.certificates = field("certificates");
  r.version = field("version").get<std::string>();
  if (r.kind == "tubular") {
    r.verdict = io::to_json(io::tubular_verdict_from_json(r.verdict));
  } else if (r.kind == "fbc") {
    r.verdict = io::to_json(io::fbc_verdict_from_json(r.verdict));
  }
  return r;
}

namespace {

std::string compact(const json& j) { return j.dump(); }

void reasons_block(std::ostringstream& out, const json& reasons) {
  out << "reasoning:\n";
  for (std::size_t i = 0; i < reasons.size(); ++i) {
    out << (i == 0 ? "    " : "  => ") << reasons[i].get<std::string>() << "\n";
  }
}

}  // namespace

std::string render_text(const AnalysisReport& report) {
  std::ostringstream out;
  const json& v = report.verdict;
  if (report.kind == "tubular") {
    out << "tubular group: " << v["status"].get<std::string>() << "\n";
    out << "dehn function: " << v["dehn"].get<std::string>() << "\n";
    out << "max commensurability classes at a vertex: " << v["max_classes"] << "\n";
    if (!v["bs"].is_null()) {
      out << "BS(" << v["bs"]["m"] << "," << v["bs"]["n"] << ") subgroup, cycle product "
          << compact(v["unbalanced_cycle"]["product"]) << "\n";
    }
    if (!v["rbf"].is_null()) {
      out << "RBF at vertex " << v["rbf_vertex"].get<std::string>() << ", directions "
          << compact(v["rbf"]["directions"]) << "\n";
    }
    if (!v["potentials"].is_null()) out << "potentials: " << compact(v["potentials"]) << "\n";
    reasons_block(out, v["reasons"]);
  } else if (report.kind == "fbc") {
    out << "free-by-cyclic: " << v["branch"].get<std::string>() << "\n";
    if (!v["witness"].is_null()) {
      const json& w = v["witness"];
      out << "witness cycle " << w["cycle"].get<std::string>() << ", internal strata "
          << compact(w["internal_strata"]);
      if (!w["source"].is_null()) out << ", nearby source " << w["source"]["source"].get<std::string>();
      out << "\n";
    }
    if (!v["rbf"].is_null()) out << "RBF directions " << compact(v["rbf"]["directions"]) << "\n";
    reasons_block(out, v["reasons"]);
  } else if (report.kind == "median") {
    const std::string q = v["query"].get<std::string>();
    out << "median algebra with " << v["size"] << " elements\n";
    if (q == "verify") {
      if (v["ok"].get<bool>()) {
        out << "axioms: ok\n";
      } else {
        out << "axioms: FAILED (" << v["violated"].get<std::string>() << ") " << compact(v["tuple"])
            << "\n  " << v["message"].get<std::string>() << "\n";
      }
    } else if (q == "rank") {
      out << "rank (crossing walls): " << v["rank_walls"] << "\n";
      out << "rank (cube embedding): " << v["rank_cube"] << "\n";
    } else {
      out << "hull of " << compact(v["set"]) << ": " << compact(v["hull"]) << " after "
          << v["iterations"] << " J-steps\n";
    }
  } else {
    out << "RBF spec: " << (v["valid"].get<bool>() ? "valid" : "invalid") << "\n";
    for (const auto& p : v["problems"]) out << "  " << p.get<std::string>() << "\n";
    out << "directions: " << compact(v["spec"]["directions"]) << "\n";
    if (v.contains("model")) {
      out << "discrete model: " << v["model"]["vertex_count"] << " vertices, "
          << v["model"]["edge_count"] << " edges, " << v["model"]["strips"].size()
          << " half-strips\n";
    }
  }
  if (!report.certificates.is_null()) {
    out << "certificates: re-verified\n";
    if (report.kind == "median" && report.certificates.contains("walls")) {
      for (const auto& w : report.certificates["walls"]) {
        out << "  wall " << compact(w["side_a"]) << " | " << compact(w["side_b"]) << "\n";
      }
      out << "  cube " << compact(report.certificates["cube"]) << "\n";
    }
  }
  out << "input digest: " << report.input_digest << "\n";
  return out.str();
}

}  // namespace coarsemed::report
