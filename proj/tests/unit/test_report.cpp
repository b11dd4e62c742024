#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "support.hpp"

#include "coarsemed/errors.hpp"
#include "coarsemed/json_io.hpp"
#include "coarsemed/report.hpp"

using namespace coarsemed;
using namespace coarsemed::report;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& text) {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("coarsemed_unit_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
    std::ofstream(path) << text;
  }
  ~TempFile() { fs::remove(path); }
};

std::string error_of(const std::string& text, InputKind kind) {
  TempFile f(text);
  try {
    parse_input(f.path.string(), kind);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

ReportOptions witness_on() {
  ReportOptions o;
  o.json = true;
  o.witness = true;
  return o;
}

}  // namespace

TEST_CASE("kinds") {
  CHECK(parse_kind("tubular") == InputKind::Tubular);
  CHECK(parse_kind("rbf") == InputKind::Rbf);
  CHECK(to_string(InputKind::Median) == "median");
  CHECK_THROWS_AS(parse_kind("graph"), InputError);
}

TEST_CASE("parsing the c6 fixture") {
  const auto p = parse_input(support::fixture("tubular", "c6_tetrahedron"), InputKind::Tubular);
  const auto& s = std::get<tubular::TubularGroupSpec>(p.spec);
  CHECK(s.vertices.size() == 4);
  CHECK(s.edges.size() == 6);
  CHECK(p.input_digest.size() == 64);
}

TEST_CASE("schema errors name the field") {
  const auto msg = error_of(
      R"({"vertices": ["v"], "edges": [{"id": "t", "from": "v", "to": "v", "w_from": [1], "w_to": [2, 0]}]})",
      InputKind::Tubular);
  CHECK(msg.find("edges[0].w_from") != std::string::npos);
  const auto extra = error_of(R"({"vertices": ["v"], "edges": [], "colour": 1})", InputKind::Tubular);
  CHECK(extra.find("colour") != std::string::npos);
  const auto missing = error_of(R"({"vertices": ["v"]})", InputKind::Tubular);
  CHECK(missing.find("edges") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  const auto msg = error_of("{\n  \"vertices\": [\"v\",]\n}", InputKind::Tubular);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK_THROWS_AS(parse_input("/nonexistent/spec.json", InputKind::Tubular), InputError);
}

TEST_CASE("rationals") {
  CHECK(io::rational_from_json(io::json(3), "x") == 3);
  CHECK(io::rational_from_json(io::json("-3/6"), "x") == make_rational(-1, 2));
  CHECK(io::rational_to_json(make_rational(4, 2)) == io::json(2));
  CHECK(io::rational_to_json(make_rational(1, 3)) == io::json("1/3"));
  CHECK_THROWS_AS(io::rational_from_json(io::json("1/0"), "x"), InputError);
  CHECK_THROWS_AS(io::rational_from_json(io::json(0.5), "x"), InputError);
  CHECK(parse_rational("7") == 7);
  CHECK(to_string(make_rational(6, -4)) == "-3/2");
}

TEST_CASE("digests are canonical") {
  const auto a = parse_input(support::fixture("fbc", "more_than_gersten"), InputKind::Fbc);
  const auto b = parse_input(support::fixture("fbc", "more_than_gersten"), InputKind::Fbc);
  CHECK(a.input_digest == b.input_digest);
  std::ifstream in(support::fixture("fbc", "more_than_gersten"));
  const auto j = io::json::parse(in);
  TempFile compact(j.dump());
  CHECK(parse_input(compact.path.string(), InputKind::Fbc).input_digest == a.input_digest);
  CHECK(from_spec(a.spec).input_digest == a.input_digest);
  const auto other = parse_input(support::fixture("fbc", "non_internal"), InputKind::Fbc);
  CHECK(other.input_digest != a.input_digest);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("spec codecs round trip") {
  for (const char* name : {"c6_tetrahedron", "croke_kleiner", "bs12_loop", "double_loop"}) {
    const auto s = support::load<tubular::TubularGroupSpec>("tubular", name);
    CHECK(io::tubular_from_json(io::to_json(s)) == s);
  }
  for (const char* name : {"hyp_rel_gersten", "more_than_gersten", "non_internal"}) {
    const auto s = support::load<fbc::IrttSpec>("fbc", name);
    CHECK(io::fbc_from_json(io::to_json(s)) == s);
  }
  for (const char* name : {"c6_vertex", "windowed"}) {
    const auto s = support::load<rbf::RbfSpec>("rbf", name);
    CHECK(io::rbf_from_json(io::to_json(s)) == s);
  }
  const auto m = support::load<median::FiniteMedianAlgebra>("median", "tripod");
  CHECK(io::median_from_json(io::to_json(m)) == m);
}

TEST_CASE("verdict codecs round trip") {
  for (const char* name : {"c6_tetrahedron", "croke_kleiner", "bs12_loop", "double_loop"}) {
    const auto v = tubular::classify_tubular(support::load<tubular::TubularGroupSpec>("tubular", name));
    CHECK(io::tubular_verdict_from_json(io::to_json(v)) == v);
  }
  for (const char* name : {"hyp_rel_gersten", "more_than_gersten", "non_internal"}) {
    const auto v = fbc::classify_fbc(support::load<fbc::IrttSpec>("fbc", name));
    CHECK(io::fbc_verdict_from_json(io::to_json(v)) == v);
  }
}

TEST_CASE("reports round trip through json") {
  const std::vector<std::pair<const char*, const char*>> inputs{
      {"tubular", "c6_tetrahedron"}, {"tubular", "bs12_loop"}, {"fbc", "more_than_gersten"},
      {"median", "tripod"},          {"rbf", "c6_vertex"}};
  for (const auto& [kind, name] : inputs) {
    const auto parsed = parse_input(support::fixture(kind, name), parse_kind(kind));
    const auto r = run_report(parsed, witness_on());
    CHECK(r.kind == kind);
    CHECK(r.input_digest == parsed.input_digest);
    CHECK(r.version == version());
    CHECK_FALSE(r.certificates.is_null());
    CHECK(report_from_json(to_json(r)) == r);
    CHECK_FALSE(render_text(r).empty());
    CHECK(run_report(parsed, witness_on()) == r);
  }
}

TEST_CASE("report contents") {
  const auto c6 = run_report(parse_input(support::fixture("tubular", "c6_tetrahedron"), InputKind::Tubular),
                             witness_on());
  CHECK(c6.verdict["status"] == "NoCoarseMedian_via_RBF");
  CHECK(c6.verdict["rbf"]["directions"] == io::json::parse("[[1,0],[0,1],[1,-1]]"));

  const auto bs = run_report(parse_input(support::fixture("tubular", "bs12_loop"), InputKind::Tubular),
                             witness_on());
  CHECK(bs.verdict["status"] == "NoCoarseMedian_via_Distortion");
  CHECK(bs.verdict["bs"]["m"] == 1);
  CHECK(bs.verdict["bs"]["n"] == 2);
  CHECK(bs.verdict["dehn"] == "exponential");

  ReportOptions rank = witness_on();
  rank.median_query = MedianQuery::Rank;
  const auto q3 = run_report(from_spec(median::hypercube(3)), rank);
  CHECK(q3.verdict["rank_walls"] == 3);
  CHECK(q3.verdict["rank_cube"] == 3);
  CHECK(q3.certificates["walls"].size() == 3);
  CHECK(q3.certificates["cube"].size() == 8);

  ReportOptions plain;
  const auto quiet = run_report(from_spec(median::hypercube(2)), plain);
  CHECK(quiet.certificates.is_null());
}

TEST_CASE("limits surface as LimitError") {
  std::vector<std::size_t> dims{6, 6};
  ReportOptions o;
  o.median_query = MedianQuery::Rank;
  CHECK_THROWS_AS(run_report(from_spec(median::lattice_box(dims)), o), LimitError);
  ParseOptions tight;
  tight.limits.max_table_elements = 3;
  CHECK_THROWS_AS(parse_input(support::fixture("median", "tripod"), InputKind::Median, tight),
                  LimitError);
}

TEST_CASE("broken median tables are rejected at parse time") {
  CHECK_THROWS_AS(parse_input(support::fixture("median", "square_broken"), InputKind::Median),
                  InputError);
  ParseOptions loose;
  loose.check_median_axioms = false;
  const auto p = parse_input(support::fixture("median", "square_broken"), InputKind::Median, loose);
  ReportOptions verify;
  verify.median_query = MedianQuery::Verify;
  const auto r = run_report(p, verify);
  CHECK(r.verdict["ok"] == false);
}
