// coarsemed: command-line front end for the median, tubular, free-by-cyclic
// and RBF analyses.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coarsemed/errors.hpp"
#include "coarsemed/report.hpp"

#ifndef COARSEMED_FIXTURE_DIR
#define COARSEMED_FIXTURE_DIR "fixtures"
#endif

namespace fs = std::filesystem;
using namespace coarsemed;
using report::InputKind;

namespace {

struct Globals {
  bool json = false;
  bool witness = false;
  std::optional<std::size_t> limit;
};

const char* kKinds[] = {"tubular", "fbc", "median", "rbf"};

std::vector<std::pair<std::string, std::string>> list_fixtures() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const char* kind : kKinds) {
    const fs::path dir = fs::path(COARSEMED_FIXTURE_DIR) / kind;
    if (!fs::is_directory(dir)) continue;
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
    }
    std::sort(names.begin(), names.end());
    for (auto& n : names) out.emplace_back(kind, std::move(n));
  }
  return out;
}

// A path that does not exist is looked up among the bundled fixtures of the
// requested kind, with or without the .json extension.
std::string resolve(const std::string& path, InputKind kind) {
  if (fs::exists(path)) return path;
  fs::path candidate = fs::path(COARSEMED_FIXTURE_DIR) / report::to_string(kind) / path;
  if (candidate.extension() != ".json") candidate += ".json";
  if (fs::exists(candidate)) return candidate.string();
  return path;
}

median::Limits median_limits(const Globals& g) {
  median::Limits l;
  if (g.limit) {
    l.max_elements = *g.limit;
    l.max_table_elements = std::max(l.max_table_elements, *g.limit);
  }
  return l;
}

report::ReportOptions report_options(const Globals& g) {
  report::ReportOptions o;
  o.json = g.json;
  o.witness = g.witness;
  o.limits = median_limits(g);
  if (g.limit) o.model_limits.max_vertices = std::max(o.model_limits.max_vertices, *g.limit);
  return o;
}

void emit(const report::AnalysisReport& r, const Globals& g) {
  if (g.json) {
    std::cout << report::to_json(r).dump(2) << "\n";
  } else {
    std::cout << report::render_text(r);
  }
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty() || v == 0) {
      throw InputError("--box expects positive integers separated by commas, got '" + text + "'");
    }
    dims.push_back(v);
  }
  if (dims.empty()) throw InputError("--box needs at least one dimension");
  return dims;
}

// Splits on commas outside parentheses, so tuple names like "(0,1)" survive.
std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::string part;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      if (!part.empty()) out.push_back(part);
      part.clear();
    } else {
      part += c;
    }
  }
  if (!part.empty()) out.push_back(part);
  return out;
}

struct MedianSource {
  std::string file;
  std::optional<std::size_t> hypercube;
  std::string box;
};

report::ParsedInput load_median(const MedianSource& src, const Globals& g, bool check_axioms) {
  const int given = !src.file.empty() + src.hypercube.has_value() + !src.box.empty();
  if (given != 1) throw InputError("give exactly one of FILE, --hypercube or --box");
  const median::Limits limits = median_limits(g);
  if (src.hypercube) return report::from_spec(median::hypercube(*src.hypercube, limits));
  if (!src.box.empty()) {
    const auto dims = parse_dims(src.box);
    return report::from_spec(median::lattice_box(dims, limits));
  }
  report::ParseOptions po;
  po.limits = limits;
  po.check_median_axioms = check_axioms;
  return report::parse_input(resolve(src.file, InputKind::Median), InputKind::Median, po);
}

void print_rbf(const rbf::RbfSpec& spec, const Globals& g) {
  if (g.json) {
    std::cout << io::to_json(spec).dump(2) << "\n";
    return;
  }
  std::cout << "RBF in dimension " << spec.n << "\n";
  std::cout << "directions: " << io::json(spec.directions).dump() << "\n";
  std::cout << "positions: " << (spec.positions ? "explicit" : "lattice") << "\n";
  std::cout << "provenance: " << spec.provenance << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"coarse median obstructions for tubular and free-by-cyclic groups"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  Globals g;
  bool show_fixtures = false;
  app.add_flag("--json", g.json, "machine-readable JSON output");
  app.add_flag("--witness", g.witness, "embed and re-verify certificates");
  app.add_option("--limit", g.limit, "size cap for the exponential searches");
  app.add_flag("--fixtures", show_fixtures, "list the bundled example inputs");
  app.set_version_flag("--version", report::version());

  std::string file;
  auto add_file = [&](CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("file", file, "input JSON file or bundled fixture name");
    if (required) opt->required();
  };

  int exit_code = report::kExitOk;

  auto* tubular_cmd = app.add_subcommand("tubular", "tubular groups")->require_subcommand(1);
  auto* tubular_analyze = tubular_cmd->add_subcommand("analyze", "classify a tubular group");
  add_file(tubular_analyze);
  tubular_analyze->callback([&] {
    emit(report::run_report(report::parse_input(resolve(file, InputKind::Tubular),
                                                InputKind::Tubular),
                            report_options(g)),
         g);
  });

  auto* fbc_cmd = app.add_subcommand("fbc", "free-by-cyclic groups")->require_subcommand(1);
  auto* fbc_analyze = fbc_cmd->add_subcommand("analyze", "classify from declared IRTT data");
  add_file(fbc_analyze);
  fbc_analyze->callback([&] {
    emit(report::run_report(report::parse_input(resolve(file, InputKind::Fbc), InputKind::Fbc),
                            report_options(g)),
         g);
  });

  auto* median_cmd = app.add_subcommand("median", "finite median algebras")->require_subcommand(1);
  MedianSource msrc;
  std::string hull_set;
  auto add_median_source = [&](CLI::App* cmd) {
    cmd->add_option("file", msrc.file, "median algebra JSON file or fixture name");
    cmd->add_option("--hypercube", msrc.hypercube, "use {0,1}^n");
    cmd->add_option("--box", msrc.box, "use a lattice box, e.g. 3,2");
  };
  auto* median_verify = median_cmd->add_subcommand("verify", "check the median axioms");
  add_median_source(median_verify);
  median_verify->callback([&] {
    auto opts = report_options(g);
    opts.median_query = report::MedianQuery::Verify;
    const auto r = report::run_report(load_median(msrc, g, false), opts);
    emit(r, g);
    if (!r.verdict["ok"].get<bool>()) exit_code = report::kExitInvalidInput;
  });
  auto* median_rank = median_cmd->add_subcommand("rank", "rank by walls and by cube embedding");
  add_median_source(median_rank);
  median_rank->callback([&] {
    auto opts = report_options(g);
    opts.median_query = report::MedianQuery::Rank;
    emit(report::run_report(load_median(msrc, g, true), opts), g);
  });
  auto* median_hull = median_cmd->add_subcommand("hull", "convex hull of a subset");
  add_median_source(median_hull);
  median_hull->add_option("--set", hull_set, "comma-separated element names; commas inside parentheses belong to the name")->required();
  median_hull->callback([&] {
    auto opts = report_options(g);
    opts.median_query = report::MedianQuery::Hull;
    opts.hull_set = split_names(hull_set);
    emit(report::run_report(load_median(msrc, g, true), opts), g);
  });

  auto* rbf_cmd = app.add_subcommand("rbf", "richly branching flats")->require_subcommand(1);
  std::string vertex;
  auto* rbf_tubular = rbf_cmd->add_subcommand("from-tubular", "RBF directions at a vertex");
  add_file(rbf_tubular);
  rbf_tubular->add_option("--vertex", vertex, "vertex; default is the first with 3 classes");
  rbf_tubular->callback([&] {
    const auto parsed =
        report::parse_input(resolve(file, InputKind::Tubular), InputKind::Tubular);
    const auto& spec = std::get<tubular::TubularGroupSpec>(parsed.spec);
    std::optional<rbf::RbfSpec> out;
    if (!vertex.empty()) {
      out = rbf::tubular_rbf_directions(spec, vertex);
    } else {
      for (const auto& v : spec.vertices) {
        if ((out = rbf::tubular_rbf_directions(spec, v))) break;
      }
    }
    if (!out) {
      throw PreconditionError("no vertex with three commensurability classes of incident edges");
    }
    print_rbf(*out, g);
  });
  auto* rbf_fbc = rbf_cmd->add_subcommand("from-fbc", "RBF directions from rich linearity");
  add_file(rbf_fbc);
  rbf_fbc->callback([&] {
    const auto parsed = report::parse_input(resolve(file, InputKind::Fbc), InputKind::Fbc);
    const auto& spec = std::get<fbc::IrttSpec>(parsed.spec);
    const auto w = fbc::rich_linearity(spec);
    if (!w) throw PreconditionError("no Nielsen cycle exhibits rich linearity");
    print_rbf(rbf::fbc_rbf_directions(fbc::branching_data(spec, *w)), g);
  });
  std::int64_t radius = 0;
  std::int64_t depth = 0;
  auto* rbf_build = rbf_cmd->add_subcommand("build", "build and check a discrete RBF model");
  add_file(rbf_build);
  rbf_build->add_option("--radius", radius, "half-width R of the base box")->required();
  rbf_build->add_option("--depth", depth, "depth L of each half-strip")->required();
  rbf_build->callback([&] {
    auto opts = report_options(g);
    opts.rbf_model = std::make_pair(radius, depth);
    emit(report::run_report(report::parse_input(resolve(file, InputKind::Rbf), InputKind::Rbf),
                            opts),
         g);
  });

  std::string kind_text;
  auto* parse_cmd = app.add_subcommand("parse", "parse and validate an input file");
  parse_cmd->add_option("--kind", kind_text, "tubular, fbc, median or rbf")->required();
  add_file(parse_cmd);
  parse_cmd->callback([&] {
    const InputKind kind = report::parse_kind(kind_text);
    const auto parsed = report::parse_input(resolve(file, kind), kind);
    if (g.json) {
      std::cout << io::json{{"kind", report::to_string(kind)},
                            {"input_digest", parsed.input_digest}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << report::to_string(kind) << " input ok, digest " << parsed.input_digest << "\n";
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report::kExitInvalidInput;
  }
  if (show_fixtures) {
    for (const auto& [kind, name] : list_fixtures()) std::cout << kind << "\t" << name << "\n";
    return report::kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return report::kExitInvalidInput;
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const LimitError& e) {
    std::cerr << "limit exceeded: " << e.what() << "\n";
    return report::kExitLimit;
  } catch (const report::CertificateError& e) {
    std::cerr << e.what() << "\n";
    return report::kExitCertificate;
  } catch (const InputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return report::kExitInvalidInput;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition not met: " << e.what() << "\n";
    return report::kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return report::kExitInvalidInput;
  }
}
