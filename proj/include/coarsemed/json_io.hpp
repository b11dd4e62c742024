#pragma once

#include <string>

#include "json.hpp"

#include "coarsemed/fbc.hpp"
#include "coarsemed/median.hpp"
#include "coarsemed/rbf.hpp"
#include "coarsemed/tubular.hpp"

namespace coarsemed::io {

using json = nlohmann::json;

/// Parses JSON text. Syntax errors become InputError with line and column.
json parse_json_text(const std::string& text);

// Rationals are written as integers when integral and small, otherwise as
// "p/q" strings. Both forms are accepted on input.
json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j, const std::string& path);
json bigint_to_json(const BigInt& z);
BigInt bigint_from_json(const json& j, const std::string& path);

// Every *_from_json throws InputError naming the offending field path, e.g.
// "edges[0].w_from". Unknown keys are rejected.

json to_json(const median::FiniteMedianAlgebra& m);
/// Structural parse only; the median axioms are not checked here. Throws
/// LimitError when the element count exceeds limits.max_table_elements.
median::FiniteMedianAlgebra median_from_json(const json& j, const median::Limits& limits = {});

json to_json(const rbf::RbfSpec& spec);
rbf::RbfSpec rbf_from_json(const json& j);

json to_json(const tubular::TubularGroupSpec& spec);
tubular::TubularGroupSpec tubular_from_json(const json& j);

json to_json(const fbc::IrttSpec& spec);
fbc::IrttSpec fbc_from_json(const json& j);

std::string path_to_string(const fbc::EdgePath& path);

json to_json(const tubular::TransportGraph& tg);
json to_json(const tubular::UnbalancedCycle& c);
tubular::UnbalancedCycle unbalanced_cycle_from_json(const json& j, const std::string& path);
json to_json(const tubular::TubularVerdict& v);
tubular::TubularVerdict tubular_verdict_from_json(const json& j);

json to_json(const fbc::Link& link);
json to_json(const fbc::RichLinearityWitness& w);
json to_json(const fbc::FbcVerdict& v);
fbc::FbcVerdict fbc_verdict_from_json(const json& j);

json to_json(const median::FiniteMedianAlgebra& m, const median::Wall& wall);
json to_json(const rbf::DiscreteRbfModel& model);

}  // namespace coarsemed::io
