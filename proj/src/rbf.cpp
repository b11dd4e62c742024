#include "coarsemed/rbf.hpp"

#include <algorithm>
#include <numeric>

#include "coarsemed/errors.hpp"

namespace coarsemed::rbf {

namespace {

bool independent(const IntVector& u, const IntVector& v) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      if (static_cast<__int128>(u[i]) * v[j] != static_cast<__int128>(u[j]) * v[i]) return true;
    }
  }
  return false;
}

std::string vec_text(const IntVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

}  // namespace

IntVector primitive(const IntVector& v) {
  std::int64_t g = 0;
  for (std::int64_t c : v) g = std::gcd(g, c);
  if (g == 0) throw InputError("cannot normalise the zero vector");
  for (std::int64_t c : v) {
    if (c != 0) {
      if (c < 0) g = -g;
      break;
    }
  }
  IntVector out;
  for (std::int64_t c : v) out.push_back(c / g);
  return out;
}

RbfValidation validate_rbf_spec(const RbfSpec& spec) {
  RbfValidation r;
  auto problem = [&](std::string msg) {
    r.ok = false;
    r.problems.push_back(std::move(msg));
  };
  if (spec.n < 2) problem("dimension must be at least 2");
  if (spec.directions.size() != spec.n + 1) {
    problem("expected " + std::to_string(spec.n + 1) + " directions, got " +
            std::to_string(spec.directions.size()));
  }
  bool shapes_ok = true;
  for (std::size_t i = 0; i < spec.directions.size(); ++i) {
    const auto& v = spec.directions[i];
    if (v.size() != spec.n) {
      problem("direction " + std::to_string(i) + " has length " + std::to_string(v.size()));
      shapes_ok = false;
    } else if (std::all_of(v.begin(), v.end(), [](std::int64_t c) { return c == 0; })) {
      problem("direction " + std::to_string(i) + " is zero");
      shapes_ok = false;
    }
  }
  if (shapes_ok) {
    for (std::size_t i = 0; i < spec.directions.size(); ++i) {
      for (std::size_t j = i + 1; j < spec.directions.size(); ++j) {
        if (!independent(spec.directions[i], spec.directions[j])) {
          problem("directions " + std::to_string(i) + " " + vec_text(spec.directions[i]) +
                  " and " + std::to_string(j) + " " + vec_text(spec.directions[j]) +
                  " are parallel");
          if (!r.parallel_pair) r.parallel_pair = {i, j};
        }
      }
    }
  }
  if (spec.density <= 0) problem("density constant must be positive");
  if (spec.positions) {
    const auto& sets = *spec.positions;
    if (sets.size() != spec.directions.size()) {
      problem("expected one position set per direction");
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      std::vector<Rational> sorted = sets[i];
      if (sorted.empty()) {
        problem("position set " + std::to_string(i) + " is empty");
        continue;
      }
      std::sort(sorted.begin(), sorted.end());
      // Explicit sets are finite windows: every point of [min, max] must lie
      // within D of a position.
      for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k] - sorted[k - 1] > 2 * spec.density) {
          problem("position set " + std::to_string(i) + " has a gap from " +
                  to_string(sorted[k - 1]) + " to " + to_string(sorted[k]) +
                  " wider than twice the density constant");
        }
      }
    }
  }
  return r;
}

std::optional<RbfSpec> tubular_rbf_directions(const tubular::TubularGroupSpec& spec,
                                              const std::string& vertex) {
  const auto classes = tubular::commensurability_classes(spec, vertex);
  if (classes.size() < 3) return std::nullopt;
  RbfSpec out;
  out.n = 2;
  for (std::size_t i = 0; i < 3; ++i) {
    out.directions.push_back({classes[i].direction[0], classes[i].direction[1]});
  }
  out.provenance = "tubular vertex " + vertex + ": three non-commensurable incident edge groups";
  return out;
}

RbfSpec fbc_rbf_directions(const LinearBranching& branching) {
  if (branching.strata.size() != branching.exponents.size()) {
    throw PreconditionError("each stratum needs exactly one suffix exponent");
  }
  RbfSpec out;
  out.n = 2;
  std::vector<std::size_t> used;
  if (branching.exponents.size() >= 3) {
    used = {0, 1, 2};
  } else if (branching.exponents.size() == 2 && branching.nearby_source) {
    used = {0, 1};
  } else {
    throw PreconditionError("need three internal linear strata, or two and a nearby source");
  }
  for (std::size_t i : used) {
    if (branching.exponents[i] == 0) throw PreconditionError("suffix exponent must be nonzero");
    for (std::size_t j : used) {
      if (j < i && branching.exponents[j] == branching.exponents[i]) {
        throw PreconditionError("strata " + branching.strata[j] + " and " + branching.strata[i] +
                                " share suffix exponent " +
                                std::to_string(branching.exponents[i]) +
                                ": their branching lines would be parallel");
      }
    }
    out.directions.push_back({branching.exponents[i], 1});
  }
  std::string provenance = "Nielsen cycle " + branching.cycle + ": internal strata";
  for (std::size_t i : used) provenance += " " + branching.strata[i];
  if (used.size() == 2) {
    out.directions.push_back({0, 1});
    provenance += " and a nearby source";
  }
  out.provenance = provenance;
  return out;
}

DiscreteRbfModel build_discrete_rbf(const RbfSpec& spec, std::int64_t radius, std::int64_t depth,
                                    const ModelLimits& limits) {
  if (spec.n != 2) throw InputError("only 2-dimensional models can be built");
  const RbfValidation valid = validate_rbf_spec(spec);
  if (!valid.ok) throw InputError("invalid RBF spec: " + valid.problems.front());
  if (radius < 1 || depth < 1) throw InputError("radius and depth must be positive");
  if (radius > 100'000 || depth > 100'000) throw LimitError("radius or depth too large");

  const std::int64_t side = 2 * radius + 1;
  const auto base_count = static_cast<std::size_t>(side * side);
  if (base_count > limits.max_vertices) throw LimitError("base box exceeds the vertex cap");

  DiscreteRbfModel model;
  model.radius = radius;
  model.depth = depth;
  model.base_count = base_count;
  auto base_index = [&](std::int64_t x, std::int64_t y) {
    return static_cast<std::size_t>((x + radius) * side + (y + radius));
  };
  for (std::int64_t x = -radius; x <= radius; ++x) {
    for (std::int64_t y = -radius; y <= radius; ++y) model.vertices.push_back({std::nullopt, x, y});
  }
  for (std::int64_t x = -radius; x <= radius; ++x) {
    for (std::int64_t y = -radius; y <= radius; ++y) {
      if (x < radius) model.adjacency.emplace_back(base_index(x, y), base_index(x + 1, y));
      if (y < radius) model.adjacency.emplace_back(base_index(x, y), base_index(x, y + 1));
    }
  }

  for (std::size_t i = 0; i < spec.directions.size(); ++i) {
    const std::int64_t v0 = spec.directions[i][0], v1 = spec.directions[i][1];
    const std::int64_t reach = radius * (std::llabs(v0) + std::llabs(v1));
    std::vector<std::int64_t> levels;
    if (!spec.positions) {
      for (std::int64_t k = -reach; k <= reach; ++k) levels.push_back(k);
    } else {
      // Only integral levels meet lattice points.
      for (const Rational& p : (*spec.positions)[i]) {
        if (denominator(p) == 1 && abs(p) <= reach) {
          levels.push_back(static_cast<std::int64_t>(numerator(p)));
        }
      }
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    }
    for (std::int64_t level : levels) {
      Strip strip;
      strip.direction = i;
      strip.position = level;
      for (std::int64_t x = -radius; x <= radius; ++x) {
        if (v1 == 0) {
          if (v0 * x != level) continue;
          for (std::int64_t y = -radius; y <= radius; ++y) strip.attachment.push_back({x, y});
        } else {
          const std::int64_t rest = level - v0 * x;
          if (rest % v1 != 0) continue;
          const std::int64_t y = rest / v1;
          if (y >= -radius && y <= radius) strip.attachment.push_back({x, y});
        }
      }
      if (strip.attachment.empty()) continue;
      std::sort(strip.attachment.begin(), strip.attachment.end(),
                [&](const Point2& p, const Point2& q) {
                  return -v1 * p.x + v0 * p.y < -v1 * q.x + v0 * q.y;
                });
      const std::size_t len = strip.attachment.size();
      if (model.vertices.size() + len * static_cast<std::size_t>(depth) > limits.max_vertices) {
        throw LimitError("discrete RBF model exceeds the vertex cap");
      }
      const std::size_t strip_id = model.strips.size();
      for (const Point2& p : strip.attachment) strip.vertices.push_back(base_index(p.x, p.y));
      const std::size_t first = model.vertices.size();
      auto id = [&](std::size_t s, std::int64_t t) {
        return first + s * static_cast<std::size_t>(depth) + static_cast<std::size_t>(t - 1);
      };
      for (std::size_t s = 0; s < len; ++s) {
        for (std::int64_t t = 1; t <= depth; ++t) {
          model.vertices.push_back({strip_id, static_cast<std::int64_t>(s), t});
          strip.vertices.push_back(id(s, t));
        }
      }
      for (std::size_t s = 0; s < len; ++s) {
        model.adjacency.emplace_back(strip.vertices[s], id(s, 1));
        for (std::int64_t t = 1; t <= depth; ++t) {
          if (t < depth) model.adjacency.emplace_back(id(s, t), id(s, t + 1));
          if (s + 1 < len) model.adjacency.emplace_back(id(s, t), id(s + 1, t));
        }
      }
      model.strips.push_back(std::move(strip));
    }
  }
  return model;
}

RbfValidation check_discrete_rbf(const DiscreteRbfModel& model, const RbfSpec& spec) {
  RbfValidation r;
  auto problem = [&](std::string msg) {
    r.ok = false;
    r.problems.push_back(std::move(msg));
  };
  const std::int64_t radius = model.radius;
  const std::int64_t side = 2 * radius + 1;
  if (model.base_count != static_cast<std::size_t>(side * side) ||
      model.vertices.size() < model.base_count) {
    problem("base box has the wrong size");
    return r;
  }
  for (std::size_t v = 0; v < model.base_count; ++v) {
    if (model.vertices[v].strip) problem("base vertex " + std::to_string(v) + " tagged as strip");
  }
  std::vector<std::optional<std::size_t>> owner(model.vertices.size());
  for (std::size_t s = 0; s < model.strips.size(); ++s) {
    const Strip& strip = model.strips[s];
    if (strip.direction >= spec.directions.size()) {
      problem("strip " + std::to_string(s) + " has no direction");
      continue;
    }
    const auto& v = spec.directions[strip.direction];
    if (strip.attachment.empty()) problem("strip " + std::to_string(s) + " is not attached");
    for (std::size_t k = 0; k < strip.attachment.size(); ++k) {
      const Point2& p = strip.attachment[k];
      if (std::llabs(p.x) > radius || std::llabs(p.y) > radius) {
        problem("strip " + std::to_string(s) + " attaches outside the base");
      }
      if (p.x * v[0] + p.y * v[1] != strip.position) {
        problem("strip " + std::to_string(s) + " attachment point off its level");
      }
      if (k > 0) {
        const std::int64_t dx = p.x - strip.attachment[k - 1].x;
        const std::int64_t dy = p.y - strip.attachment[k - 1].y;
        if ((dx == 0 && dy == 0) || dx * v[0] + dy * v[1] != 0) {
          problem("strip " + std::to_string(s) + " attachment line not along v-perp");
        }
      }
    }
    for (std::size_t id : strip.vertices) {
      if (id >= model.vertices.size()) {
        problem("strip " + std::to_string(s) + " references a missing vertex");
        continue;
      }
      if (id < model.base_count) continue;
      if (owner[id] && *owner[id] != s) {
        problem("strips " + std::to_string(*owner[id]) + " and " + std::to_string(s) +
                " meet outside the base");
      }
      owner[id] = s;
    }
  }
  for (const auto& [a, b] : model.adjacency) {
    if (a >= model.vertices.size() || b >= model.vertices.size()) {
      problem("adjacency references a missing vertex");
      break;
    }
  }
  return r;
}

}  // namespace coarsemed::rbf
