#pragma once

// Shared generators for the unit tests and the acceptance binary.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "coarsemed/median.hpp"
#include "coarsemed/report.hpp"
#include "coarsemed/tubular.hpp"

#ifndef COARSEMED_FIXTURE_DIR
#define COARSEMED_FIXTURE_DIR "fixtures"
#endif

namespace support {

namespace cm = coarsemed;
using Rng = std::mt19937_64;

inline std::string fixture(const std::string& kind, const std::string& name) {
  return std::string(COARSEMED_FIXTURE_DIR) + "/" + kind + "/" + name + ".json";
}

template <class T>
T load(const std::string& kind, const std::string& name) {
  const auto k = cm::report::parse_kind(kind);
  return std::get<T>(cm::report::parse_input(fixture(kind, name), k).spec);
}

inline std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

/// Connected spec with 1..max_vertices vertices and up to max_edges edges.
/// Directions come from a small pool so that commensurable ends are common.
inline cm::tubular::TubularGroupSpec random_tubular(Rng& rng, std::size_t max_vertices = 5,
                                                    std::size_t max_edges = 8) {
  static const std::array<cm::tubular::Vec2, 5> pool{{{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}}};
  static const std::array<std::int64_t, 6> mults{1, -1, 2, -2, 3, 1};
  auto vec = [&] {
    const auto d = pool[pick(rng, 0, pool.size() - 1)];
    const auto k = mults[pick(rng, 0, mults.size() - 1)];
    return cm::tubular::Vec2{d[0] * k, d[1] * k};
  };
  cm::tubular::TubularGroupSpec s;
  const std::size_t nv = pick(rng, 1, max_vertices);
  for (std::size_t i = 0; i < nv; ++i) s.vertices.push_back("v" + std::to_string(i));
  std::size_t id = 0;
  auto add = [&](std::size_t a, std::size_t b) {
    s.edges.push_back({"e" + std::to_string(id++), s.vertices[a], s.vertices[b], vec(), vec()});
  };
  for (std::size_t i = 1; i < nv; ++i) add(pick(rng, 0, i - 1), i);
  const std::size_t target = pick(rng, nv - 1, std::max(nv - 1, max_edges));
  while (s.edges.size() < target) add(pick(rng, 0, nv - 1), pick(rng, 0, nv - 1));
  return s;
}

using Mat2 = std::array<std::int64_t, 4>;  // row-major

/// Random element of GL(2,Z) as a product of elementary moves.
inline Mat2 random_gl2z(Rng& rng) {
  Mat2 m{1, 0, 0, 1};
  const int steps = static_cast<int>(pick(rng, 1, 5));
  for (int i = 0; i < steps; ++i) {
    Mat2 e{1, 0, 0, 1};
    switch (pick(rng, 0, 4)) {
      case 0: e = {1, pick(rng, -2, 2), 0, 1}; break;
      case 1: e = {1, 0, pick(rng, -2, 2), 1}; break;
      case 2: e = {0, 1, 1, 0}; break;
      case 3: e = {-1, 0, 0, 1}; break;
      default: e = {1, 0, 0, -1}; break;
    }
    m = {e[0] * m[0] + e[1] * m[2], e[0] * m[1] + e[1] * m[3], e[2] * m[0] + e[3] * m[2],
         e[2] * m[1] + e[3] * m[3]};
  }
  return m;
}

inline cm::tubular::Vec2 transform(const Mat2& m, const cm::tubular::Vec2& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

/// Changes the basis of one vertex group: every edge end at `vertex` moves.
inline cm::tubular::TubularGroupSpec rebase(cm::tubular::TubularGroupSpec s,
                                            const std::string& vertex, const Mat2& m) {
  for (auto& e : s.edges) {
    if (e.from == vertex) e.w_from = transform(m, e.w_from);
    if (e.to == vertex) e.w_to = transform(m, e.w_to);
  }
  return s;
}

/// Random tree on n vertices named t0..t{n-1}.
inline cm::median::FiniteMedianAlgebra random_tree(Rng& rng, std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) names.push_back("t" + std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(pick(rng, 0, i - 1), i);
  return cm::median::tree_median(names, edges);
}

inline cm::median::FiniteMedianAlgebra path_tree(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i - 1, i);
  return cm::median::tree_median(names, edges);
}

inline cm::median::FiniteMedianAlgebra star_tree(std::size_t leaves) {
  std::vector<std::string> names{"hub"};
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i <= leaves; ++i) {
    names.push_back("leaf" + std::to_string(i));
    edges.emplace_back(0, i);
  }
  return cm::median::tree_median(names, edges);
}

inline cm::median::FiniteMedianAlgebra box(std::initializer_list<std::size_t> dims,
                                           const cm::median::Limits& limits = {}) {
  std::vector<std::size_t> d(dims);
  return cm::median::lattice_box(d, limits);
}

}  // namespace support
