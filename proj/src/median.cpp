#include "coarsemed/median.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "coarsemed/errors.hpp"

namespace coarsemed::median {

namespace {

constexpr std::uint16_t kUnset = std::numeric_limits<std::uint16_t>::max();

void check_element(const FiniteMedianAlgebra& m, Element e) {
  if (e >= m.size()) {
    throw InputError("element index " + std::to_string(e) + " out of range");
  }
}

void check_set(const FiniteMedianAlgebra& m, const ElementSet& a) {
  for (Element e : a) check_element(m, e);
}

ElementSet normalized(ElementSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

void check_cap(const FiniteMedianAlgebra& m, const Limits& limits, const char* what) {
  if (m.size() > limits.max_elements) {
    throw LimitError(std::string(what) + ": algebra has " + std::to_string(m.size()) +
                     " elements, cap is " + std::to_string(limits.max_elements));
  }
}

void check_table_size(std::size_t n, const Limits& limits) {
  if (n > limits.max_table_elements) {
    throw LimitError("algebra with " + std::to_string(n) + " elements exceeds table cap " +
                     std::to_string(limits.max_table_elements));
  }
}

std::string tuple_text(const FiniteMedianAlgebra& m, std::initializer_list<Element> es) {
  std::string out = "(";
  bool first = true;
  for (Element e : es) {
    if (!first) out += ", ";
    out += m.name(e);
    first = false;
  }
  return out + ")";
}

// Distance tables are rescaled to a common integer denominator so the O(n^4)
// betweenness scan runs on machine integers; falls back to exact rationals
// when the scaled values would not fit.
template <class Dist>
MedianValidation check_metric(const FiniteMedianAlgebra& m, Dist dist) {
  const std::size_t n = m.size();
  MedianValidation v;
  auto fail = [&](Axiom ax, std::vector<Element> tuple, std::string msg) {
    v.ok = false;
    v.violated = ax;
    v.tuple = std::move(tuple);
    v.message = std::move(msg);
    return v;
  };
  for (Element x = 0; x < n; ++x) {
    if (dist(x, x) != 0) {
      return fail(Axiom::Metric, {x, x}, "d" + tuple_text(m, {x, x}) + " is nonzero");
    }
    for (Element y = x + 1; y < n; ++y) {
      if (dist(x, y) != dist(y, x)) {
        return fail(Axiom::Metric, {x, y}, "metric is not symmetric at " + tuple_text(m, {x, y}));
      }
      if (dist(x, y) <= 0) {
        return fail(Axiom::Metric, {x, y},
                    "distinct elements at nonpositive distance " + tuple_text(m, {x, y}));
      }
    }
  }
  for (Element x = 0; x < n; ++x) {
    for (Element y = 0; y < n; ++y) {
      for (Element z = 0; z < n; ++z) {
        if (dist(x, z) > dist(x, y) + dist(y, z)) {
          return fail(Axiom::Metric, {x, y, z},
                      "triangle inequality fails for " + tuple_text(m, {x, y, z}));
        }
      }
    }
  }
  auto between = [&](Element a, Element w, Element b) {
    return dist(a, b) == dist(a, w) + dist(w, b);
  };
  for (Element x = 0; x < n; ++x) {
    for (Element y = x + 1; y < n; ++y) {
      for (Element z = y + 1; z < n; ++z) {
        const Element mid = m.med(x, y, z);
        if (!between(x, mid, y) || !between(y, mid, z) || !between(x, mid, z)) {
          return fail(Axiom::MetricMedian, {x, y, z},
                      "med" + tuple_text(m, {x, y, z}) + " = " + m.name(mid) +
                          " is not metrically between all pairs");
        }
        for (Element w = 0; w < n; ++w) {
          if (w != mid && between(x, w, y) && between(y, w, z) && between(x, w, z)) {
            return fail(Axiom::MetricMedian, {x, y, z, w},
                        "metric median of " + tuple_text(m, {x, y, z}) + " is not unique: " +
                            m.name(w) + " is also between all pairs");
          }
        }
      }
    }
  }
  return v;
}

std::optional<std::vector<std::int64_t>> scaled_metric(const std::vector<Rational>& metric) {
  BigInt common = 1;
  for (const Rational& q : metric) {
    const BigInt den = denominator(q);
    common = common / gcd(common, den) * den;
  }
  // Leave headroom so d(a,w) + d(w,b) cannot overflow.
  const BigInt bound = BigInt(1) << 61;
  std::vector<std::int64_t> out;
  out.reserve(metric.size());
  for (const Rational& q : metric) {
    const BigInt scaled = numerator(q) * (common / denominator(q));
    if (abs(scaled) >= bound) return std::nullopt;
    out.push_back(static_cast<std::int64_t>(scaled));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteMedianAlgebra

FiniteMedianAlgebra::FiniteMedianAlgebra(std::vector<std::string> elements,
                                         std::vector<std::uint16_t> table,
                                         std::optional<std::vector<Rational>> metric)
    : n_(elements.size()),
      elements_(std::move(elements)),
      table_(std::move(table)),
      metric_(std::move(metric)) {
  if (n_ == 0) throw InputError("median algebra must have at least one element");
  if (n_ >= kUnset) throw InputError("too many elements");
  if (table_.size() != n_ * n_ * n_) {
    throw InputError("median table has " + std::to_string(table_.size()) + " entries, expected " +
                     std::to_string(n_ * n_ * n_));
  }
  for (std::uint16_t value : table_) {
    if (value >= n_) throw InputError("median table value out of range");
  }
  if (metric_ && metric_->size() != n_ * n_) {
    throw InputError("metric has " + std::to_string(metric_->size()) + " entries, expected " +
                     std::to_string(n_ * n_));
  }
  std::vector<std::string> sorted = elements_;
  std::sort(sorted.begin(), sorted.end());
  if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end()) {
    throw InputError("duplicate element identifier '" + *it + "'");
  }
}

FiniteMedianAlgebra FiniteMedianAlgebra::from_entries(
    std::vector<std::string> elements, std::span<const std::array<std::size_t, 4>> entries,
    std::optional<std::vector<Rational>> metric) {
  const std::size_t n = elements.size();
  if (n == 0) throw InputError("median algebra must have at least one element");
  if (n >= kUnset) throw InputError("too many elements");
  std::vector<std::uint16_t> table(n * n * n, kUnset);
  for (const auto& [a, b, c, value] : entries) {
    if (a >= n || b >= n || c >= n || value >= n) {
      throw InputError("median table entry references an element index out of range");
    }
    auto& slot = table[(a * n + b) * n + c];
    if (slot != kUnset && slot != value) {
      throw InputError("conflicting median table entries for (" + elements[a] + ", " +
                       elements[b] + ", " + elements[c] + ")");
    }
    slot = static_cast<std::uint16_t>(value);
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i] == kUnset) {
      const std::size_t a = i / (n * n), b = (i / n) % n, c = i % n;
      throw InputError("median table is not total: no entry for (" + elements[a] + ", " +
                       elements[b] + ", " + elements[c] + ")");
    }
  }
  return FiniteMedianAlgebra(std::move(elements), std::move(table), std::move(metric));
}

Element FiniteMedianAlgebra::index_of(const std::string& name) const {
  auto it = std::find(elements_.begin(), elements_.end(), name);
  if (it == elements_.end()) throw InputError("unknown element '" + name + "'");
  return static_cast<Element>(it - elements_.begin());
}

const Rational& FiniteMedianAlgebra::distance(Element a, Element b) const {
  if (!metric_) throw InputError("median algebra has no metric");
  return (*metric_)[a * n_ + b];
}

FiniteMedianAlgebra FiniteMedianAlgebra::with_entry(Element a, Element b, Element c,
                                                    Element value) const {
  check_element(*this, a);
  check_element(*this, b);
  check_element(*this, c);
  check_element(*this, value);
  FiniteMedianAlgebra copy = *this;
  copy.table_[(a * n_ + b) * n_ + c] = static_cast<std::uint16_t>(value);
  return copy;
}

ElementSet FiniteMedianAlgebra::all() const {
  ElementSet out(n_);
  std::iota(out.begin(), out.end(), Element{0});
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Absorption: return "absorption";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::FivePoint: return "five-point";
    case Axiom::Metric: return "metric";
    case Axiom::MetricMedian: return "metric-median";
  }
  return "unknown";
}

MedianValidation verify_median_axioms(const FiniteMedianAlgebra& m) {
  const std::size_t n = m.size();
  const auto table = m.table();
  MedianValidation v;

  for (Element a = 0; a < n; ++a) {
    for (Element x = 0; x < n; ++x) {
      if (m.med(a, a, x) != a) {
        v.ok = false;
        v.violated = Axiom::Absorption;
        v.tuple = {a, x};
        v.message = "med" + tuple_text(m, {a, a, x}) + " = " + m.name(m.med(a, a, x)) +
                    ", expected " + m.name(a);
        return v;
      }
    }
  }

  for (Element a = 0; a < n; ++a) {
    for (Element b = 0; b < n; ++b) {
      for (Element c = 0; c < n; ++c) {
        const Element base = m.med(a, b, c);
        const std::array<std::array<Element, 3>, 5> perms{{
            {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
        for (const auto& p : perms) {
          if (m.med(p[0], p[1], p[2]) != base) {
            v.ok = false;
            v.violated = Axiom::Symmetry;
            v.tuple = {a, b, c};
            v.message = "med" + tuple_text(m, {a, b, c}) + " = " + m.name(base) + " but med" +
                        tuple_text(m, {p[0], p[1], p[2]}) + " = " +
                        m.name(m.med(p[0], p[1], p[2]));
            return v;
          }
        }
      }
    }
  }

  // med(a,b,med(x,y,z)) = med(med(a,b,x), med(a,b,y), z). With absorption and
  // symmetry established, a = b and x = y hold trivially and the identity is
  // symmetric under a <-> b and x <-> y.
  std::vector<std::uint16_t> proj(n);
  for (Element a = 0; a < n; ++a) {
    for (Element b = a + 1; b < n; ++b) {
      for (Element w = 0; w < n; ++w) proj[w] = table[(a * n + b) * n + w];
      for (Element x = 0; x < n; ++x) {
        const std::size_t px = proj[x];
        for (Element y = x + 1; y < n; ++y) {
          const std::size_t py = proj[y];
          const std::uint16_t* inner = table.data() + (x * n + y) * n;
          const std::uint16_t* outer = table.data() + (px * n + py) * n;
          for (Element z = 0; z < n; ++z) {
            if (proj[inner[z]] != outer[z]) {
              v.ok = false;
              v.violated = Axiom::FivePoint;
              v.tuple = {a, b, x, y, z};
              v.message = "five-point condition fails for (a,b,x,y,z) = " +
                          tuple_text(m, {a, b, x, y, z}) + ": med(a,b,med(x,y,z)) = " +
                          m.name(proj[inner[z]]) + ", med(med(a,b,x),med(a,b,y),z) = " +
                          m.name(outer[z]);
              return v;
            }
          }
        }
      }
    }
  }

  if (m.has_metric()) {
    const auto& metric = *m.metric();
    if (auto scaled = scaled_metric(metric)) {
      const auto& d = *scaled;
      return check_metric(m, [&](Element a, Element b) { return d[a * n + b]; });
    }
    return check_metric(m, [&](Element a, Element b) -> const Rational& {
      return metric[a * n + b];
    });
  }
  return v;
}

// ---------------------------------------------------------------------------
// Intervals, hulls, convexity

ElementSet interval(const FiniteMedianAlgebra& m, Element a, Element b) {
  check_element(m, a);
  check_element(m, b);
  ElementSet out;
  for (Element x = 0; x < m.size(); ++x) {
    if (m.med(a, b, x) == x) out.push_back(x);
  }
  return out;
}

ElementSet j_closure(const FiniteMedianAlgebra& m, const ElementSet& a) {
  if (a.empty()) throw InputError("j_closure of the empty set");
  check_set(m, a);
  const ElementSet src = normalized(a);
  std::vector<bool> hit(m.size(), false);
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = i; j < src.size(); ++j) {
      for (Element x = 0; x < m.size(); ++x) hit[m.med(src[i], src[j], x)] = true;
    }
  }
  ElementSet out;
  for (Element x = 0; x < m.size(); ++x) {
    if (hit[x]) out.push_back(x);
  }
  return out;
}

// Each J step only needs pairs involving elements added by the previous step:
// intervals between older elements are already inside the current set.
HullResult convex_hull(const FiniteMedianAlgebra& m, const ElementSet& a) {
  if (a.empty()) throw InputError("convex hull of the empty set");
  check_set(m, a);
  const std::size_t n = m.size();
  HullResult result{normalized(a), 0};
  std::vector<bool> in(n, false);
  for (Element e : result.hull) in[e] = true;
  ElementSet fresh = result.hull;
  while (!fresh.empty() && result.hull.size() < n) {
    std::vector<bool> hit = in;
    for (Element p : fresh) {
      for (Element q : result.hull) {
        for (Element x = 0; x < n; ++x) hit[m.med(p, q, x)] = true;
      }
    }
    fresh.clear();
    for (Element x = 0; x < n; ++x) {
      if (hit[x] && !in[x]) fresh.push_back(x);
    }
    if (fresh.empty()) break;
    for (Element x : fresh) in[x] = true;
    result.hull.clear();
    for (Element x = 0; x < n; ++x) {
      if (in[x]) result.hull.push_back(x);
    }
    ++result.iterations;
  }
  return result;
}

bool is_convex(const FiniteMedianAlgebra& m, const ElementSet& a) {
  if (a.empty()) return true;
  return j_closure(m, a) == normalized(a);
}

// ---------------------------------------------------------------------------
// Walls and rank

bool crosses(const Wall& u, const Wall& v) {
  auto meets = [](const ElementSet& s, const ElementSet& t) {
    auto i = s.begin();
    auto j = t.begin();
    while (i != s.end() && j != t.end()) {
      if (*i == *j) return true;
      if (*i < *j) ++i; else ++j;
    }
    return false;
  };
  return meets(u.side_a, v.side_a) && meets(u.side_a, v.side_b) &&
         meets(u.side_b, v.side_a) && meets(u.side_b, v.side_b);
}

std::vector<Wall> enumerate_walls(const FiniteMedianAlgebra& m, const Limits& limits) {
  check_cap(m, limits, "wall enumeration");
  const std::size_t n = m.size();
  // Every wall separates some pair a, b with [a,b] = {a,b}, and for such a
  // pair the halfspaces are exactly the fibres of med(a,b,.).
  std::vector<Wall> walls;
  for (Element a = 0; a < n; ++a) {
    for (Element b = a + 1; b < n; ++b) {
      bool edge = true;
      for (Element x = 0; x < n && edge; ++x) {
        const Element p = m.med(a, b, x);
        if (p == x && x != a && x != b) edge = false;
      }
      if (!edge) continue;
      Wall w;
      for (Element x = 0; x < n; ++x) {
        (m.med(a, b, x) == m.med(a, b, 0) ? w.side_a : w.side_b).push_back(x);
      }
      walls.push_back(std::move(w));
    }
  }
  std::sort(walls.begin(), walls.end(),
            [](const Wall& u, const Wall& v) { return u.side_b < v.side_b; });
  walls.erase(std::unique(walls.begin(), walls.end()), walls.end());
  return walls;
}

WallRank rank_by_walls(const FiniteMedianAlgebra& m, const Limits& limits) {
  const std::vector<Wall> walls = enumerate_walls(m, limits);
  const std::size_t k = walls.size();
  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      adj[i][j] = adj[j][i] = crosses(walls[i], walls[j]);
    }
  }
  // Depth-first extension in increasing index order visits cliques
  // lexicographically, so the first clique of maximum size is the least.
  std::vector<std::size_t> best;
  std::vector<std::size_t> current;
  auto search = [&](auto&& self, const std::vector<std::size_t>& candidates) -> void {
    if (current.size() > best.size()) best = current;
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
      if (current.size() + (candidates.size() - idx) <= best.size()) return;
      const std::size_t c = candidates[idx];
      std::vector<std::size_t> next;
      for (std::size_t j = idx + 1; j < candidates.size(); ++j) {
        if (adj[c][candidates[j]]) next.push_back(candidates[j]);
      }
      current.push_back(c);
      self(self, next);
      current.pop_back();
    }
  };
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), std::size_t{0});
  search(search, all);

  WallRank out;
  out.rank = best.size();
  for (std::size_t i : best) out.witness.push_back(walls[i]);
  return out;
}

CubeRank rank_by_cube_embedding(const FiniteMedianAlgebra& m, const Limits& limits) {
  check_cap(m, limits, "cube embedding search");
  const std::size_t n = m.size();

  auto majority = [](std::size_t x, std::size_t y, std::size_t z) {
    return (x & y) | (y & z) | (x & z);
  };

  // Searches for {0,1}^dim -> m sending 0 to u and 1 to v. The morphism is
  // determined by the images a_i of the unit vectors, since the image of a
  // vertex with support S is the iterated join med(v, f(S - i), a_i).
  auto find = [&](std::size_t dim) -> std::optional<std::vector<Element>> {
    const std::size_t corners = std::size_t{1} << dim;
    std::vector<Element> image(corners);
    std::vector<Element> units;
    std::vector<bool> used(n);
    for (Element u = 0; u < n; ++u) {
      for (Element v = 0; v < n; ++v) {
        if (v == u) continue;
        const ElementSet span = interval(m, u, v);
        if (span.size() < corners) continue;

        auto complete = [&]() -> bool {
          image[0] = u;
          for (std::size_t mask = 1; mask < corners; ++mask) {
            std::size_t top = 0;
            while ((mask >> (top + 1)) != 0) ++top;
            const std::size_t rest = mask & ~(std::size_t{1} << top);
            image[mask] = rest == 0 ? units[top] : m.med(v, image[rest], units[top]);
          }
          if (image[corners - 1] != v) return false;
          std::fill(used.begin(), used.end(), false);
          for (std::size_t mask = 0; mask < corners; ++mask) {
            if (used[image[mask]]) return false;
            used[image[mask]] = true;
          }
          for (std::size_t x = 0; x < corners; ++x) {
            for (std::size_t y = x + 1; y < corners; ++y) {
              for (std::size_t z = y + 1; z < corners; ++z) {
                if (image[majority(x, y, z)] != m.med(image[x], image[y], image[z])) {
                  return false;
                }
              }
            }
          }
          return true;
        };

        auto extend = [&](auto&& self, std::size_t from) -> bool {
          if (units.size() == dim) return complete();
          for (std::size_t idx = from; idx < span.size(); ++idx) {
            const Element a = span[idx];
            if (a == u) continue;
            bool ok = true;
            for (Element prev : units) {
              if (m.med(u, prev, a) != u) {
                ok = false;
                break;
              }
            }
            if (!ok) continue;
            units.push_back(a);
            if (self(self, idx + 1)) return true;
            units.pop_back();
          }
          return false;
        };

        units.clear();
        if (extend(extend, 0)) return image;
      }
    }
    return std::nullopt;
  };

  CubeRank out{0, {0}};
  for (std::size_t dim = 1; (std::size_t{1} << dim) <= n; ++dim) {
    auto found = find(dim);
    if (!found) break;
    out.rank = dim;
    out.witness = std::move(*found);
  }
  return out;
}

RankReport rank(const FiniteMedianAlgebra& m, const Limits& limits) {
  WallRank walls = rank_by_walls(m, limits);
  CubeRank cube = rank_by_cube_embedding(m, limits);
  return RankReport{walls.rank, cube.rank, std::move(walls.witness), std::move(cube.witness)};
}

// ---------------------------------------------------------------------------
// Identities

namespace {

struct Premise {
  const char* text;
  Element lhs;
  Element expected;
};

std::array<Premise, 6> premises(const FiniteMedianAlgebra& m, const DiagonalFrame& f) {
  return {{
      {"med(0,1,a+) = a+", m.med(f.zero, f.one, f.a_plus), f.a_plus},
      {"med(0,1,a-) = a-", m.med(f.zero, f.one, f.a_minus), f.a_minus},
      {"med(a+,a-,0) = 0", m.med(f.a_plus, f.a_minus, f.zero), f.zero},
      {"med(a+,a-,1) = 1", m.med(f.a_plus, f.a_minus, f.one), f.one},
      {"med(0,1,b) = b", m.med(f.zero, f.one, f.b), f.b},
      {"med(a+,b,0) = 0", m.med(f.a_plus, f.b, f.zero), f.zero},
  }};
}

}  // namespace

bool diagonal_premises_hold(const FiniteMedianAlgebra& m, const DiagonalFrame& f) {
  for (Element e : {f.zero, f.one, f.a_plus, f.a_minus, f.b}) check_element(m, e);
  for (const Premise& p : premises(m, f)) {
    if (p.lhs != p.expected) return false;
  }
  return m.med(f.a_plus, f.b, f.one) == f.one;
}

bool five_point_chain_check(const FiniteMedianAlgebra& m, const DiagonalFrame& f) {
  for (Element e : {f.zero, f.one, f.a_plus, f.a_minus, f.b}) check_element(m, e);
  for (const Premise& p : premises(m, f)) {
    if (p.lhs != p.expected) throw PreconditionError(std::string("premise fails: ") + p.text);
  }
  if (m.med(f.a_plus, f.b, f.one) != f.one) {
    throw PreconditionError("premise fails: med(a+,b,1) = 1");
  }

  const Element zero = f.zero, one = f.one, ap = f.a_plus, am = f.a_minus, b = f.b;
  auto mu = [&](Element x, Element y, Element z) { return m.med(x, y, z); };
  // Each entry is one expression of the chain b = ... = a-; consecutive
  // entries are equal by a premise or one application of the five-point
  // condition.
  const std::array<Element, 10> chain{
      b,
      mu(zero, one, b),
      mu(mu(ap, am, zero), mu(ap, am, one), b),
      mu(ap, am, mu(zero, one, b)),
      mu(mu(ap, am, b), mu(ap, am, zero), one),
      mu(mu(ap, am, b), zero, one),
      mu(mu(ap, b, am), mu(ap, b, zero), one),
      mu(ap, b, mu(am, zero, one)),
      mu(mu(ap, b, zero), mu(ap, b, one), am),
      mu(zero, one, am),
  };
  for (std::size_t i = 1; i < chain.size(); ++i) {
    if (chain[i] != chain[i - 1]) return false;
  }
  return chain.back() == am && b == am;
}

ElementSet ball(const FiniteMedianAlgebra& m, Element centre, const Rational& radius) {
  if (!m.has_metric()) throw InputError("ball requires a metric");
  check_element(m, centre);
  if (radius < 0) throw InputError("ball radius must be nonnegative");
  ElementSet out;
  for (Element x = 0; x < m.size(); ++x) {
    if (m.distance(centre, x) <= radius) out.push_back(x);
  }
  return out;
}

bool ball_hull_bound_check(const FiniteMedianAlgebra& m, Element centre, const Rational& radius,
                           std::size_t rank) {
  const ElementSet b = ball(m, centre, radius);
  const Rational bound = radius * Rational(BigInt(1) << rank);
  for (Element x : convex_hull(m, b).hull) {
    if (m.distance(centre, x) > bound) return false;
  }
  return true;
}

bool ball_hull_bound_check(const FiniteMedianAlgebra& m, Element centre, const Rational& radius,
                           const Limits& limits) {
  if (!m.has_metric()) throw InputError("ball_hull_bound_check needs a metric");
  return ball_hull_bound_check(m, centre, radius, rank_by_walls(m, limits).rank);
}

// ---------------------------------------------------------------------------
// Constructors

FiniteMedianAlgebra lattice_box(std::span<const std::size_t> dims, const Limits& limits) {
  if (dims.empty()) throw InputError("lattice box needs at least one dimension");
  std::size_t total = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw InputError("lattice box dimensions must be positive");
    if (total > limits.max_table_elements / d + 1) {
      check_table_size(limits.max_table_elements + 1, limits);
    }
    total *= d;
  }
  check_table_size(total, limits);

  const std::size_t k = dims.size();
  std::vector<std::vector<std::size_t>> coords(total, std::vector<std::size_t>(k));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t axis = k; axis-- > 0;) {
      coords[idx][axis] = rest % dims[axis];
      rest /= dims[axis];
    }
  }
  std::vector<std::string> names;
  names.reserve(total);
  for (const auto& c : coords) {
    std::string s = "(";
    for (std::size_t axis = 0; axis < k; ++axis) {
      if (axis) s += ",";
      s += std::to_string(c[axis]);
    }
    names.push_back(s + ")");
  }
  auto encode = [&](const std::vector<std::size_t>& c) {
    std::size_t idx = 0;
    for (std::size_t axis = 0; axis < k; ++axis) idx = idx * dims[axis] + c[axis];
    return idx;
  };
  std::vector<std::uint16_t> table(total * total * total);
  std::vector<std::size_t> mid(k);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      for (std::size_t c = 0; c < total; ++c) {
        for (std::size_t axis = 0; axis < k; ++axis) {
          std::array<std::size_t, 3> v{coords[a][axis], coords[b][axis], coords[c][axis]};
          std::sort(v.begin(), v.end());
          mid[axis] = v[1];
        }
        table[(a * total + b) * total + c] = static_cast<std::uint16_t>(encode(mid));
      }
    }
  }
  std::vector<Rational> metric(total * total);
  for (std::size_t a = 0; a < total; ++a) {
    for (std::size_t b = 0; b < total; ++b) {
      std::int64_t d = 0;
      for (std::size_t axis = 0; axis < k; ++axis) {
        d += std::llabs(static_cast<std::int64_t>(coords[a][axis]) -
                        static_cast<std::int64_t>(coords[b][axis]));
      }
      metric[a * total + b] = d;
    }
  }
  return FiniteMedianAlgebra(std::move(names), std::move(table), std::move(metric));
}

FiniteMedianAlgebra hypercube(std::size_t n, const Limits& limits) {
  if (n < 1 || n > 10) throw InputError("hypercube dimension must be between 1 and 10");
  std::vector<std::size_t> dims(n, 2);
  return lattice_box(dims, limits);
}

FiniteMedianAlgebra tree_median(std::vector<std::string> vertices,
                                std::span<const std::pair<std::size_t, std::size_t>> edges,
                                const Limits& limits) {
  const std::size_t n = vertices.size();
  if (n == 0) throw InputError("tree must have at least one vertex");
  check_table_size(n, limits);
  if (edges.size() != n - 1) throw InputError("a tree on n vertices has n-1 edges");
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n || a == b) throw InputError("invalid tree edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<std::vector<std::int64_t>> dist(n, std::vector<std::int64_t>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<std::size_t> q;
    dist[s][s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      for (std::size_t y : adj[x]) {
        if (dist[s][y] < 0) {
          dist[s][y] = dist[s][x] + 1;
          q.push(y);
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (dist[s][t] < 0) throw InputError("tree is not connected");
    }
  }
  std::vector<std::uint16_t> table(n * n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        std::size_t best = 0;
        std::int64_t best_sum = std::numeric_limits<std::int64_t>::max();
        for (std::size_t x = 0; x < n; ++x) {
          const std::int64_t sum = dist[a][x] + dist[b][x] + dist[c][x];
          if (sum < best_sum) {
            best_sum = sum;
            best = x;
          }
        }
        table[(a * n + b) * n + c] = static_cast<std::uint16_t>(best);
      }
    }
  }
  std::vector<Rational> metric(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) metric[a * n + b] = dist[a][b];
  }
  return FiniteMedianAlgebra(std::move(vertices), std::move(table), std::move(metric));
}

FiniteMedianAlgebra product(const FiniteMedianAlgebra& x, const FiniteMedianAlgebra& y,
                            const Limits& limits) {
  const std::size_t nx = x.size(), ny = y.size(), n = nx * ny;
  check_table_size(n, limits);
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) names.push_back("(" + x.name(i) + "," + y.name(j) + ")");
  }
  std::vector<std::uint16_t> table(n * n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t i = x.med(a / ny, b / ny, c / ny);
        const std::size_t j = y.med(a % ny, b % ny, c % ny);
        table[(a * n + b) * n + c] = static_cast<std::uint16_t>(i * ny + j);
      }
    }
  }
  std::optional<std::vector<Rational>> metric;
  if (x.has_metric() && y.has_metric()) {
    metric.emplace(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        (*metric)[a * n + b] = x.distance(a / ny, b / ny) + y.distance(a % ny, b % ny);
      }
    }
  }
  return FiniteMedianAlgebra(std::move(names), std::move(table), std::move(metric));
}

bool is_closed(const FiniteMedianAlgebra& m, const ElementSet& subset) {
  std::vector<bool> in(m.size(), false);
  for (Element e : subset) {
    check_element(m, e);
    in[e] = true;
  }
  for (Element a : subset) {
    for (Element b : subset) {
      for (Element c : subset) {
        if (!in[m.med(a, b, c)]) return false;
      }
    }
  }
  return true;
}

FiniteMedianAlgebra subalgebra(const FiniteMedianAlgebra& m, const ElementSet& subset) {
  const ElementSet s = normalized(subset);
  if (s.empty()) throw InputError("subalgebra of the empty set");
  if (!is_closed(m, s)) throw InputError("subset is not closed under the median");
  const std::size_t k = s.size();
  std::vector<std::size_t> local(m.size(), 0);
  for (std::size_t i = 0; i < k; ++i) local[s[i]] = i;
  std::vector<std::string> names;
  for (Element e : s) names.push_back(m.name(e));
  std::vector<std::uint16_t> table(k * k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      for (std::size_t c = 0; c < k; ++c) {
        table[(a * k + b) * k + c] = static_cast<std::uint16_t>(local[m.med(s[a], s[b], s[c])]);
      }
    }
  }
  std::optional<std::vector<Rational>> metric;
  if (m.has_metric()) {
    metric.emplace(k * k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) (*metric)[a * k + b] = m.distance(s[a], s[b]);
    }
  }
  return FiniteMedianAlgebra(std::move(names), std::move(table), std::move(metric));
}

std::vector<ElementSet> closed_subsets(const FiniteMedianAlgebra& m) {
  const std::size_t n = m.size();
  if (n > 20) throw LimitError("closed subset enumeration is limited to 20 elements");
  std::vector<ElementSet> out;
  ElementSet members;
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << n); ++mask) {
    members.clear();
    for (Element e = 0; e < n; ++e) {
      if (mask >> e & 1u) members.push_back(e);
    }
    bool closed = true;
    for (std::size_t i = 0; i < members.size() && closed; ++i) {
      for (std::size_t j = i + 1; j < members.size() && closed; ++j) {
        for (std::size_t l = j + 1; l < members.size(); ++l) {
          if (!(mask >> m.med(members[i], members[j], members[l]) & 1u)) {
            closed = false;
            break;
          }
        }
      }
    }
    if (closed) out.push_back(members);
  }
  return out;
}

}  // namespace coarsemed::median
