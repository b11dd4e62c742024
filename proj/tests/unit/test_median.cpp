#include <algorithm>
#include <array>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

#include "coarsemed/errors.hpp"
#include "coarsemed/median.hpp"

using namespace coarsemed;
using namespace coarsemed::median;

namespace {

Element at(const FiniteMedianAlgebra& m, const std::string& name) { return m.index_of(name); }

ElementSet names(const FiniteMedianAlgebra& m, std::initializer_list<const char*> list) {
  ElementSet s;
  for (const char* n : list) s.push_back(m.index_of(n));
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

TEST_CASE("hypercubes and boxes satisfy the axioms") {
  CHECK(verify_median_axioms(hypercube(2)).ok);
  CHECK(verify_median_axioms(hypercube(4)).ok);
  CHECK(hypercube(4).size() == 16);
  const auto b = support::box({3, 3});
  CHECK(verify_median_axioms(b).ok);
  CHECK(oracle::is_median(b));
}

TEST_CASE("absorption failure is reported with its tuple") {
  const auto q = hypercube(2);
  const auto bad = q.with_entry(0, 0, 3, 3);
  const auto v = verify_median_axioms(bad);
  CHECK_FALSE(v.ok);
  REQUIRE(v.violated.has_value());
  CHECK(*v.violated == Axiom::Absorption);
  CHECK(v.tuple.size() >= 2);
  CHECK(v.tuple[0] == 0);
}

TEST_CASE("every single-entry mutation of small algebras is rejected") {
  support::Rng rng(7);
  for (const auto& m : {hypercube(2), hypercube(3), support::box({3, 2}), support::path_tree(4)}) {
    const std::size_t n = m.size();
    for (int i = 0; i < 200; ++i) {
      const Element a = support::pick(rng, 0, n - 1);
      const Element b = support::pick(rng, 0, n - 1);
      const Element c = support::pick(rng, 0, n - 1);
      const Element cur = m.med(a, b, c);
      const Element v = (cur + support::pick(rng, 1, n - 1)) % n;
      const auto mutated = m.with_entry(a, b, c, v);
      CHECK_FALSE(verify_median_axioms(mutated).ok);
      CHECK_FALSE(oracle::is_median(mutated));
    }
  }
}

TEST_CASE("intervals") {
  const auto q = hypercube(2);
  CHECK(interval(q, 0, 3) == q.all());
  for (Element a = 0; a < q.size(); ++a) CHECK(interval(q, a, a) == ElementSet{a});
  const auto b = support::box({3, 3});
  const auto i = interval(b, at(b, "(0,0)"), at(b, "(2,1)"));
  CHECK(i == names(b, {"(0,0)", "(0,1)", "(1,0)", "(1,1)", "(2,0)", "(2,1)"}));
  CHECK(is_convex(b, i));
  CHECK_THROWS_AS(interval(b, 0, 99), InputError);
}

TEST_CASE("J closure and hulls") {
  const auto q2 = hypercube(2);
  CHECK(j_closure(q2, {0, 3}) == q2.all());
  const auto q3 = hypercube(3);
  CHECK(j_closure(q3, {0, 7}) == q3.all());
  CHECK_THROWS_AS(j_closure(q3, {}), InputError);
  CHECK(j_closure(q3, {0, 1}) == ElementSet{0, 1});

  CHECK(convex_hull(q3, {5}).hull == ElementSet{5});
  CHECK(convex_hull(q2, {0, 3}).hull == q2.all());
  const auto b = support::box({3, 3});
  const auto ball1 = ball(b, at(b, "(1,1)"), Rational(1));
  CHECK(ball1.size() == 5);
  CHECK(convex_hull(b, ball1).hull == b.all());
  CHECK(oracle::hull(b, ball1) == b.all());
}

TEST_CASE("hull agrees with the convex-set oracle and is a closure operator") {
  support::Rng rng(11);
  for (const auto& m : {support::box({3, 3}), hypercube(3), support::random_tree(rng, 9),
                        support::box({2, 2, 3})}) {
    const std::size_t n = m.size();
    const std::size_t r = rank_by_walls(m).rank;
    for (int i = 0; i < 40; ++i) {
      ElementSet a;
      for (Element e = 0; e < n; ++e) {
        if (support::pick(rng, 0, 3) == 0) a.push_back(e);
      }
      if (a.empty()) a.push_back(support::pick(rng, 0, n - 1));
      const auto h = convex_hull(m, a);
      CHECK(h.hull == oracle::hull(m, a));
      CHECK(h.iterations <= r);
      CHECK(convex_hull(m, h.hull).hull == h.hull);
      CHECK(is_convex(m, h.hull));
      ElementSet bigger = a;
      bigger.push_back(support::pick(rng, 0, n - 1));
      std::sort(bigger.begin(), bigger.end());
      bigger.erase(std::unique(bigger.begin(), bigger.end()), bigger.end());
      const auto hb = convex_hull(m, bigger).hull;
      CHECK(std::includes(hb.begin(), hb.end(), h.hull.begin(), h.hull.end()));
    }
  }
}

TEST_CASE("walls") {
  CHECK(enumerate_walls(hypercube(2)).size() == 2);
  const std::array<std::pair<std::size_t, std::size_t>, 2> e{{{0, 1}, {1, 2}}};
  const auto path = tree_median({"a", "b", "c"}, e);
  CHECK(enumerate_walls(path).size() == 2);
  CHECK(enumerate_walls(support::box({3, 2})).size() == 3);
  support::Rng rng(3);
  for (const auto& m : {support::box({3, 3}), hypercube(3), support::random_tree(rng, 10)}) {
    CHECK(enumerate_walls(m) == oracle::walls(m));
  }
  CHECK_THROWS_AS(enumerate_walls(support::box({6, 6})), LimitError);
  Limits big;
  big.max_elements = 40;
  CHECK(enumerate_walls(support::box({6, 6}), big).size() == 10);
}

TEST_CASE("rank") {
  CHECK(rank(hypercube(1)).rank_walls == 1);
  const auto r3 = rank(hypercube(3));
  CHECK(r3.rank_walls == 3);
  CHECK(r3.rank_cube == 3);
  CHECK(r3.witness_walls.size() == 3);
  CHECK(r3.witness_cube.size() == 8);
  const auto b = support::box({3, 3});
  CHECK(rank(b).rank_walls == 2);
  CHECK(rank(b).rank_cube == 2);
  CHECK(oracle::rank_by_crossing(b) == 2);
  const auto b32 = support::box({3, 2});
  CHECK(b32.size() == 6);
  CHECK(rank(b32).rank_cube == 2);
  support::Rng rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto t = support::random_tree(rng, 8);
    CHECK(rank(t).rank_walls == 1);
    CHECK(rank(t).rank_cube == 1);
  }
}

TEST_CASE("products are median and ranks add") {
  support::Rng rng(9);
  const auto t = support::random_tree(rng, 4);
  const std::vector<std::pair<FiniteMedianAlgebra, FiniteMedianAlgebra>> pairs{
      {hypercube(1), hypercube(2)}, {t, support::path_tree(3)}, {support::box({3}), t}};
  for (const auto& [x, y] : pairs) {
    const auto p = product(x, y);
    CHECK(verify_median_axioms(p).ok);
    CHECK(rank(p).rank_walls == rank(x).rank_walls + rank(y).rank_walls);
  }
}

TEST_CASE("five point chain") {
  const auto b = support::box({3, 3});
  const DiagonalFrame f{at(b, "(0,0)"), at(b, "(2,2)"), at(b, "(2,0)"), at(b, "(0,2)"),
                        at(b, "(0,2)")};
  CHECK(diagonal_premises_hold(b, f));
  CHECK(five_point_chain_check(b, f));
  DiagonalFrame broken = f;
  broken.b = at(b, "(2,0)");
  CHECK_FALSE(diagonal_premises_hold(b, broken));
  CHECK_THROWS_AS(five_point_chain_check(b, broken), PreconditionError);
}

TEST_CASE("ball hull bound") {
  std::vector<std::size_t> dims{7, 7};
  const auto b = lattice_box(dims);
  const Element centre = at(b, "(3,3)");
  CHECK(ball_hull_bound_check(b, centre, Rational(1), Limits{64, 256}));
  const auto h = convex_hull(b, ball(b, centre, Rational(1))).hull;
  CHECK(h.size() == 9);
  for (Element e : h) CHECK(b.distance(centre, e) <= 2);
  CHECK(ball_hull_bound_check(b, centre, Rational(0), 2));
  CHECK(ball(b, centre, Rational(0)) == ElementSet{centre});
  support::Rng rng(1);
  const auto t = support::random_tree(rng, 12);
  for (Element x = 0; x < t.size(); ++x) CHECK(ball_hull_bound_check(t, x, Rational(2), 1));
  const auto q = hypercube(2);
  const FiniteMedianAlgebra bare(q.elements(), std::vector<std::uint16_t>(q.table().begin(), q.table().end()));
  CHECK_THROWS_AS(ball(bare, 0, Rational(1)), InputError);
}

TEST_CASE("constructors") {
  CHECK(hypercube(1).size() == 2);
  CHECK_THROWS(hypercube(0));
  CHECK_THROWS(hypercube(11));
  const auto b = support::box({3, 2});
  CHECK(b.name(0) == "(0,0)");
  CHECK(b.distance(at(b, "(0,0)"), at(b, "(2,1)")) == 3);
  const auto q3 = hypercube(3);
  CHECK_THROWS_AS(subalgebra(q3, names(q3, {"(0,0,0)", "(0,1,1)", "(1,0,1)"})), InputError);
  CHECK(subalgebra(q3, names(q3, {"(0,0,0)", "(0,0,1)", "(0,1,1)", "(1,0,1)"})).size() == 4);
  CHECK(closed_subsets(hypercube(2)).size() == 15);
}
