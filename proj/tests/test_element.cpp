#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "tower/element.hpp"

using tower::GroupElement;
using tower::LevelVector;
using tower::SymplecticPair;
using tower::Tower;
using tower::TowerConfig;

namespace {

Tower make23() { return Tower(TowerConfig::make({2, 3})); }
Tower make32() { return Tower(TowerConfig::make({3, 2})); }
Tower make232() { return Tower(TowerConfig::make({2, 3, 2})); }
Tower make23232() { return Tower(TowerConfig::make({2, 3, 2, 3, 2})); }

GroupElement level2(const Tower& tw, std::vector<std::pair<GroupElement, SymplecticPair>> pairs,
                    std::int64_t center) {
  LevelVector v;
  for (auto& [k, pr] : pairs) v.pairs[tw.encode(k)] = pr;
  v.center = center;
  GroupElement a;
  a.upper.push_back(v);
  return a;
}

}  // namespace

TEST_CASE("identity laws") {
  auto tw = make232();
  CHECK(tw.identity(1).is_identity());
  CHECK(tw.identity(3).is_identity());
  CHECK(tw.order(tw.identity(2)) == 1);
  for (int s = 0; s < 50; ++s) {
    auto g = tw.random_element(3, 3, 1000 + s);
    CHECK(tw.multiply(tw.identity(3), g) == g);
    CHECK(tw.multiply(g, tw.identity(3)) == g);
  }
  CHECK_THROWS_AS((void)tw.identity(4), tower::element_error);
}

TEST_CASE("level-1 arithmetic in Z_2") {
  auto tw = make23();
  auto x = tw.level1(1);
  CHECK(tw.multiply(x, x).is_identity());
  CHECK(tw.order(x) == 2);
}

TEST_CASE("derived level-2 commutator is central with nonzero center") {
  // primes (2,3); the two vectors span the free part of the level-2
  // commutator subgroup.  Expected center value of their commutator,
  // computed from the antisymmetrized cocycle: (0*0-1*1) + (0*0-2*2) = -5 = 1 mod 3.
  auto tw = make23();
  auto id = tw.identity();
  auto r = tw.level1(1);
  auto v1 = level2(tw, {{id, {1, 0}}, {r, {2, 0}}}, 0);
  auto v2 = level2(tw, {{id, {0, 1}}, {r, {0, 2}}}, 0);
  CHECK(tw.validate(v1));
  CHECK(tw.validate(v2));
  auto c = tw.commutator(v1, v2);
  CHECK(c == tw.power(tw.center_generator(2), 1));
  for (int s = 0; s < 20; ++s) {
    auto g = tw.random_element(2, 2, 77 + s);
    CHECK(tw.commutator(c, g).is_identity());
  }
}

TEST_CASE("inverse laws") {
  auto tw = make232();
  CHECK(tw.inverse(tw.identity(2)).is_identity());
  for (int s = 0; s < 200; ++s) {
    auto a = tw.random_element(3, 3, 31 * s);
    CHECK(tw.inverse(tw.inverse(a)) == a);
    CHECK(tw.multiply(a, tw.inverse(a)).is_identity());
    CHECK(tw.multiply(tw.inverse(a), a).is_identity());
  }
}

TEST_CASE("level-2 element of order 3 has inverse equal to its square") {
  auto tw = make23();
  auto y = tw.construct_noncentral(2);
  CHECK(tw.order(y) == 3);
  CHECK(tw.inverse(y) == tw.multiply(y, y));
}

TEST_CASE("power behaves") {
  auto tw = make23232();
  auto a = tw.random_element(3, 3, 5);
  CHECK(tw.power(a, 0).is_identity());
  CHECK(tw.power(a, 1) == a);
  CHECK(tw.power(a, -1) == tw.inverse(a));
  CHECK(tw.power(tw.center_generator(2), 3).is_identity());
  for (int s = 0; s < 200; ++s) {
    auto g = tw.random_element(3, 2, 900 + s);
    CHECK(tw.power(g, tw.order(g)).is_identity());
  }
}

TEST_CASE("commutator basics") {
  auto tw = make232();
  auto a = tw.random_element(3, 3, 1);
  CHECK(tw.commutator(a, a).is_identity());
  CHECK(tw.commutator(a, tw.identity(3)).is_identity());
}

TEST_CASE("conjugation fixes central elements and translates keys") {
  auto tw = make232();
  auto z = tw.center_generator(3);
  for (int s = 0; s < 30; ++s) {
    auto g = tw.random_element(3, 3, 400 + s);
    CHECK(tw.conjugate(z, g) == z);
    CHECK(tw.conjugate(g, tw.identity(3)) == g);
  }
  // key support of a pure level-3 vector moves by right multiplication
  auto y = tw.construct_noncentral(3);
  for (int s = 0; s < 30; ++s) {
    auto g = tw.random_element(2, 2, 500 + s);
    auto conj = tw.conjugate(y, g);
    const LevelVector* before = y.level(3);
    const LevelVector* after = conj.level(3);
    REQUIRE(before != nullptr);
    REQUIRE(after != nullptr);
    for (const auto& [key, pr] : before->pairs) {
      auto moved = tw.encode(tw.multiply(tw.decode(key), g));
      auto it = after->pairs.find(moved);
      REQUIRE(it != after->pairs.end());
      CHECK(it->second == pr);
    }
  }
}

TEST_CASE("semidirect action composes: conjugation by g then h equals by g*h") {
  auto tw = make232();
  for (int s = 0; s < 100; ++s) {
    auto a = tw.random_element(3, 2, 2000 + s);
    auto g = tw.random_element(2, 2, 3000 + s);
    auto h = tw.random_element(2, 2, 4000 + s);
    CHECK(tw.conjugate(tw.conjugate(a, g), h) == tw.conjugate(a, tw.multiply(g, h)));
  }
}

TEST_CASE("orders of the constructive elements") {
  auto tw23232 = make23232();
  CHECK(tw23232.order(tw23232.center_generator(1)) == 2);
  CHECK(tw23232.order(tw23232.center_generator(2)) == 3);
  CHECK(tw23232.order(tw23232.center_generator(3)) == 2);
  CHECK(tw23232.order(tw23232.center_generator(4)) == 3);
  CHECK(tw23232.order(tw23232.center_generator(5)) == 2);
  auto tw = make23();
  auto y = tw.construct_noncentral(2);
  CHECK(tw.order(y) == 3);
  // explicit powering confirms the recursive order computation
  auto p1 = tw.multiply(y, y);
  CHECK_FALSE(p1.is_identity());
  CHECK(tw.multiply(p1, y).is_identity());
}

TEST_CASE("center generator commutes with everything at its level") {
  auto tw = make232();
  for (int lvl = 1; lvl <= 3; ++lvl) {
    auto z = tw.center_generator(lvl);
    for (int s = 0; s < 170; ++s) {
      auto g = tw.random_element(lvl, 3, 7000 + 100 * lvl + s);
      CHECK(tw.commutator(z, g).is_identity());
    }
  }
}

TEST_CASE("construct_noncentral examples") {
  auto tw23 = make23();
  auto y2 = tw23.construct_noncentral(2);
  // support {identity:(2,0), r:(1,0)} with center 0
  const LevelVector* v = y2.level(2);
  REQUIRE(v != nullptr);
  CHECK(v->center == 0);
  REQUIRE(v->pairs.size() == 2);
  CHECK(v->pairs.at("e") == SymplecticPair{2, 0});
  CHECK(v->pairs.at(tw23.encode(tw23.level1(1))) == SymplecticPair{1, 0});
  CHECK(tw23.validate(y2));

  auto tw = make232();
  auto y3 = tw.construct_noncentral(3);
  CHECK(tw.order(y3) == 2);
  CHECK(tw.multiply(y3, y3).is_identity());
  CHECK(tw.validate(y3));
  const LevelVector* v3 = y3.level(3);
  REQUIRE(v3 != nullptr);
  CHECK(v3->pairs.size() == 2);
  for (const auto& [key, pr] : v3->pairs) CHECK(pr.y == 0);
}

TEST_CASE("embedding preserves products and orders") {
  auto tw = make232();
  for (int s = 0; s < 300; ++s) {
    auto a = tw.random_element(2, 2, 11000 + s);
    auto b = tw.random_element(2, 2, 12000 + s);
    auto ea = tw.embed(a, 3);
    auto eb = tw.embed(b, 3);
    CHECK(tw.multiply(ea, eb) == tw.embed(tw.multiply(a, b), 3));
    CHECK(tw.order(ea) == tw.order(a));
  }
  CHECK(tw.embed(tw.identity(1), 3).is_identity());
  auto deep = tw.random_element(3, 2, 1);
  if (deep.depth() == 3) {
    CHECK_THROWS_AS((void)tw.embed(deep, 2), tower::element_error);
  }
}

TEST_CASE("projection is a homomorphism and splits the top levels") {
  auto tw = make232();
  auto g = tw.level1(1);
  auto v2 = tw.construct_noncentral(2);
  auto mixed = tw.multiply(g, v2);
  CHECK(tw.project(mixed, 2) == g);
  for (int s = 0; s < 300; ++s) {
    auto a = tw.random_element(3, 2, 20000 + s);
    auto b = tw.random_element(3, 2, 21000 + s);
    for (int k = 2; k <= 3; ++k) {
      CHECK(tw.project(tw.multiply(a, b), k) ==
            tw.multiply(tw.project(a, k), tw.project(b, k)));
    }
  }
  CHECK(tw.project(tw.center_generator(3), 3).is_identity());
  CHECK_THROWS_AS((void)tw.project(tw.level1(1), 5), tower::element_error);  // beyond max_level+1
}

TEST_CASE("in_T agrees with projection triviality") {
  auto tw = make232();
  CHECK(tw.in_T(tw.center_generator(2), 2));
  CHECK_FALSE(tw.in_T(tw.level1(1), 2));
  for (int s = 0; s < 500; ++s) {
    auto a = tw.random_element(3, 2, 30000 + s);
    for (int k = 2; k <= a.depth() + 1; ++k) {
      CHECK(tw.in_T(a, k) == tw.project(a, k).is_identity());
    }
  }
}

TEST_CASE("every nontrivial element has a nontrivial finite-stage image") {
  auto tw = make23232();
  int found = 0;
  for (int s = 0; s < 500; ++s) {
    auto a = tw.random_element(4, 2, 40000 + s);
    if (a.is_identity()) continue;
    ++found;
    bool witnessed = false;
    for (int k = 2; k <= a.depth() + 1; ++k) {
      if (!tw.project(a, k).is_identity()) {
        witnessed = true;
        break;
      }
    }
    // lowest nontrivial level j: in_T(a, j) holds and the level-j part is
    // nontrivial, so the stage-j image of a is nontrivial
    int j = 1;
    if (a.exp1 == 0) {
      j = 2;
      while (a.level(j) == nullptr || a.level(j)->trivial()) ++j;
      CHECK(tw.in_T(a, j));
    }
    if (j == 1) {
      CHECK_FALSE(tw.project(a, 2).is_identity());
    } else {
      CHECK_FALSE(tw.project(a, j + 1).is_identity());
    }
    CHECK(witnessed);
  }
  CHECK(found > 400);
}

TEST_CASE("level vector validation") {
  auto tw = make23();
  LevelVector empty;
  empty.center = 2;
  CHECK(tw.level_vector_valid(empty, 2));
  LevelVector bad;
  bad.pairs["e"] = {1, 0};
  std::string why;
  CHECK_FALSE(tw.level_vector_valid(bad, 2, &why));
  CHECK(why.find("orbit") != std::string::npos);
  auto y = tw.construct_noncentral(2);
  CHECK(tw.level_vector_valid(*y.level(2), 2));
}

TEST_CASE("closure of valid vectors under product, inverse and conjugation") {
  auto tw = make232();
  for (int s = 0; s < 150; ++s) {
    auto a = tw.random_element(3, 3, 50000 + s);
    auto b = tw.random_element(3, 3, 51000 + s);
    auto g = tw.random_element(3, 3, 52000 + s);
    CHECK(tw.validate(tw.multiply(a, b)));
    CHECK(tw.validate(tw.inverse(a)));
    CHECK(tw.validate(tw.conjugate(a, g)));
  }
}

TEST_CASE("commutator of two level-i vectors is central, antisymmetric, bilinear") {
  auto tw = make23();
  auto pure_level2 = [&](std::uint64_t seed) {
    auto a = tw.random_element(2, 2, seed);
    GroupElement p;
    if (a.depth() == 2) p.upper.push_back(*a.level(2));
    return p;
  };
  for (int s = 0; s < 100; ++s) {
    auto pa = pure_level2(60000 + s);
    auto pb = pure_level2(61000 + s);
    auto c = tw.commutator(pa, pb);
    // central: only a center coordinate survives
    if (!c.is_identity()) {
      REQUIRE(c.depth() == 2);
      CHECK(c.level(2)->pairs.empty());
    }
    // antisymmetric
    auto cba = tw.commutator(pb, pa);
    CHECK(tw.multiply(c, cba).is_identity());
    // bilinear in the pair coordinates: [a^2, b] = [a, b]^2
    auto c2 = tw.commutator(tw.multiply(pa, pa), pb);
    CHECK(c2 == tw.multiply(c, c));
  }
}

TEST_CASE("associativity and group laws at level 3") {
  auto tw = make232();
  for (int s = 0; s < 400; ++s) {
    auto a = tw.random_element(3, 2, 70000 + s);
    auto b = tw.random_element(3, 2, 71000 + s);
    auto c = tw.random_element(3, 2, 72000 + s);
    CHECK(tw.multiply(tw.multiply(a, b), c) == tw.multiply(a, tw.multiply(b, c)));
  }
}

TEST_CASE("random elements are deterministic in the seed and valid") {
  auto tw = make23232();
  for (int s = 0; s < 30; ++s) {
    auto a = tw.random_element(4, 3, 123 + s);
    auto b = tw.random_element(4, 3, 123 + s);
    CHECK(a == b);
    CHECK(tw.validate(a));
  }
  CHECK(tw.random_element(3, 3, 1) != tw.random_element(3, 3, 2));
}

TEST_CASE("multiply and inverse round-trips at level 3 with wider support") {
  auto tw = make232();
  for (int s = 0; s < 250; ++s) {
    auto a = tw.random_element(3, 4, 80000 + s);
    auto b = tw.random_element(3, 4, 81000 + s);
    auto ab = tw.multiply(a, b);
    CHECK(tw.validate(ab));
    CHECK(tw.multiply(ab, tw.inverse(b)) == a);
    CHECK(tw.multiply(tw.inverse(a), ab) == b);
  }
}

TEST_CASE("canonical encoding round-trips and rejects junk") {
  auto tw = make23232();
  CHECK(tw.encode(tw.identity()) == "e");
  CHECK(tw.decode("e").is_identity());
  for (int s = 0; s < 300; ++s) {
    auto a = tw.random_element(5, 2, 90000 + s);
    auto enc = tw.encode(a);
    CHECK(tw.decode(enc) == a);
  }
  CHECK_THROWS_AS((void)tw.decode(""), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("g"), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("g1:0"), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("g1:2"), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("g2:c0"), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("g2:c0[1:e|1,0]"), tower::element_error);  // orbit sum
  CHECK_THROWS_AS((void)tw.decode("g2:c01"), tower::element_error);
  CHECK_THROWS_AS((void)tw.decode("e "), tower::element_error);
}

TEST_CASE("encoding is injective across all 54 elements of G_2 for primes (2,3)") {
  auto tw = make23();
  // close the generators under multiplication
  std::vector<GroupElement> gens = {tw.level1(1), tw.center_generator(2)};
  auto id = tw.identity();
  auto r = tw.level1(1);
  gens.push_back(level2(tw, {{id, {1, 0}}, {r, {2, 0}}}, 0));
  gens.push_back(level2(tw, {{id, {0, 1}}, {r, {0, 2}}}, 0));
  std::set<std::string> seen;
  std::vector<GroupElement> frontier = {tw.identity()};
  seen.insert(tw.encode(tw.identity()));
  while (!frontier.empty()) {
    std::vector<GroupElement> next;
    for (const auto& g : frontier) {
      for (const auto& h : gens) {
        auto gh = tw.multiply(g, h);
        if (seen.insert(tw.encode(gh)).second) next.push_back(gh);
      }
    }
    frontier = std::move(next);
  }
  CHECK(seen.size() == 54);
}

TEST_CASE("size accounting formulas") {
  auto tw23 = make23();
  CHECK(tw23.coordinate_dim(2).value() == 3);   // |D_2| = 27
  CHECK(tw23.group_size(2).value() == 54);
  auto tw32 = make32();
  CHECK(tw32.coordinate_dim(2).value() == 5);   // |D_2| = 32
  CHECK(tw32.group_size(2).value() == 96);
  auto tw232 = make232();
  CHECK(tw232.coordinate_dim(3).value() == 73);
  CHECK(tw232.group_size_formula(3) == "2 * 3^3 * 2^73");
  auto tw5 = make23232();
  auto d4 = tw5.coordinate_dim(4);
  REQUIRE(d4.has_value());
  mpz_class g3 = tw5.group_size(3).value();
  CHECK(*d4 == 1 + g3);
  CHECK_FALSE(tw5.coordinate_dim(5).has_value());
  CHECK(tw5.group_size_formula(5).find("where") != std::string::npos);
}

TEST_CASE("pretty rendering mentions all levels") {
  auto tw = make232();
  auto y = tw.construct_noncentral(3);
  auto text = tw.pretty(y);
  CHECK(text.find("level 3") != std::string::npos);
  CHECK(tw.pretty(tw.identity()) == "identity\n");
}
