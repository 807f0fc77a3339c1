#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tower/oracle.hpp"

using namespace tower;
using namespace tower::oracle;

namespace {
Tower make23() { return Tower(TowerConfig::make({2, 3})); }
Tower make32() { return Tower(TowerConfig::make({3, 2})); }
}  // namespace

TEST_CASE("cyclic and dihedral tables are groups") {
  for (int n : {1, 2, 5, 6}) {
    auto g = cyclic_group(n);
    std::string why;
    CHECK(g.check_table(&why));
  }
  for (int n : {2, 3, 4, 7}) {
    auto g = dihedral_group(n);
    std::string why;
    CHECK_MESSAGE(g.check_table(&why), why);
    CHECK(g.n == 2 * n);
    CHECK(g.order_of(2) == n);  // the rotation r^1
  }
}

TEST_CASE("extra-special factor tables") {
  // order p^3 with derived subgroup = center of order p
  for (auto [kind, p] : std::vector<std::pair<EsKind, std::int64_t>>{
           {EsKind::heisenberg, 2},
           {EsKind::heisenberg, 3},
           {EsKind::heisenberg, 5},
           {EsKind::quaternion, 2},
           {EsKind::exponent_p2, 3},
       }) {
    auto g = central_power(kind, p, 1);
    std::string why;
    REQUIRE_MESSAGE(g.check_table(&why), why);
    CHECK(g.n == p * p * p);
    auto derived = derived_subgroup(g, full_mask(g));
    auto z = center(g);
    CHECK(derived == z);
    CHECK(mask_count(z) == p);
  }
  // the p = 2 kinds are distinguished by their involution count
  auto d8 = central_power(EsKind::heisenberg, 2, 1);
  auto q8 = central_power(EsKind::quaternion, 2, 1);
  auto involutions = [](const OracleGroup& g) {
    int k = 0;
    for (int i = 0; i < g.n; ++i) k += g.order_of(i) == 2;
    return k;
  };
  CHECK(involutions(d8) == 5);
  CHECK(involutions(q8) == 1);
  // exponent-p^2 kind really has order-p^2 elements; the exponent-p kind not
  auto h3 = central_power(EsKind::heisenberg, 3, 1);
  auto e9 = central_power(EsKind::exponent_p2, 3, 1);
  auto max_order = [](const OracleGroup& g) {
    std::int64_t m = 1;
    for (int i = 0; i < g.n; ++i) m = std::max(m, g.order_of(i));
    return m;
  };
  CHECK(max_order(h3) == 3);
  CHECK(max_order(e9) == 9);
}

TEST_CASE("central products identify the centers") {
  auto g = central_power(EsKind::heisenberg, 3, 2);
  std::string why;
  REQUIRE_MESSAGE(g.check_table(&why), why);
  CHECK(g.n == 243);  // 3^5
  CHECK(mask_count(center(g)) == 3);
  auto shift = central_power_shift(EsKind::heisenberg, 3, 2, g);
  CHECK(shift.order == 2);
}

TEST_CASE("wreath product shape") {
  auto m = central_power(EsKind::heisenberg, 3, 1);
  auto k = cyclic_group(2);
  auto w = wreath_product(m, k);
  CHECK(w.n == 27 * 27 * 2);
  CHECK(w.order_of(w.identity) == 1);
  CHECK_THROWS_AS((void)wreath_product(m, cyclic_group(3), 1000), oracle_error);
}

TEST_CASE("subgroup machinery on a small group") {
  auto g = dihedral_group(4);  // order 8
  auto rot = subgroup_closure(g, {2});
  CHECK(mask_count(rot) == 4);
  CHECK(is_normal(g, rot));
  CHECK(is_abelian(g, rot));
  CHECK_FALSE(is_abelian(g, full_mask(g)));
  auto derived = derived_subgroup(g, full_mask(g));
  CHECK(mask_count(derived) == 2);
  CHECK(mask_subset(derived, rot));
  auto z = center(g);
  CHECK(mask_count(z) == 2);
  auto q = quotient(g, rot);
  CHECK(q.group.n == 2);
  auto s = subgroup_as_group(g, rot);
  CHECK(s.group.n == 4);
  CHECK(s.group.order_of(s.from_parent[2]) == 4);
}

TEST_CASE("normal subgroup lattice") {
  auto c2 = cyclic_group(2);
  CHECK(normal_subgroups(c2).size() == 2);
  auto v4 = direct_power(cyclic_group(2), 2);
  CHECK(normal_subgroups(v4).size() == 5);  // abelian: every subgroup
  auto d4 = dihedral_group(4);
  auto all = normal_subgroups(d4);
  CHECK(all.size() == 6);  // 1, Z, three index-2, G
  for (const auto& n : all) CHECK(is_normal(d4, n));
}

TEST_CASE("unique minimal normal subgroup detection") {
  auto c2 = cyclic_group(2);
  auto r1 = unique_minimal_normal(c2, 2);
  CHECK(mask_count(r1) == 2);
  auto v4 = direct_power(cyclic_group(2), 2);
  CHECK_THROWS_AS((void)unique_minimal_normal(v4, 2), oracle_error);  // three minimal ones
}

TEST_CASE("automorphism validation and closure") {
  auto c3 = cyclic_group(3);
  auto inv_map = make_automorphism(c3, {0, 2, 1});
  CHECK(inv_map.order == 2);
  CHECK_THROWS_AS((void)make_automorphism(c3, {1, 0, 2}), oracle_error);
  auto closed = close_automorphisms(c3, {inv_map});
  CHECK(closed.size() == 2);
}

TEST_CASE("coprime identities on small instances") {
  // inversion on the cyclic group of order 3: [G,A] = G, C_G(A) = 1
  auto c3 = cyclic_group(3);
  auto inv_map = make_automorphism(c3, {0, 2, 1});
  auto rep = check_coprime_identities(c3, {inv_map});
  CHECK(rep.ok());
  // trivial A: everything collapses to G = G
  auto rep2 = check_coprime_identities(c3, {});
  CHECK(rep2.ok());
  // shift on Z_3 x Z_3 with |A| = 2... coprime, and on Z_2^2 with |A| = 2 not
  auto v9 = direct_power(cyclic_group(3), 2);
  auto rep3 = check_coprime_identities(v9, {power_shift(cyclic_group(3), 2, v9)});
  CHECK(rep3.ok());
  auto v4 = direct_power(cyclic_group(2), 2);
  CHECK_THROWS_AS((void)check_coprime_identities(v4, {power_shift(cyclic_group(2), 2, v4)}),
                  oracle_error);
  // an extra-special instance
  auto es = central_power(EsKind::heisenberg, 3, 2);
  auto rep4 = check_coprime_identities(es, {central_power_shift(EsKind::heisenberg, 3, 2, es)});
  CHECK(rep4.ok());
}

TEST_CASE("zuzu on the dihedral group of order 8") {
  auto d4 = dihedral_group(4);
  auto rot = subgroup_closure(d4, {2});
  // a a reflection
  CHECK(check_zuzu(d4, rot, 1));
  // a central
  auto zgen = mask_elements(center(d4));
  for (int zi : zgen) CHECK(check_zuzu(d4, rot, zi));
  // a inside B
  CHECK(check_zuzu(d4, rot, 2));
  // precondition violations are rejected, not silently passed
  Mask refl(d4.n, 0);
  refl[d4.identity] = 1;
  refl[1] = 1;  // a reflection: subgroup of order 2 missing G'
  CHECK_THROWS_AS((void)check_zuzu(d4, refl, 2), oracle_error);
  CHECK_THROWS_AS((void)check_zuzu(d4, full_mask(d4), 2), oracle_error);  // B nonabelian
  // a non-metabelian ambient group is rejected
  auto w = wreath_product(central_power(EsKind::heisenberg, 2, 1), cyclic_group(2));
  CHECK_THROWS_AS((void)check_zuzu(w, trivial_subgroup(w), 0), oracle_error);
}

TEST_CASE("gran on central products and abelian groups") {
  // identity automorphism: [Z, alpha] = 1
  auto c5 = cyclic_group(5);
  CHECK(check_gran(c5, identity_automorphism(c5)));
  // the swap on a central product of two Heisenberg groups of order 27
  auto es = central_power(EsKind::heisenberg, 3, 2);
  auto swap = central_power_shift(EsKind::heisenberg, 3, 2, es);
  CHECK(check_gran(es, swap));
  // inversion on an abelian group of odd order
  auto c9 = cyclic_group(9);
  std::vector<int> perm(9);
  for (int i = 0; i < 9; ++i) perm[i] = c9.inv[i];
  CHECK(check_gran(c9, make_automorphism(c9, perm)));
  // coprimality violation: an inner automorphism of order 2 on a 2-group
  auto d4 = dihedral_group(4);
  std::vector<int> conj(d4.n);
  for (int i = 0; i < d4.n; ++i) conj[i] = d4.at(d4.at(d4.inv[1], i), 1);
  CHECK_THROWS_AS((void)check_gran(d4, make_automorphism(d4, conj)), oracle_error);
}

TEST_CASE("elem index computation") {
  CHECK(check_elem(3, 2, 3));   // Z_3 + Z_3 with the swap: index 3
  CHECK(check_elem(2, 3, 2));   // three copies of Z_2: index 2
  CHECK(check_elem(5, 1, 5));   // degenerate m = 1: index = base order
  CHECK(check_elem(3, 2, 9));   // base Z_9
  CHECK(check_elem(2, 5, 4));   // base Z_4, five copies
  CHECK_THROWS_AS((void)check_elem(3, 3, 3), oracle_error);   // gcd(m, base) != 1
  CHECK_THROWS_AS((void)check_elem(3, 2, 6), oracle_error);   // base not a power of p
}

TEST_CASE("extraelem on the admissible desk-scale instances") {
  ExtraelemFacts facts;
  CHECK(check_extraelem(3, 2, EsKind::heisenberg, nullptr, &facts));
  CHECK(facts.group_order == 243);
  CHECK(facts.part_order == 27);
  CHECK(check_extraelem(2, 3, EsKind::heisenberg, nullptr, &facts));
  CHECK(facts.group_order == 128);  // 2^7
  CHECK(facts.part_order == 32);    // 2^5
  CHECK(check_extraelem(2, 3, EsKind::quaternion, nullptr, &facts));
  CHECK(facts.group_order == 128);
  CHECK(facts.part_order == 32);
  CHECK(check_extraelem(3, 2, EsKind::exponent_p2));
  CHECK(check_extraelem(5, 2, EsKind::heisenberg));
  CHECK(check_extraelem(2, 5, EsKind::quaternion));
  CHECK_THROWS_AS((void)check_extraelem(3, 3, EsKind::heisenberg), oracle_error);
  CHECK_THROWS_AS((void)check_extraelem(2, 1, EsKind::heisenberg), oracle_error);
}

TEST_CASE("stage 2 for primes (2,3): both constructions give the 54-element table") {
  auto tw = make23();
  auto st = enumerate_stage2(tw);
  CHECK(st.table.n == 54);
  CHECK(mask_count(st.d_part) == 27);
  CHECK(mask_count(st.g1_part) == 2);
  CHECK(mask_count(st.r_minimal) == 3);
  CHECK(is_normal(st.table, st.d_part));
  // D_2 is extra-special: derived = center, of order 3
  auto dd = derived_subgroup(st.table, st.d_part);
  CHECK(dd == st.r_minimal);
  CHECK(dd == center_of_subgroup(st.table, st.d_part));
  // the minimal normal subgroup matches and is central
  auto r = unique_minimal_normal(st.table, 3);
  CHECK(r == st.r_minimal);
  // every nontrivial normal subgroup contains it
  for (const auto& n : normal_subgroups(st.table)) {
    if (mask_count(n) > 1) CHECK(mask_subset(r, n));
  }
}

TEST_CASE("stage 2 for primes (3,2): 96 elements with a 32-element top part") {
  auto tw = make32();
  auto st = enumerate_stage2(tw);
  CHECK(st.table.n == 96);
  CHECK(mask_count(st.d_part) == 32);
  CHECK(mask_count(st.g1_part) == 3);
  CHECK(mask_count(st.r_minimal) == 2);
  auto dd = derived_subgroup(st.table, st.d_part);
  CHECK(dd == st.r_minimal);
  CHECK(dd == center_of_subgroup(st.table, st.d_part));
  auto r = unique_minimal_normal(st.table, 2);
  CHECK(r == st.r_minimal);
  for (const auto& n : normal_subgroups(st.table)) {
    if (mask_count(n) > 1) CHECK(mask_subset(r, n));
  }
}

TEST_CASE("stage 1 enumeration is the cyclic group of the first prime") {
  auto tw = make23();
  auto g1 = enumerate_tower_stage(tw, 1);
  CHECK(g1.n == 2);
  CHECK(g1.order_of(1 - g1.identity) == 2);
  CHECK_THROWS_AS((void)enumerate_tower_stage(tw, 3), oracle_error);
}

TEST_CASE("stage crosschecks pass exhaustively") {
  for (auto tw : {make23(), make32()}) {
    auto rep1 = crosscheck_stage(tw, 1);
    CHECK(rep1.ok());
    auto rep2 = crosscheck_stage(tw, 2);
    CHECK(rep2.ok());
  }
}

TEST_CASE("lala claims at the enumerable stage") {
  for (auto tw : {make23(), make32()}) {
    auto rep = verify_lala(tw, 2, 2);
    CHECK(rep.ok());
    CHECK(rep.lines.size() == 3);
  }
  auto rep1 = verify_lala(make23(), 1, 2);
  CHECK(rep1.ok());
  CHECK_THROWS_AS((void)verify_lala(make23(), 3, 2), oracle_error);
}

TEST_CASE("size guard rejects oversized stages") {
  auto tw = Tower(TowerConfig::make({2, 5}));
  Guards tight;
  tight.enumeration = 100;
  CHECK_THROWS_AS((void)enumerate_stage2(tw, tight), oracle_error);
}
