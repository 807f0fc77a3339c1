#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tower/element.hpp"
#include "tower/report.hpp"

namespace tower::oracle {

struct oracle_error : std::runtime_error {
  explicit oracle_error(const std::string& what) : std::runtime_error(what) {}
};

/// Explicit finite group: labelled elements with a full multiplication table.
struct OracleGroup {
  int n = 0;
  int identity = 0;
  std::vector<int> mul;  // row-major n*n
  std::vector<int> inv;
  std::vector<std::string> label;

  int at(int a, int b) const { return mul[static_cast<std::size_t>(a) * n + b]; }
  std::int64_t order_of(int a) const;
  /// Full table check: closure bounds, identity, inverses, associativity.
  bool check_table(std::string* why = nullptr) const;
};

/// Membership bitset over element indices.
using Mask = std::vector<std::uint8_t>;

int mask_count(const Mask& m);
std::vector<int> mask_elements(const Mask& m);
bool mask_subset(const Mask& a, const Mask& b);
Mask trivial_subgroup(const OracleGroup& g);
Mask full_mask(const OracleGroup& g);

// -- subgroup machinery ---------------------------------------------------

Mask subgroup_closure(const OracleGroup& g, const std::vector<int>& gens);
Mask product_set(const OracleGroup& g, const Mask& a, const Mask& b);
Mask commutator_subgroup(const OracleGroup& g, const Mask& a, const Mask& b);
Mask derived_subgroup(const OracleGroup& g, const Mask& a);
Mask center(const OracleGroup& g);
Mask centralizer(const OracleGroup& g, const Mask& h);
/// Center of the subgroup h viewed as a group of its own.
Mask center_of_subgroup(const OracleGroup& g, const Mask& h);
Mask normal_closure(const OracleGroup& g, const std::vector<int>& seed);
bool is_subgroup(const OracleGroup& g, const Mask& h);
bool is_normal(const OracleGroup& g, const Mask& h);
bool is_abelian(const OracleGroup& g, const Mask& h);
/// All normal subgroups: normal closures of cyclic subgroups completed
/// under pairwise joins.  Deterministic order (size, then lexicographic).
std::vector<Mask> normal_subgroups(const OracleGroup& g, std::int64_t lattice_guard = 10000);

struct QuotientGroup {
  OracleGroup group;
  std::vector<int> proj;  // element index -> class index
  std::vector<int> rep;   // class index -> representative element
};
QuotientGroup quotient(const OracleGroup& g, const Mask& normal);

struct SubgroupCopy {
  OracleGroup group;
  std::vector<int> to_parent;
  std::vector<int> from_parent;  // -1 outside the subgroup
};
SubgroupCopy subgroup_as_group(const OracleGroup& g, const Mask& h);

// -- automorphisms ----------------------------------------------------------

struct Automorphism {
  std::vector<int> perm;
  std::int64_t order = 1;
};

/// Validates that perm respects the table and records its order.
Automorphism make_automorphism(const OracleGroup& g, std::vector<int> perm);
Automorphism identity_automorphism(const OracleGroup& g);
Automorphism compose(const OracleGroup& g, const Automorphism& a, const Automorphism& b);
/// Closure of the given maps under composition (a finite automorphism group).
std::vector<Automorphism> close_automorphisms(const OracleGroup& g,
                                              std::vector<Automorphism> gens,
                                              std::int64_t guard = 10000);
Mask fixed_points(const OracleGroup& g, const std::vector<Automorphism>& maps);
/// [H, A]: subgroup generated by h^-1 h^alpha over h in H, alpha in maps.
Mask commutator_with_automorphisms(const OracleGroup& g, const Mask& h,
                                   const std::vector<Automorphism>& maps);

// -- builders -----------------------------------------------------------------

OracleGroup cyclic_group(std::int64_t n);
/// Dihedral group of order 2n (n >= 2).
OracleGroup dihedral_group(std::int64_t n);
OracleGroup direct_power(const OracleGroup& g, int m, std::int64_t guard = 10000);
/// Cyclic coordinate rotation on direct_power(g, m).
Automorphism power_shift(const OracleGroup& base, int m, const OracleGroup& product);

enum class EsKind { heisenberg, quaternion, exponent_p2 };

/// Central product of m extra-special groups of order p^3 with all centers
/// identified, realized on coordinates (z, x_1, y_1, ..., x_m, y_m).
/// m = 1 gives the factor itself; identity has index 0 and the shared
/// central generator has index 1.
OracleGroup central_power(EsKind kind, std::int64_t p, int m, std::int64_t guard = 10000);
/// Rotation of the coordinate blocks of central_power (fixes the center).
Automorphism central_power_shift(EsKind kind, std::int64_t p, int m, const OracleGroup& g);

/// M wr K with base functions K -> M; the K part acts on the base by the
/// same index convention the tower's semidirect multiplication uses.
OracleGroup wreath_product(const OracleGroup& m, const OracleGroup& k,
                           std::int64_t guard = 10000);

// -- lemma checks ---------------------------------------------------------

/// [B, a] is normal in G, for metabelian G and abelian B >= G'.
/// Precondition violations throw; the verdict is the return value.
bool check_zuzu(const OracleGroup& g, const Mask& b, int a, std::string* why = nullptr);

/// For coprime alpha with G' <= C_G(alpha): [Z([G,alpha]), alpha] <= Z(G).
bool check_gran(const OracleGroup& g, const Automorphism& alpha, std::string* why = nullptr);

/// Direct sum of m copies of the cyclic group of order base_order (a power
/// of p) with rotation: index of [G, alpha] equals base_order.
bool check_elem(std::int64_t p, int m, std::int64_t base_order, std::string* why = nullptr);

struct ExtraelemFacts {
  std::int64_t group_order = 0;
  std::int64_t part_order = 0;  // |[G, alpha]|
};
/// Central product of m extra-special factors of order p^3 with rotation:
/// [G, alpha] is extra-special of index p^2.  Requires m >= 2, gcd(m,p)=1.
bool check_extraelem(std::int64_t p, int m, EsKind kind, std::string* why = nullptr,
                     ExtraelemFacts* facts = nullptr);

/// The four coprime-action identities for the automorphism group generated
/// by `gens` (item (1) ranges over all invariant normal subgroups).
Report check_coprime_identities(const OracleGroup& g, const std::vector<Automorphism>& gens,
                                std::int64_t lattice_guard = 10000);

// -- tower stages -----------------------------------------------------------

struct Stage2 {
  OracleGroup table;  // sorted by canonical label; both constructions agree
  Mask d_part;        // commutator part of the top level
  Mask g1_part;       // complement copy of the previous stage
  Mask r_minimal;     // derived subgroup of d_part
};

/// Builds stage 2 twice (from the wreath-product definition and by closing
/// tower generators) and requires the tables to agree exactly.
Stage2 enumerate_stage2(const Tower& tw, const Guards& guards = {});

/// level 1 or 2 only; throws when the stage exceeds the enumeration guard.
OracleGroup enumerate_tower_stage(const Tower& tw, int level, const Guards& guards = {});

/// Exhaustive per-pair comparison of the stage table against symbolic
/// products, plus elementwise order agreement.
Report crosscheck_stage(const Tower& tw, int level, const Guards& guards = {});

/// Claims about T_{ik} = D_i...D_k at an enumerable stage: normality,
/// complement, and [T_{ik}, R_{k-1}] = T_{ik}.
Report verify_lala(const Tower& tw, int i, int k, const Guards& guards = {});

/// The unique minimal nontrivial normal subgroup; throws unless it is
/// unique, central, and of the expected order.
Mask unique_minimal_normal(const OracleGroup& g, std::int64_t expected_order);

}  // namespace tower::oracle
