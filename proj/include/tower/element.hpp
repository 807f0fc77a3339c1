#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "tower/config.hpp"

namespace tower {

struct element_error : std::runtime_error {
  explicit element_error(const std::string& what) : std::runtime_error(what) {}
};

/// Coordinates of one wreath factor modulo its center, reduced mod the
/// level prime.
struct SymplecticPair {
  std::int64_t x = 0;
  std::int64_t y = 0;
  bool is_zero() const { return x == 0 && y == 0; }
  bool operator==(const SymplecticPair& o) const { return x == o.x && y == o.y; }
};

/// One level's datum of a tower element: a sparse map from canonical
/// encodings of lower-level elements to coordinate pairs, plus the shared
/// central coordinate.  Membership in the commutator part of the level
/// requires every translation orbit of keys to have componentwise pair sum
/// (0,0); see Tower::level_vector_valid.
struct LevelVector {
  std::map<std::string, SymplecticPair> pairs;
  std::int64_t center = 0;

  bool trivial() const { return pairs.empty() && center == 0; }
  bool operator==(const LevelVector& o) const {
    return center == o.center && pairs == o.pairs;
  }
};

/// An element of some stage of the tower, stored as its chain of level
/// data.  Canonical form: trailing trivial levels are trimmed, every pair
/// is nonzero, and all residues are reduced.
struct GroupElement {
  std::int64_t exp1 = 0;            // level-1 exponent
  std::vector<LevelVector> upper;   // upper[k] holds level k+2

  /// Highest nontrivial level (1 for the identity and for pure level-1
  /// elements).
  int depth() const {
    return upper.empty() ? 1 : static_cast<int>(upper.size()) + 1;
  }
  bool is_identity() const { return exp1 == 0 && upper.empty(); }
  const LevelVector* level(int k) const {
    if (k < 2 || k > depth()) return nullptr;
    return &upper[static_cast<std::size_t>(k) - 2];
  }
  bool operator==(const GroupElement& o) const {
    return exp1 == o.exp1 && upper == o.upper;
  }
  bool operator!=(const GroupElement& o) const { return !(*this == o); }
};

/// Exact arithmetic for the configured tower of groups.  All operations are
/// pure value transformations; elements are immutable plain data and safe to
/// share between threads.
class Tower {
 public:
  explicit Tower(TowerConfig cfg);

  const TowerConfig& config() const { return cfg_; }
  int levels() const { return cfg_.max_level; }
  std::int64_t prime(int level) const;

  // -- constructors ---------------------------------------------------------
  GroupElement identity(int level = 1) const;
  GroupElement level1(std::int64_t exponent) const;
  /// Generator of the unique minimal normal subgroup of stage `level`:
  /// the level-1 generator for level 1, otherwise the pure central
  /// coordinate at `level`.
  GroupElement center_generator(int level) const;
  /// A non-central element of order prime(level) in the identity-orbit
  /// factor of stage `level` (level >= 2), built as the commutator of a
  /// single-key coordinate vector with the central generator one level down.
  GroupElement construct_noncentral(int level) const;
  /// Deterministic pseudo-random valid element; orbit sums are corrected
  /// after assignment so the result always validates.
  GroupElement random_element(int level, int sparsity, std::uint64_t seed) const;

  // -- group operations -----------------------------------------------------
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement power(const GroupElement& a, std::int64_t n) const;
  /// [a, b] = a^-1 b^-1 a b.
  GroupElement commutator(const GroupElement& a, const GroupElement& b) const;
  /// g^-1 a g.
  GroupElement conjugate(const GroupElement& a, const GroupElement& g) const;
  std::int64_t order(const GroupElement& a) const;

  // -- structure maps -------------------------------------------------------
  /// Same element seen in the stage `target_level` (values are unchanged;
  /// only the level bound is checked).
  GroupElement embed(const GroupElement& a, int target_level) const;
  /// Drops all levels >= k; the retraction onto stage k-1 with kernel the
  /// elements whose levels below k are trivial.  2 <= k <= depth+1.
  GroupElement project(const GroupElement& a, int k) const;
  /// True iff levels 1..k-1 of a are all trivial (k >= 2).
  bool in_T(const GroupElement& a, int k) const;

  // -- validation -----------------------------------------------------------
  bool level_vector_valid(const LevelVector& v, int level, std::string* why = nullptr) const;
  bool validate(const GroupElement& a, std::string* why = nullptr) const;

  // -- encoding -------------------------------------------------------------
  /// Canonical printable encoding: levels ascending, keys sorted, zero
  /// entries omitted, nested keys length-prefixed.  Injective on canonical
  /// elements; decode rejects anything non-canonical.
  std::string encode(const GroupElement& a) const;
  GroupElement decode(std::string_view text) const;
  /// Human-readable nested rendering.
  std::string pretty(const GroupElement& a) const;

  // -- key/orbit helpers (keys of a level-k vector are stage k-1 elements) --
  /// Orbit of `key` under right translation by the central generator one
  /// level down: encodings of key * r^s for s = 0..p_{level-1}-1.
  std::vector<std::string> key_orbit(const std::string& key, int level) const;
  /// Lexicographically least member of the orbit.
  std::string orbit_representative(const std::string& key, int level) const;

  // -- size accounting ------------------------------------------------------
  /// Free-coordinate count of the level-`level` commutator part:
  /// 1 + (2 p_{level-1} - 2) |G_{level-1}| / p_{level-1}.  Empty when the
  /// preceding stage size is itself too large to expand.
  std::optional<mpz_class> coordinate_dim(int level) const;
  /// |G_level| as an exact integer when expandable.
  std::optional<mpz_class> group_size(int level) const;
  /// Prime-power formula for |G_level|, e.g. "2 * 3^3 * 2^73".
  std::string group_size_formula(int level) const;

 private:
  GroupElement with_top(GroupElement lower, int level, LevelVector v) const;
  LevelVector vec_multiply(const LevelVector& a, const LevelVector& b, std::int64_t p) const;
  LevelVector vec_inverse(const LevelVector& a, std::int64_t p) const;
  LevelVector vec_translate(const LevelVector& v, const GroupElement& g) const;
  void check_level(int level) const;

  TowerConfig cfg_;
};

}  // namespace tower
