#include "tower/element.hpp"

#include <algorithm>
#include <cassert>
#include <random>
#include <sstream>

namespace tower {

namespace {

std::int64_t mod_reduce(std::int64_t v, std::int64_t p) {
  std::int64_t r = v % p;
  if (r < 0) r += p;
  return r;
}

void trim(GroupElement& a) {
  while (!a.upper.empty() && a.upper.back().trivial()) a.upper.pop_back();
}

// Copy of a without its level-d datum (no-op when depth(a) < d).
GroupElement drop_top(const GroupElement& a, int d) {
  GroupElement r = a;
  if (d >= 2 && r.depth() == d) {
    r.upper.pop_back();
    trim(r);
  }
  return r;
}

}  // namespace

Tower::Tower(TowerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::int64_t Tower::prime(int level) const {
  check_level(level);
  return cfg_.primes[static_cast<std::size_t>(level) - 1];
}

void Tower::check_level(int level) const {
  if (level < 1 || level > cfg_.max_level) {
    throw element_error("level " + std::to_string(level) + " outside configured range 1.." +
                        std::to_string(cfg_.max_level));
  }
}

GroupElement Tower::identity(int level) const {
  check_level(level);
  return GroupElement{};
}

GroupElement Tower::level1(std::int64_t exponent) const {
  GroupElement a;
  a.exp1 = mod_reduce(exponent, prime(1));
  return a;
}

GroupElement Tower::center_generator(int level) const {
  check_level(level);
  if (level == 1) return level1(1);
  GroupElement a;
  LevelVector v;
  v.center = 1;
  return with_top(std::move(a), level, std::move(v));
}

GroupElement Tower::with_top(GroupElement lower, int level, LevelVector v) const {
  if (v.trivial()) return lower;
  assert(lower.depth() < level);
  lower.upper.resize(static_cast<std::size_t>(level) - 1);
  lower.upper[static_cast<std::size_t>(level) - 2] = std::move(v);
  return lower;
}

LevelVector Tower::vec_multiply(const LevelVector& a, const LevelVector& b,
                                std::int64_t p) const {
  LevelVector r = a;
  std::int64_t cocycle = 0;
  for (const auto& [key, pb] : b.pairs) {
    auto it = r.pairs.find(key);
    if (it == r.pairs.end()) {
      if (!pb.is_zero()) r.pairs[key] = pb;
    } else {
      cocycle = mod_reduce(cocycle + it->second.y * pb.x, p);
      it->second.x = mod_reduce(it->second.x + pb.x, p);
      it->second.y = mod_reduce(it->second.y + pb.y, p);
      if (it->second.is_zero()) r.pairs.erase(it);
    }
  }
  r.center = mod_reduce(a.center + b.center + cocycle, p);
  return r;
}

LevelVector Tower::vec_inverse(const LevelVector& a, std::int64_t p) const {
  LevelVector r;
  std::int64_t self_cocycle = 0;
  for (const auto& [key, pr] : a.pairs) {
    self_cocycle = mod_reduce(self_cocycle + pr.y * pr.x, p);
    r.pairs[key] = SymplecticPair{mod_reduce(-pr.x, p), mod_reduce(-pr.y, p)};
  }
  r.center = mod_reduce(self_cocycle - a.center, p);
  return r;
}

LevelVector Tower::vec_translate(const LevelVector& v, const GroupElement& g) const {
  if (g.is_identity()) return v;
  LevelVector r;
  r.center = v.center;
  for (const auto& [key, pr] : v.pairs) {
    r.pairs[encode(multiply(decode(key), g))] = pr;
  }
  return r;
}

GroupElement Tower::multiply(const GroupElement& a, const GroupElement& b) const {
  int d = std::max(a.depth(), b.depth());
  if (d > cfg_.max_level) throw element_error("element deeper than configured tower");
  if (d == 1) return level1(a.exp1 + b.exp1);
  GroupElement ga = drop_top(a, d);
  GroupElement gb = drop_top(b, d);
  const LevelVector* va = a.level(d);
  const LevelVector* vb = b.level(d);
  LevelVector top;
  if (vb != nullptr) {
    // (d, g)(d', g') = (d * phi_g(d'), g g') with phi_g moving stored keys
    // j -> j g^-1.
    LevelVector moved = ga.is_identity() ? *vb : vec_translate(*vb, inverse(ga));
    top = (va != nullptr) ? vec_multiply(*va, moved, prime(d)) : std::move(moved);
  } else if (va != nullptr) {
    top = *va;
  }
  return with_top(multiply(ga, gb), d, std::move(top));
}

GroupElement Tower::inverse(const GroupElement& a) const {
  int d = a.depth();
  if (d == 1) return level1(-a.exp1);
  GroupElement ga = drop_top(a, d);
  LevelVector vi = vec_inverse(*a.level(d), prime(d));
  if (!ga.is_identity()) vi = vec_translate(vi, ga);
  return with_top(inverse(ga), d, std::move(vi));
}

GroupElement Tower::power(const GroupElement& a, std::int64_t n) const {
  if (n < 0) return power(inverse(a), -n);
  GroupElement acc = identity();
  GroupElement base = a;
  while (n > 0) {
    if (n & 1) acc = multiply(acc, base);
    n >>= 1;
    if (n > 0) base = multiply(base, base);
  }
  return acc;
}

GroupElement Tower::commutator(const GroupElement& a, const GroupElement& b) const {
  return multiply(multiply(inverse(a), inverse(b)), multiply(a, b));
}

GroupElement Tower::conjugate(const GroupElement& a, const GroupElement& g) const {
  return multiply(multiply(inverse(g), a), g);
}

std::int64_t Tower::order(const GroupElement& a) const {
  int d = a.depth();
  if (d == 1) return a.exp1 == 0 ? 1 : prime(1);
  std::int64_t n0 = order(drop_top(a, d));
  GroupElement t = power(a, n0);
  if (t.is_identity()) return n0;
  assert(drop_top(t, d).is_identity());
  const LevelVector& v = *t.level(d);
  std::int64_t q = prime(d);
  std::int64_t m = q;
  if (q == 2 && !v.pairs.empty()) {
    // the square of (u, z) is the pure center c(u, u)
    std::int64_t c = 0;
    for (const auto& [key, pr] : v.pairs) c = mod_reduce(c + pr.x * pr.y, q);
    if (c != 0) m = q * q;
  }
  return n0 * m;
}

GroupElement Tower::embed(const GroupElement& a, int target_level) const {
  check_level(target_level);
  if (a.depth() > target_level) {
    throw element_error("embed: target level " + std::to_string(target_level) +
                        " below element depth " + std::to_string(a.depth()));
  }
  return a;
}

GroupElement Tower::project(const GroupElement& a, int k) const {
  if (k < 2 || k > cfg_.max_level + 1) {
    throw element_error("project: k = " + std::to_string(k) + " outside 2..max_level+1");
  }
  GroupElement r;
  r.exp1 = a.exp1;
  for (int lvl = 2; lvl < k && lvl <= a.depth(); ++lvl) {
    r.upper.push_back(a.upper[static_cast<std::size_t>(lvl) - 2]);
  }
  trim(r);
  return r;
}

bool Tower::in_T(const GroupElement& a, int k) const {
  if (k < 2) throw element_error("in_T: k must be >= 2");
  if (a.exp1 != 0) return false;
  for (int lvl = 2; lvl < k && lvl <= a.depth(); ++lvl) {
    if (!a.upper[static_cast<std::size_t>(lvl) - 2].trivial()) return false;
  }
  return true;
}

std::vector<std::string> Tower::key_orbit(const std::string& key, int level) const {
  if (level < 2) throw element_error("key_orbit: level must be >= 2");
  check_level(level);
  std::int64_t span = prime(level - 1);
  GroupElement r = center_generator(level - 1);
  GroupElement cur = decode(key);
  std::vector<std::string> orbit;
  orbit.reserve(static_cast<std::size_t>(span));
  for (std::int64_t s = 0; s < span; ++s) {
    orbit.push_back(encode(cur));
    cur = multiply(cur, r);
  }
  return orbit;
}

std::string Tower::orbit_representative(const std::string& key, int level) const {
  auto orbit = key_orbit(key, level);
  return *std::min_element(orbit.begin(), orbit.end());
}

bool Tower::level_vector_valid(const LevelVector& v, int level, std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = "level " + std::to_string(level) + ": " + msg;
    return false;
  };
  if (level < 2 || level > cfg_.max_level) return fail("level outside 2..max");
  std::int64_t p = prime(level);
  if (v.center < 0 || v.center >= p) return fail("center residue out of range");
  for (const auto& [key, pr] : v.pairs) {
    if (pr.is_zero()) return fail("stored zero pair at key " + key);
    if (pr.x < 0 || pr.x >= p || pr.y < 0 || pr.y >= p) {
      return fail("pair residue out of range at key " + key);
    }
    GroupElement k;
    try {
      k = decode(key);
    } catch (const element_error& e) {
      return fail("malformed key " + key + ": " + e.what());
    }
    if (k.depth() > level - 1) return fail("key " + key + " too deep for level");
  }
  // orbit sums: every translation orbit must add to (0,0)
  std::map<std::string, bool> seen;
  for (const auto& [key, pr] : v.pairs) {
    if (seen.count(key) != 0) continue;
    std::int64_t sx = 0;
    std::int64_t sy = 0;
    for (const auto& member : key_orbit(key, level)) {
      seen[member] = true;
      auto it = v.pairs.find(member);
      if (it != v.pairs.end()) {
        sx = mod_reduce(sx + it->second.x, p);
        sy = mod_reduce(sy + it->second.y, p);
      }
    }
    if (sx != 0 || sy != 0) return fail("orbit of " + key + " has nonzero pair sum");
  }
  return true;
}

bool Tower::validate(const GroupElement& a, std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  if (a.exp1 < 0 || a.exp1 >= prime(1)) return fail("level-1 exponent out of range");
  if (a.depth() > cfg_.max_level) return fail("element deeper than configured tower");
  if (!a.upper.empty() && a.upper.back().trivial()) return fail("trailing trivial level");
  for (int k = 2; k <= a.depth(); ++k) {
    const LevelVector& v = a.upper[static_cast<std::size_t>(k) - 2];
    if (v.trivial()) continue;
    if (!level_vector_valid(v, k, why)) return false;
  }
  return true;
}

// -- canonical encoding -------------------------------------------------------

std::string Tower::encode(const GroupElement& a) const {
  if (a.is_identity()) return "e";
  std::string s = "g";
  bool first = true;
  auto sep = [&] {
    if (!first) s += '/';
    first = false;
  };
  if (a.exp1 != 0) {
    sep();
    s += "1:" + std::to_string(a.exp1);
  }
  for (int k = 2; k <= a.depth(); ++k) {
    const LevelVector& v = a.upper[static_cast<std::size_t>(k) - 2];
    if (v.trivial()) continue;
    sep();
    s += std::to_string(k) + ":c" + std::to_string(v.center);
    for (const auto& [key, pr] : v.pairs) {
      s += '[';
      s += std::to_string(key.size());
      s += ':';
      s += key;
      s += '|';
      s += std::to_string(pr.x);
      s += ',';
      s += std::to_string(pr.y);
      s += ']';
    }
  }
  return s;
}

namespace {

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  void expect(char c) {
    if (eof() || s[pos] != c) {
      throw element_error("decode: expected '" + std::string(1, c) + "' at offset " +
                          std::to_string(pos));
    }
    ++pos;
  }
  std::int64_t integer() {
    if (eof() || !std::isdigit(static_cast<unsigned char>(s[pos]))) {
      throw element_error("decode: expected digit at offset " + std::to_string(pos));
    }
    std::size_t start = pos;
    while (!eof() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    std::string_view tok = s.substr(start, pos - start);
    if (tok.size() > 1 && tok[0] == '0') {
      throw element_error("decode: leading zero at offset " + std::to_string(start));
    }
    if (tok.size() > 18) throw element_error("decode: integer too long");
    std::int64_t v = 0;
    for (char c : tok) v = v * 10 + (c - '0');
    return v;
  }
  std::string take(std::size_t n) {
    if (pos + n > s.size()) throw element_error("decode: key length overruns input");
    std::string out(s.substr(pos, n));
    pos += n;
    return out;
  }
};

}  // namespace

GroupElement Tower::decode(std::string_view text) const {
  if (text == "e") return GroupElement{};
  Cursor c{text};
  c.expect('g');
  if (c.eof()) throw element_error("decode: empty element body");
  GroupElement a;
  int last_level = 0;
  while (true) {
    std::int64_t lvl64 = c.integer();
    c.expect(':');
    int lvl = static_cast<int>(lvl64);
    if (lvl <= last_level) throw element_error("decode: levels not strictly ascending");
    if (lvl > cfg_.max_level) throw element_error("decode: level beyond configured tower");
    if (lvl == 1) {
      std::int64_t e = c.integer();
      if (e <= 0 || e >= prime(1)) throw element_error("decode: level-1 exponent out of range");
      a.exp1 = e;
    } else {
      std::int64_t p = prime(lvl);
      c.expect('c');
      std::int64_t center = c.integer();
      if (center >= p) throw element_error("decode: center out of range");
      LevelVector v;
      v.center = center;
      std::string prev_key;
      while (!c.eof() && c.peek() == '[') {
        c.expect('[');
        std::int64_t klen = c.integer();
        c.expect(':');
        std::string key = c.take(static_cast<std::size_t>(klen));
        c.expect('|');
        std::int64_t x = c.integer();
        c.expect(',');
        std::int64_t y = c.integer();
        c.expect(']');
        if (x >= p || y >= p) throw element_error("decode: pair residue out of range");
        if (x == 0 && y == 0) throw element_error("decode: zero pair stored");
        if (key <= prev_key) throw element_error("decode: keys not strictly sorted");
        v.pairs[key] = SymplecticPair{x, y};
        prev_key = key;
      }
      if (v.trivial()) throw element_error("decode: trivial level present");
      a.upper.resize(static_cast<std::size_t>(lvl) - 1);
      a.upper[static_cast<std::size_t>(lvl) - 2] = std::move(v);
    }
    last_level = lvl;
    if (c.eof()) break;
    c.expect('/');
    if (c.eof()) throw element_error("decode: dangling separator");
  }
  std::string why;
  if (!validate(a, &why)) throw element_error("decode: invalid element: " + why);
  if (encode(a) != text) throw element_error("decode: non-canonical encoding");
  return a;
}

std::string Tower::pretty(const GroupElement& a) const {
  if (a.is_identity()) return "identity\n";
  std::ostringstream out;
  if (a.exp1 != 0) out << "level 1: exponent " << a.exp1 << "\n";
  for (int k = 2; k <= a.depth(); ++k) {
    const LevelVector& v = a.upper[static_cast<std::size_t>(k) - 2];
    if (v.trivial()) continue;
    out << "level " << k << ": center " << v.center << "\n";
    for (const auto& [key, pr] : v.pairs) {
      out << "  " << key << " -> (" << pr.x << "," << pr.y << ")\n";
    }
  }
  return out.str();
}

// -- constructive elements ----------------------------------------------------

GroupElement Tower::construct_noncentral(int level) const {
  if (level < 2) throw element_error("construct_noncentral: level must be >= 2");
  check_level(level);
  std::int64_t q = prime(level);
  // a: single coordinate in the identity-keyed factor; r: central generator
  // one level down.  y = [a, r] lands in the commutator part with support
  // {identity, r}.
  LevelVector va;
  va.pairs[encode(identity())] = SymplecticPair{1, 0};
  GroupElement a = with_top(identity(), level, std::move(va));
  GroupElement r = center_generator(level - 1);
  GroupElement y = commutator(a, r);
  for (std::int64_t c = 0; c < q; ++c) {
    GroupElement cand = (c == 0) ? y : multiply(y, power(center_generator(level), c));
    const LevelVector* top = cand.level(level);
    bool noncentral = top != nullptr && !top->pairs.empty();
    if (noncentral && order(cand) == q) {
      std::string why;
      if (!validate(cand, &why)) {
        throw element_error("construct_noncentral: candidate invalid: " + why);
      }
      return cand;
    }
  }
  throw element_error("construct_noncentral: no non-central candidate of order " +
                      std::to_string(q) + " at level " + std::to_string(level));
}

GroupElement Tower::random_element(int level, int sparsity, std::uint64_t seed) const {
  check_level(level);
  std::mt19937_64 rng(seed);
  // local recursion so nested key draws share the generator stream
  auto gen = [&](auto&& self, int lvl) -> GroupElement {
    GroupElement a;
    a.exp1 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(prime(1)));
    for (int k = 2; k <= lvl; ++k) {
      std::int64_t p = prime(k);
      LevelVector v;
      int nkeys = sparsity > 0 ? static_cast<int>(rng() % static_cast<std::uint64_t>(sparsity + 1)) : 0;
      for (int t = 0; t < nkeys; ++t) {
        GroupElement key = self(self, k - 1);
        SymplecticPair pr{static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p)),
                          static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p))};
        v.pairs[encode(key)] = pr;
      }
      v.center = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(p));
      // repair each touched orbit by adjusting its representative
      std::map<std::string, bool> seen;
      std::vector<std::string> keys;
      keys.reserve(v.pairs.size());
      for (const auto& [key, pr] : v.pairs) keys.push_back(key);
      for (const auto& key : keys) {
        if (seen.count(key) != 0) continue;
        auto orbit = key_orbit(key, k);
        std::int64_t sx = 0;
        std::int64_t sy = 0;
        for (const auto& member : orbit) {
          seen[member] = true;
          auto it = v.pairs.find(member);
          if (it != v.pairs.end()) {
            sx = mod_reduce(sx + it->second.x, p);
            sy = mod_reduce(sy + it->second.y, p);
          }
        }
        if (sx != 0 || sy != 0) {
          const std::string rep = *std::min_element(orbit.begin(), orbit.end());
          SymplecticPair cur{};
          auto it = v.pairs.find(rep);
          if (it != v.pairs.end()) cur = it->second;
          cur.x = mod_reduce(cur.x - sx, p);
          cur.y = mod_reduce(cur.y - sy, p);
          v.pairs[rep] = cur;
        }
      }
      for (auto it = v.pairs.begin(); it != v.pairs.end();) {
        it = it->second.is_zero() ? v.pairs.erase(it) : std::next(it);
      }
      a.upper.push_back(std::move(v));
    }
    trim(a);
    return a;
  };
  GroupElement out = gen(gen, level);
  assert(validate(out));
  return out;
}

// -- size accounting ----------------------------------------------------------

std::optional<mpz_class> Tower::group_size(int level) const {
  check_level(level);
  mpz_class size = prime(1);
  for (int k = 2; k <= level; ++k) {
    mpz_class pk_prev = prime(k - 1);
    mpz_class dim = 1 + (2 * pk_prev - 2) * size / pk_prev;
    if (!dim.fits_ulong_p() || dim.get_ui() > (1u << 24)) return std::nullopt;
    mpz_class factor;
    mpz_ui_pow_ui(factor.get_mpz_t(), static_cast<unsigned long>(prime(k)), dim.get_ui());
    size *= factor;
  }
  return size;
}

std::optional<mpz_class> Tower::coordinate_dim(int level) const {
  if (level < 2) throw element_error("coordinate_dim: level must be >= 2");
  check_level(level);
  auto size = group_size(level - 1);
  if (!size) return std::nullopt;
  mpz_class p_prev = prime(level - 1);
  return mpz_class(1 + (2 * p_prev - 2) * (*size) / p_prev);
}

std::string Tower::group_size_formula(int level) const {
  check_level(level);
  std::string formula = std::to_string(prime(1));
  std::vector<std::string> legend;
  for (int k = 2; k <= level; ++k) {
    auto dim = coordinate_dim(k);
    std::string exp;
    if (dim) {
      exp = dim->get_str();
    } else {
      exp = "d" + std::to_string(k);
      legend.push_back("d" + std::to_string(k) + " = 1 + (2*" + std::to_string(prime(k - 1)) +
                       "-2)/" + std::to_string(prime(k - 1)) + " * |G_" +
                       std::to_string(k - 1) + "| (not expanded)");
    }
    formula += " * " + std::to_string(prime(k)) + "^" + exp;
  }
  if (!legend.empty()) {
    formula += "  where ";
    for (std::size_t i = 0; i < legend.size(); ++i) {
      if (i != 0) formula += "; ";
      formula += legend[i];
    }
  }
  return formula;
}

}  // namespace tower
