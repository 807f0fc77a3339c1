#include "tower/oracle.hpp"

#include "tower/field.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace tower::oracle {

namespace {

void check_index(const OracleGroup& g, int i, const char* who) {
  if (i < 0 || i >= g.n) throw oracle_error(std::string(who) + ": element index out of range");
}

std::vector<int> invert_perm(const std::vector<int>& p) {
  std::vector<int> r(p.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || p[i] >= static_cast<int>(p.size()) || r[p[i]] != -1) {
      throw oracle_error("not a permutation");
    }
    r[p[i]] = static_cast<int>(i);
  }
  return r;
}

void guard_size(std::int64_t n, std::int64_t guard, const char* what) {
  if (n > guard) {
    throw oracle_error(std::string(what) + " needs " + std::to_string(n) +
                       " elements, above the guard " + std::to_string(guard));
  }
}

OracleGroup finish_table(OracleGroup g) {
  g.inv.assign(g.n, -1);
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      if (g.at(a, b) == g.identity) {
        g.inv[a] = b;
        break;
      }
    }
    if (g.inv[a] == -1) throw oracle_error("element without inverse");
  }
  return g;
}

}  // namespace

std::int64_t OracleGroup::order_of(int a) const {
  check_index(*this, a, "order_of");
  std::int64_t k = 1;
  int x = a;
  while (x != identity) {
    x = at(x, a);
    ++k;
    if (k > n) throw oracle_error("order_of: table is not a group table");
  }
  return k;
}

bool OracleGroup::check_table(std::string* why) const {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  if (n <= 0 || static_cast<int>(mul.size()) != n * n) return fail("bad table shape");
  for (int v : mul) {
    if (v < 0 || v >= n) return fail("table entry out of range");
  }
  for (int a = 0; a < n; ++a) {
    if (at(identity, a) != a || at(a, identity) != a) return fail("identity law fails");
    if (at(a, inv[a]) != identity || at(inv[a], a) != identity) return fail("inverse law fails");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (at(at(a, b), c) != at(a, at(b, c))) return fail("associativity fails");
      }
    }
  }
  return true;
}

// -- masks ----------------------------------------------------------------

int mask_count(const Mask& m) {
  int k = 0;
  for (auto b : m) k += b != 0;
  return k;
}

std::vector<int> mask_elements(const Mask& m) {
  std::vector<int> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool mask_subset(const Mask& a, const Mask& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

Mask trivial_subgroup(const OracleGroup& g) {
  Mask m(g.n, 0);
  m[g.identity] = 1;
  return m;
}

Mask full_mask(const OracleGroup& g) { return Mask(g.n, 1); }

// -- subgroup machinery -----------------------------------------------------

Mask subgroup_closure(const OracleGroup& g, const std::vector<int>& gens) {
  Mask in(g.n, 0);
  in[g.identity] = 1;
  std::vector<int> frontier = {g.identity};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int x : frontier) {
      for (int s : gens) {
        check_index(g, s, "subgroup_closure");
        int y = g.at(x, s);
        if (!in[y]) {
          in[y] = 1;
          next.push_back(y);
        }
      }
    }
    frontier = std::move(next);
  }
  return in;
}

Mask product_set(const OracleGroup& g, const Mask& a, const Mask& b) {
  Mask out(g.n, 0);
  auto ea = mask_elements(a);
  auto eb = mask_elements(b);
  for (int x : ea) {
    for (int y : eb) out[g.at(x, y)] = 1;
  }
  return out;
}

Mask commutator_subgroup(const OracleGroup& g, const Mask& a, const Mask& b) {
  std::vector<int> gens;
  Mask seen(g.n, 0);
  for (int x : mask_elements(a)) {
    for (int y : mask_elements(b)) {
      int c = g.at(g.at(g.inv[x], g.inv[y]), g.at(x, y));
      if (!seen[c]) {
        seen[c] = 1;
        gens.push_back(c);
      }
    }
  }
  return subgroup_closure(g, gens);
}

Mask derived_subgroup(const OracleGroup& g, const Mask& a) {
  return commutator_subgroup(g, a, a);
}

Mask center(const OracleGroup& g) { return centralizer(g, full_mask(g)); }

Mask centralizer(const OracleGroup& g, const Mask& h) {
  Mask out(g.n, 0);
  auto eh = mask_elements(h);
  for (int x = 0; x < g.n; ++x) {
    bool ok = true;
    for (int y : eh) {
      if (g.at(x, y) != g.at(y, x)) {
        ok = false;
        break;
      }
    }
    out[x] = ok;
  }
  return out;
}

Mask center_of_subgroup(const OracleGroup& g, const Mask& h) {
  Mask cz = centralizer(g, h);
  Mask out(g.n, 0);
  for (int i = 0; i < g.n; ++i) out[i] = h[i] && cz[i];
  return out;
}

Mask normal_closure(const OracleGroup& g, const std::vector<int>& seed) {
  // a generating set closed under conjugation generates a normal subgroup
  Mask seen(g.n, 0);
  std::vector<int> gens;
  for (int s : seed) {
    for (int x = 0; x < g.n; ++x) {
      int c = g.at(g.at(g.inv[x], s), x);
      if (!seen[c]) {
        seen[c] = 1;
        gens.push_back(c);
      }
    }
  }
  return subgroup_closure(g, gens);
}

bool is_subgroup(const OracleGroup& g, const Mask& h) {
  if (static_cast<int>(h.size()) != g.n || !h[g.identity]) return false;
  auto eh = mask_elements(h);
  for (int x : eh) {
    if (!h[g.inv[x]]) return false;
    for (int y : eh) {
      if (!h[g.at(x, y)]) return false;
    }
  }
  return true;
}

bool is_normal(const OracleGroup& g, const Mask& h) {
  if (!is_subgroup(g, h)) return false;
  auto eh = mask_elements(h);
  for (int x = 0; x < g.n; ++x) {
    for (int y : eh) {
      if (!h[g.at(g.at(g.inv[x], y), x)]) return false;
    }
  }
  return true;
}

bool is_abelian(const OracleGroup& g, const Mask& h) {
  auto eh = mask_elements(h);
  for (std::size_t i = 0; i < eh.size(); ++i) {
    for (std::size_t j = i + 1; j < eh.size(); ++j) {
      if (g.at(eh[i], eh[j]) != g.at(eh[j], eh[i])) return false;
    }
  }
  return true;
}

std::vector<Mask> normal_subgroups(const OracleGroup& g, std::int64_t lattice_guard) {
  std::set<Mask> found;
  found.insert(trivial_subgroup(g));
  for (int x = 0; x < g.n; ++x) {
    if (x == g.identity) continue;
    found.insert(normal_closure(g, {x}));
    if (static_cast<std::int64_t>(found.size()) > lattice_guard) {
      throw oracle_error("normal subgroup lattice exceeds guard");
    }
  }
  // complete under joins; a product of two normal subgroups is one again
  std::vector<Mask> items(found.begin(), found.end());
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      Mask join = product_set(g, items[i], items[j]);
      if (found.insert(join).second) {
        items.push_back(join);
        if (static_cast<std::int64_t>(items.size()) > lattice_guard) {
          throw oracle_error("normal subgroup lattice exceeds guard");
        }
      }
    }
  }
  std::sort(items.begin(), items.end(), [](const Mask& a, const Mask& b) {
    int ca = mask_count(a);
    int cb = mask_count(b);
    if (ca != cb) return ca < cb;
    return a < b;
  });
  return items;
}

QuotientGroup quotient(const OracleGroup& g, const Mask& normal) {
  if (!is_normal(g, normal)) throw oracle_error("quotient by a non-normal subset");
  QuotientGroup q;
  q.proj.assign(g.n, -1);
  auto en = mask_elements(normal);
  for (int i = 0; i < g.n; ++i) {
    if (q.proj[i] != -1) continue;
    int cls = static_cast<int>(q.rep.size());
    q.rep.push_back(i);
    for (int x : en) q.proj[g.at(i, x)] = cls;
  }
  int m = static_cast<int>(q.rep.size());
  q.group.n = m;
  q.group.mul.assign(static_cast<std::size_t>(m) * m, -1);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      q.group.mul[static_cast<std::size_t>(a) * m + b] = q.proj[g.at(q.rep[a], q.rep[b])];
    }
  }
  q.group.identity = q.proj[g.identity];
  q.group.label.resize(m);
  for (int a = 0; a < m; ++a) q.group.label[a] = g.label.empty() ? "" : g.label[q.rep[a]];
  q.group = finish_table(std::move(q.group));
  return q;
}

SubgroupCopy subgroup_as_group(const OracleGroup& g, const Mask& h) {
  if (!is_subgroup(g, h)) throw oracle_error("subgroup_as_group: not a subgroup");
  SubgroupCopy s;
  s.to_parent = mask_elements(h);
  s.from_parent.assign(g.n, -1);
  for (std::size_t i = 0; i < s.to_parent.size(); ++i) {
    s.from_parent[s.to_parent[i]] = static_cast<int>(i);
  }
  int m = static_cast<int>(s.to_parent.size());
  s.group.n = m;
  s.group.mul.assign(static_cast<std::size_t>(m) * m, -1);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      int p = g.at(s.to_parent[a], s.to_parent[b]);
      s.group.mul[static_cast<std::size_t>(a) * m + b] = s.from_parent[p];
    }
  }
  s.group.identity = s.from_parent[g.identity];
  s.group.label.resize(m);
  for (int a = 0; a < m; ++a) s.group.label[a] = g.label.empty() ? "" : g.label[s.to_parent[a]];
  s.group = finish_table(std::move(s.group));
  return s;
}

// -- automorphisms ------------------------------------------------------------

Automorphism make_automorphism(const OracleGroup& g, std::vector<int> perm) {
  if (static_cast<int>(perm.size()) != g.n) throw oracle_error("automorphism: wrong size");
  invert_perm(perm);  // validates bijectivity
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      if (perm[g.at(a, b)] != g.at(perm[a], perm[b])) {
        throw oracle_error("automorphism: map does not respect the table");
      }
    }
  }
  Automorphism out;
  out.perm = std::move(perm);
  std::vector<char> seen(g.n, 0);
  std::int64_t ord = 1;
  for (int i = 0; i < g.n; ++i) {
    if (seen[i]) continue;
    std::int64_t len = 0;
    for (int j = i; !seen[j]; j = out.perm[j]) {
      seen[j] = 1;
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  out.order = ord;
  return out;
}

Automorphism identity_automorphism(const OracleGroup& g) {
  Automorphism a;
  a.perm.resize(g.n);
  std::iota(a.perm.begin(), a.perm.end(), 0);
  a.order = 1;
  return a;
}

Automorphism compose(const OracleGroup& g, const Automorphism& a, const Automorphism& b) {
  std::vector<int> p(g.n);
  for (int i = 0; i < g.n; ++i) p[i] = a.perm[b.perm[i]];
  return make_automorphism(g, std::move(p));
}

std::vector<Automorphism> close_automorphisms(const OracleGroup& g,
                                              std::vector<Automorphism> gens,
                                              std::int64_t guard) {
  std::set<std::vector<int>> seen;
  std::vector<Automorphism> out;
  out.push_back(identity_automorphism(g));
  seen.insert(out.back().perm);
  std::vector<Automorphism> frontier = out;
  while (!frontier.empty()) {
    std::vector<Automorphism> next;
    for (const auto& f : frontier) {
      for (const auto& s : gens) {
        Automorphism c = compose(g, f, s);
        if (seen.insert(c.perm).second) {
          out.push_back(c);
          next.push_back(c);
          if (static_cast<std::int64_t>(out.size()) > guard) {
            throw oracle_error("automorphism closure exceeds guard");
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

Mask fixed_points(const OracleGroup& g, const std::vector<Automorphism>& maps) {
  Mask out(g.n, 1);
  for (const auto& a : maps) {
    for (int i = 0; i < g.n; ++i) {
      if (a.perm[i] != i) out[i] = 0;
    }
  }
  return out;
}

Mask commutator_with_automorphisms(const OracleGroup& g, const Mask& h,
                                   const std::vector<Automorphism>& maps) {
  Mask seen(g.n, 0);
  std::vector<int> gens;
  for (int x : mask_elements(h)) {
    for (const auto& a : maps) {
      int c = g.at(g.inv[x], a.perm[x]);
      if (!seen[c]) {
        seen[c] = 1;
        gens.push_back(c);
      }
    }
  }
  return subgroup_closure(g, gens);
}

// -- builders -------------------------------------------------------------

OracleGroup cyclic_group(std::int64_t n) {
  if (n < 1) throw oracle_error("cyclic_group: order must be positive");
  OracleGroup g;
  g.n = static_cast<int>(n);
  g.identity = 0;
  g.mul.assign(static_cast<std::size_t>(n) * n, 0);
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = 0; b < n; ++b) {
      g.mul[static_cast<std::size_t>(a) * n + b] = static_cast<int>((a + b) % n);
    }
  }
  g.label.resize(n);
  for (std::int64_t a = 0; a < n; ++a) g.label[a] = "c" + std::to_string(a);
  return finish_table(std::move(g));
}

OracleGroup dihedral_group(std::int64_t n) {
  if (n < 2) throw oracle_error("dihedral_group: n must be at least 2");
  // element 2a + s is the rotation r^a (s = 0) or the reflection r^a f (s = 1)
  auto idx = [&](std::int64_t a, std::int64_t s) { return static_cast<int>(2 * a + s); };
  OracleGroup g;
  g.n = static_cast<int>(2 * n);
  g.identity = 0;
  g.mul.assign(static_cast<std::size_t>(g.n) * g.n, 0);
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t s = 0; s < 2; ++s) {
      for (std::int64_t b = 0; b < n; ++b) {
        for (std::int64_t t = 0; t < 2; ++t) {
          std::int64_t rot = s == 0 ? (a + b) % n : ((a - b) % n + n) % n;
          g.mul[static_cast<std::size_t>(idx(a, s)) * g.n + idx(b, t)] =
              idx(rot, s ^ t);
        }
      }
    }
  }
  g.label.resize(g.n);
  for (std::int64_t a = 0; a < n; ++a) {
    g.label[idx(a, 0)] = "r" + std::to_string(a);
    g.label[idx(a, 1)] = "r" + std::to_string(a) + "f";
  }
  return finish_table(std::move(g));
}

OracleGroup direct_power(const OracleGroup& g, int m, std::int64_t guard) {
  if (m < 1) throw oracle_error("direct_power: m must be positive");
  std::int64_t total = 1;
  for (int i = 0; i < m; ++i) {
    total *= g.n;
    guard_size(total, guard, "direct_power");
  }
  auto digits = [&](std::int64_t idx) {
    std::vector<int> d(m);
    for (int i = 0; i < m; ++i) {
      d[i] = static_cast<int>(idx % g.n);
      idx /= g.n;
    }
    return d;
  };
  auto index = [&](const std::vector<int>& d) {
    std::int64_t idx = 0;
    for (int i = m - 1; i >= 0; --i) idx = idx * g.n + d[i];
    return idx;
  };
  OracleGroup out;
  out.n = static_cast<int>(total);
  out.mul.assign(static_cast<std::size_t>(total) * total, 0);
  for (std::int64_t a = 0; a < total; ++a) {
    auto da = digits(a);
    for (std::int64_t b = 0; b < total; ++b) {
      auto db = digits(b);
      std::vector<int> dc(m);
      for (int i = 0; i < m; ++i) dc[i] = g.at(da[i], db[i]);
      out.mul[static_cast<std::size_t>(a) * total + b] = static_cast<int>(index(dc));
    }
  }
  std::vector<int> id(m, g.identity);
  out.identity = static_cast<int>(index(id));
  out.label.resize(total);
  for (std::int64_t a = 0; a < total; ++a) {
    auto da = digits(a);
    std::string l = "(";
    for (int i = 0; i < m; ++i) {
      if (i) l += ",";
      l += std::to_string(da[i]);
    }
    out.label[a] = l + ")";
  }
  return finish_table(std::move(out));
}

Automorphism power_shift(const OracleGroup& base, int m, const OracleGroup& product) {
  std::vector<int> perm(product.n);
  for (int a = 0; a < product.n; ++a) {
    std::int64_t idx = a;
    std::vector<int> d(m);
    for (int i = 0; i < m; ++i) {
      d[i] = static_cast<int>(idx % base.n);
      idx /= base.n;
    }
    std::vector<int> r(m);
    for (int i = 0; i < m; ++i) r[i] = d[(i + 1) % m];
    std::int64_t out = 0;
    for (int i = m - 1; i >= 0; --i) out = out * base.n + r[i];
    perm[a] = static_cast<int>(out);
  }
  return make_automorphism(product, std::move(perm));
}

namespace {

// 2-cocycle of one extra-special factor on coordinates modulo the center.
std::int64_t es_cocycle(EsKind kind, std::int64_t p, std::int64_t x, std::int64_t y,
                        std::int64_t x2, std::int64_t y2) {
  switch (kind) {
    case EsKind::heisenberg:
      return (y * x2) % p;
    case EsKind::quaternion:
      return (y * x2 + x * x2 + y * y2) % 2;
    case EsKind::exponent_p2:
      return (y * x2 + ((x + x2) >= p ? 1 : 0)) % p;
  }
  throw oracle_error("unknown factor kind");
}

void check_es_kind(EsKind kind, std::int64_t p) {
  if (!is_prime(p)) throw oracle_error("factor prime is not prime");
  if (kind == EsKind::quaternion && p != 2) {
    throw oracle_error("quaternion factors need p = 2");
  }
  if (kind == EsKind::exponent_p2 && p == 2) {
    throw oracle_error("exponent-p^2 factors need odd p");
  }
}

struct CentralLayout {
  std::int64_t p;
  int m;
  std::int64_t n;  // p^(2m+1)

  std::vector<std::int64_t> digits(std::int64_t idx) const {
    std::vector<std::int64_t> d(2 * m + 1);
    for (int i = 0; i < 2 * m + 1; ++i) {
      d[i] = idx % p;
      idx /= p;
    }
    return d;  // [z, x_1, y_1, ..., x_m, y_m]
  }
  std::int64_t index(const std::vector<std::int64_t>& d) const {
    std::int64_t idx = 0;
    for (int i = 2 * m; i >= 0; --i) idx = idx * p + d[i];
    return idx;
  }
};

CentralLayout central_layout(std::int64_t p, int m, std::int64_t guard) {
  CentralLayout lay{p, m, 1};
  for (int i = 0; i < 2 * m + 1; ++i) {
    lay.n *= p;
    guard_size(lay.n, guard, "central_power");
  }
  return lay;
}

}  // namespace

OracleGroup central_power(EsKind kind, std::int64_t p, int m, std::int64_t guard) {
  check_es_kind(kind, p);
  if (m < 1) throw oracle_error("central_power: m must be positive");
  CentralLayout lay = central_layout(p, m, guard);
  OracleGroup g;
  g.n = static_cast<int>(lay.n);
  g.identity = 0;
  try {
    g.mul.assign(static_cast<std::size_t>(lay.n) * lay.n, 0);
  } catch (const std::bad_alloc&) {
    throw oracle_error("central_power: table does not fit in memory");
  }
  for (std::int64_t a = 0; a < lay.n; ++a) {
    auto da = lay.digits(a);
    for (std::int64_t b = 0; b < lay.n; ++b) {
      auto db = lay.digits(b);
      std::vector<std::int64_t> dc(2 * m + 1);
      std::int64_t z = da[0] + db[0];
      for (int i = 0; i < m; ++i) {
        std::int64_t x = da[1 + 2 * i];
        std::int64_t y = da[2 + 2 * i];
        std::int64_t x2 = db[1 + 2 * i];
        std::int64_t y2 = db[2 + 2 * i];
        dc[1 + 2 * i] = (x + x2) % p;
        dc[2 + 2 * i] = (y + y2) % p;
        z += es_cocycle(kind, p, x, y, x2, y2);
      }
      dc[0] = z % p;
      g.mul[static_cast<std::size_t>(a) * lay.n + b] = static_cast<int>(lay.index(dc));
    }
  }
  g.label.resize(lay.n);
  for (std::int64_t a = 0; a < lay.n; ++a) {
    auto d = lay.digits(a);
    std::string l = "z" + std::to_string(d[0]);
    for (int i = 0; i < m; ++i) {
      l += "|" + std::to_string(d[1 + 2 * i]) + "," + std::to_string(d[2 + 2 * i]);
    }
    g.label[a] = l;
  }
  return finish_table(std::move(g));
}

Automorphism central_power_shift(EsKind kind, std::int64_t p, int m, const OracleGroup& g) {
  check_es_kind(kind, p);
  CentralLayout lay{p, m, g.n};
  std::vector<int> perm(g.n);
  for (int a = 0; a < g.n; ++a) {
    auto d = lay.digits(a);
    std::vector<std::int64_t> r(2 * m + 1);
    r[0] = d[0];
    for (int i = 0; i < m; ++i) {
      int src = (i + 1) % m;
      r[1 + 2 * i] = d[1 + 2 * src];
      r[2 + 2 * i] = d[2 + 2 * src];
    }
    perm[a] = static_cast<int>(lay.index(r));
  }
  return make_automorphism(g, std::move(perm));
}

namespace {

struct WreathLayout {
  int msize;
  int ksize;

  std::pair<std::vector<int>, int> decompose(std::int64_t idx) const {
    int k = static_cast<int>(idx % ksize);
    idx /= ksize;
    std::vector<int> f(ksize);
    for (int j = 0; j < ksize; ++j) {
      f[j] = static_cast<int>(idx % msize);
      idx /= msize;
    }
    return {f, k};
  }
  std::int64_t index(const std::vector<int>& f, int k) const {
    std::int64_t idx = 0;
    for (int j = ksize - 1; j >= 0; --j) idx = idx * msize + f[j];
    return idx * ksize + k;
  }
};

std::int64_t wreath_size(const OracleGroup& m, const OracleGroup& k, std::int64_t guard) {
  std::int64_t total = k.n;
  for (int j = 0; j < k.n; ++j) {
    total *= m.n;
    guard_size(total, guard, "wreath_product");
  }
  return total;
}

}  // namespace

OracleGroup wreath_product(const OracleGroup& m, const OracleGroup& k, std::int64_t guard) {
  std::int64_t total = wreath_size(m, k, guard);
  WreathLayout lay{m.n, k.n};
  OracleGroup g;
  g.n = static_cast<int>(total);
  try {
    g.mul.assign(static_cast<std::size_t>(total) * total, 0);
  } catch (const std::bad_alloc&) {
    throw oracle_error("wreath_product: table does not fit in memory");
  }
  for (std::int64_t ia = 0; ia < total; ++ia) {
    auto [fa, ka] = lay.decompose(ia);
    for (std::int64_t ib = 0; ib < total; ++ib) {
      auto [fb, kb] = lay.decompose(ib);
      // (f, a)(f', b) = (j -> f(j) f'(j a), a b), matching the tower's
      // semidirect convention
      std::vector<int> fc(k.n);
      for (int j = 0; j < k.n; ++j) fc[j] = m.at(fa[j], fb[k.at(j, ka)]);
      g.mul[static_cast<std::size_t>(ia) * total + ib] =
          static_cast<int>(lay.index(fc, k.at(ka, kb)));
    }
  }
  std::vector<int> fid(k.n, m.identity);
  g.identity = static_cast<int>(lay.index(fid, k.identity));
  g.label.resize(total);
  for (std::int64_t i = 0; i < total; ++i) {
    auto [f, kk] = lay.decompose(i);
    std::string l;
    for (int j = 0; j < k.n; ++j) {
      if (j) l += ",";
      l += std::to_string(f[j]);
    }
    g.label[i] = l + ";" + std::to_string(kk);
  }
  return finish_table(std::move(g));
}

// -- lemma checks ---------------------------------------------------------

bool check_zuzu(const OracleGroup& g, const Mask& b, int a, std::string* why) {
  check_index(g, a, "check_zuzu");
  Mask gp = derived_subgroup(g, full_mask(g));
  if (!is_abelian(g, gp)) throw oracle_error("zuzu precondition: G is not metabelian");
  if (!is_subgroup(g, b)) throw oracle_error("zuzu precondition: B is not a subgroup");
  if (!is_abelian(g, b)) throw oracle_error("zuzu precondition: B is not abelian");
  if (!mask_subset(gp, b)) throw oracle_error("zuzu precondition: B does not contain G'");
  Mask amask(g.n, 0);
  amask[a] = 1;
  Mask ba = commutator_subgroup(g, b, amask);
  bool ok = is_normal(g, ba);
  if (!ok && why != nullptr) *why = "[B,a] is not normal";
  return ok;
}

bool check_gran(const OracleGroup& g, const Automorphism& alpha, std::string* why) {
  if (std::gcd(alpha.order, static_cast<std::int64_t>(g.n)) != 1) {
    throw oracle_error("gran precondition: automorphism order not coprime to |G|");
  }
  auto powers = close_automorphisms(g, {alpha});
  Mask gp = derived_subgroup(g, full_mask(g));
  if (!mask_subset(gp, fixed_points(g, powers))) {
    throw oracle_error("gran precondition: G' not centralized by alpha");
  }
  Mask ga = commutator_with_automorphisms(g, full_mask(g), powers);
  Mask z = center_of_subgroup(g, ga);
  Mask za = commutator_with_automorphisms(g, z, powers);
  bool ok = mask_subset(za, center(g));
  if (!ok && why != nullptr) *why = "[Z([G,alpha]),alpha] escapes Z(G)";
  return ok;
}

bool check_elem(std::int64_t p, int m, std::int64_t base_order, std::string* why) {
  if (!is_prime(p)) throw oracle_error("elem precondition: p not prime");
  if (m < 1) throw oracle_error("elem precondition: m must be positive");
  std::int64_t b = base_order;
  while (b > 1 && b % p == 0) b /= p;
  if (b != 1 || base_order < 2) {
    throw oracle_error("elem precondition: base order is not a power of p");
  }
  if (std::gcd(static_cast<std::int64_t>(m), base_order) != 1) {
    throw oracle_error("elem precondition: m not coprime to the base order");
  }
  OracleGroup base = cyclic_group(base_order);
  OracleGroup g = direct_power(base, m);
  Automorphism shift = power_shift(base, m, g);
  auto powers = close_automorphisms(g, {shift});
  Mask ga = commutator_with_automorphisms(g, full_mask(g), powers);
  std::int64_t index = g.n / mask_count(ga);
  bool ok = index == base_order;
  if (!ok && why != nullptr) {
    *why = "index of [G,alpha] is " + std::to_string(index) + ", expected " +
           std::to_string(base_order);
  }
  return ok;
}

bool check_extraelem(std::int64_t p, int m, EsKind kind, std::string* why,
                     ExtraelemFacts* facts) {
  if (m < 2) throw oracle_error("extraelem precondition: m must be at least 2");
  if (std::gcd(static_cast<std::int64_t>(m), p) != 1) {
    throw oracle_error("extraelem precondition: m not coprime to p");
  }
  OracleGroup g = central_power(kind, p, m);
  Automorphism shift = central_power_shift(kind, p, m, g);
  auto powers = close_automorphisms(g, {shift});
  Mask gp = derived_subgroup(g, full_mask(g));
  if (!mask_subset(gp, fixed_points(g, powers))) {
    throw oracle_error("extraelem precondition: shift moves G'");
  }
  Mask ga = commutator_with_automorphisms(g, full_mask(g), powers);
  if (facts != nullptr) {
    facts->group_order = g.n;
    facts->part_order = mask_count(ga);
  }
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  std::int64_t index = g.n / mask_count(ga);
  if (index != p * p) {
    return fail("index of [G,alpha] is " + std::to_string(index) + ", expected " +
                std::to_string(p * p));
  }
  Mask dga = commutator_subgroup(g, ga, ga);
  Mask zga = center_of_subgroup(g, ga);
  if (dga != zga) return fail("[G,alpha] has derived subgroup different from its center");
  if (mask_count(dga) != p) return fail("center of [G,alpha] has wrong order");
  return true;
}

Report check_coprime_identities(const OracleGroup& g, const std::vector<Automorphism>& gens,
                                std::int64_t lattice_guard) {
  Report rep;
  auto closed = close_automorphisms(g, gens);
  auto asize = static_cast<std::int64_t>(closed.size());
  if (std::gcd(asize, static_cast<std::int64_t>(g.n)) != 1) {
    throw oracle_error("coprime identities precondition: |A| = " + std::to_string(asize) +
                       " shares a factor with |G| = " + std::to_string(g.n));
  }
  Mask ga = commutator_with_automorphisms(g, full_mask(g), closed);
  Mask cg = fixed_points(g, closed);
  rep.add(product_set(g, ga, cg) == full_mask(g), "coprime.2",
          "G = [G,A] C_G(A) with |[G,A]| = " + std::to_string(mask_count(ga)) +
              ", |C_G(A)| = " + std::to_string(mask_count(cg)));
  if (is_abelian(g, full_mask(g))) {
    bool trivial_meet = true;
    for (int i = 0; i < g.n; ++i) {
      if (ga[i] && cg[i] && i != g.identity) trivial_meet = false;
    }
    bool cover = product_set(g, ga, cg) == full_mask(g);
    rep.add(trivial_meet && cover, "coprime.3", "G = [G,A] x C_G(A)");
  } else {
    rep.add(true, "coprime.3", "not applicable (G nonabelian)");
  }
  Mask gaa = commutator_with_automorphisms(g, ga, closed);
  rep.add(gaa == ga, "coprime.4", "[[G,A],A] = [G,A]");
  // item (1) over all A-invariant normal subgroups
  int checked = 0;
  bool all_ok = true;
  for (const auto& nmask : normal_subgroups(g, lattice_guard)) {
    bool invariant = true;
    for (const auto& a : closed) {
      for (int i : mask_elements(nmask)) {
        if (!nmask[a.perm[i]]) {
          invariant = false;
          break;
        }
      }
      if (!invariant) break;
    }
    if (!invariant) continue;
    ++checked;
    QuotientGroup q = quotient(g, nmask);
    std::vector<Automorphism> induced;
    for (const auto& a : closed) {
      std::vector<int> perm(q.group.n);
      for (int c = 0; c < q.group.n; ++c) perm[c] = q.proj[a.perm[q.rep[c]]];
      for (int i = 0; i < g.n; ++i) {
        if (q.proj[a.perm[i]] != perm[q.proj[i]]) {
          throw oracle_error("induced map ill-defined on an invariant subgroup");
        }
      }
      induced.push_back(make_automorphism(q.group, std::move(perm)));
    }
    Mask lhs = fixed_points(q.group, induced);
    Mask rhs(q.group.n, 0);
    for (int i : mask_elements(product_set(g, cg, nmask))) rhs[q.proj[i]] = 1;
    if (lhs != rhs) all_ok = false;
  }
  rep.add(all_ok, "coprime.1",
          "C_{G/N}(A) = C_G(A)N/N over " + std::to_string(checked) + " invariant normal N");
  return rep;
}

// -- tower stages -----------------------------------------------------------

namespace {

OracleGroup normalize_by_label(const OracleGroup& g, std::vector<int>* old_to_new = nullptr) {
  std::vector<int> order(g.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return g.label[a] < g.label[b]; });
  std::vector<int> to_new(g.n);
  for (int i = 0; i < g.n; ++i) to_new[order[i]] = i;
  OracleGroup out;
  out.n = g.n;
  out.identity = to_new[g.identity];
  out.mul.assign(g.mul.size(), 0);
  out.label.resize(g.n);
  for (int a = 0; a < g.n; ++a) {
    out.label[to_new[a]] = g.label[a];
    for (int b = 0; b < g.n; ++b) {
      out.mul[static_cast<std::size_t>(to_new[a]) * g.n + to_new[b]] = to_new[g.at(a, b)];
    }
  }
  out = finish_table(std::move(out));
  if (old_to_new != nullptr) *old_to_new = to_new;
  return out;
}

Mask remap_mask(const Mask& m, const std::vector<int>& to_new) {
  Mask out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out[to_new[i]] = 1;
  }
  return out;
}

OracleGroup close_group_elements(const Tower& tw, const std::vector<GroupElement>& gens,
                                 std::int64_t guard) {
  std::vector<GroupElement> elems = {tw.identity()};
  std::map<std::string, int> index = {{tw.encode(tw.identity()), 0}};
  std::vector<int> frontier = {0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int i : frontier) {
      for (const auto& s : gens) {
        GroupElement p = tw.multiply(elems[i], s);
        std::string enc = tw.encode(p);
        auto [it, fresh] = index.emplace(enc, static_cast<int>(elems.size()));
        if (fresh) {
          elems.push_back(p);
          next.push_back(it->second);
          guard_size(static_cast<std::int64_t>(elems.size()), guard, "stage closure");
        }
      }
    }
    frontier = std::move(next);
  }
  OracleGroup g;
  g.n = static_cast<int>(elems.size());
  g.mul.assign(static_cast<std::size_t>(g.n) * g.n, -1);
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      auto it = index.find(tw.encode(tw.multiply(elems[a], elems[b])));
      if (it == index.end()) throw oracle_error("closure is not multiplicatively closed");
      g.mul[static_cast<std::size_t>(a) * g.n + b] = it->second;
    }
  }
  g.identity = 0;
  g.label.resize(g.n);
  for (int a = 0; a < g.n; ++a) g.label[a] = tw.encode(elems[a]);
  return finish_table(std::move(g));
}

std::vector<GroupElement> stage2_symbolic_generators(const Tower& tw) {
  std::int64_t p1 = tw.prime(1);
  std::int64_t q = tw.prime(2);
  std::vector<GroupElement> gens = {tw.level1(1), tw.center_generator(2)};
  for (std::int64_t s = 0; s + 1 < p1; ++s) {
    std::string k0 = tw.encode(tw.level1(s));
    std::string k1 = tw.encode(tw.level1(s + 1));
    LevelVector ux;
    ux.pairs[k0] = SymplecticPair{1, 0};
    ux.pairs[k1] = SymplecticPair{q - 1, 0};
    LevelVector uy;
    uy.pairs[k0] = SymplecticPair{0, 1};
    uy.pairs[k1] = SymplecticPair{0, q - 1};
    GroupElement ex;
    ex.upper.push_back(ux);
    GroupElement ey;
    ey.upper.push_back(uy);
    gens.push_back(ex);
    gens.push_back(ey);
  }
  return gens;
}

}  // namespace

Stage2 enumerate_stage2(const Tower& tw, const Guards& guards) {
  if (tw.levels() < 2) throw oracle_error("stage 2 needs at least two configured primes");
  std::int64_t p1 = tw.prime(1);
  std::int64_t q = tw.prime(2);
  std::int64_t expected = p1;
  for (std::int64_t i = 0; i < 2 * p1 - 1; ++i) {
    expected *= q;
    guard_size(expected, guards.enumeration, "stage 2");
  }

  // Route one, the literal construction: wreath the factor over the stage
  // below, quotient to identify the factor centers, cut down to the
  // commutator part, and extend by the stage below.
  OracleGroup factor = central_power(EsKind::heisenberg, q, 1);
  OracleGroup base_stage = cyclic_group(p1);
  OracleGroup w = wreath_product(factor, base_stage, guards.enumeration);
  WreathLayout lay{factor.n, base_stage.n};

  Mask base_mask(w.n, 0);
  Mask stage_mask(w.n, 0);
  for (int i = 0; i < w.n; ++i) {
    auto [f, k] = lay.decompose(i);
    if (k == base_stage.identity) base_mask[i] = 1;
    bool trivial_f = true;
    for (int v : f) {
      if (v != factor.identity) trivial_f = false;
    }
    if (trivial_f) stage_mask[i] = 1;
  }
  Mask bp = derived_subgroup(w, base_mask);
  Mask bpk = commutator_subgroup(w, bp, stage_mask);
  if (mask_count(bp) != mask_count(bpk) * q) {
    throw oracle_error("stage 2: [B',K] does not have index " + std::to_string(q) + " in B'");
  }
  QuotientGroup quot = quotient(w, bpk);
  Mask b2(quot.group.n, 0);
  Mask kq(quot.group.n, 0);
  for (int i = 0; i < w.n; ++i) {
    if (base_mask[i]) b2[quot.proj[i]] = 1;
    if (stage_mask[i]) kq[quot.proj[i]] = 1;
  }
  // R_1 is the whole first stage, so the commutator part is [B_2, K]
  Mask d2 = commutator_subgroup(quot.group, b2, kq);
  Mask g2set = product_set(quot.group, d2, kq);
  if (!is_subgroup(quot.group, g2set)) throw oracle_error("stage 2: D K is not a subgroup");
  if (mask_count(g2set) != expected) {
    throw oracle_error("stage 2: built " + std::to_string(mask_count(g2set)) +
                       " elements, expected " + std::to_string(expected));
  }
  SubgroupCopy s = subgroup_as_group(quot.group, g2set);

  // canonical labels via the coordinate reading of each coset representative
  std::set<std::string> distinct;
  for (int e = 0; e < s.group.n; ++e) {
    int w_index = quot.rep[s.to_parent[e]];
    auto [f, k] = lay.decompose(w_index);
    GroupElement sym;
    sym.exp1 = k;
    LevelVector v;
    std::int64_t zsum = 0;
    for (int j = 0; j < base_stage.n; ++j) {
      std::int64_t digits = f[j];
      std::int64_t z = digits % q;
      std::int64_t x = (digits / q) % q;
      std::int64_t y = (digits / (q * q)) % q;
      zsum += z;
      if (x != 0 || y != 0) {
        v.pairs[tw.encode(tw.level1(j))] = SymplecticPair{x, y};
      }
    }
    v.center = zsum % q;
    if (!v.trivial()) sym.upper.push_back(v);
    s.group.label[e] = tw.encode(sym);
    distinct.insert(s.group.label[e]);
  }
  if (static_cast<int>(distinct.size()) != s.group.n) {
    throw oracle_error("stage 2: coordinate labels are not distinct");
  }
  std::vector<int> def_to_new;
  OracleGroup by_definition = normalize_by_label(s.group, &def_to_new);

  // Route two: close the symbolic generators.
  OracleGroup by_closure = normalize_by_label(
      close_group_elements(tw, stage2_symbolic_generators(tw), guards.enumeration));
  if (by_definition.label != by_closure.label) {
    throw oracle_error("stage 2: the two constructions enumerate different elements");
  }
  if (by_definition.mul != by_closure.mul || by_definition.identity != by_closure.identity) {
    throw oracle_error("stage 2: the two constructions disagree on products");
  }

  Stage2 out;
  out.table = by_definition;
  Mask d_sub(s.group.n, 0);
  Mask g1_sub(s.group.n, 0);
  for (int i = 0; i < quot.group.n; ++i) {
    if (d2[i] && s.from_parent[i] >= 0) d_sub[s.from_parent[i]] = 1;
    if (kq[i] && s.from_parent[i] >= 0) g1_sub[s.from_parent[i]] = 1;
  }
  out.d_part = remap_mask(d_sub, def_to_new);
  out.g1_part = remap_mask(g1_sub, def_to_new);
  out.r_minimal = derived_subgroup(out.table, out.d_part);
  return out;
}

OracleGroup enumerate_tower_stage(const Tower& tw, int level, const Guards& guards) {
  if (level == 1) {
    return normalize_by_label(close_group_elements(tw, {tw.level1(1)}, guards.enumeration));
  }
  if (level == 2) return enumerate_stage2(tw, guards).table;
  throw oracle_error("only stages 1 and 2 are enumerable");
}

Report crosscheck_stage(const Tower& tw, int level, const Guards& guards) {
  Report rep;
  if (level != 1 && level != 2) throw oracle_error("only stages 1 and 2 are enumerable");
  OracleGroup g = enumerate_tower_stage(tw, level, guards);
  if (level == 2) {
    rep.add(true, "stage2.constructions",
            "definition and closure tables agree on " + std::to_string(g.n) + " elements");
  }
  std::vector<GroupElement> elems;
  elems.reserve(g.n);
  for (int i = 0; i < g.n; ++i) elems.push_back(tw.decode(g.label[i]));
  std::int64_t product_mismatch = 0;
  for (int a = 0; a < g.n; ++a) {
    for (int b = 0; b < g.n; ++b) {
      if (tw.encode(tw.multiply(elems[a], elems[b])) != g.label[g.at(a, b)]) {
        ++product_mismatch;
      }
    }
  }
  rep.add(product_mismatch == 0, "stage" + std::to_string(level) + ".products",
          std::to_string(static_cast<std::int64_t>(g.n) * g.n) + " pairs, " +
              std::to_string(product_mismatch) + " mismatches");
  std::int64_t order_mismatch = 0;
  for (int a = 0; a < g.n; ++a) {
    if (tw.order(elems[a]) != g.order_of(a)) ++order_mismatch;
  }
  rep.add(order_mismatch == 0, "stage" + std::to_string(level) + ".orders",
          std::to_string(g.n) + " elements, " + std::to_string(order_mismatch) + " mismatches");
  std::string why;
  rep.add(g.check_table(&why), "stage" + std::to_string(level) + ".table", why);
  return rep;
}

Report verify_lala(const Tower& tw, int i, int k, const Guards& guards) {
  Report rep;
  if (i == 1) {
    rep.add(true, "lala", "not applicable at stage 1");
    return rep;
  }
  if (i != 2 || k != 2) throw oracle_error("lala checks need an enumerable stage (i = k = 2)");
  Stage2 st = enumerate_stage2(tw, guards);
  rep.add(is_normal(st.table, st.d_part), "lala.a",
          "T_22 normal, |T_22| = " + std::to_string(mask_count(st.d_part)));
  bool trivial_meet = true;
  for (int x = 0; x < st.table.n; ++x) {
    if (st.d_part[x] && st.g1_part[x] && x != st.table.identity) trivial_meet = false;
  }
  bool cover = product_set(st.table, st.d_part, st.g1_part) == full_mask(st.table);
  rep.add(trivial_meet && cover, "lala.b", "T_22 complemented by the previous stage");
  Mask back = commutator_subgroup(st.table, st.d_part, st.g1_part);
  rep.add(back == st.d_part, "lala.c", "[T_22, R_1] = T_22");
  return rep;
}

Mask unique_minimal_normal(const OracleGroup& g, std::int64_t expected_order) {
  auto all = normal_subgroups(g);
  std::vector<Mask> minimal;
  for (const auto& n : all) {
    if (mask_count(n) == 1) continue;
    bool is_min = true;
    for (const auto& m : all) {
      int c = mask_count(m);
      if (c == 1 || m == n) continue;
      if (c < mask_count(n) && mask_subset(m, n)) {
        is_min = false;
        break;
      }
    }
    if (is_min) minimal.push_back(n);
  }
  if (minimal.size() != 1) {
    throw oracle_error("expected a unique minimal normal subgroup, found " +
                       std::to_string(minimal.size()));
  }
  const Mask& r = minimal.front();
  if (mask_count(r) != expected_order) {
    throw oracle_error("minimal normal subgroup has order " + std::to_string(mask_count(r)) +
                       ", expected " + std::to_string(expected_order));
  }
  if (!mask_subset(r, center(g))) {
    throw oracle_error("minimal normal subgroup is not central");
  }
  return r;
}

}  // namespace tower::oracle
