#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dgmf/common.hpp"

namespace dgmf {

/// Finite group as an explicit Cayley table. Elements are 0..order-1 with the
/// identity pinned at index 0. Immutable after construction.
struct FiniteGroup {
  int order = 1;
  std::vector<int> mul;  // row-major: mul[a*order+b] = a*b
  std::vector<int> inv;
  int exponent = 1;
  std::string name = "Z1";
  std::vector<std::string> element_names;  // optional; empty -> render indices

  int at(int a, int b) const { return mul[static_cast<std::size_t>(a) * order + b]; }
  bool commutes(int a, int b) const { return at(a, b) == at(b, a); }
  int conjugate(int g, int x) const { return at(at(g, x), inv[g]); }
  int commutator(int a, int b) const { return at(at(a, b), at(inv[a], inv[b])); }

  int power(int x, long k) const {
    int r = 0;
    if (k < 0) {
      x = inv[x];
      k = -k;
    }
    for (long i = 0; i < k; ++i) r = at(r, x);
    return r;
  }

  int element_order(int x) const {
    int r = x, n = 1;
    while (r != 0) {
      r = at(r, x);
      ++n;
    }
    return n;
  }

  std::string element_name(int x) const {
    if (x >= 0 && x < static_cast<int>(element_names.size())) return element_names[x];
    return std::to_string(x);
  }
};

namespace detail {

inline void validate_group_table(int order, const std::vector<int>& mul) {
  check(order >= 1, "group order must be positive", Error::Kind::usage);
  check(mul.size() == static_cast<std::size_t>(order) * order,
        "multiplication table has wrong size", Error::Kind::usage);
  for (int v : mul)
    check(v >= 0 && v < order, "table entry out of range", Error::Kind::usage);
  const auto at = [&](int a, int b) { return mul[static_cast<std::size_t>(a) * order + b]; };
  for (int x = 0; x < order; ++x) {
    check(at(0, x) == x && at(x, 0) == x, "element 0 is not a two-sided identity",
          Error::Kind::usage);
  }
  // Latin square: every row and column is a permutation.
  std::vector<char> seen(order);
  for (int a = 0; a < order; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (int b = 0; b < order; ++b) seen[at(a, b)] = 1;
    check(std::find(seen.begin(), seen.end(), 0) == seen.end(),
          "row " + std::to_string(a) + " is not a permutation", Error::Kind::usage);
    std::fill(seen.begin(), seen.end(), 0);
    for (int b = 0; b < order; ++b) seen[at(b, a)] = 1;
    check(std::find(seen.begin(), seen.end(), 0) == seen.end(),
          "column " + std::to_string(a) + " is not a permutation", Error::Kind::usage);
  }
  // Two-sided inverses.
  for (int a = 0; a < order; ++a) {
    int b = 0;
    while (at(a, b) != 0) ++b;
    check(at(b, a) == 0, "inverse of " + std::to_string(a) + " is one-sided",
          Error::Kind::usage);
  }
  // Associativity: exhaustive up to order 200, deterministic sampling above.
  auto assoc = [&](int a, int b, int c) {
    if (at(at(a, b), c) != at(a, at(b, c)))
      throw_usage("associativity fails at (" + std::to_string(a) + "," + std::to_string(b) +
                  "," + std::to_string(c) + ")");
  };
  if (order <= 200) {
    for (int a = 0; a < order; ++a)
      for (int b = 0; b < order; ++b)
        for (int c = 0; c < order; ++c) assoc(a, b, c);
  } else {
    std::mt19937_64 rng(0x5eedu);
    std::uniform_int_distribution<int> pick(0, order - 1);
    for (int i = 0; i < 2000000; ++i) assoc(pick(rng), pick(rng), pick(rng));
  }
}

}  // namespace detail

/// Validates the table (identity at 0, Latin, two-sided inverses,
/// associativity) and fills in inverses and the group exponent.
inline FiniteGroup group_from_table(int order, std::vector<int> mul, std::string name = "",
                                    std::vector<std::string> element_names = {},
                                    int order_cap = Caps{}.group_order_cap) {
  if (order > order_cap)
    throw_infeasible("group order " + std::to_string(order) + " exceeds cap " +
                     std::to_string(order_cap));
  detail::validate_group_table(order, mul);
  FiniteGroup G;
  G.order = order;
  G.mul = std::move(mul);
  G.inv.assign(order, 0);
  for (int a = 0; a < order; ++a) {
    int b = 0;
    while (G.mul[static_cast<std::size_t>(a) * order + b] != 0) ++b;
    G.inv[a] = b;
  }
  G.exponent = 1;
  for (int x = 0; x < order; ++x)
    G.exponent = static_cast<int>(std::lcm<long>(G.exponent, G.element_order(x)));
  G.name = std::move(name);
  if (G.name.empty()) G.name = "G" + std::to_string(order);
  if (!element_names.empty()) {
    check(element_names.size() == static_cast<std::size_t>(order),
          "element_names size mismatch", Error::Kind::usage);
    G.element_names = std::move(element_names);
  }
  return G;
}

inline FiniteGroup trivial_group() {
  return group_from_table(1, {0}, "Z1", {"()"});
}

// ---- permutation helpers ---------------------------------------------------

/// Composition acting on the right argument first: (p*q)(x) = p(q(x)).
inline std::vector<int> perm_compose(const std::vector<int>& p, const std::vector<int>& q) {
  std::vector<int> r(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) r[x] = p[q[x]];
  return r;
}

inline std::string cycle_notation(const std::vector<int>& p) {
  std::string out;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i] || p[i] == static_cast<int>(i)) continue;
    out += '(';
    std::size_t j = i;
    bool first = true;
    while (!seen[j]) {
      seen[j] = 1;
      if (!first) out += ' ';
      out += std::to_string(j);
      first = false;
      j = static_cast<std::size_t>(p[j]);
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

/// Breadth-first closure of a generating set of permutations of {0..n-1}.
/// Element 0 is the identity; discovery order is breadth-first with the
/// generators applied on the right in the order given, so the numbering is
/// reproducible.
inline FiniteGroup group_from_generators(const std::vector<std::vector<int>>& generators,
                                         std::string name = "",
                                         int order_cap = Caps{}.group_order_cap) {
  if (generators.empty()) return trivial_group();
  const std::size_t npts = generators[0].size();
  check(npts >= 1, "permutations need at least one point", Error::Kind::usage);
  for (const auto& g : generators) {
    check(g.size() == npts, "generator degree mismatch", Error::Kind::usage);
    std::vector<char> seen(npts, 0);
    for (int v : g) {
      check(v >= 0 && v < static_cast<int>(npts) && !seen[v], "generator is not a permutation",
            Error::Kind::usage);
      seen[v] = 1;
    }
  }
  std::vector<int> identity(npts);
  std::iota(identity.begin(), identity.end(), 0);
  std::vector<std::vector<int>> elems{identity};
  std::map<std::vector<int>, int> index{{identity, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : generators) {
      std::vector<int> next = perm_compose(elems[head], g);
      if (index.emplace(next, static_cast<int>(elems.size())).second) {
        elems.push_back(std::move(next));
        if (static_cast<int>(elems.size()) > order_cap)
          throw_infeasible("generated group exceeds order cap " + std::to_string(order_cap));
      }
    }
  }
  const int n = static_cast<int>(elems.size());
  std::vector<int> mul(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      mul[static_cast<std::size_t>(a) * n + b] = index.at(perm_compose(elems[a], elems[b]));
  std::vector<std::string> names(n);
  for (int i = 0; i < n; ++i) names[i] = cycle_notation(elems[i]);
  return group_from_table(n, std::move(mul), std::move(name), std::move(names), order_cap);
}

// ---- presets ----------------------------------------------------------------

inline FiniteGroup preset_cyclic(int n, int order_cap = Caps{}.group_order_cap) {
  check(n >= 1, "cyclic: parameter must be >= 1", Error::Kind::usage);
  if (n == 1) return trivial_group();
  std::vector<int> cyc(n);
  for (int i = 0; i < n; ++i) cyc[i] = (i + 1) % n;
  return group_from_generators({cyc}, "Z" + std::to_string(n), order_cap);
}

inline FiniteGroup preset_dihedral(int n, int order_cap = Caps{}.group_order_cap) {
  check(n >= 1, "dihedral: parameter must be >= 1", Error::Kind::usage);
  std::string name = "D" + std::to_string(n);
  if (n == 1) {
    FiniteGroup G = preset_cyclic(2, order_cap);
    G.name = name;
    return G;
  }
  std::vector<int> rot(n), refl(n);
  for (int i = 0; i < n; ++i) {
    rot[i] = (i + 1) % n;
    refl[i] = (n - i) % n;
  }
  return group_from_generators({rot, refl}, name, order_cap);
}

inline FiniteGroup preset_symmetric(int n, int order_cap = Caps{}.group_order_cap) {
  check(n >= 1 && n <= 6, "symmetric: parameter must be in 1..6", Error::Kind::usage);
  if (n == 1) return trivial_group();
  std::string name = "S" + std::to_string(n);
  std::vector<int> swap01(n), cyc(n);
  std::iota(swap01.begin(), swap01.end(), 0);
  swap01[0] = 1;
  swap01[1] = 0;
  for (int i = 0; i < n; ++i) cyc[i] = (i + 1) % n;
  if (n == 2) return group_from_generators({swap01}, name, order_cap);
  return group_from_generators({swap01, cyc}, name, order_cap);
}

/// Quaternion group {±1, ±i, ±j, ±k}; indices 0..7 in that order.
inline FiniteGroup preset_quaternion8() {
  // basis products over {1,i,j,k}: value and sign of x*y
  static const int axis[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  static const int sign[4][4] = {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 1, 1, 0}, {0, 0, 1, 1}};
  // sign[a][b] = 1 when basis product carries a minus: i*i=-1, i*k=-j, j*i=-k,
  // j*j=-1, k*j=-i, k*k=-1.
  std::vector<int> mul(64);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int ax = x >> 1, sx = x & 1, ay = y >> 1, sy = y & 1;
      int az = axis[ax][ay];
      int sz = sx ^ sy ^ sign[ax][ay];
      mul[static_cast<std::size_t>(x) * 8 + y] = az * 2 + sz;
    }
  return group_from_table(8, std::move(mul), "Q8",
                          {"1", "-1", "i", "-i", "j", "-j", "k", "-k"});
}

inline FiniteGroup direct_product(const FiniteGroup& A, const FiniteGroup& B,
                                  int order_cap = Caps{}.group_order_cap) {
  long long n = static_cast<long long>(A.order) * B.order;
  if (n > order_cap) throw_infeasible("direct product exceeds order cap");
  const int N = static_cast<int>(n), M = B.order;
  std::vector<int> mul(static_cast<std::size_t>(N) * N);
  for (int a = 0; a < A.order; ++a)
    for (int x = 0; x < M; ++x)
      for (int b = 0; b < A.order; ++b)
        for (int y = 0; y < M; ++y)
          mul[static_cast<std::size_t>(a * M + x) * N + (b * M + y)] =
              A.at(a, b) * M + B.at(x, y);
  std::vector<std::string> names(N);
  for (int a = 0; a < A.order; ++a)
    for (int x = 0; x < M; ++x)
      names[a * M + x] = "(" + A.element_name(a) + "," + B.element_name(x) + ")";
  return group_from_table(N, std::move(mul), A.name + "x" + B.name, std::move(names),
                          order_cap);
}

/// Named presets: cyclic(n), dihedral(n), symmetric(n<=6), quaternion8.
inline FiniteGroup preset_group(const std::string& name, int parameter = 0,
                                int order_cap = Caps{}.group_order_cap) {
  if (name == "cyclic") return preset_cyclic(parameter, order_cap);
  if (name == "dihedral") return preset_dihedral(parameter, order_cap);
  if (name == "symmetric") return preset_symmetric(parameter, order_cap);
  if (name == "quaternion8") return preset_quaternion8();
  throw_usage("unknown preset '" + name + "'");
}

/// Token grammar: Z<n>, D<n>, S<n>, Q8, and 'x'-separated products
/// (e.g. "Z2xZ2", "Z3xS3").
inline FiniteGroup preset_from_token(const std::string& token,
                                     int order_cap = Caps{}.group_order_cap) {
  auto one = [&](const std::string& t) -> FiniteGroup {
    check(!t.empty(), "empty group token", Error::Kind::usage);
    if (t == "Q8") return preset_quaternion8();
    char head = t[0];
    const std::string num = t.substr(1);
    check(!num.empty() && num.find_first_not_of("0123456789") == std::string::npos,
          "bad group token '" + t + "'", Error::Kind::usage);
    int n = std::stoi(num);
    switch (head) {
      case 'Z': return preset_cyclic(n, order_cap);
      case 'D': return preset_dihedral(n, order_cap);
      case 'S': return preset_symmetric(n, order_cap);
      default: throw_usage("bad group token '" + t + "'");
    }
  };
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t x = token.find('x', pos);
    if (x == std::string::npos) {
      parts.push_back(token.substr(pos));
      break;
    }
    parts.push_back(token.substr(pos, x - pos));
    pos = x + 1;
  }
  FiniteGroup G = one(parts[0]);
  for (std::size_t i = 1; i < parts.size(); ++i) G = direct_product(G, one(parts[i]), order_cap);
  return G;
}

// ---- conjugacy structure ----------------------------------------------------

/// Conjugacy classes in canonical order: sorted by (order of representative,
/// minimal element index); the identity class is first. Class members are
/// sorted ascending and the representative is the minimal element.
struct ConjClassInfo {
  std::vector<std::vector<int>> classes;
  std::vector<int> class_of;        // element -> class
  std::vector<int> representative;  // class -> element
  std::vector<std::vector<int>> centralizer;  // of the representative, sorted
  std::vector<std::vector<int>> power_map;    // [class][k] = class of rep^k, k in 0..exponent-1
  std::vector<int> transporter;  // element x -> minimal g with g * rep * g^-1 = x
};

inline ConjClassInfo conjugacy_data(const FiniteGroup& G) {
  const int N = G.order;
  ConjClassInfo cc;
  cc.class_of.assign(N, -1);
  std::vector<std::vector<int>> raw;
  for (int x = 0; x < N; ++x) {
    if (cc.class_of[x] >= 0) continue;
    std::vector<int> orbit;
    std::vector<char> in(N, 0);
    for (int g = 0; g < N; ++g) {
      int y = G.conjugate(g, x);
      if (!in[y]) {
        in[y] = 1;
        orbit.push_back(y);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    int id = static_cast<int>(raw.size());
    for (int y : orbit) cc.class_of[y] = id;
    raw.push_back(std::move(orbit));
  }
  std::vector<int> perm(raw.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end(), [&](int i, int j) {
    int oi = G.element_order(raw[i][0]), oj = G.element_order(raw[j][0]);
    if (oi != oj) return oi < oj;
    return raw[i][0] < raw[j][0];
  });
  cc.classes.resize(raw.size());
  for (std::size_t t = 0; t < perm.size(); ++t) cc.classes[t] = std::move(raw[perm[t]]);
  for (std::size_t t = 0; t < cc.classes.size(); ++t)
    for (int y : cc.classes[t]) cc.class_of[y] = static_cast<int>(t);
  const int k = static_cast<int>(cc.classes.size());
  cc.representative.resize(k);
  cc.centralizer.resize(k);
  cc.power_map.assign(k, std::vector<int>(G.exponent));
  for (int t = 0; t < k; ++t) {
    int r = cc.classes[t][0];
    cc.representative[t] = r;
    for (int g = 0; g < N; ++g)
      if (G.commutes(g, r)) cc.centralizer[t].push_back(g);
    int p = 0;  // r^0
    for (int s = 0; s < G.exponent; ++s) {
      cc.power_map[t][s] = cc.class_of[p];
      p = G.at(p, r);
    }
  }
  cc.transporter.assign(N, -1);
  for (int t = 0; t < k; ++t) {
    int r = cc.representative[t];
    int found = 0;
    for (int g = 0; g < N && found < static_cast<int>(cc.classes[t].size()); ++g) {
      int y = G.conjugate(g, r);
      if (cc.transporter[y] < 0) {
        cc.transporter[y] = g;
        ++found;
      }
    }
  }
  // |class| * |centralizer| = |G| is a theorem; treat failure as corruption.
  for (int t = 0; t < k; ++t)
    check(cc.classes[t].size() * cc.centralizer[t].size() == static_cast<std::size_t>(N),
          "class/centralizer size product violated");
  return cc;
}

// ---- subgroups ---------------------------------------------------------------

/// A subgroup re-indexed as a standalone group plus the index maps in both
/// directions. Elements are listed ascending, so two equal subsets of the same
/// parent produce identical tables.
struct Subgroup {
  FiniteGroup group;
  std::vector<int> to_parent;    // subgroup index -> parent index
  std::vector<int> from_parent;  // parent index -> subgroup index or -1
};

inline Subgroup make_subgroup(const FiniteGroup& G, std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  check(!elements.empty() && elements[0] == 0, "subgroup must contain the identity",
        Error::Kind::usage);
  Subgroup S;
  S.to_parent = elements;
  S.from_parent.assign(G.order, -1);
  const int M = static_cast<int>(elements.size());
  for (int i = 0; i < M; ++i) S.from_parent[elements[i]] = i;
  std::vector<int> mul(static_cast<std::size_t>(M) * M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      int p = G.at(elements[i], elements[j]);
      check(S.from_parent[p] >= 0, "subset is not closed under multiplication",
            Error::Kind::usage);
      mul[static_cast<std::size_t>(i) * M + j] = S.from_parent[p];
    }
  std::vector<std::string> names;
  if (!G.element_names.empty()) {
    names.resize(M);
    for (int i = 0; i < M; ++i) names[i] = G.element_name(elements[i]);
  }
  S.group = group_from_table(M, std::move(mul), G.name + "-sub" + std::to_string(M),
                             std::move(names));
  return S;
}

/// FNV-1a over (order, multiplication table); identifies a group presentation
/// for caching purposes.
inline std::string cayley_digest(const FiniteGroup& G) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a64(h, static_cast<std::uint64_t>(G.order));
  for (int v : G.mul) h = fnv1a64(h, static_cast<std::uint64_t>(v));
  return hex64(h);
}

}  // namespace dgmf
