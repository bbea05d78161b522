#pragma once

// Marked surfaces and marked G-bundles. A connected oriented surface of
// genus g with n >= 1 boundary circles, one marked point per circle, is
// presented by its fundamental groupoid based at the marked points:
// handle generators a_i, b_i and boundary loops m_1..m_n based at p_1,
// transporters s_j : p_1 -> p_j for j >= 2, subject to the single relation
//
//   m_1 * prod_{j=2..n} s_j m_j s_j^(-1) * prod_{i=1..g} [a_i, b_i] = e.
//
// An isomorphism class of marked G-bundles is then exactly a tuple of group
// elements (a, b, s, m) satisfying the relation; m_1 is determined by the
// free coordinates (a_1..a_g, b_1..b_g, s_2..s_n, m_2..m_n), so there are
// |G|^(2g+2n-2) classes. Re-marking the point on circle i by g gives the
// rho_i action; its effect on tuples is fixed here once and for all.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dgmf/common.hpp"
#include "dgmf/group.hpp"

namespace dgmf {

struct MarkedSurface {
  int genus = 0;
  std::vector<std::string> boundary_names;

  int boundary_count() const { return static_cast<int>(boundary_names.size()); }
  int euler_characteristic() const { return 2 - 2 * genus - boundary_count(); }
  /// Number of free tuple coordinates: 2g + 2n - 2.
  int free_coordinate_count() const { return 2 * genus + 2 * boundary_count() - 2; }
  int boundary_index(const std::string& name) const {
    for (int i = 0; i < boundary_count(); ++i)
      if (boundary_names[i] == name) return i;
    throw_usage("unknown boundary name", R"({"name":")" + name + R"("})");
  }
};

/// Surface of genus g with n boundary marked points named p1..pn.
inline MarkedSurface make_surface(int genus, int boundary_count) {
  if (genus < 0) throw_usage("genus must be non-negative");
  if (boundary_count < 1) throw_usage("surface needs at least one boundary marked point");
  MarkedSurface x;
  x.genus = genus;
  for (int i = 1; i <= boundary_count; ++i) x.boundary_names.push_back("p" + std::to_string(i));
  return x;
}

/// Isomorphism class of a marked G-bundle: the tuple of the presentation
/// above. a, b have length g; s has length n-1 (transporter to p_j stored at
/// s[j-2]); m has length n with m[0] the relation-determined base monodromy.
struct BundleTuple {
  std::vector<int> a, b, s, m;
  bool operator==(const BundleTuple&) const = default;
  bool operator<(const BundleTuple& o) const {
    return std::tie(a, b, s, m) < std::tie(o.a, o.b, o.s, o.m);
  }
};

/// Solves the surface relation for m_1 given all free coordinates.
inline int solve_base_monodromy(const FiniteGroup& G, const BundleTuple& p) {
  int w = 0;
  for (std::size_t j = 0; j < p.s.size(); ++j)
    w = G.at(w, G.conjugate(p.s[j], p.m[j + 1]));
  for (std::size_t i = 0; i < p.a.size(); ++i)
    w = G.at(w, G.commutator(p.a[i], p.b[i]));
  return G.inv[w];
}

inline bool satisfies_relation(const FiniteGroup& G, const BundleTuple& p) {
  return p.m.empty() ? false : p.m[0] == solve_base_monodromy(G, p);
}

/// |P(X)| = N^(2g+2n-2); infeasible beyond the counting cap.
inline std::uint64_t bundle_count(const FiniteGroup& G, const MarkedSurface& x,
                                  const Caps& caps = {}) {
  const auto n = static_cast<std::uint64_t>(G.order);
  const int k = x.free_coordinate_count();
  if (!fits_u64_pow(n, k, static_cast<std::uint64_t>(caps.state_cap)))
    throw_infeasible("bundle count exceeds the state cap",
                     R"({"order":)" + std::to_string(G.order) +
                         R"(,"free_coordinates":)" + std::to_string(k) + "}");
  return u64_pow(n, k);
}

/// Decodes the mixed-radix index (base N, most significant digit first) into
/// the free coordinates (a, b, s, m_2..m_n) and solves for m_1. Ascending
/// index order is lexicographic order on the free coordinates.
inline BundleTuple bundle_from_flat_index(const FiniteGroup& G, const MarkedSurface& x,
                                          std::uint64_t index) {
  const auto n = static_cast<std::uint64_t>(G.order);
  const int g = x.genus, b = x.boundary_count();
  std::vector<int> digits(x.free_coordinate_count());
  for (int pos = static_cast<int>(digits.size()) - 1; pos >= 0; --pos) {
    digits[pos] = static_cast<int>(index % n);
    index /= n;
  }
  BundleTuple p;
  auto it = digits.begin();
  p.a.assign(it, it + g), it += g;
  p.b.assign(it, it + g), it += g;
  p.s.assign(it, it + (b - 1)), it += b - 1;
  p.m.resize(b);
  std::copy(it, digits.end(), p.m.begin() + 1);
  p.m[0] = solve_base_monodromy(G, p);
  return p;
}

inline std::uint64_t flat_index_of(const FiniteGroup& G, const MarkedSurface& x,
                                   const BundleTuple& p) {
  (void)x;
  const auto n = static_cast<std::uint64_t>(G.order);
  std::uint64_t index = 0;
  for (int v : p.a) index = index * n + static_cast<std::uint64_t>(v);
  for (int v : p.b) index = index * n + static_cast<std::uint64_t>(v);
  for (int v : p.s) index = index * n + static_cast<std::uint64_t>(v);
  for (std::size_t j = 1; j < p.m.size(); ++j)
    index = index * n + static_cast<std::uint64_t>(p.m[j]);
  return index;
}

/// Streams every bundle class in lexicographic order without storing them.
template <class Fn>
void for_each_bundle(const FiniteGroup& G, const MarkedSurface& x, Fn&& fn,
                     const Caps& caps = {}) {
  const std::uint64_t total = bundle_count(G, x, caps);
  for (std::uint64_t i = 0; i < total; ++i) fn(bundle_from_flat_index(G, x, i));
}

inline std::vector<BundleTuple> enumerate_bundles(const FiniteGroup& G, const MarkedSurface& x,
                                                  const Caps& caps = {}) {
  const std::uint64_t total = bundle_count(G, x, caps);
  if (total > static_cast<std::uint64_t>(caps.materialize_cap))
    throw_infeasible("bundle enumeration exceeds the materialization cap",
                     R"({"count":)" + std::to_string(total) + "}");
  std::vector<BundleTuple> out;
  out.reserve(total);
  for_each_bundle(G, x, [&](const BundleTuple& p) { out.push_back(p); }, caps);
  return out;
}

/// Monodromy around boundary circle i (0-based).
inline int monodromy(const BundleTuple& p, int i) {
  if (i < 0 || i >= static_cast<int>(p.m.size()))
    throw_usage("boundary index out of range", R"({"index":)" + std::to_string(i) + "}");
  return p.m[static_cast<std::size_t>(i)];
}

/// Moves the marked point on boundary i by g. Fixed convention:
///   i >= 1:  s_i -> s_i g^(-1),  m_i -> g m_i g^(-1)
///   i == 0:  a_k, b_k, m_1 -> conjugated by g,  s_j -> g s_j for all j.
/// Either way monodromy(rho_i(g)P, i) = g m_i g^(-1), the other monodromies
/// are untouched, and the surface relation is preserved.
inline BundleTuple rho_action(const FiniteGroup& G, const BundleTuple& p, int i, int g) {
  if (i < 0 || i >= static_cast<int>(p.m.size()))
    throw_usage("boundary index out of range", R"({"index":)" + std::to_string(i) + "}");
  BundleTuple q = p;
  if (i >= 1) {
    q.s[i - 1] = G.at(q.s[i - 1], G.inv[g]);
    q.m[i] = G.conjugate(g, q.m[i]);
  } else {
    for (int& v : q.a) v = G.conjugate(g, v);
    for (int& v : q.b) v = G.conjugate(g, v);
    for (int& v : q.s) v = G.at(g, v);
    q.m[0] = G.conjugate(g, q.m[0]);
  }
  return q;
}

/// Trace of the basis operator (g_1 d_{h_1}) x ... x (g_n d_{h_n}) on the
/// module of functions on bundle classes: the number of tuples P with
/// monodromy(P, i) = h_i for all i that are fixed by rho_1(g_1)...rho_n(g_n).
inline std::uint64_t e_module_character(const FiniteGroup& G, const MarkedSurface& x,
                                        const std::vector<std::pair<int, int>>& pairs,
                                        const Caps& caps = {}) {
  if (static_cast<int>(pairs.size()) != x.boundary_count())
    throw_usage("need one (g, h) pair per boundary circle",
                R"({"pairs":)" + std::to_string(pairs.size()) + "}");
  for (auto [g, h] : pairs)
    if (g < 0 || g >= G.order || h < 0 || h >= G.order)
      throw_usage("element index out of range");
  const std::uint64_t total = bundle_count(G, x, caps);
  const int n = x.boundary_count();
  std::vector<std::uint64_t> partial(chunk_count_for(total, 1), 0);
  for_chunks(total, 1, [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t count = 0;
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      BundleTuple p = bundle_from_flat_index(G, x, idx);
      bool graded = true;
      for (int i = 0; i < n && graded; ++i) graded = p.m[i] == pairs[i].second;
      if (!graded) continue;
      BundleTuple q = p;
      for (int i = 0; i < n; ++i) q = rho_action(G, q, i, pairs[i].first);
      if (q == p) ++count;
    }
    partial[chunk] = count;
  });
  std::uint64_t count = 0;
  for (std::uint64_t c : partial) count += c;
  return count;
}

/// Grade dimensions of the function module: for each monodromy vector h the
/// number of bundle classes with that vector, keyed by the mixed-radix index
/// of h (base N, h_1 most significant). Only nonzero grades are listed.
inline std::map<std::uint64_t, std::uint64_t> monodromy_histogram(const FiniteGroup& G,
                                                                  const MarkedSurface& x,
                                                                  const Caps& caps = {}) {
  const auto n = static_cast<std::uint64_t>(G.order);
  std::map<std::uint64_t, std::uint64_t> hist;
  for_each_bundle(
      G, x,
      [&](const BundleTuple& p) {
        std::uint64_t key = 0;
        for (int h : p.m) key = key * n + static_cast<std::uint64_t>(h);
        ++hist[key];
      },
      caps);
  return hist;
}

/// A simple closed curve to cut along: either non-separating (drops the genus
/// by one, adds two boundary circles) or separating (splits off a piece of
/// genus `genus_piece` carrying the named boundary circles).
struct CutSpec {
  enum class Kind { nonseparating, separating };
  Kind kind = Kind::nonseparating;
  int genus_piece = 0;
  std::vector<std::string> piece_boundaries;

  static CutSpec nonseparating() { return {}; }
  static CutSpec separating(int genus_piece, std::vector<std::string> piece_boundaries) {
    return {Kind::separating, genus_piece, std::move(piece_boundaries)};
  }
};

/// Result of cutting: one piece (non-separating) or two (separating). The two
/// fresh boundary circles are appended last on their pieces, c' before c'';
/// source_boundaries[k] lists, per piece, the X-index of each inherited
/// circle in order (the fresh circles have no source).
struct CutResult {
  std::vector<MarkedSurface> pieces;
  std::vector<std::vector<int>> source_boundaries;
  std::string c_prime, c_second;
};

inline CutResult cut_surface(const MarkedSurface& x, const CutSpec& cut) {
  std::string cp = "c'", cs = "c''";
  auto taken = [&](const std::string& name) {
    return std::find(x.boundary_names.begin(), x.boundary_names.end(), name) !=
           x.boundary_names.end();
  };
  while (taken(cp) || taken(cs)) cp = "c" + cp, cs = "c" + cs;

  CutResult r;
  r.c_prime = cp, r.c_second = cs;
  if (cut.kind == CutSpec::Kind::nonseparating) {
    if (x.genus < 1) throw_usage("non-separating cut needs genus >= 1");
    MarkedSurface piece;
    piece.genus = x.genus - 1;
    piece.boundary_names = x.boundary_names;
    piece.boundary_names.push_back(cp);
    piece.boundary_names.push_back(cs);
    r.pieces.push_back(std::move(piece));
    r.source_boundaries.emplace_back();
    for (int i = 0; i < x.boundary_count(); ++i) r.source_boundaries[0].push_back(i);
    return r;
  }

  if (cut.genus_piece < 0 || cut.genus_piece > x.genus)
    throw_usage("separating cut genus out of range",
                R"({"genus_piece":)" + std::to_string(cut.genus_piece) + "}");
  std::vector<bool> in_piece(x.boundary_names.size(), false);
  for (const std::string& name : cut.piece_boundaries) {
    int i = x.boundary_index(name);
    if (in_piece[i]) throw_usage("boundary named twice in cut", R"({"name":")" + name + R"("})");
    in_piece[i] = true;
  }
  MarkedSurface one, two;
  one.genus = cut.genus_piece;
  two.genus = x.genus - cut.genus_piece;
  r.source_boundaries.assign(2, {});
  for (int i = 0; i < x.boundary_count(); ++i) {
    (in_piece[i] ? one : two).boundary_names.push_back(x.boundary_names[i]);
    r.source_boundaries[in_piece[i] ? 0 : 1].push_back(i);
  }
  one.boundary_names.push_back(cp);
  two.boundary_names.push_back(cs);
  r.pieces.push_back(std::move(one));
  r.pieces.push_back(std::move(two));
  return r;
}

struct GluingReport {
  std::uint64_t bundles_on_surface = 0;  // |P(X)|
  std::uint64_t matched_tuples = 0;      // cut tuples with m_{c'} m_{c''} = e
  std::uint64_t orbit_count = 0;         // under the diagonal rho_{c'} rho_{c''}
  std::uint64_t invariants_dim = 0;      // Burnside average of diagonal fixed points
  std::uint64_t invariants_dim_swapped = 0;  // same with the roles of c', c'' swapped
};

namespace detail {

/// P(X_cut) as a product of one or two tuple sets, with the positions of the
/// fresh boundary circles; provides flat indexing and the diagonal action.
struct CutModel {
  const FiniteGroup& G;
  CutResult cut;
  std::vector<std::uint64_t> piece_sizes;
  int prime_piece = 0, prime_pos = 0;    // piece and boundary index of c'
  int second_piece = 0, second_pos = 0;  // piece and boundary index of c''

  CutModel(const FiniteGroup& group, const MarkedSurface& x, const CutSpec& spec,
           const Caps& caps)
      : G(group), cut(cut_surface(x, spec)) {
    for (const MarkedSurface& piece : cut.pieces)
      piece_sizes.push_back(bundle_count(G, piece, caps));
    prime_piece = 0;
    prime_pos = cut.pieces[0].boundary_index(cut.c_prime);
    second_piece = static_cast<int>(cut.pieces.size()) - 1;
    second_pos = cut.pieces[second_piece].boundary_index(cut.c_second);
  }

  std::uint64_t total() const {
    std::uint64_t t = 1;
    for (std::uint64_t s : piece_sizes) t *= s;
    return t;
  }
  std::vector<BundleTuple> decode(std::uint64_t index) const {
    std::vector<BundleTuple> tuples(cut.pieces.size());
    for (int k = static_cast<int>(cut.pieces.size()) - 1; k >= 0; --k) {
      tuples[k] = bundle_from_flat_index(G, cut.pieces[k], index % piece_sizes[k]);
      index /= piece_sizes[k];
    }
    return tuples;
  }
  std::uint64_t encode(const std::vector<BundleTuple>& tuples) const {
    std::uint64_t index = 0;
    for (std::size_t k = 0; k < tuples.size(); ++k)
      index = index * piece_sizes[k] + flat_index_of(G, cut.pieces[k], tuples[k]);
    return index;
  }
  std::pair<int, int> fresh_monodromies(const std::vector<BundleTuple>& tuples) const {
    return {monodromy(tuples[prime_piece], prime_pos),
            monodromy(tuples[second_piece], second_pos)};
  }
  /// rho_{c'}(g) rho_{c''}(g) — the two factors commute.
  void diagonal(std::vector<BundleTuple>& tuples, int g) const {
    tuples[prime_piece] = rho_action(G, tuples[prime_piece], prime_pos, g);
    tuples[second_piece] = rho_action(G, tuples[second_piece], second_pos, g);
  }
};

}  // namespace detail

/// Checks, for one cut of X, that the |G|^(2g+2n-2) bundle classes on X are
/// in bijection with diagonal-action orbits of cut-surface classes whose two
/// fresh monodromies multiply to the identity, and that the same number is
/// the invariants dimension of the glued D(G)-action (Burnside average),
/// independently of which fresh circle is called c'. Throws on any mismatch.
inline GluingReport gluing_bijection_check(const FiniteGroup& G, const MarkedSurface& x,
                                           const CutSpec& spec, const Caps& caps = {}) {
  GluingReport report;
  report.bundles_on_surface = bundle_count(G, x, caps);
  detail::CutModel model(G, x, spec, caps);
  const std::uint64_t total = model.total();
  if (total > static_cast<std::uint64_t>(caps.state_cap))
    throw_infeasible("cut-surface sweep exceeds the state cap",
                     R"({"states":)" + std::to_string(total) + "}");

  // Matched locus: m_{c'} m_{c''} = e. Flat indices collected ascending.
  std::vector<std::uint64_t> matched;
  for (std::uint64_t index = 0; index < total; ++index) {
    auto [mp, ms] = model.fresh_monodromies(model.decode(index));
    if (G.at(mp, ms) == 0) matched.push_back(index);
  }
  report.matched_tuples = matched.size();
  if (matched.size() > static_cast<std::uint64_t>(caps.materialize_cap))
    throw_infeasible("matched gluing locus exceeds the materialization cap",
                     R"({"matched":)" + std::to_string(matched.size()) + "}");
  auto position_of = [&](std::uint64_t index) {
    auto it = std::lower_bound(matched.begin(), matched.end(), index);
    check(it != matched.end() && *it == index, "diagonal action left the matched gluing locus");
    return static_cast<std::size_t>(it - matched.begin());
  };

  // Orbits of the diagonal action, by explicit flooding; Burnside fixed-point
  // counts for the invariants dimension fall out of the same sweep, run once
  // per role assignment of the fresh circles.
  std::vector<std::size_t> root(matched.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = i;
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  std::uint64_t fixed_sum = 0, fixed_sum_swapped = 0;
  for (std::size_t pos = 0; pos < matched.size(); ++pos) {
    for (int g = 0; g < G.order; ++g) {
      std::vector<BundleTuple> tuples = model.decode(matched[pos]);
      model.diagonal(tuples, g);
      std::size_t image = position_of(model.encode(tuples));
      if (image == pos) ++fixed_sum;
      std::size_t a = find(pos), b = find(image);
      if (a != b) root[std::max(a, b)] = std::min(a, b);
    }
    // Swapped roles: apply rho at c'' first, then c'; the locus test becomes
    // m_{c''} m_{c'} = e, which picks out the same tuples.
    for (int g = 0; g < G.order; ++g) {
      std::vector<BundleTuple> tuples = model.decode(matched[pos]);
      tuples[model.second_piece] = rho_action(G, tuples[model.second_piece], model.second_pos, g);
      tuples[model.prime_piece] = rho_action(G, tuples[model.prime_piece], model.prime_pos, g);
      if (model.encode(tuples) == matched[pos]) ++fixed_sum_swapped;
    }
  }
  for (std::size_t i = 0; i < matched.size(); ++i)
    if (find(i) == i) ++report.orbit_count;
  const auto n = static_cast<std::uint64_t>(G.order);
  check(fixed_sum % n == 0 && fixed_sum_swapped % n == 0,
        "diagonal fixed-point count not divisible by the group order");
  report.invariants_dim = fixed_sum / n;
  report.invariants_dim_swapped = fixed_sum_swapped / n;

  auto payload = [&] {
    return R"({"group":")" + G.name + R"(","genus":)" + std::to_string(x.genus) +
           R"(,"boundaries":)" + std::to_string(x.boundary_count()) +
           R"(,"bundles":)" + std::to_string(report.bundles_on_surface) +
           R"(,"orbits":)" + std::to_string(report.orbit_count) +
           R"(,"invariants":)" + std::to_string(report.invariants_dim) + "}";
  };
  if (report.orbit_count != report.bundles_on_surface)
    throw_violation("gluing bijection failed: orbit count differs from bundle count", payload());
  if (report.invariants_dim != report.bundles_on_surface ||
      report.invariants_dim_swapped != report.bundles_on_surface)
    throw_violation("gluing invariants dimension differs from bundle count", payload());
  return report;
}

}  // namespace dgmf
