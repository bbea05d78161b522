#pragma once

// The modular-functor numbers. A marked surface X with boundary labels
// lambda_1..lambda_n (irreducibles of D(G)) determines the space
// W(X; lambda) = Hom_{D(G)^n}(E(X), lambda_1 (x) ... (x) lambda_n), where
// E(X) is the function module on marked-bundle classes. Its dimension is
// computed by three independent routes that must agree exactly:
//
//   characters   (1/N^n) sum over commuting-pair tuples of
//                chi_E * prod_i conj chi_{dual lambda_i}
//   enumeration  for the all-vacuum label vector: orbits of the re-marking
//                actions on bundles with trivial monodromies
//   verlinde     sum_mu S_{0mu}^(2-2g-n) prod_i S_{lambda_i mu} from the
//                exact modular data of D(G)
//
// plus the full decomposition table of E(X) with its completeness
// identities, cut-and-glue verification, and the S/T matrices themselves.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dgmf/common.hpp"
#include "dgmf/drinfeld_double.hpp"
#include "dgmf/surfaces.hpp"

namespace dgmf {

/// Exact character of E(X) as a function on n-tuples of commuting pairs:
/// entries maps the mixed-radix key over pair indices (boundary 0 most
/// significant, base = number of commuting pairs) to the trace, i.e. the
/// number of bundle classes with those monodromies fixed by those
/// re-markings. Only nonzero traces are stored.
struct SurfaceSupport {
  int boundaries = 0;
  std::uint64_t pair_radix = 1;
  std::map<std::uint64_t, std::uint64_t> entries;
};

namespace detail {

/// One sweep computes every trace at once: a bundle tuple P contributes to
/// the entry at ((g, m_1), (s_2^-1 g s_2, m_2), ..., (s_n^-1 g s_n, m_n))
/// for each g commuting with all handle coordinates and all transported
/// monodromies, because those are exactly the fixed-point conditions of
/// rho_1(g_1)...rho_n(g_n) once each m_i is pinned.
inline SurfaceSupport compute_surface_support(const DoubleData& dd, const MarkedSurface& x,
                                              const Caps& caps) {
  const FiniteGroup& G = dd.group();
  const int N = G.order;
  const int n = x.boundary_count();
  SurfaceSupport sup;
  sup.boundaries = n;
  sup.pair_radix = dd.commuting_pairs().size();
  if (!fits_u64_pow(sup.pair_radix, n, static_cast<std::uint64_t>(caps.char_grid_cap)))
    throw_infeasible("commuting-pair grid exceeds the character grid cap",
                     R"({"pairs":)" + std::to_string(sup.pair_radix) +
                         R"(,"boundaries":)" + std::to_string(n) + "}");
  const std::uint64_t total = bundle_count(G, x, caps);

  std::vector<std::map<std::uint64_t, std::uint64_t>> partial(chunk_count_for(total, 1));
  for_chunks(total, 1, [&](std::uint64_t chunk, std::uint64_t lo, std::uint64_t hi) {
    std::map<std::uint64_t, std::uint64_t>& local = partial[chunk];
    for (std::uint64_t idx = lo; idx < hi; ++idx) {
      const BundleTuple p = bundle_from_flat_index(G, x, idx);
      for (int g = 0; g < N; ++g) {
        bool ok = true;
        for (std::size_t k = 0; k < p.a.size() && ok; ++k)
          ok = G.commutes(g, p.a[k]) && G.commutes(g, p.b[k]);
        if (!ok) continue;
        std::uint64_t key = static_cast<std::uint64_t>(dd.pair_index(g, p.m[0]));
        for (int j = 1; j < n && ok; ++j) {
          const int gj = G.conjugate(G.inv[p.s[j - 1]], g);
          const int pj = dd.pair_index(gj, p.m[j]);
          ok = pj >= 0;
          if (ok) key = key * sup.pair_radix + static_cast<std::uint64_t>(pj);
        }
        if (ok) ++local[key];
      }
    }
  });
  for (const auto& local : partial)
    for (const auto& [key, count] : local) sup.entries[key] += count;
  return sup;
}

inline std::vector<std::uint64_t> decode_pair_key(std::uint64_t key, std::uint64_t radix, int n) {
  std::vector<std::uint64_t> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    digits[i] = key % radix;
    key /= radix;
  }
  return digits;
}

}  // namespace detail

/// Cached support per (group, genus, boundary count).
inline const SurfaceSupport& surface_support(const DoubleData& dd, const MarkedSurface& x,
                                             const Caps& caps = {}) {
  static std::mutex mu;
  static std::map<std::tuple<std::string, int, int>,
                  std::unique_ptr<const SurfaceSupport>>
      cache;
  const auto key = std::make_tuple(cayley_digest(dd.group()), x.genus, x.boundary_count());
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto built =
        std::make_unique<const SurfaceSupport>(detail::compute_surface_support(dd, x, caps));
    it = cache.emplace(key, std::move(built)).first;
  }
  return *it->second;
}

namespace detail {

inline void validate_labels(const DoubleData& dd, int expected,
                            const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != expected)
    throw_usage("need one label per boundary circle",
                R"({"labels":)" + std::to_string(labels.size()) + R"(,"boundaries":)" +
                    std::to_string(expected) + "}");
  for (int l : labels)
    if (l < 0 || l >= dd.label_count())
      throw_usage("label index out of range", R"({"label":)" + std::to_string(l) + "}");
}

inline std::string label_list_json(const std::vector<int>& labels) {
  std::string s = "[";
  for (std::size_t i = 0; i < labels.size(); ++i)
    s += (i ? "," : "") + std::to_string(labels[i]);
  return s + "]";
}

}  // namespace detail

/// dim W(X; lambda) as the multiplicity <chi_E, prod_i chi_{dual lambda_i}>
/// over the commuting-pair grid.
inline std::uint64_t dim_w_characters(const DoubleData& dd, const MarkedSurface& x,
                                      const std::vector<int>& labels, const Caps& caps = {}) {
  detail::validate_labels(dd, x.boundary_count(), labels);
  const SurfaceSupport& sup = surface_support(dd, x, caps);
  const int n = sup.boundaries;
  std::vector<const std::vector<Cyclo>*> rows;
  rows.reserve(labels.size());
  for (int l : labels) rows.push_back(&dd.conj_chi_on_pairs(dd.dual(l)));
  Cyclo acc(dd.conductor());
  for (const auto& [key, count] : sup.entries) {
    const std::vector<std::uint64_t> digits = detail::decode_pair_key(key, sup.pair_radix, n);
    Cyclo term = Cyclo::from_rational(dd.conductor(), static_cast<long>(count));
    bool zero = false;
    for (int i = 0; i < n && !zero; ++i) {
      const Cyclo& v = (*rows[i])[digits[i]];
      zero = v.is_zero();
      if (!zero) term = term * v;
    }
    if (!zero) acc += term;
  }
  const BigInt v =
      (acc * rational_pow(Rational(1, dd.group().order), static_cast<long>(n))).as_integer();
  check(v >= 0, "dimension must be non-negative");
  return v.get_ui();
}

/// dim W(X; vacuum, ..., vacuum) as the number of orbits of the re-marking
/// actions on bundle classes with every monodromy trivial (a Burnside count
/// done by explicit orbit flooding — no characters involved).
inline std::uint64_t dim_w_enumeration(const DoubleData& dd, const MarkedSurface& x,
                                       const std::vector<int>& labels, const Caps& caps = {}) {
  detail::validate_labels(dd, x.boundary_count(), labels);
  for (int l : labels)
    if (l != dd.vacuum())
      throw_usage("the enumeration route counts orbits for the all-vacuum label vector only",
                  R"({"labels":)" + detail::label_list_json(labels) + "}");
  const FiniteGroup& G = dd.group();
  const std::uint64_t total = bundle_count(G, x, caps);
  const int n = x.boundary_count();

  std::vector<std::uint64_t> members;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const BundleTuple p = bundle_from_flat_index(G, x, idx);
    bool trivial = true;
    for (int i = 0; i < n && trivial; ++i) trivial = p.m[i] == 0;
    if (trivial) members.push_back(idx);
  }
  if (members.size() > static_cast<std::uint64_t>(caps.materialize_cap))
    throw_infeasible("trivial-monodromy locus exceeds the materialization cap",
                     R"({"members":)" + std::to_string(members.size()) + "}");

  std::vector<std::size_t> root(members.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = i;
  auto find = [&](std::size_t i) {
    while (root[i] != i) i = root[i] = root[root[i]];
    return i;
  };
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    const BundleTuple p = bundle_from_flat_index(G, x, members[pos]);
    for (int i = 0; i < n; ++i)
      for (int g = 1; g < G.order; ++g) {
        const std::uint64_t image_idx = flat_index_of(G, x, rho_action(G, p, i, g));
        const auto it = std::lower_bound(members.begin(), members.end(), image_idx);
        check(it != members.end() && *it == image_idx,
              "re-marking left the trivial-monodromy locus");
        const auto image = static_cast<std::size_t>(it - members.begin());
        const std::size_t a = find(pos), b = find(image);
        if (a != b) root[a > b ? a : b] = a > b ? b : a;
      }
  }
  std::uint64_t orbits = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    if (find(i) == i) ++orbits;
  return orbits;
}

/// Exact S and T matrices of D(G): for labels ([a], chi), ([b], psi),
///   S = (1 / (|Z(a)| |Z(b)|)) sum_{g : [a, g b g^-1] = 1}
///       conj chi(g b g^-1) conj psi(g^-1 a g),       T = chi(a) / chi(1).
struct ModularData {
  int conductor = 1;
  std::vector<std::vector<Cyclo>> S;
  std::vector<Cyclo> T;
};

namespace detail {

inline std::vector<std::vector<Cyclo>> mat_mul(const std::vector<std::vector<Cyclo>>& A,
                                               const std::vector<std::vector<Cyclo>>& B,
                                               int conductor) {
  const std::size_t L = A.size();
  std::vector<std::vector<Cyclo>> C(L, std::vector<Cyclo>(L, Cyclo::zero(conductor)));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t k = 0; k < L; ++k) {
      if (A[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < L; ++j) {
        if (B[k][j].is_zero()) continue;
        C[i][j] += A[i][k] * B[k][j];
      }
    }
  return C;
}

inline bool is_root_of_unity(const Cyclo& c, int conductor) {
  Cyclo p = c;
  const Cyclo one = Cyclo::one(conductor);
  for (int k = 1; k <= 2 * conductor; ++k) {
    if (p == one) return true;
    p = p * c;
  }
  return false;
}

inline ModularData compute_modular_data(const DoubleData& dd) {
  const FiniteGroup& G = dd.group();
  const int N = G.order;
  const int L = dd.label_count();
  const int cond = dd.conductor();
  ModularData md;
  md.conductor = cond;
  md.S.assign(L, std::vector<Cyclo>(L, Cyclo::zero(cond)));
  md.T.assign(L, Cyclo::zero(cond));

  const ConjClassInfo& cc = dd.classes();
  for (int l = 0; l < L; ++l) {
    const DoubleLabel& la = dd.labels()[l];
    const int a = cc.representative[la.class_index];
    const long za = static_cast<long>(cc.centralizer[la.class_index].size());
    for (int m = 0; m < L; ++m) {
      const DoubleLabel& mu = dd.labels()[m];
      const int b = cc.representative[mu.class_index];
      const long zb = static_cast<long>(cc.centralizer[mu.class_index].size());
      Cyclo sum(cond);
      for (int g = 0; g < N; ++g) {
        const int bg = G.conjugate(g, b);
        if (!G.commutes(a, bg)) continue;
        const int ag = G.conjugate(G.inv[g], a);
        sum += dd.centralizer_character(l, bg).conj() * dd.centralizer_character(m, ag).conj();
      }
      md.S[l][m] = sum * Rational(1, za * zb);
    }
    const int degree = la.dim / static_cast<int>(cc.classes[la.class_index].size());
    md.T[l] = dd.centralizer_character(l, a) * Rational(1, degree);
  }

  // The axioms, exactly.
  auto fail = [&](const std::string& what, int i, int j) {
    throw_violation("modular data axiom failed: " + what,
                    R"({"group":")" + G.name + R"(","entry":[)" + std::to_string(i) + "," +
                        std::to_string(j) + "]}");
  };
  const Cyclo one = Cyclo::one(cond), zero = Cyclo::zero(cond);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      if (md.S[i][j] != md.S[j][i]) fail("symmetry", i, j);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      Cyclo dot(cond);
      for (int k = 0; k < L; ++k) dot += md.S[i][k] * md.S[j][k].conj();
      if (dot != (i == j ? one : zero)) fail("unitarity", i, j);
    }
  const std::vector<std::vector<Cyclo>> S2 = mat_mul(md.S, md.S, cond);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      if (S2[i][j] != (j == dd.dual(i) ? one : zero)) fail("charge conjugation", i, j);
  std::vector<std::vector<Cyclo>> ST = md.S;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) ST[i][j] = ST[i][j] * md.T[j];
  const std::vector<std::vector<Cyclo>> ST3 = mat_mul(mat_mul(ST, ST, cond), ST, cond);
  const Cyclo scalar = ST3[0][dd.dual(0)];
  if (!is_root_of_unity(scalar, cond)) fail("(ST)^3 scalar", 0, 0);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j)
      if (ST3[i][j] != scalar * S2[i][j]) fail("(ST)^3 = c S^2", i, j);
  if (md.T[dd.vacuum()] != one) fail("vacuum twist", 0, 0);
  for (int i = 0; i < L; ++i)
    if (!is_root_of_unity(md.T[i], cond)) fail("twist root of unity", i, i);
  for (int j = 0; j < L; ++j)
    if (md.S[0][j] != Cyclo::from_rational(cond, fraction(dd.labels()[j].dim, N)))
      fail("first row dims/N", 0, j);
  return md;
}

}  // namespace detail

/// Cached exact modular data; every axiom is verified at construction.
inline const ModularData& modular_data(const DoubleData& dd) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<const ModularData>> cache;
  const std::string key = cayley_digest(dd.group());
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto built = std::make_unique<const ModularData>(detail::compute_modular_data(dd));
    it = cache.emplace(key, std::move(built)).first;
  }
  return *it->second;
}

/// Verlinde evaluation sum_mu S_{0mu}^(2-2g-n) prod_i S_{lambda_i mu};
/// serves any genus and any number of labels, including closed surfaces
/// (n = 0). The exact result must be a non-negative integer.
inline std::uint64_t verlinde_dim(const DoubleData& dd, int genus,
                                  const std::vector<int>& labels) {
  if (genus < 0) throw_usage("genus must be non-negative");
  for (int l : labels)
    if (l < 0 || l >= dd.label_count())
      throw_usage("label index out of range", R"({"label":)" + std::to_string(l) + "}");
  const ModularData& md = modular_data(dd);
  const long exponent = 2 - 2 * static_cast<long>(genus) - static_cast<long>(labels.size());
  Cyclo acc(md.conductor);
  for (int m = 0; m < dd.label_count(); ++m) {
    // S_{0mu} = dim mu / N is a positive rational, so negative powers are fine.
    Cyclo term = Cyclo::from_rational(
        md.conductor,
        rational_pow(fraction(dd.labels()[m].dim, dd.group().order), exponent));
    bool zero = false;
    for (int l : labels) {
      term = term * md.S[l][m];
      if ((zero = term.is_zero())) break;
    }
    if (!zero) acc += term;
  }
  const BigInt v = acc.as_integer();
  if (v < 0)
    throw_violation("Verlinde evaluation is negative",
                    R"({"genus":)" + std::to_string(genus) + R"(,"labels":)" +
                        detail::label_list_json(labels) + "}");
  if (!v.fits_ulong_p())
    throw_infeasible("Verlinde dimension exceeds 64 bits",
                     R"({"genus":)" + std::to_string(genus) + R"(,"labels":)" +
                         detail::label_list_json(labels) + "}");
  return v.get_ui();
}

/// Verlinde's formula against the coproduct fusion rules:
/// N_{lm}^n = sum_r S_{lr} S_{mr} conj(S_{nr}) / S_{0r}, exactly.
inline void verify_verlinde_fusion(const DoubleData& dd) {
  const ModularData& md = modular_data(dd);
  const int L = dd.label_count();
  for (int l = 0; l < L; ++l)
    for (int m = l; m < L; ++m) {
      const std::vector<long long>& row = dd.fuse(l, m);
      for (int n = 0; n < L; ++n) {
        Cyclo acc(md.conductor);
        for (int r = 0; r < L; ++r) {
          const Cyclo prod = md.S[l][r] * md.S[m][r] * md.S[n][r].conj();
          if (prod.is_zero()) continue;
          acc += prod * fraction(dd.group().order, dd.labels()[r].dim);
        }
        const BigInt v = acc.as_integer();
        if (v != static_cast<long>(row[n]))
          throw_violation("Verlinde formula disagrees with the fusion rules",
                          R"({"group":")" + dd.group().name + R"(","labels":[)" +
                              std::to_string(l) + "," + std::to_string(m) + "," +
                              std::to_string(n) + "]}");
      }
    }
}

enum class DimMethod { enumeration, characters, verlinde, all };

struct DimWResult {
  std::map<std::string, std::uint64_t> by_route;
  std::uint64_t value = 0;
};

/// Computes dim W(X; lambda) by the requested route(s). With `all`, the
/// characters and verlinde routes always run and the enumeration route joins
/// in on its domain (the all-vacuum vector); any disagreement is a hard
/// failure carrying the full instance.
inline DimWResult dim_w(const DoubleData& dd, const MarkedSurface& x,
                        const std::vector<int>& labels, DimMethod method = DimMethod::all,
                        const Caps& caps = {}) {
  detail::validate_labels(dd, x.boundary_count(), labels);
  const bool vacuum_only = [&] {
    for (int l : labels)
      if (l != dd.vacuum()) return false;
    return true;
  }();
  DimWResult r;
  if (method == DimMethod::characters || method == DimMethod::all)
    r.by_route["characters"] = dim_w_characters(dd, x, labels, caps);
  if (method == DimMethod::enumeration || (method == DimMethod::all && vacuum_only))
    r.by_route["enumeration"] = dim_w_enumeration(dd, x, labels, caps);
  if (method == DimMethod::verlinde || method == DimMethod::all)
    r.by_route["verlinde"] = verlinde_dim(dd, x.genus, labels);
  r.value = r.by_route.begin()->second;
  for (const auto& [route, value] : r.by_route)
    if (value != r.value) {
      std::string payload = R"({"group":")" + dd.group().name + R"(","genus":)" +
                            std::to_string(x.genus) + R"(,"labels":)" +
                            detail::label_list_json(labels);
      for (const auto& [rt, v] : r.by_route)
        payload += R"(,")" + rt + R"(":)" + std::to_string(v);
      throw_violation("dimension routes disagree", payload + "}");
    }
  return r;
}

/// The full table lambda -> dim W(X; lambda) over Irr(D(G))^n (nonzero
/// entries only), verified against both completeness identities:
///   sum (prod_i dim lambda_i) dim W = N^(2g+2n-2)
///   sum (dim W)^2 = <chi_E, chi_E>   (pure integer counting on the right).
inline std::map<std::vector<int>, std::uint64_t> decomposition_table(const DoubleData& dd,
                                                                     const MarkedSurface& x,
                                                                     const Caps& caps = {}) {
  const SurfaceSupport& sup = surface_support(dd, x, caps);
  const FiniteGroup& G = dd.group();
  const int n = sup.boundaries;
  const int L = dd.label_count();
  const int k = static_cast<int>(dd.classes().classes.size());

  // conj chi_{dual lambda} lives on pairs (g, h) with h in class(dual
  // lambda), so each support entry meets exactly the label tuples whose
  // dual-class vector matches its monodromy classes.
  std::vector<std::vector<int>> labels_with_dual_class(k);
  for (int l = 0; l < L; ++l)
    labels_with_dual_class[dd.labels()[dd.dual(l)].class_index].push_back(l);

  std::map<std::uint64_t, Cyclo> acc;
  std::vector<std::uint64_t> digits;
  for (const auto& [key, count] : sup.entries) {
    digits = detail::decode_pair_key(key, sup.pair_radix, n);
    // Depth-first over matching labels, sharing prefix products.
    auto descend = [&](auto&& self, int depth, const Cyclo& value, std::uint64_t tuple) -> void {
      if (depth == n) {
        auto it = acc.find(tuple);
        if (it == acc.end())
          acc.emplace(tuple, value);
        else
          it->second += value;
        return;
      }
      const int cls = dd.classes().class_of[dd.commuting_pairs()[digits[depth]].second];
      for (int l : labels_with_dual_class[cls]) {
        const Cyclo& chi = dd.conj_chi_on_pairs(dd.dual(l))[digits[depth]];
        if (chi.is_zero()) continue;
        self(self, depth + 1, value * chi, tuple * static_cast<std::uint64_t>(L) + l);
      }
    };
    descend(descend, 0, Cyclo::from_rational(dd.conductor(), static_cast<long>(count)), 0);
  }

  const Rational scale = rational_pow(Rational(1, G.order), static_cast<long>(n));
  std::map<std::vector<int>, std::uint64_t> table;
  BigInt weighted = 0, square_sum = 0;
  for (const auto& [tuple_key, value] : acc) {
    const BigInt dim = (value * scale).as_integer();
    check(dim >= 0, "dimension must be non-negative");
    if (dim == 0) continue;
    std::vector<int> tuple(n);
    std::uint64_t t = tuple_key;
    BigInt dims_product = dim;
    for (int i = n - 1; i >= 0; --i) {
      tuple[i] = static_cast<int>(t % L);
      t /= L;
      dims_product *= dd.labels()[tuple[i]].dim;
    }
    square_sum += dim * dim;
    weighted += dims_product;
    table.emplace(std::move(tuple), dim.get_ui());
  }

  const std::uint64_t total = bundle_count(G, x, caps);
  BigInt count_square_sum = 0;
  for (const auto& [key, count] : sup.entries) count_square_sum += BigInt(count) * count;
  auto payload = [&] {
    return R"({"group":")" + G.name + R"(","genus":)" + std::to_string(x.genus) +
           R"(,"boundaries":)" + std::to_string(n) + "}";
  };
  if (weighted != BigInt(static_cast<unsigned long>(total)))
    throw_violation("decomposition misses the bundle count", payload());
  if (square_sum * bigint_pow(BigInt(G.order), static_cast<unsigned long>(n)) !=
      count_square_sum)
    throw_violation("decomposition misses the module norm", payload());
  return table;
}

struct GluingDimReport {
  std::uint64_t whole = 0;                      // dim W(X; lambda)
  std::map<int, std::uint64_t> contributions;   // mu -> dim W(X_cut; lambda, mu, mu*)
  std::uint64_t glued_total = 0;
};

/// Cut-and-glue identity: dim W(X; lambda) = sum_mu dim W(X_cut; lambda, mu,
/// mu*), with mu at c' and its dual at c''. For separating cuts the right
/// side is the product of the two pieces' dimensions. Verified for both
/// placements of the pair (mu, mu*); mismatch is a hard failure.
inline GluingDimReport verify_gluing(const DoubleData& dd, const MarkedSurface& x,
                                     const CutSpec& cut, const std::vector<int>& labels,
                                     const Caps& caps = {}) {
  detail::validate_labels(dd, x.boundary_count(), labels);
  const CutResult pieces = cut_surface(x, cut);
  GluingDimReport rep;
  rep.whole = dim_w_characters(dd, x, labels, caps);
  std::uint64_t swapped_total = 0;
  for (int mu = 0; mu < dd.label_count(); ++mu) {
    const int mu_dual = dd.dual(mu);
    auto piece_dim = [&](int at_prime, int at_second) -> std::uint64_t {
      if (pieces.pieces.size() == 1) {
        std::vector<int> lv = labels;
        lv.push_back(at_prime);
        lv.push_back(at_second);
        return dim_w_characters(dd, pieces.pieces[0], lv, caps);
      }
      std::vector<int> lv1, lv2;
      for (int i : pieces.source_boundaries[0]) lv1.push_back(labels[i]);
      for (int i : pieces.source_boundaries[1]) lv2.push_back(labels[i]);
      lv1.push_back(at_prime);
      lv2.push_back(at_second);
      return dim_w_characters(dd, pieces.pieces[0], lv1, caps) *
             dim_w_characters(dd, pieces.pieces[1], lv2, caps);
    };
    rep.contributions[mu] = piece_dim(mu, mu_dual);
    rep.glued_total += rep.contributions[mu];
    swapped_total += piece_dim(mu_dual, mu);
  }
  if (rep.glued_total != rep.whole || swapped_total != rep.whole)
    throw_violation("gluing identity failed",
                    R"({"group":")" + dd.group().name + R"(","genus":)" +
                        std::to_string(x.genus) + R"(,"labels":)" +
                        detail::label_list_json(labels) + R"(,"whole":)" +
                        std::to_string(rep.whole) + R"(,"glued":)" +
                        std::to_string(rep.glued_total) + R"(,"swapped":)" +
                        std::to_string(swapped_total) + "}");
  return rep;
}

}  // namespace dgmf
