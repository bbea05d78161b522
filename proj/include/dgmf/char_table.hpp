#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dgmf/common.hpp"
#include "dgmf/cyclotomic.hpp"
#include "dgmf/group.hpp"

namespace dgmf {

/// Exact irreducible character table. Rows are characters, columns follow the
/// canonical conjugacy-class order. Row 0 is the trivial character; the rest
/// are sorted by (degree, lexicographic value vector).
struct CharacterTable {
  int group_order = 1;
  int num_classes = 1;
  int conductor = 1;  // values live in Q(zeta_conductor)
  std::vector<int> degrees;
  std::vector<int> class_reps;
  std::vector<int> class_sizes;
  std::vector<std::vector<Cyclo>> values;  // num_classes x num_classes
};

namespace detail {

struct Fp {
  std::uint64_t p;
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    a += b;
    return a >= p ? a - p : a;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p - b; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const { return a * b % p; }
  std::uint64_t pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  std::uint64_t inv(std::uint64_t a) const { return pow(a, p - 2); }
};

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// Smallest prime p with p = 1 (mod m) and p^2 > 4N (i.e. p > 2*sqrt(N)).
inline std::uint64_t dixon_prime(int N, int m, std::uint64_t search_bound = 100000000) {
  for (std::uint64_t p = m + 1;; p += m) {
    if (p > search_bound) throw_infeasible("no splitting prime found below bound");
    if (p * p > 4ull * N && is_prime_u64(p)) return p;
  }
}

inline std::uint64_t smallest_primitive_root(const Fp& fp) {
  const std::uint64_t p = fp.p;
  std::vector<std::uint64_t> fac;
  std::uint64_t n = p - 1;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) {
      fac.push_back(d);
      while (n % d == 0) n /= d;
    }
  if (n > 1) fac.push_back(n);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (std::uint64_t q : fac)
      if (fp.pow(g, (p - 1) / q) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
}

struct FpMatrix {
  int n = 0;
  std::vector<std::uint64_t> a;
  explicit FpMatrix(int size = 0) : n(size), a(static_cast<std::size_t>(size) * size, 0) {}
  std::uint64_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  std::uint64_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Characteristic polynomial via similarity reduction to Hessenberg form and
/// the leading-minor recurrence. Returns monic coefficients, ascending.
/// Works for any p (no division by factorials).
inline std::vector<std::uint64_t> charpoly(FpMatrix H, const Fp& fp) {
  const int n = H.n;
  for (int c = 0; c + 2 < n; ++c) {
    int piv = -1;
    for (int r = c + 1; r < n; ++r)
      if (H.at(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != c + 1) {
      for (int j = 0; j < n; ++j) std::swap(H.at(piv, j), H.at(c + 1, j));
      for (int i = 0; i < n; ++i) std::swap(H.at(i, piv), H.at(i, c + 1));
    }
    const std::uint64_t d = fp.inv(H.at(c + 1, c));
    for (int r = c + 2; r < n; ++r) {
      const std::uint64_t f = fp.mul(H.at(r, c), d);
      if (f == 0) continue;
      for (int j = 0; j < n; ++j) H.at(r, j) = fp.sub(H.at(r, j), fp.mul(f, H.at(c + 1, j)));
      for (int i = 0; i < n; ++i) H.at(i, c + 1) = fp.add(H.at(i, c + 1), fp.mul(f, H.at(i, r)));
    }
  }
  // p_m = (x - H[m][m]) p_{m-1} - sum_i H[i][m] (prod_{j=i+1..m} H[j][j-1]) p_{i-1}
  std::vector<std::vector<std::uint64_t>> ps(static_cast<std::size_t>(n) + 1);
  ps[0] = {1};
  for (int m = 1; m <= n; ++m) {
    std::vector<std::uint64_t> pm(static_cast<std::size_t>(m) + 1, 0);
    const auto& prev = ps[m - 1];
    const std::uint64_t h = H.at(m - 1, m - 1) % fp.p;
    for (int t = 0; t < m; ++t) {
      pm[t + 1] = fp.add(pm[t + 1], prev[t]);          // x * prev
      pm[t] = fp.sub(pm[t], fp.mul(h, prev[t]));       // -H[m][m] * prev
    }
    std::uint64_t run = 1;  // prod of subdiagonal entries H[j][j-1], j = m down to i+1
    for (int i = m - 1; i >= 1; --i) {
      run = fp.mul(run, H.at(i, i - 1));
      if (run == 0) break;
      const std::uint64_t coef = fp.mul(H.at(i - 1, m - 1), run);
      if (coef == 0) continue;
      const auto& pi = ps[i - 1];
      for (std::size_t t = 0; t < pi.size(); ++t) pm[t] = fp.sub(pm[t], fp.mul(coef, pi[t]));
    }
    ps[m] = std::move(pm);
  }
  return ps[n];
}

inline std::uint64_t poly_eval(const std::vector<std::uint64_t>& poly, std::uint64_t x,
                               const Fp& fp) {
  std::uint64_t acc = 0;
  for (std::size_t i = poly.size(); i-- > 0;) acc = fp.add(fp.mul(acc, x), poly[i]);
  return acc;
}

/// Basis of the right nullspace, deterministic reduced form.
inline std::vector<std::vector<std::uint64_t>> nullspace(FpMatrix M, const Fp& fp) {
  const int n = M.n;
  std::vector<int> pivot_col_of_row(n, -1);
  std::vector<char> is_pivot_col(n, 0);
  int row = 0;
  for (int col = 0; col < n && row < n; ++col) {
    int piv = -1;
    for (int r = row; r < n; ++r)
      if (M.at(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != row)
      for (int j = 0; j < n; ++j) std::swap(M.at(piv, j), M.at(row, j));
    const std::uint64_t d = fp.inv(M.at(row, col));
    for (int j = 0; j < n; ++j) M.at(row, j) = fp.mul(M.at(row, j), d);
    for (int r = 0; r < n; ++r) {
      if (r == row || M.at(r, col) == 0) continue;
      const std::uint64_t f = M.at(r, col);
      for (int j = 0; j < n; ++j) M.at(r, j) = fp.sub(M.at(r, j), fp.mul(f, M.at(row, j)));
    }
    pivot_col_of_row[row] = col;
    is_pivot_col[col] = 1;
    ++row;
  }
  std::vector<std::vector<std::uint64_t>> basis;
  for (int col = 0; col < n; ++col) {
    if (is_pivot_col[col]) continue;
    std::vector<std::uint64_t> v(n, 0);
    v[col] = 1;
    for (int r = 0; r < row; ++r)
      v[pivot_col_of_row[r]] = fp.sub(0, M.at(r, col));
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Subspace in reduced column-echelon form (unit pivots ascending, pivot rows
/// cleared in the other columns). This form is unique per subspace, which
/// keeps the whole pipeline deterministic.
struct Echelon {
  std::vector<std::vector<std::uint64_t>> cols;
  std::vector<int> pivots;
  int dim() const { return static_cast<int>(cols.size()); }
};

inline void echelon_insert(Echelon& E, std::vector<std::uint64_t> w, const Fp& fp) {
  for (std::size_t t = 0; t < E.cols.size(); ++t) {
    const std::uint64_t c = w[E.pivots[t]];
    if (c == 0) continue;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = fp.sub(w[i], fp.mul(c, E.cols[t][i]));
  }
  int piv = -1;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] != 0) {
      piv = static_cast<int>(i);
      break;
    }
  if (piv < 0) return;  // dependent
  const std::uint64_t d = fp.inv(w[piv]);
  for (auto& x : w) x = fp.mul(x, d);
  for (std::size_t t = 0; t < E.cols.size(); ++t) {
    const std::uint64_t c = E.cols[t][piv];
    if (c == 0) continue;
    for (std::size_t i = 0; i < w.size(); ++i)
      E.cols[t][i] = fp.sub(E.cols[t][i], fp.mul(c, w[i]));
  }
  std::size_t pos = 0;
  while (pos < E.pivots.size() && E.pivots[pos] < piv) ++pos;
  E.cols.insert(E.cols.begin() + pos, std::move(w));
  E.pivots.insert(E.pivots.begin() + pos, piv);
}

}  // namespace detail

/// Exact character table over Q(zeta_conductor); conductor defaults to the
/// group exponent and must be a multiple of it. Algorithm: common eigenspaces
/// of the class-sum matrices over a prime field F_p with p = 1 (mod exponent),
/// then lifting eigenvalue multiplicities to cyclotomic integers. Both
/// orthogonality relations are verified exactly before returning.
inline CharacterTable compute_character_table(const FiniteGroup& G, const ConjClassInfo& cc,
                                              int conductor = 0);

/// Exact verification of both orthogonality relations plus structural
/// invariants; throws Error(violation) on any failure.
inline void check_character_table(const FiniteGroup& G, const ConjClassInfo& cc,
                                  const CharacterTable& T) {
  const int k = T.num_classes, N = T.group_order;
  check(k == static_cast<int>(cc.classes.size()), "character table: class count mismatch");
  check(N == G.order, "character table: group order mismatch");
  long long sumsq = 0;
  for (int d : T.degrees) {
    check(d >= 1 && N % d == 0, "character degree must divide the group order");
    sumsq += static_cast<long long>(d) * d;
  }
  check(sumsq == N, "sum of squared degrees must equal the group order");
  const Cyclo one = Cyclo::one(T.conductor);
  for (int j = 0; j < k; ++j)
    check(T.values[0][j] == one, "row 0 must be the trivial character");
  for (int i = 0; i < k; ++i)
    check(T.values[i][0] == Cyclo::from_rational(T.conductor, T.degrees[i]),
          "column 0 must list the degrees");
  // value on the inverse class is the complex conjugate
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      int jbar = cc.class_of[G.inv[cc.representative[j]]];
      check(T.values[i][jbar] == T.values[i][j].conj(),
            "character on inverse class must be the conjugate");
    }
  // rows: (1/N) sum_j |C_j| chi_a(j) conj(chi_b(j)) = delta_ab
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      Cyclo s(T.conductor);
      for (int j = 0; j < k; ++j)
        s += Cyclo::from_rational(T.conductor, static_cast<long>(cc.classes[j].size())) *
             T.values[a][j] * T.values[b][j].conj();
      Cyclo want = Cyclo::from_rational(T.conductor, a == b ? N : 0);
      if (s != want)
        throw_violation("row orthogonality fails",
                        R"({"rows":[)" + std::to_string(a) + "," + std::to_string(b) + "]}");
    }
  // columns: sum_i chi_i(a) conj(chi_i(b)) = delta_ab |centralizer(a)|
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      Cyclo s(T.conductor);
      for (int i = 0; i < k; ++i) s += T.values[i][a] * T.values[i][b].conj();
      long cent = a == b ? static_cast<long>(cc.centralizer[a].size()) : 0;
      if (s != Cyclo::from_rational(T.conductor, cent))
        throw_violation("column orthogonality fails",
                        R"({"columns":[)" + std::to_string(a) + "," + std::to_string(b) + "]}");
    }
}

inline CharacterTable compute_character_table(const FiniteGroup& G, const ConjClassInfo& cc,
                                              int conductor) {
  using namespace detail;
  const int N = G.order;
  const int m = G.exponent;
  const int k = static_cast<int>(cc.classes.size());
  const int cond = conductor == 0 ? m : conductor;
  check(cond % m == 0, "conductor must be a multiple of the group exponent",
        Error::Kind::usage);

  const Fp fp{dixon_prime(N, m)};
  const std::uint64_t p = fp.p;

  std::vector<int> inv_class(k);
  for (int j = 0; j < k; ++j) inv_class[j] = cc.class_of[G.inv[cc.representative[j]]];

  // class-sum matrix for class j: A[i][l] = #{x in C_j : x^-1 g_l in C_i}
  auto class_matrix = [&](int j) {
    FpMatrix A(k);
    for (int x : cc.classes[j])
      for (int l = 0; l < k; ++l) {
        int i = cc.class_of[G.at(G.inv[x], cc.representative[l])];
        std::uint64_t& v = A.at(i, l);
        v = fp.add(v, 1);
      }
    return A;
  };

  // split the identity subspace into common eigenspaces
  std::vector<Echelon> spaces(1);
  spaces[0].cols.resize(k);
  spaces[0].pivots.resize(k);
  for (int i = 0; i < k; ++i) {
    spaces[0].cols[i].assign(k, 0);
    spaces[0].cols[i][i] = 1;
    spaces[0].pivots[i] = i;
  }

  auto all_split = [&] {
    for (const auto& s : spaces)
      if (s.dim() > 1) return false;
    return true;
  };

  auto split_with = [&](const FpMatrix& A) {
    std::vector<Echelon> next;
    for (auto& S : spaces) {
      const int d = S.dim();
      if (d == 1) {
        next.push_back(std::move(S));
        continue;
      }
      // restriction of A to S in the echelon coordinates
      FpMatrix R(d);
      bool invariant = true;
      for (int t = 0; t < d && invariant; ++t) {
        std::vector<std::uint64_t> w(k, 0);
        for (int i = 0; i < k; ++i) {
          if (S.cols[t][i] == 0) continue;
          for (int r = 0; r < k; ++r) w[r] = fp.add(w[r], fp.mul(A.at(r, i), S.cols[t][i]));
        }
        for (int u = 0; u < d; ++u) R.at(u, t) = w[S.pivots[u]];
        for (int u = 0; u < d; ++u) {
          if (R.at(u, t) == 0) continue;
          for (int i = 0; i < k; ++i) w[i] = fp.sub(w[i], fp.mul(R.at(u, t), S.cols[u][i]));
        }
        for (int i = 0; i < k; ++i)
          if (w[i] != 0) invariant = false;
      }
      check(invariant, "class matrix does not preserve a candidate eigenspace");
      const auto cp = charpoly(R, fp);
      std::vector<std::uint64_t> roots;
      for (std::uint64_t lam = 0; lam < p; ++lam)
        if (poly_eval(cp, lam, fp) == 0) roots.push_back(lam);
      if (roots.size() <= 1) {
        next.push_back(std::move(S));  // A is scalar here; no split
        continue;
      }
      int total = 0;
      for (std::uint64_t lam : roots) {
        FpMatrix Rl = R;
        for (int t = 0; t < d; ++t) Rl.at(t, t) = fp.sub(Rl.at(t, t), lam);
        Echelon piece;
        for (auto& v : nullspace(Rl, fp)) {
          std::vector<std::uint64_t> amb(k, 0);
          for (int t = 0; t < d; ++t) {
            if (v[t] == 0) continue;
            for (int i = 0; i < k; ++i)
              amb[i] = fp.add(amb[i], fp.mul(v[t], S.cols[t][i]));
          }
          echelon_insert(piece, std::move(amb), fp);
        }
        check(piece.dim() > 0, "eigenvalue with empty eigenspace");
        total += piece.dim();
        next.push_back(std::move(piece));
      }
      check(total == d, "class matrix is not diagonalizable on a subspace");
    }
    spaces = std::move(next);
  };

  for (int j = 1; j < k && !all_split(); ++j) split_with(class_matrix(j));
  if (!all_split()) {
    // fallback: products of two class matrices, lexicographic pair order
    for (int j1 = 1; j1 < k && !all_split(); ++j1) {
      const FpMatrix A1 = class_matrix(j1);
      for (int j2 = j1; j2 < k && !all_split(); ++j2) {
        const FpMatrix A2 = class_matrix(j2);
        FpMatrix P(k);
        for (int i = 0; i < k; ++i)
          for (int l = 0; l < k; ++l) {
            std::uint64_t s = 0;
            for (int t = 0; t < k; ++t) s = fp.add(s, fp.mul(A1.at(i, t), A2.at(t, l)));
            P.at(i, l) = s;
          }
        split_with(P);
      }
    }
  }
  check(all_split(), "class algebra failed to split into one-dimensional eigenspaces");

  // each line v (normalized v[0] = 1) carries v[j] = |C_j| chi(g_j) / deg mod p
  std::vector<std::uint64_t> class_size_inv(k);
  for (int j = 0; j < k; ++j) class_size_inv[j] = fp.inv(cc.classes[j].size() % p);

  struct ModRow {
    int degree;
    std::vector<std::uint64_t> chi;  // chi(g_j) mod p
  };
  std::vector<ModRow> rows;
  const int dmax = static_cast<int>(std::sqrt(static_cast<double>(N)) + 0.5);
  for (const auto& S : spaces) {
    std::vector<std::uint64_t> v = S.cols[0];
    check(v[0] != 0, "eigenvector vanishes on the identity class");
    const std::uint64_t norm = fp.inv(v[0]);
    for (auto& x : v) x = fp.mul(x, norm);
    std::uint64_t s1 = 0;
    for (int j = 0; j < k; ++j)
      s1 = fp.add(s1, fp.mul(fp.mul(v[j], v[inv_class[j]]), class_size_inv[j]));
    check(s1 != 0, "degree normalization sum vanished");
    int degree = 0;
    const std::uint64_t target = static_cast<std::uint64_t>(N) % p;
    for (int d = 1; d <= dmax; ++d)
      if (fp.mul(fp.mul(d, d), s1) == target) {
        degree = d;
        break;
      }
    check(degree > 0, "no degree matches the eigenvector normalization");
    ModRow r;
    r.degree = degree;
    r.chi.resize(k);
    for (int j = 0; j < k; ++j) r.chi[j] = fp.mul(fp.mul(degree % p, v[j]), class_size_inv[j]);
    rows.push_back(std::move(r));
  }
  check(static_cast<int>(rows.size()) == k, "wrong number of characters");

  // lift: chi(g_j) = sum_r a_r zeta_m^r with
  // a_r = (1/m) sum_s chi(g_j^s) z^(-rs) mod p, a_r an integer in [0, degree]
  const std::uint64_t gamma = smallest_primitive_root(fp);
  const std::uint64_t z_inv = fp.inv(fp.pow(gamma, (p - 1) / m));
  const std::uint64_t m_inv = fp.inv(static_cast<std::uint64_t>(m) % p);
  std::vector<std::uint64_t> zinv_pow(m);
  zinv_pow[0] = 1;
  for (int i = 1; i < m; ++i) zinv_pow[i] = fp.mul(zinv_pow[i - 1], z_inv);

  CharacterTable T;
  T.group_order = N;
  T.num_classes = k;
  T.conductor = cond;
  T.class_reps = cc.representative;
  T.class_sizes.resize(k);
  for (int j = 0; j < k; ++j) T.class_sizes[j] = static_cast<int>(cc.classes[j].size());
  const int stretch = cond / m;
  std::vector<std::pair<int, std::vector<Cyclo>>> table;  // (degree, values)
  for (const auto& r : rows) {
    std::vector<Cyclo> vals;
    vals.reserve(k);
    for (int j = 0; j < k; ++j) {
      Cyclo val(cond);
      for (int rr = 0; rr < m; ++rr) {
        std::uint64_t a = 0;
        for (int s = 0; s < m; ++s)
          a = fp.add(a, fp.mul(r.chi[cc.power_map[j][s]],
                               zinv_pow[static_cast<std::size_t>(rr) * s % m]));
        a = fp.mul(a, m_inv);
        check(a <= static_cast<std::uint64_t>(r.degree),
              "eigenvalue multiplicity exceeds the degree");
        if (a != 0)
          val += Cyclo::from_rational(cond, static_cast<long>(a)) *
                 Cyclo::root_of_unity(cond, static_cast<long>(rr) * stretch);
      }
      vals.push_back(std::move(val));
    }
    table.emplace_back(r.degree, std::move(vals));
  }

  const Cyclo one = Cyclo::one(cond);
  auto is_trivial = [&](const std::pair<int, std::vector<Cyclo>>& row) {
    for (const auto& v : row.second)
      if (v != one) return false;
    return true;
  };
  std::sort(table.begin(), table.end(), [&](const auto& x, const auto& y) {
    bool tx = is_trivial(x), ty = is_trivial(y);
    if (tx != ty) return tx;
    if (x.first != y.first) return x.first < y.first;
    for (int j = 0; j < k; ++j) {
      int c = Cyclo::compare(x.second[j], y.second[j]);
      if (c != 0) return c < 0;
    }
    return false;
  });
  check(is_trivial(table[0]), "trivial character missing");
  for (auto& [deg, vals] : table) {
    T.degrees.push_back(deg);
    T.values.push_back(std::move(vals));
  }
  check_character_table(G, cc, T);
  return T;
}

/// A cached table together with the group presentation it was computed from,
/// so cache entries can be persisted and re-validated independently.
struct CachedTable {
  FiniteGroup group;
  CharacterTable table;
};

namespace detail {

struct CharTableCache {
  std::mutex mu;
  std::map<std::pair<std::string, int>, std::unique_ptr<const CachedTable>> map;
};

inline CharTableCache& char_table_cache() {
  static CharTableCache c;
  return c;
}

}  // namespace detail

/// Inserts a precomputed table under (digest, table.conductor); the first
/// insertion per key wins. Callers must have validated the table.
inline void character_table_preload(const std::string& digest, FiniteGroup G,
                                    CharacterTable table) {
  auto& cache = detail::char_table_cache();
  const auto key = std::make_pair(digest, table.conductor);
  auto entry = std::make_unique<const CachedTable>(CachedTable{std::move(G), std::move(table)});
  std::lock_guard<std::mutex> lk(cache.mu);
  cache.map.emplace(key, std::move(entry));
}

/// Visits every cached entry as fn(digest, conductor, CachedTable) under the
/// cache lock; iteration order is the sorted key order.
template <class Fn>
void character_table_cache_visit(Fn&& fn) {
  auto& cache = detail::char_table_cache();
  std::lock_guard<std::mutex> lk(cache.mu);
  for (const auto& [key, entry] : cache.map) fn(key.first, key.second, *entry);
}

/// Cached variant keyed by (Cayley digest, conductor); at most one
/// construction per key, stable references.
inline const CharacterTable& character_table(const FiniteGroup& G, const ConjClassInfo& cc,
                                             int conductor = 0) {
  auto& cache = detail::char_table_cache();
  const int cond = conductor == 0 ? G.exponent : conductor;
  const auto key = std::make_pair(cayley_digest(G), cond);
  std::lock_guard<std::mutex> lk(cache.mu);
  auto it = cache.map.find(key);
  if (it == cache.map.end()) {
    auto built = std::make_unique<const CachedTable>(
        CachedTable{G, compute_character_table(G, cc, cond)});
    it = cache.map.emplace(key, std::move(built)).first;
  }
  return it->second->table;
}

}  // namespace dgmf
