// Acceptance gate: ten checks, one PASS/FAIL line each, nonzero exit on any
// failure. Every comparison is exact; the only tolerances are the wall-clock
// budgets pinned below.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dgmf/cli.hpp"

using namespace dgmf;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw Failure(msg);
}

const std::vector<std::string> kPresets{"Z2", "Z3", "S3", "D4", "Q8"};
const std::vector<std::pair<int, int>> kSurfaceBattery{{0, 1}, {0, 2}, {0, 3}, {1, 1}};

// Orbit count of conjugation on commuting pairs, by Burnside's lemma alone:
// the expected vacuum dimension of the one-holed torus.
std::uint64_t torus_vacuum_burnside(const FiniteGroup& G) {
  std::uint64_t fixed = 0;
  for (int g = 0; g < G.order; ++g)
    for (int a = 0; a < G.order; ++a)
      for (int b = 0; b < G.order; ++b)
        if (G.commutes(a, b) && G.commutes(g, a) && G.commutes(g, b)) ++fixed;
  require(fixed % static_cast<std::uint64_t>(G.order) == 0, "Burnside sum must divide");
  return fixed / static_cast<std::uint64_t>(G.order);
}

// --- criterion bodies ---------------------------------------------------------

void criterion_bundle_counts() {
  for (const std::string& token : kPresets)
    for (const auto& [g, n] : kSurfaceBattery) {
      const FiniteGroup G = preset_from_token(token);
      const MarkedSurface x = make_surface(g, n);
      const std::uint64_t expected =
          u64_pow(static_cast<std::uint64_t>(G.order), x.free_coordinate_count());
      const std::uint64_t counted = bundle_count(G, x);
      require(counted == expected, token + " (" + std::to_string(g) + "," + std::to_string(n) +
                                       "): count " + std::to_string(counted) + " != |G|^(2g+2n-2) " +
                                       std::to_string(expected));
      const std::vector<BundleTuple> all = enumerate_bundles(G, x);
      require(all.size() == expected, token + ": enumeration disagrees with the count");
      for (const BundleTuple& p : all)
        require(satisfies_relation(G, p), token + ": enumerated tuple breaks the relation");
    }
}

void criterion_relation_sweep() {
  for (const std::string& token : {std::string("Z2"), std::string("S3")})
    for (const auto& [g, n] : {std::pair{0, 2}, std::pair{1, 1}}) {
      const FiniteGroup G = preset_from_token(token);
      const MarkedSurface x = make_surface(g, n);
      const std::vector<BundleTuple> all = enumerate_bundles(G, x);
      for (const BundleTuple& p : all)
        for (int i = 0; i < n; ++i)
          for (int h = 0; h < G.order; ++h) {
            const BundleTuple q = rho_action(G, p, i, h);
            require(satisfies_relation(G, q), token + ": re-marked tuple breaks the relation");
            require(monodromy(q, i) == G.conjugate(h, monodromy(p, i)),
                    token + ": monodromy must transform by conjugation");
            for (int j = 0; j < n; ++j)
              if (j != i)
                require(monodromy(q, j) == monodromy(p, j),
                        token + ": untouched boundary monodromy changed");
          }
      // distinct boundary circles act independently
      for (const BundleTuple& p : all)
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            for (int h1 = 0; h1 < G.order; ++h1)
              for (int h2 = 0; h2 < G.order; ++h2)
                require(rho_action(G, rho_action(G, p, i, h1), j, h2) ==
                            rho_action(G, rho_action(G, p, j, h2), i, h1),
                        token + ": actions on distinct circles must commute");
    }
}

void criterion_character_tables() {
  for (const std::string& token : kPresets) {
    const FiniteGroup G = preset_from_token(token);
    const ConjClassInfo cc = conjugacy_data(G);
    const CharacterTable& T = character_table(G, cc);
    check_character_table(G, cc, T);
    long long sumsq = 0;
    for (int d : T.degrees) sumsq += static_cast<long long>(d) * d;
    require(sumsq == G.order, token + ": sum of squared degrees misses the order");
    for (std::size_t t = 0; t < cc.classes.size(); ++t) {
      const Subgroup Z = make_subgroup(G, cc.centralizer[t]);
      const ConjClassInfo zcc = conjugacy_data(Z.group);
      const CharacterTable& ZT = character_table(Z.group, zcc);
      check_character_table(Z.group, zcc, ZT);
      long long zsumsq = 0;
      for (int d : ZT.degrees) zsumsq += static_cast<long long>(d) * d;
      require(zsumsq == Z.group.order, token + ": centralizer table degree sum is wrong");
    }
  }
}

void criterion_double_structure() {
  const std::map<std::string, int> pinned{{"Z2", 4}, {"S3", 8}, {"D4", 22}, {"Q8", 22}};
  for (const std::string& token : kPresets) {
    const DoubleData dd(preset_from_token(token));
    const int L = dd.label_count();
    const int N = dd.group().order;
    const auto it = pinned.find(token);
    if (it != pinned.end())
      require(L == it->second, token + ": expected " + std::to_string(it->second) + " labels, got " +
                                   std::to_string(L));
    long long dimsq = 0;
    for (const DoubleLabel& lab : dd.labels()) {
      require(lab.dim >= 1, token + ": label dimension must be positive");
      dimsq += static_cast<long long>(lab.dim) * lab.dim;
    }
    require(dimsq == static_cast<long long>(N) * N, token + ": sum dim^2 must be |G|^2");

    // Gram matrix of the label characters is exactly N times the identity.
    for (int l = 0; l < L; ++l) {
      const auto& left = dd.chi_on_pairs(l);
      for (int m = 0; m < L; ++m) {
        const auto& right = dd.conj_chi_on_pairs(m);
        Cyclo s(dd.conductor());
        for (std::size_t p = 0; p < left.size(); ++p)
          if (!left[p].is_zero() && !right[p].is_zero()) s += left[p] * right[p];
        require(s == Cyclo::from_rational(dd.conductor(), l == m ? N : 0),
                token + ": character Gram matrix is not the identity");
      }
    }

    // Fusion: non-negative integers, commutative, vacuum-unital, associative,
    // and dual detection N_{lm}^vac = [m == dual(l)].
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m) {
        const auto& row = dd.fuse(l, m);
        const auto& rev = dd.fuse(m, l);
        for (int r = 0; r < L; ++r) {
          require(row[r] >= 0, token + ": negative fusion coefficient");
          require(row[r] == rev[r], token + ": fusion must be commutative");
        }
        require(row[dd.vacuum()] == (m == dd.dual(l) ? 1 : 0),
                token + ": vacuum multiplicity must detect duals");
      }
    for (int l = 0; l < L; ++l) {
      const auto& unit = dd.fuse(dd.vacuum(), l);
      for (int r = 0; r < L; ++r)
        require(unit[r] == (r == l ? 1 : 0), token + ": vacuum must be a fusion unit");
    }
    std::vector<const std::vector<long long>*> rows(static_cast<std::size_t>(L) * L);
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m) rows[static_cast<std::size_t>(l) * L + m] = &dd.fuse(l, m);
    const auto coeff = [&](int a, int b, int c) {
      return (*rows[static_cast<std::size_t>(a) * L + b])[c];
    };
    for (int l = 0; l < L; ++l)
      for (int m = 0; m < L; ++m)
        for (int p = 0; p < L; ++p)
          for (int q = 0; q < L; ++q) {
            long long lhs = 0, rhs = 0;
            for (int r = 0; r < L; ++r) {
              lhs += coeff(l, m, r) * coeff(r, p, q);
              rhs += coeff(m, p, r) * coeff(l, r, q);
            }
            require(lhs == rhs, token + ": fusion must be associative");
          }
  }
}

void criterion_decomposition() {
  for (const std::string& token : {std::string("Z2"), std::string("S3")}) {
    const DoubleData dd(preset_from_token(token));
    const FiniteGroup& G = dd.group();
    for (const auto& [g, n] : kSurfaceBattery) {
      const MarkedSurface x = make_surface(g, n);
      const auto table = decomposition_table(dd, x);

      BigInt weighted = 0, square_sum = 0;
      for (const auto& [vec, w] : table) {
        BigInt term(static_cast<unsigned long>(w));
        for (int l : vec) term *= dd.labels()[l].dim;
        weighted += term;
        square_sum += BigInt(static_cast<unsigned long>(w)) * static_cast<unsigned long>(w);
      }
      require(weighted == bigint_pow(BigInt(G.order),
                                     static_cast<unsigned long>(x.free_coordinate_count())),
              token + ": weighted dimension sum misses the bundle count");

      // Independent norm oracle: sweep every commuting-pair tuple and sum the
      // squared permutation-character values directly.
      const auto& pairs = dd.commuting_pairs();
      const std::size_t P = pairs.size();
      std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
      std::vector<std::pair<int, int>> chosen(static_cast<std::size_t>(n));
      BigInt trace_norm = 0;
      for (bool done = false; !done;) {
        for (int i = 0; i < n; ++i) chosen[static_cast<std::size_t>(i)] = pairs[odo[i]];
        const std::uint64_t chi = e_module_character(G, x, chosen);
        trace_norm += BigInt(chi) * chi;
        int pos = n - 1;
        while (pos >= 0 && ++odo[static_cast<std::size_t>(pos)] == P) {
          odo[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        done = pos < 0;
      }
      require(square_sum * bigint_pow(BigInt(G.order), static_cast<unsigned long>(n)) ==
                  trace_norm,
              token + ": sum of squared dimensions misses <chi_E, chi_E>");
    }
  }
}

void criterion_gluing() {
  for (const std::string& token : {std::string("Z2"), std::string("S3")}) {
    const DoubleData dd(preset_from_token(token));
    const FiniteGroup& G = dd.group();
    const int L = dd.label_count();

    const auto check_cut = [&](const MarkedSurface& x, const CutSpec& spec) {
      const GluingReport bij = gluing_bijection_check(G, x, spec);
      require(bij.orbit_count == bij.bundles_on_surface,
              token + ": matched-tuple orbits must biject with bundle classes");
      require(bij.invariants_dim == bij.bundles_on_surface,
              token + ": invariants dimension must equal the bundle count");
      require(bij.invariants_dim_swapped == bij.invariants_dim,
              token + ": gluing must not depend on the fresh-circle order");
    };

    const MarkedSurface torus = make_surface(1, 1);
    const CutSpec nonsep = CutSpec::nonseparating();
    check_cut(torus, nonsep);
    for (int l = 0; l < L; ++l) {
      const GluingDimReport rep = verify_gluing(dd, torus, nonsep, {l});
      require(rep.whole == rep.glued_total, token + ": torus gluing dimension sum failed");
    }

    const MarkedSurface four = make_surface(0, 4);
    const CutSpec sep = CutSpec::separating(0, {"p1", "p2"});
    check_cut(four, sep);
    const int vac = dd.vacuum();
    {
      const GluingDimReport rep = verify_gluing(dd, four, sep, {vac, vac, vac, vac});
      require(rep.whole == rep.glued_total, token + ": (0,4) vacuum gluing failed");
    }
    for (int l = 0; l < L; ++l) {
      const GluingDimReport rep = verify_gluing(dd, four, sep, {l, dd.dual(l), vac, vac});
      require(rep.whole == rep.glued_total, token + ": (0,4) labeled gluing failed");
    }
  }
}

void criterion_spot_values() {
  const std::map<std::string, std::uint64_t> pinned{{"Z2", 4}, {"S3", 8}};
  for (const auto& [token, expected] : pinned) {
    const DoubleData dd(preset_from_token(token));
    const int L = dd.label_count();

    const auto disk = decomposition_table(dd, make_surface(0, 1));
    require(disk.size() == 1, token + ": disk must support only the vacuum");
    require(disk.begin()->first == std::vector<int>{dd.vacuum()} && disk.begin()->second == 1,
            token + ": disk vacuum dimension must be 1");

    const auto annulus = decomposition_table(dd, make_surface(0, 2));
    require(annulus.size() == static_cast<std::size_t>(L),
            token + ": annulus must pair each label with its dual");
    for (int l = 0; l < L; ++l) {
      const auto it = annulus.find({l, dd.dual(l)});
      require(it != annulus.end() && it->second == 1,
              token + ": annulus dimension must be the dual pairing");
    }

    const std::uint64_t burnside = torus_vacuum_burnside(dd.group());
    require(burnside == expected, token + ": Burnside oracle disagrees with the pinned value");
    const DimWResult torus = dim_w(dd, make_surface(1, 1), {dd.vacuum()});
    require(torus.value == expected, token + ": torus vacuum dimension must be " +
                                         std::to_string(expected));
  }
}

void criterion_modular_data() {
  for (const std::string& token : kPresets) {
    const DoubleData dd(preset_from_token(token));
    const ModularData& md = modular_data(dd);
    const int L = dd.label_count();
    const Cyclo one = Cyclo::from_rational(md.conductor, Rational(1));

    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j)
        require(md.S[i][j] == md.S[j][i], token + ": S must be symmetric");
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        Cyclo s(md.conductor);
        for (int k = 0; k < L; ++k) s += md.S[i][k] * md.S[j][k].conj();
        require(s == (i == j ? one : Cyclo(md.conductor)), token + ": S must be unitary");
      }
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        Cyclo s(md.conductor);
        for (int k = 0; k < L; ++k) s += md.S[i][k] * md.S[k][j];
        require(s == (j == dd.dual(i) ? one : Cyclo(md.conductor)),
                token + ": S^2 must be the charge conjugation");
      }
    require(md.T[dd.vacuum()] == one, token + ": vacuum twist must be 1");

    // (ST)^3 = c S^2 for one global scalar c.
    std::vector<std::vector<Cyclo>> st(L, std::vector<Cyclo>(L, Cyclo(md.conductor)));
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) st[i][j] = md.S[i][j] * md.T[j];
    const auto matmul = [&](const std::vector<std::vector<Cyclo>>& A,
                            const std::vector<std::vector<Cyclo>>& B) {
      std::vector<std::vector<Cyclo>> C(L, std::vector<Cyclo>(L, Cyclo(md.conductor)));
      for (int i = 0; i < L; ++i)
        for (int k = 0; k < L; ++k) {
          if (A[i][k].is_zero()) continue;
          for (int j = 0; j < L; ++j) C[i][j] += A[i][k] * B[k][j];
        }
      return C;
    };
    const auto st3 = matmul(matmul(st, st), st);
    // S^2[vac][vac] = 1, so the scalar is st3 at the vacuum corner.
    const Cyclo c = st3[dd.vacuum()][dd.vacuum()];
    require(!c.is_zero(), token + ": (ST)^3 scalar must be nonzero");
    for (int i = 0; i < L; ++i)
      for (int j = 0; j < L; ++j) {
        const Cyclo expected = j == dd.dual(i) ? c : Cyclo(md.conductor);
        require(st3[i][j] == expected, token + ": (ST)^3 must be proportional to S^2");
      }

    verify_verlinde_fusion(dd);
    require(verlinde_dim(dd, 1, {}) == static_cast<std::uint64_t>(L),
            token + ": closed-torus Verlinde dimension must count the labels");
  }
}

void criterion_route_agreement() {
  for (const std::string& token : {std::string("Z2"), std::string("S3")}) {
    const DoubleData dd(preset_from_token(token));
    const int L = dd.label_count();
    for (const auto& [g, n] : kSurfaceBattery) {
      const MarkedSurface x = make_surface(g, n);
      const auto table = decomposition_table(dd, x);
      std::vector<int> vec(static_cast<std::size_t>(n), 0);
      // Full label-vector sweep: the Verlinde route must match the character
      // route everywhere, including the zero entries the table omits.
      for (bool done = false; !done;) {
        const auto it = table.find(vec);
        const std::uint64_t characters = it == table.end() ? 0 : it->second;
        const std::uint64_t verlinde = verlinde_dim(dd, g, vec);
        if (characters != verlinde) {
          std::string v;
          for (int l : vec) v += (v.empty() ? "" : ",") + std::to_string(l);
          require(false, token + ": routes disagree at (" + std::to_string(g) + "," +
                             std::to_string(n) + ") labels [" + v + "]: characters " +
                             std::to_string(characters) + ", verlinde " +
                             std::to_string(verlinde));
        }
        int pos = n - 1;
        while (pos >= 0 && ++vec[static_cast<std::size_t>(pos)] == L) {
          vec[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        done = pos < 0;
      }
    }
    // The combined entry point agrees with itself across its routes.
    for (int l = 0; l < L; ++l) {
      const DimWResult r = dim_w(dd, make_surface(1, 1), {l}, DimMethod::all);
      require(r.by_route.at("characters") == r.by_route.at("verlinde"),
              token + ": combined routes must agree on the one-holed torus");
    }
  }
}

void criterion_determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"double", "--group", "preset:S3", "--fusion"},
      {"dims", "--group", "preset:S3", "--genus", "1", "--points", "1", "--labels", "vacuum"},
      {"modular", "--group", "preset:D4"},
      {"selftest", "--group", "preset:Z2"},
      {"bundles", "--group", "preset:Z2", "--genus", "0", "--points", "3"},
  };
  const auto run = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    require(code == 0, "determinism command failed: " + err.str());
    require(err.str().empty(), "determinism command wrote to stderr");
    return out.str();
  };
  for (const auto& cmd : commands) {
    const std::string first = run(cmd);
    const std::string second = run(cmd);
    require(first == second, "repeated runs differ for '" + cmd[0] + "'");
    for (const char* threads : {"2", "5"}) {
      std::vector<std::string> with = cmd;
      with.push_back("--threads");
      with.push_back(threads);
      require(run(with) == first,
              "output depends on --threads for '" + cmd[0] + "'");
    }
  }
  set_worker_count(1);
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;  // 0 = untimed
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria{
      {"bundle-count law |P(X)| = |G|^(2g+2n-2) over the preset battery", 10.0,
       criterion_bundle_counts},
      {"re-marking relation and cross-circle commutation, exhaustive", 10.0,
       criterion_relation_sweep},
      {"character tables of all presets and their centralizers are orthogonal", 0.0,
       criterion_character_tables},
      {"double label counts, dim^2 sum, Gram identity, fusion ring axioms", 0.0,
       criterion_double_structure},
      {"decomposition completeness against bundle count and <chi_E,chi_E>", 60.0,
       criterion_decomposition},
      {"gluing bijection, invariants equality, and dimension sums", 120.0, criterion_gluing},
      {"disk, annulus, and one-holed-torus spot values", 0.0, criterion_spot_values},
      {"modular data axioms and Verlinde consistency", 0.0, criterion_modular_data},
      {"character and Verlinde routes agree across the battery", 0.0,
       criterion_route_agreement},
      {"byte-identical output across repeats and thread counts", 0.0, criterion_determinism},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    bool ok = true;
    try {
      c.body();
    } catch (const std::exception& e) {
      ok = false;
      reason = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && c.budget_seconds > 0 && secs > c.budget_seconds) {
      ok = false;
      reason = "exceeded the " + std::to_string(c.budget_seconds) + " s budget";
    }
    std::printf("%s  %2zu. %s  (%.2f s)\n", ok ? "PASS" : "FAIL", i + 1, c.name, secs);
    if (!ok) std::printf("      %s\n", reason.c_str());
    all_ok = all_ok && ok;
  }
  std::printf("%s\n", all_ok ? "acceptance: all criteria passed"
                             : "acceptance: FAILURES PRESENT");
  return all_ok ? 0 : 1;
}
