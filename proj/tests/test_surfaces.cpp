#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "dgmf/drinfeld_double.hpp"
#include "dgmf/surfaces.hpp"

using namespace dgmf;

namespace {

// Trace on D(G) of v -> (g d_{h1}) v (g^(-1) d_{h2^(-1)}): the two-sided
// regular action matching the two boundary actions on the annulus module.
int annulus_trace_oracle(const FiniteGroup& G, int conductor, int g, int h1, int h2) {
  DoubleElement left = double_basis(conductor, g, h1);
  DoubleElement right = double_basis(conductor, G.inv[g], G.inv[h2]);
  Rational trace = 0;
  for (int x = 0; x < G.order; ++x)
    for (int y = 0; y < G.order; ++y) {
      DoubleElement v = double_product(G, double_product(G, left, double_basis(conductor, x, y)), right);
      auto it = v.find({x, y});
      if (it != v.end()) trace += it->second.as_rational();
    }
  REQUIRE(trace.get_den() == 1);
  return static_cast<int>(trace.get_num().get_si());
}

}  // namespace

TEST_CASE("surface bookkeeping") {
  MarkedSurface disk = make_surface(0, 1);
  CHECK(disk.boundary_count() == 1);
  CHECK(disk.euler_characteristic() == 1);
  CHECK(disk.free_coordinate_count() == 0);
  CHECK(disk.boundary_names == std::vector<std::string>{"p1"});

  MarkedSurface x = make_surface(2, 3);
  CHECK(x.euler_characteristic() == 2 - 4 - 3);
  CHECK(x.free_coordinate_count() == 8);
  CHECK(x.boundary_index("p2") == 1);
  CHECK_THROWS_AS(x.boundary_index("q9"), Error);
  CHECK_THROWS_AS(make_surface(-1, 1), Error);
  CHECK_THROWS_AS(make_surface(0, 0), Error);
}

TEST_CASE("bundle counts and lexicographic enumeration") {
  struct Row {
    const char* token;
    int genus, boundaries;
  };
  for (const Row& r : {Row{"Z2", 0, 1}, Row{"Z2", 0, 2}, Row{"Z2", 0, 3}, Row{"Z2", 1, 1},
                       Row{"Z2", 1, 2}, Row{"Z3", 0, 2}, Row{"Z3", 1, 1}, Row{"S3", 0, 2},
                       Row{"S3", 1, 1}, Row{"S3", 0, 3}, Row{"Z1", 2, 3}}) {
    FiniteGroup G = preset_from_token(r.token);
    MarkedSurface x = make_surface(r.genus, r.boundaries);
    INFO(r.token << " genus " << r.genus << " boundaries " << r.boundaries);
    const std::uint64_t expected =
        u64_pow(static_cast<std::uint64_t>(G.order), x.free_coordinate_count());
    CHECK(bundle_count(G, x) == expected);

    std::vector<BundleTuple> all = enumerate_bundles(G, x);
    CHECK(all.size() == expected);
    CHECK(std::is_sorted(all.begin(), all.end(),
                         [](const BundleTuple& p, const BundleTuple& q) {
                           return std::tie(p.a, p.b, p.s) != std::tie(q.a, q.b, q.s)
                                      ? std::tie(p.a, p.b, p.s) < std::tie(q.a, q.b, q.s)
                                      : std::vector<int>(p.m.begin() + 1, p.m.end()) <
                                            std::vector<int>(q.m.begin() + 1, q.m.end());
                         }));
    CHECK(std::set<BundleTuple>(all.begin(), all.end()).size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      REQUIRE(satisfies_relation(G, all[i]));
      REQUIRE(flat_index_of(G, x, all[i]) == i);
    }
  }
}

TEST_CASE("bundle caps") {
  FiniteGroup s4 = preset_symmetric(4);
  CHECK_THROWS_AS(bundle_count(s4, make_surface(3, 2)), Error);  // 24^8 > 1e8
  Caps tight;
  tight.materialize_cap = 10;
  CHECK_THROWS_AS(enumerate_bundles(preset_symmetric(3), make_surface(0, 2), tight), Error);
  try {
    bundle_count(s4, make_surface(3, 2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::infeasible);
  }
}

TEST_CASE("monodromy patterns") {
  FiniteGroup s3 = preset_symmetric(3);

  // Disk: the relation forces the single monodromy to be the identity.
  std::vector<BundleTuple> disk = enumerate_bundles(s3, make_surface(0, 1));
  REQUIRE(disk.size() == 1);
  CHECK(monodromy(disk[0], 0) == 0);

  // Annulus: with a trivial transporter the base monodromy inverts m_2;
  // in general it is the transported inverse.
  for (const BundleTuple& p : enumerate_bundles(s3, make_surface(0, 2))) {
    if (p.s[0] == 0) CHECK(p.m[0] == s3.inv[p.m[1]]);
    CHECK(p.m[0] == s3.conjugate(p.s[0], s3.inv[p.m[1]]));
  }

  // One-holed torus: m_1 = [a,b]^(-1), and 36 classes for S3.
  std::vector<BundleTuple> torus = enumerate_bundles(s3, make_surface(1, 1));
  CHECK(torus.size() == 36);
  for (const BundleTuple& p : torus)
    CHECK(p.m[0] == s3.inv[s3.commutator(p.a[0], p.b[0])]);

  CHECK_THROWS_AS(monodromy(disk[0], 1), Error);
  CHECK_THROWS_AS(monodromy(disk[0], -1), Error);
}

TEST_CASE("rho actions") {
  for (const char* token : {"Z2", "S3"}) {
    FiniteGroup G = preset_from_token(token);
    std::vector<MarkedSurface> shapes = {make_surface(0, 2), make_surface(1, 1)};
    if (G.order == 2) shapes.push_back(make_surface(0, 3));
    for (const MarkedSurface& x : shapes) {
      INFO(token << " genus " << x.genus << " boundaries " << x.boundary_count());
      std::vector<BundleTuple> all = enumerate_bundles(G, x);
      const int n = x.boundary_count();
      for (const BundleTuple& p : all)
        for (int i = 0; i < n; ++i) {
          CHECK(rho_action(G, p, i, 0) == p);
          for (int g = 0; g < G.order; ++g) {
            BundleTuple q = rho_action(G, p, i, g);
            REQUIRE(satisfies_relation(G, q));
            // Monodromy at the moved point is conjugated, others untouched.
            REQUIRE(monodromy(q, i) == G.conjugate(g, monodromy(p, i)));
            for (int j = 0; j < n; ++j)
              if (j != i) REQUIRE(monodromy(q, j) == monodromy(p, j));
            // Group action: rho_i(g) rho_i(h) = rho_i(gh).
            for (int h = 0; h < G.order; ++h)
              REQUIRE(rho_action(G, rho_action(G, p, i, h), i, g) ==
                      rho_action(G, p, i, G.at(g, h)));
            // Actions at distinct circles commute.
            for (int j = 0; j < n; ++j) {
              if (j == i) continue;
              for (int h : {0, 1})
                REQUIRE(rho_action(G, rho_action(G, p, j, h), i, g) ==
                        rho_action(G, rho_action(G, p, i, g), j, h));
            }
          }
        }

      // Each rho_i(g) permutes the set of classes.
      for (int i = 0; i < n; ++i)
        for (int g = 0; g < G.order; ++g) {
          std::set<std::uint64_t> image;
          for (const BundleTuple& p : all)
            image.insert(flat_index_of(G, x, rho_action(G, p, i, g)));
          REQUIRE(image.size() == all.size());
        }
    }
  }
}

TEST_CASE("function-module character") {
  FiniteGroup z2 = preset_cyclic(2);
  MarkedSurface disk = make_surface(0, 1), annulus = make_surface(0, 2);

  CHECK(e_module_character(z2, disk, {{0, 0}}) == 1);
  CHECK(e_module_character(z2, disk, {{0, 1}}) == 0);
  CHECK(e_module_character(z2, disk, {{1, 0}}) == 1);

  // Grade dimensions: identity action, summed over monodromy vectors.
  std::uint64_t total = 0;
  for (int h1 = 0; h1 < 2; ++h1)
    for (int h2 = 0; h2 < 2; ++h2) total += e_module_character(z2, annulus, {{0, h1}, {0, h2}});
  CHECK(total == 4);
  auto hist = monodromy_histogram(z2, annulus);
  std::uint64_t hist_total = 0;
  for (auto [key, count] : hist) {
    hist_total += count;
    CHECK(count == e_module_character(z2, annulus, {{0, static_cast<int>(key / 2)},
                                                    {0, static_cast<int>(key % 2)}}));
  }
  CHECK(hist_total == 4);

  CHECK_THROWS_AS(e_module_character(z2, annulus, {{0, 0}}), Error);
  CHECK_THROWS_AS(e_module_character(z2, disk, {{0, 2}}), Error);
}

TEST_CASE("annulus module is the two-sided regular module") {
  // The annulus character at ((g, h1), (g, h2)) equals the trace of
  // v -> (g d_{h1}) v (g^(-1) d_{h2^(-1)}) on D(G), computed through the
  // structure constants of the algebra product.
  for (const char* token : {"Z2", "S3"}) {
    FiniteGroup G = preset_from_token(token);
    MarkedSurface annulus = make_surface(0, 2);
    DoubleData dd(G);
    for (int g = 0; g < G.order; ++g)
      for (int h1 = 0; h1 < G.order; ++h1)
        for (int h2 = 0; h2 < G.order; ++h2) {
          INFO(token << " g=" << g << " h1=" << h1 << " h2=" << h2);
          REQUIRE(static_cast<int>(e_module_character(G, annulus, {{g, h1}, {g, h2}})) ==
                  annulus_trace_oracle(G, dd.conductor(), g, h1, h2));
        }
  }
}

TEST_CASE("cut bookkeeping") {
  // One-holed torus, non-separating: a three-holed sphere.
  MarkedSurface torus = make_surface(1, 1);
  CutResult r = cut_surface(torus, CutSpec::nonseparating());
  REQUIRE(r.pieces.size() == 1);
  CHECK(r.pieces[0].genus == 0);
  CHECK(r.pieces[0].boundary_names == std::vector<std::string>{"p1", "c'", "c''"});
  CHECK(r.source_boundaries[0] == std::vector<int>{0});
  CHECK(r.pieces[0].euler_characteristic() == torus.euler_characteristic());

  // Genus two with one point, separated at genus one keeping no points.
  MarkedSurface genus2 = make_surface(2, 1);
  r = cut_surface(genus2, CutSpec::separating(1, {}));
  REQUIRE(r.pieces.size() == 2);
  CHECK(r.pieces[0].genus == 1);
  CHECK(r.pieces[0].boundary_names == std::vector<std::string>{"c'"});
  CHECK(r.pieces[1].genus == 1);
  CHECK(r.pieces[1].boundary_names == std::vector<std::string>{"p1", "c''"});
  CHECK(r.pieces[0].euler_characteristic() + r.pieces[1].euler_characteristic() ==
        genus2.euler_characteristic());

  // Annulus separated keeping the first circle: two annuli.
  MarkedSurface annulus = make_surface(0, 2);
  r = cut_surface(annulus, CutSpec::separating(0, {"p1"}));
  CHECK(r.pieces[0].boundary_names == std::vector<std::string>{"p1", "c'"});
  CHECK(r.pieces[1].boundary_names == std::vector<std::string>{"p2", "c''"});
  CHECK(r.pieces[0].euler_characteristic() + r.pieces[1].euler_characteristic() ==
        annulus.euler_characteristic());

  // Fresh names avoid collisions with existing ones.
  MarkedSurface clash = make_surface(1, 1);
  clash.boundary_names[0] = "c'";
  r = cut_surface(clash, CutSpec::nonseparating());
  CHECK(r.pieces[0].boundary_names == std::vector<std::string>{"c'", "cc'", "cc''"});

  CHECK_THROWS_AS(cut_surface(make_surface(0, 2), CutSpec::nonseparating()), Error);
  CHECK_THROWS_AS(cut_surface(torus, CutSpec::separating(2, {})), Error);
  CHECK_THROWS_AS(cut_surface(annulus, CutSpec::separating(0, {"p1", "p1"})), Error);
  CHECK_THROWS_AS(cut_surface(annulus, CutSpec::separating(0, {"q1"})), Error);
}

TEST_CASE("gluing bijection and invariants") {
  // Non-separating: one-holed torus against the three-holed sphere.
  for (const char* token : {"Z1", "Z2", "Z3", "S3"}) {
    FiniteGroup G = preset_from_token(token);
    INFO(token);
    GluingReport rep = gluing_bijection_check(G, make_surface(1, 1), CutSpec::nonseparating());
    CHECK(rep.bundles_on_surface == u64_pow(static_cast<std::uint64_t>(G.order), 2));
    CHECK(rep.orbit_count == rep.bundles_on_surface);
    CHECK(rep.invariants_dim == rep.bundles_on_surface);
    CHECK(rep.invariants_dim_swapped == rep.bundles_on_surface);
    // The matched locus fibers over the fresh monodromy: one factor of N.
    CHECK(rep.matched_tuples == u64_pow(static_cast<std::uint64_t>(G.order), 3));
  }

  // Separating an annulus into two annuli.
  for (const char* token : {"Z2", "S3"}) {
    FiniteGroup G = preset_from_token(token);
    INFO(token);
    GluingReport rep = gluing_bijection_check(G, make_surface(0, 2),
                                              CutSpec::separating(0, {"p1"}));
    CHECK(rep.orbit_count == u64_pow(static_cast<std::uint64_t>(G.order), 2));
  }

  // Three-holed sphere split with both named circles on one side.
  GluingReport rep = gluing_bijection_check(preset_cyclic(2), make_surface(0, 3),
                                            CutSpec::separating(0, {"p1", "p2"}));
  CHECK(rep.orbit_count == 16);

  // Non-separating cut of a two-holed torus.
  rep = gluing_bijection_check(preset_cyclic(3), make_surface(1, 2), CutSpec::nonseparating());
  CHECK(rep.orbit_count == 81);

  // Genus-two surface, both cut types.
  rep = gluing_bijection_check(preset_cyclic(2), make_surface(2, 1), CutSpec::nonseparating());
  CHECK(rep.orbit_count == 16);
  rep = gluing_bijection_check(preset_cyclic(2), make_surface(2, 1), CutSpec::separating(1, {}));
  CHECK(rep.orbit_count == 16);
}

TEST_CASE("character sweeps are worker-count independent") {
  FiniteGroup s3 = preset_symmetric(3);
  MarkedSurface x = make_surface(0, 3);
  std::vector<std::uint64_t> counts;
  for (int workers : {1, 3, 7}) {
    set_worker_count(workers);
    counts.push_back(e_module_character(s3, x, {{0, 1}, {3, 3}, {1, 1}}));
  }
  set_worker_count(1);
  CHECK(counts[0] == counts[1]);
  CHECK(counts[0] == counts[2]);
}
