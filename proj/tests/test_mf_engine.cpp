#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "dgmf/mf_engine.hpp"

using namespace dgmf;

namespace {

// Burnside count of conjugation orbits on commuting pairs: the expected
// vacuum dimension of the one-holed torus, with no characters involved.
std::uint64_t torus_vacuum_burnside(const FiniteGroup& G) {
  std::uint64_t fixed = 0;
  for (int g = 0; g < G.order; ++g)
    for (int a = 0; a < G.order; ++a)
      for (int b = 0; b < G.order; ++b)
        if (G.commutes(a, b) && G.commutes(g, a) && G.commutes(g, b)) ++fixed;
  REQUIRE(fixed % static_cast<std::uint64_t>(G.order) == 0);
  return fixed / static_cast<std::uint64_t>(G.order);
}

}  // namespace

TEST_CASE("surface support matches the direct trace") {
  struct Row {
    const char* token;
    int genus, boundaries;
  };
  for (const Row& r : {Row{"Z2", 0, 3}, Row{"S3", 0, 2}, Row{"S3", 1, 1}}) {
    FiniteGroup G = preset_from_token(r.token);
    DoubleData dd(G);
    MarkedSurface x = make_surface(r.genus, r.boundaries);
    INFO(r.token << " genus " << r.genus << " boundaries " << r.boundaries);
    const SurfaceSupport& sup = surface_support(dd, x);
    CHECK(sup.pair_radix == dd.commuting_pairs().size());

    // Every commuting-pair tuple, stored or not, agrees with the direct
    // fixed-point count over bundle classes.
    const auto grid = u64_pow(sup.pair_radix, r.boundaries);
    for (std::uint64_t key = 0; key < grid; ++key) {
      auto digits = detail::decode_pair_key(key, sup.pair_radix, r.boundaries);
      std::vector<std::pair<int, int>> pairs;
      for (std::uint64_t d : digits) pairs.push_back(dd.commuting_pairs()[d]);
      auto it = sup.entries.find(key);
      const std::uint64_t stored = it == sup.entries.end() ? 0 : it->second;
      REQUIRE(stored == e_module_character(G, x, pairs));
    }
  }
}

TEST_CASE("support sweep is worker-count independent") {
  FiniteGroup s3 = preset_symmetric(3);
  DoubleData dd(s3);
  MarkedSurface x = make_surface(0, 3);
  set_worker_count(1);
  SurfaceSupport one = detail::compute_surface_support(dd, x, Caps{});
  set_worker_count(5);
  SurfaceSupport five = detail::compute_surface_support(dd, x, Caps{});
  set_worker_count(1);
  CHECK(one.entries == five.entries);

  Caps tight;
  tight.char_grid_cap = 100;
  CHECK_THROWS_AS(detail::compute_surface_support(dd, make_surface(0, 4), tight), Error);
}

TEST_CASE("disk selects the vacuum") {
  for (const char* token : {"Z2", "S3", "D4"}) {
    DoubleData dd(preset_from_token(token));
    MarkedSurface disk = make_surface(0, 1);
    INFO(token);
    for (int l = 0; l < dd.label_count(); ++l)
      CHECK(dim_w_characters(dd, disk, {l}) == (l == dd.vacuum() ? 1u : 0u));
  }
}

TEST_CASE("annulus pairs each label with its dual") {
  for (const char* token : {"Z3", "S3", "D4"}) {
    DoubleData dd(preset_from_token(token));
    MarkedSurface annulus = make_surface(0, 2);
    INFO(token);
    for (int l = 0; l < dd.label_count(); ++l)
      for (int m = 0; m < dd.label_count(); ++m)
        REQUIRE(dim_w_characters(dd, annulus, {l, m}) == (m == dd.dual(l) ? 1u : 0u));
  }
}

TEST_CASE("one-holed torus vacuum dimension") {
  for (const char* token : {"Z2", "Z3", "S3", "D4"}) {
    FiniteGroup G = preset_from_token(token);
    DoubleData dd(G);
    INFO(token);
    const std::uint64_t expected = torus_vacuum_burnside(G);
    CHECK(expected == static_cast<std::uint64_t>(dd.label_count()));
    CHECK(dim_w_characters(dd, make_surface(1, 1), {dd.vacuum()}) == expected);
    CHECK(dim_w_enumeration(dd, make_surface(1, 1), {dd.vacuum()}) == expected);
  }
  CHECK(dim_w_characters(DoubleData(preset_symmetric(3)), make_surface(1, 1), {0}) == 8);
  CHECK(dim_w_characters(DoubleData(preset_cyclic(2)), make_surface(1, 1), {0}) == 4);
}

TEST_CASE("three-holed sphere realizes the fusion rules") {
  for (const char* token : {"Z2", "S3"}) {
    DoubleData dd(preset_from_token(token));
    INFO(token);
    auto table = decomposition_table(dd, make_surface(0, 3));
    for (int l = 0; l < dd.label_count(); ++l)
      for (int m = 0; m < dd.label_count(); ++m)
        for (int n = 0; n < dd.label_count(); ++n) {
          auto it = table.find({l, m, n});
          const std::uint64_t dim = it == table.end() ? 0 : it->second;
          REQUIRE(dim == static_cast<std::uint64_t>(dd.fusion(l, m, dd.dual(n))));
        }
  }

  // Toric code: the charge and the vortex fuse to the fermion.
  DoubleData z2(preset_cyclic(2));
  int charge = z2.label_of(0, 1), vortex = z2.label_of(1, 0), fermion = z2.label_of(1, 1);
  CHECK(dim_w_characters(z2, make_surface(0, 3), {charge, vortex, fermion}) == 1);
  CHECK(dim_w_characters(z2, make_surface(0, 3), {charge, vortex, vortex}) == 0);
  CHECK(dim_w_characters(z2, make_surface(0, 3), {charge, charge, z2.vacuum()}) == 1);
}

TEST_CASE("decomposition tables") {
  // The two completeness identities are enforced inside the call; the
  // assertions here pin the actual tables for the smallest surfaces.
  DoubleData z2(preset_cyclic(2));
  auto disk = decomposition_table(z2, make_surface(0, 1));
  REQUIRE(disk.size() == 1);
  CHECK(disk.at({z2.vacuum()}) == 1);

  auto annulus = decomposition_table(z2, make_surface(0, 2));
  REQUIRE(annulus.size() == 4);
  for (const auto& [tuple, dim] : annulus) {
    CHECK(tuple[1] == z2.dual(tuple[0]));
    CHECK(dim == 1);
  }

  auto torus = decomposition_table(z2, make_surface(1, 1));
  std::uint64_t weighted = 0;
  for (const auto& [tuple, dim] : torus)
    weighted += static_cast<std::uint64_t>(z2.labels()[tuple[0]].dim) * dim;
  CHECK(weighted == 4);

  for (const char* token : {"Z2", "S3"})
    for (auto [g, n] : {std::pair{0, 1}, {0, 2}, {0, 3}, {1, 1}, {0, 4}, {1, 2}}) {
      DoubleData dd(preset_from_token(token));
      INFO(token << " genus " << g << " boundaries " << n);
      CHECK_NOTHROW(decomposition_table(dd, make_surface(g, n)));
    }
}

TEST_CASE("modular data of the toric code") {
  DoubleData dd(preset_cyclic(2));
  const ModularData& md = modular_data(dd);
  const int sign[4][4] = {{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(md.S[i][j] == Cyclo::from_rational(md.conductor, Rational(sign[i][j], 2)));
  for (int i = 0; i < 4; ++i)
    CHECK(md.T[i] == Cyclo::from_rational(md.conductor, i == 3 ? -1 : 1));
}

TEST_CASE("modular data invariants") {
  DoubleData trivial(trivial_group());
  const ModularData& mt = modular_data(trivial);
  CHECK(mt.S == std::vector<std::vector<Cyclo>>{{Cyclo::one(1)}});
  CHECK(mt.T == std::vector<Cyclo>{Cyclo::one(1)});

  // Construction runs the full axiom battery; surviving it is the test.
  for (const char* token : {"Z3", "S3", "D4", "Q8", "S4"}) {
    DoubleData dd(preset_from_token(token));
    INFO(token);
    const ModularData& md = modular_data(dd);
    for (int j = 0; j < dd.label_count(); ++j)
      REQUIRE(md.S[0][j] ==
              Cyclo::from_rational(md.conductor,
                                   fraction(dd.labels()[j].dim, dd.group().order)));
  }
}

TEST_CASE("Verlinde formula agreement") {
  for (const char* token : {"Z2", "Z3", "S3"}) {
    DoubleData dd(preset_from_token(token));
    INFO(token);
    CHECK_NOTHROW(verify_verlinde_fusion(dd));
    // Genus one, no boundary: the number of simple objects.
    CHECK(verlinde_dim(dd, 1, {}) == static_cast<std::uint64_t>(dd.label_count()));
    // The sphere supports only the trivial theory.
    CHECK(verlinde_dim(dd, 0, {}) == 1);
    for (int l = 0; l < dd.label_count(); ++l) {
      CHECK(verlinde_dim(dd, 0, {l, dd.dual(l)}) == 1);
      CHECK(verlinde_dim(dd, 0, {l}) == (l == dd.vacuum() ? 1u : 0u));
    }
  }
  CHECK(verlinde_dim(DoubleData(preset_symmetric(3)), 2, {}) == 116);
  CHECK(verlinde_dim(DoubleData(preset_cyclic(2)), 2, {}) == 16);
}

TEST_CASE("route agreement") {
  for (const char* token : {"Z2", "S3"}) {
    DoubleData dd(preset_from_token(token));
    INFO(token);
    for (auto [g, n] : {std::pair{0, 1}, {0, 2}, {1, 1}}) {
      MarkedSurface x = make_surface(g, n);
      std::vector<int> vacuum(n, dd.vacuum());
      DimWResult r = dim_w(dd, x, vacuum, DimMethod::all);
      REQUIRE(r.by_route.size() == 3);
      CHECK(r.by_route.at("characters") == r.value);
      CHECK(r.by_route.at("enumeration") == r.value);
      CHECK(r.by_route.at("verlinde") == r.value);
    }
    // The enumeration route only joins in when every label is the vacuum.
    MarkedSurface annulus = make_surface(0, 2);
    for (int l = 0; l < dd.label_count(); ++l) {
      DimWResult r = dim_w(dd, annulus, {l, dd.dual(l)}, DimMethod::all);
      CHECK(r.by_route.size() == (l == dd.vacuum() ? 3u : 2u));
      CHECK(r.value == 1);
    }
  }

  DoubleData z2(preset_cyclic(2));
  MarkedSurface annulus = make_surface(0, 2);
  CHECK_THROWS_AS(dim_w(z2, annulus, {0}, DimMethod::all), Error);
  CHECK_THROWS_AS(dim_w(z2, annulus, {0, 99}, DimMethod::all), Error);
  CHECK_THROWS_AS(dim_w_enumeration(z2, annulus, {0, 1}), Error);
  CHECK_THROWS_AS(verlinde_dim(z2, -1, {}), Error);
}

TEST_CASE("gluing identity") {
  // One-holed torus with the vacuum: eight three-holed-sphere contributions.
  DoubleData s3(preset_symmetric(3));
  GluingDimReport rep =
      verify_gluing(s3, make_surface(1, 1), CutSpec::nonseparating(), {s3.vacuum()});
  CHECK(rep.whole == 8);
  CHECK(rep.contributions.size() == 8);
  for (const auto& [mu, dim] : rep.contributions) CHECK(dim == 1);

  // Every label on the one-holed torus.
  for (int l = 0; l < s3.label_count(); ++l)
    CHECK_NOTHROW(verify_gluing(s3, make_surface(1, 1), CutSpec::nonseparating(), {l}));

  // Four-holed sphere split into two three-holed spheres: fusion convolution.
  DoubleData z2(preset_cyclic(2));
  for (int a = 0; a < z2.label_count(); ++a)
    for (int b = 0; b < z2.label_count(); ++b) {
      GluingDimReport r = verify_gluing(z2, make_surface(0, 4),
                                        CutSpec::separating(0, {"p1", "p2"}), {a, b, a, b});
      CHECK(r.whole == 1);
    }

  // Separated annulus.
  CHECK_NOTHROW(
      verify_gluing(s3, make_surface(0, 2), CutSpec::separating(0, {"p1"}), {1, s3.dual(1)}));

  // Trivial group: always one.
  DoubleData z1(trivial_group());
  GluingDimReport triv =
      verify_gluing(z1, make_surface(1, 1), CutSpec::nonseparating(), {z1.vacuum()});
  CHECK(triv.whole == 1);
  CHECK(triv.glued_total == 1);
}
