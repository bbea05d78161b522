// Pair-of-pants spaces for the double of any preset group: dim W on the
// three-holed sphere equals the fusion multiplicity N_{lambda mu}^{nu*},
// computed here along two fully independent routes and cross-checked.

#include <cstdio>
#include <string>

#include "dgmf/io.hpp"
#include "dgmf/mf_engine.hpp"

using namespace dgmf;

int main(int argc, char** argv) {
  const std::string token = argc > 1 ? argv[1] : "S3";
  const DoubleData dd(preset_from_token(token));
  const int L = dd.label_count();

  std::printf("D(%s): %d labels\n", dd.group().name.c_str(), L);
  for (int l = 0; l < L; ++l) std::printf("  %d: %s\n", l, label_name(dd, l).c_str());

  const MarkedSurface pants = make_surface(0, 3);
  const auto table = decomposition_table(dd, pants);
  std::printf("\nnonzero dim W(pair of pants; lambda, mu, nu):\n");
  int mismatches = 0;
  std::uint64_t total = 0;
  for (const auto& [vec, dim] : table) {
    const std::uint64_t mult =
        static_cast<std::uint64_t>(dd.fusion(vec[0], vec[1], dd.dual(vec[2])));
    std::printf("  (%2d,%2d,%2d) -> %llu%s\n", vec[0], vec[1], vec[2],
                static_cast<unsigned long long>(dim),
                dim == mult ? "" : "  (fusion disagrees!)");
    mismatches += dim != mult;
    total += dim;
  }
  std::printf("%zu nonzero triples, dimension total %llu\n", table.size(),
              static_cast<unsigned long long>(total));
  std::printf("character route vs fusion coefficients: %s\n",
              mismatches == 0 ? "identical" : "MISMATCH");
  return mismatches == 0 ? 0 : 1;
}
