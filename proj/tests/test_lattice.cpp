#include <set>

#include "core/lattice.hpp"
#include "doctest.h"

using namespace rfim;

namespace {

// brute-force oracle: all pairs at L1 distance 1
std::size_t count_neighbor_pairs(const LatticeSpec& spec) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < spec.sites.size(); ++i)
    for (std::size_t j = i + 1; j < spec.sites.size(); ++j)
      if (site_norm(spec.sites[i], spec.sites[j]) == 1.0) ++count;
  return count;
}

}  // namespace

TEST_CASE("single site has no neighbors") {
  const auto spec = build_lattice(1, 1);
  CHECK(spec.volume == 1);
  CHECK(spec.sites.size() == 1);
  CHECK(spec.edges.empty());
}

TEST_CASE("2x2 square: 4 sites, 4 edges") {
  const auto spec = build_lattice(2, 2);
  CHECK(spec.volume == 4);
  CHECK(spec.edges.size() == 4);
  CHECK(count_neighbor_pairs(spec) == 4);
  // explicit pair listing, lexicographic indexing (1,1)=0,(1,2)=1,(2,1)=2,(2,2)=3
  const std::set<std::pair<std::int64_t, std::int64_t>> expected = {
      {0, 1}, {0, 2}, {1, 3}, {2, 3}};
  const std::set<std::pair<std::int64_t, std::int64_t>> got(spec.edges.begin(),
                                                            spec.edges.end());
  CHECK(got == expected);
}

TEST_CASE("3^3 cube: 27 sites, 54 edges") {
  const auto spec = build_lattice(3, 3);
  CHECK(spec.volume == 27);
  CHECK(spec.edges.size() == 54);
  CHECK(count_neighbor_pairs(spec) == 54);
}

TEST_CASE("edge count formula d n^(d-1) (n-1)") {
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 4; ++n) {
      const auto spec = build_lattice(d, n);
      std::int64_t expected = d * (n - 1);
      for (int k = 0; k < d - 1; ++k) expected *= n;
      CHECK(static_cast<std::int64_t>(spec.edges.size()) == expected);
    }
  }
}

TEST_CASE("edges join sites differing by one in one coordinate") {
  const auto spec = build_lattice(2, 3);
  for (const auto& [i, j] : spec.edges) {
    CHECK(i < j);
    CHECK(site_norm(spec.sites[static_cast<std::size_t>(i)],
                    spec.sites[static_cast<std::size_t>(j)]) == 1.0);
  }
  // no duplicates
  const std::set<std::pair<std::int64_t, std::int64_t>> got(spec.edges.begin(),
                                                            spec.edges.end());
  CHECK(got.size() == spec.edges.size());
}

TEST_CASE("coordinates stay within [1, n]") {
  const auto spec = build_lattice(3, 2);
  for (const auto& site : spec.sites)
    for (int c : site) {
      CHECK(c >= 1);
      CHECK(c <= 2);
    }
}

TEST_CASE("degree bounds: between d and 2d, corners exactly d") {
  for (int d = 1; d <= 3; ++d) {
    const int n = 3;
    const auto spec = build_lattice(d, n);
    for (std::size_t i = 0; i < spec.neighbors.size(); ++i) {
      const int deg = static_cast<int>(spec.neighbors[i].size());
      CHECK(deg >= d);
      CHECK(deg <= 2 * d);
    }
    // corner (1,...,1) is site 0
    CHECK(static_cast<int>(spec.neighbors[0].size()) == d);
  }
}

TEST_CASE("rebuild is deterministic") {
  const auto a = build_lattice(2, 4);
  const auto b = build_lattice(2, 4);
  CHECK(a.sites == b.sites);
  CHECK(a.edges == b.edges);
}

TEST_CASE("site_norm examples") {
  CHECK(site_norm({1, 1}, {1, 1}) == 0.0);
  CHECK(site_norm({3, 1}, {1, 1}) == 2.0);
  CHECK(site_norm({3, 4, 2}, {1, 1, 1}) == 6.0);
  CHECK_THROWS_AS(site_norm({1, 2}, {1}), Error);
}

TEST_CASE("constructor guards") {
  CHECK_THROWS_AS(build_lattice(0, 2), Error);
  CHECK_THROWS_AS(build_lattice(2, 0), Error);
  CHECK_THROWS_AS(build_lattice(2, 100, /*max_volume=*/1000), Error);
  try {
    build_lattice(2, 100, 1000);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::capacity);
  }
}

TEST_CASE("site_index round-trips the lexicographic order") {
  const auto spec = build_lattice(3, 3);
  for (std::int64_t i = 0; i < spec.volume; ++i)
    CHECK(spec.site_index(spec.sites[static_cast<std::size_t>(i)]) == i);
}
