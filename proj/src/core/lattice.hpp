#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/error.hpp"

namespace rfim {

inline constexpr std::int64_t kDefaultMaxVolume = std::int64_t{1} << 22;

// Finite hypercube Z^d ∩ [1,n]^d with nearest-neighbor edges and free
// boundary. Sites are ordered lexicographically by coordinates; every
// array in the project indexes sites in this order.
struct LatticeSpec {
  int d = 0;
  int n = 0;
  std::int64_t volume = 0;
  std::vector<std::vector<int>> sites;
  std::vector<std::pair<std::int64_t, std::int64_t>> edges;  // (i, j) with i < j
  std::vector<std::vector<std::int64_t>> neighbors;

  std::int64_t site_index(const std::vector<int>& coords) const;
};

LatticeSpec build_lattice(int d, int n, std::int64_t max_volume = kDefaultMaxVolume);

// L1 (graph) distance between coordinate vectors of equal dimension.
double site_norm(const std::vector<int>& site, const std::vector<int>& origin);

}  // namespace rfim
