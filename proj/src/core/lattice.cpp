#include "core/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rfim {

std::int64_t LatticeSpec::site_index(const std::vector<int>& coords) const {
  if (static_cast<int>(coords.size()) != d)
    fail(ErrorKind::invalid_argument, "site_index: coordinate dimension mismatch");
  std::int64_t idx = 0;
  for (int k = 0; k < d; ++k) {
    if (coords[k] < 1 || coords[k] > n)
      fail(ErrorKind::invalid_argument, "site_index: coordinate out of range");
    idx = idx * n + (coords[k] - 1);
  }
  return idx;
}

LatticeSpec build_lattice(int d, int n, std::int64_t max_volume) {
  if (d < 1) fail(ErrorKind::invalid_argument, "build_lattice: d must be >= 1");
  if (n < 1) fail(ErrorKind::invalid_argument, "build_lattice: n must be >= 1");

  // Overflow-safe n^d.
  std::int64_t volume = 1;
  for (int k = 0; k < d; ++k) {
    if (volume > max_volume / n + 1)
      fail(ErrorKind::capacity, "build_lattice: volume exceeds configured cap");
    volume *= n;
  }
  if (volume > max_volume)
    fail(ErrorKind::capacity,
         "build_lattice: volume " + std::to_string(volume) +
             " exceeds configured cap " + std::to_string(max_volume));

  LatticeSpec spec;
  spec.d = d;
  spec.n = n;
  spec.volume = volume;
  spec.sites.reserve(static_cast<std::size_t>(volume));

  std::vector<int> coords(d, 1);
  for (std::int64_t i = 0; i < volume; ++i) {
    spec.sites.push_back(coords);
    // lexicographic odometer, last coordinate fastest
    for (int k = d - 1; k >= 0; --k) {
      if (++coords[k] <= n) break;
      coords[k] = 1;
    }
  }

  // stride of coordinate k in the lexicographic index
  std::vector<std::int64_t> stride(d, 1);
  for (int k = d - 2; k >= 0; --k) stride[k] = stride[k + 1] * n;

  spec.neighbors.assign(static_cast<std::size_t>(volume), {});
  for (std::int64_t i = 0; i < volume; ++i) {
    const auto& c = spec.sites[static_cast<std::size_t>(i)];
    for (int k = d - 1; k >= 0; --k) {  // ascending stride, so j ascending
      if (c[k] < n) {
        std::int64_t j = i + stride[k];
        spec.edges.emplace_back(i, j);
        spec.neighbors[static_cast<std::size_t>(i)].push_back(j);
        spec.neighbors[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  for (auto& nb : spec.neighbors) std::sort(nb.begin(), nb.end());
  std::sort(spec.edges.begin(), spec.edges.end());
  return spec;
}

double site_norm(const std::vector<int>& site, const std::vector<int>& origin) {
  if (site.size() != origin.size())
    fail(ErrorKind::invalid_argument, "site_norm: dimension mismatch");
  std::int64_t acc = 0;
  for (std::size_t k = 0; k < site.size(); ++k)
    acc += std::llabs(static_cast<long long>(site[k]) - origin[k]);
  return static_cast<double>(acc);
}

}  // namespace rfim
