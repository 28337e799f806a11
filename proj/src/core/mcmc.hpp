#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/disorder.hpp"
#include "core/exact.hpp"
#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace rfim {

enum class Dynamics { glauber, metropolis };
enum class StartMode { all_up, random };

struct SamplerConfig {
  std::int64_t sweeps = 3000;    // total sweep budget
  std::int64_t burn_in = 1000;   // sweeps discarded
  std::int64_t thinning = 10;    // sweeps between recorded samples
  Dynamics dynamics = Dynamics::glauber;
  StartMode start = StartMode::all_up;
  std::uint64_t seed = 1;

  void validate() const;
  std::int64_t recorded_samples() const {
    return (sweeps - burn_in) / thinning;
  }
};

// Single-spin-flip chain over one disorder realization. Local fields
// beta * sum_nbr s + h * g_x are cached and updated on each flip; the
// sweep order is a fixed lexicographic pass, so trajectories replay
// bit-exactly for a fixed seed.
class Chain {
 public:
  Chain(const LatticeSpec& spec, const ModelParams& params,
        const DisorderRealization& disorder, std::uint64_t seed,
        Dynamics dynamics = Dynamics::glauber,
        StartMode start = StartMode::all_up);

  void sweep();
  const std::vector<std::int8_t>& spins() const { return spins_; }
  std::int64_t sweep_count() const { return sweep_count_; }
  double local_field(std::int64_t i) const { return local_field_[static_cast<std::size_t>(i)]; }
  // max |cached - recomputed| over sites
  double max_cache_error() const;

 private:
  std::vector<std::vector<std::int64_t>> neighbors_;
  std::vector<double> g_;
  ModelParams params_;
  Dynamics dynamics_;
  std::vector<std::int8_t> spins_;
  std::vector<double> local_field_;
  RngStream rng_;
  std::int64_t sweep_count_ = 0;
};

// m independent replica chains over one shared disorder realization.
// Chain r is seeded from substream(config.seed, r) unless
// force_identical_seeds is set (test mode). The callback receives the
// chains after burn-in, every `thinning` sweeps.
void sample_replicas(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder, int m,
                     const SamplerConfig& config,
                     const std::function<void(const std::vector<Chain>&)>& record,
                     bool force_identical_seeds = false);

// Bit-packed spin trajectory: 4-byte header {'R','F','T',1}, u64 site
// count, then one site-major packed record per recorded sweep.
class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::string& path, std::int64_t n_sites);
  ~TrajectoryWriter();
  void append(const std::vector<std::int8_t>& spins);
  void close();

 private:
  void* file_ = nullptr;
  std::int64_t n_sites_ = 0;
};

struct Trajectory {
  std::int64_t n_sites = 0;
  std::vector<std::vector<std::int8_t>> records;
};

Trajectory read_trajectory(const std::string& path);

}  // namespace rfim
