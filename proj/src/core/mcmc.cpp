#include "core/mcmc.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

namespace rfim {

void SamplerConfig::validate() const {
  if (sweeps <= 0) fail(ErrorKind::invalid_argument, "sampler: sweeps must be positive");
  if (burn_in < 0 || burn_in >= sweeps)
    fail(ErrorKind::invalid_argument, "sampler: burn_in must lie below the sweep budget");
  if (thinning < 1) fail(ErrorKind::invalid_argument, "sampler: thinning must be >= 1");
}

Chain::Chain(const LatticeSpec& spec, const ModelParams& params,
             const DisorderRealization& disorder, std::uint64_t seed,
             Dynamics dynamics, StartMode start)
    : neighbors_(spec.neighbors),
      g_(disorder.g),
      params_(params),
      dynamics_(dynamics),
      rng_(seed) {
  validate_params(params_);
  if (disorder.d != spec.d || disorder.n != spec.n)
    fail(ErrorKind::invalid_argument, "chain: disorder does not match lattice");
  const std::size_t v = static_cast<std::size_t>(spec.volume);
  spins_.assign(v, 1);
  if (start == StartMode::random)
    for (auto& s : spins_) s = rng_.uniform01() < 0.5 ? -1 : 1;
  local_field_.resize(v);
  for (std::size_t i = 0; i < v; ++i) {
    double acc = 0.0;
    for (std::int64_t j : neighbors_[i]) acc += spins_[static_cast<std::size_t>(j)];
    local_field_[i] = params_.beta * acc + params_.h * g_[i];
  }
}

void Chain::sweep() {
  const std::size_t v = spins_.size();
  for (std::size_t i = 0; i < v; ++i) {
    const double lf = local_field_[i];
    const double u = rng_.uniform01();
    std::int8_t next = spins_[i];
    if (dynamics_ == Dynamics::glauber) {
      // heat bath: P(s = +1 | rest) = 1 / (1 + e^{-2 lf})
      next = (u < 1.0 / (1.0 + std::exp(-2.0 * lf))) ? 1 : -1;
    } else {
      const double dlogw = -2.0 * spins_[i] * lf;
      if (dlogw >= 0.0 || u < std::exp(dlogw)) next = static_cast<std::int8_t>(-spins_[i]);
    }
    if (next != spins_[i]) {
      spins_[i] = next;
      const double shift = 2.0 * params_.beta * next;
      for (std::int64_t j : neighbors_[i]) local_field_[static_cast<std::size_t>(j)] += shift;
    }
  }
  ++sweep_count_;
}

double Chain::max_cache_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < spins_.size(); ++i) {
    double acc = 0.0;
    for (std::int64_t j : neighbors_[i]) acc += spins_[static_cast<std::size_t>(j)];
    const double fresh = params_.beta * acc + params_.h * g_[i];
    worst = std::max(worst, std::abs(fresh - local_field_[i]));
  }
  return worst;
}

void sample_replicas(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder, int m,
                     const SamplerConfig& config,
                     const std::function<void(const std::vector<Chain>&)>& record,
                     bool force_identical_seeds) {
  if (m < 1) fail(ErrorKind::invalid_argument, "sample_replicas: m >= 1 required");
  config.validate();
  std::vector<Chain> chains;
  chains.reserve(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    const std::uint64_t seed =
        force_identical_seeds
            ? RngStream::substream(config.seed, 0).next_u64()
            : RngStream::substream(config.seed, static_cast<std::uint64_t>(r)).next_u64();
    chains.emplace_back(spec, params, disorder, seed, config.dynamics, config.start);
  }
  for (std::int64_t t = 0; t < config.burn_in; ++t)
    for (auto& c : chains) c.sweep();
  std::int64_t remaining = config.sweeps - config.burn_in;
  while (remaining >= config.thinning) {
    for (std::int64_t t = 0; t < config.thinning; ++t)
      for (auto& c : chains) c.sweep();
    remaining -= config.thinning;
    record(chains);
  }
}

namespace {
constexpr unsigned char kMagic[4] = {'R', 'F', 'T', 1};
}

TrajectoryWriter::TrajectoryWriter(const std::string& path, std::int64_t n_sites)
    : n_sites_(n_sites) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorKind::io, "trajectory: cannot open " + path);
  file_ = f;
  std::fwrite(kMagic, 1, 4, f);
  std::uint64_t n = static_cast<std::uint64_t>(n_sites);
  std::fwrite(&n, sizeof(n), 1, f);
}

TrajectoryWriter::~TrajectoryWriter() { close(); }

void TrajectoryWriter::close() {
  if (file_) {
    std::fclose(static_cast<FILE*>(file_));
    file_ = nullptr;
  }
}

void TrajectoryWriter::append(const std::vector<std::int8_t>& spins) {
  if (!file_) fail(ErrorKind::io, "trajectory: writer closed");
  if (static_cast<std::int64_t>(spins.size()) != n_sites_)
    fail(ErrorKind::invalid_argument, "trajectory: spin count mismatch");
  std::vector<unsigned char> packed((spins.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < spins.size(); ++i)
    if (spins[i] > 0) packed[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
  std::fwrite(packed.data(), 1, packed.size(), static_cast<FILE*>(file_));
}

Trajectory read_trajectory(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorKind::io, "trajectory: cannot open " + path);
  unsigned char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    std::fclose(f);
    fail(ErrorKind::io, "trajectory: bad header");
  }
  std::uint64_t n = 0;
  if (std::fread(&n, sizeof(n), 1, f) != 1) {
    std::fclose(f);
    fail(ErrorKind::io, "trajectory: truncated header");
  }
  Trajectory out;
  out.n_sites = static_cast<std::int64_t>(n);
  const std::size_t rec_bytes = (n + 7) / 8;
  std::vector<unsigned char> buf(rec_bytes);
  while (std::fread(buf.data(), 1, rec_bytes, f) == rec_bytes) {
    std::vector<std::int8_t> spins(n);
    for (std::size_t i = 0; i < n; ++i)
      spins[i] = (buf[i / 8] >> (i % 8)) & 1u ? 1 : -1;
    out.records.push_back(std::move(spins));
  }
  std::fclose(f);
  return out;
}

}  // namespace rfim
