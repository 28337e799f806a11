#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/disorder.hpp"
#include "core/lattice.hpp"

namespace rfim {

inline constexpr int kDefaultEnumerationCap = 24;

struct ModelParams {
  double beta = 1.0;  // >= 0; beta = 0 disables the edge term (test-only mode)
  double h = 1.0;     // > 0
};

void validate_params(const ModelParams& p);

// Fully evaluated finite-volume Gibbs state over {-1,+1}^V, weights
// exp(beta sum_<xy> s_x s_y + h sum_x g_x s_x). Enumeration is Gray-coded
// with streaming log-sum-exp; marginals are cached lazily.
class ExactGibbs {
 public:
  ExactGibbs(const LatticeSpec& spec, const ModelParams& params,
             const DisorderRealization& disorder,
             int enumeration_cap = kDefaultEnumerationCap);

  const LatticeSpec& spec() const { return spec_; }
  const ModelParams& params() const { return params_; }
  const DisorderRealization& disorder() const { return disorder_; }
  int enumeration_cap() const { return cap_; }

  double log_partition() const { return log_z_; }

  const std::vector<double>& site_means() const;
  double site_mean(std::int64_t x) const;
  double pair_mean(std::int64_t x, std::int64_t y) const;
  // <s_x s_y> - <s_x><s_y>; equals 1 - <s_x>^2 at x = y.
  double truncated_correlation(std::int64_t x, std::int64_t y) const;
  // Analytic d^k F / d g_x^k built from <s_x>, orders 1..4.
  double derivative_stack(std::int64_t x, int order) const;

  // <G(s)> for an arbitrary single-configuration functional.
  double expectation(const std::function<double(const std::int8_t*)>& g) const;
  // Delta = (1/V) sum_x g_x s_x, tracked incrementally during the walk.
  double delta_mean() const;
  double delta_second_moment() const;
  double abs_delta_deviation(double center) const;

  // Up to three-site moments <s_x s_y s_z> (distinct sites), cached.
  double triple_mean(std::int64_t x, std::int64_t y, std::int64_t z) const;

 private:
  friend double replica_expectation(
      const ExactGibbs&, int,
      const std::function<double(const std::vector<const std::int8_t*>&)>&);

  // visit(mask, energy, field_sum, spins); energy = beta*edge + h*field_sum.
  template <class V>
  void walk(V&& visit) const;

  void ensure_site_means() const;
  void ensure_pair_means() const;
  void ensure_triple_means() const;

  LatticeSpec spec_;
  ModelParams params_;
  DisorderRealization disorder_;
  int cap_;
  double log_z_ = 0.0;
  mutable std::optional<std::vector<double>> site_means_;
  mutable std::optional<std::vector<double>> pair_means_;    // V x V
  mutable std::optional<std::vector<double>> triple_means_;  // V^3 (small V only)
};

// F_n = log Z_n without keeping a state around.
double log_partition(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder,
                     int enumeration_cap = kDefaultEnumerationCap);

// f receives one spin array per replica (each of length V).
using ReplicaFunction =
    std::function<double(const std::vector<const std::int8_t*>&)>;

// <f(s^1,...,s^m)> under the m-fold product measure, by full enumeration.
// Requires m * V <= enumeration cap.
double replica_expectation(const ExactGibbs& state, int m, const ReplicaFunction& f);

// Central finite differences of F_n in the disorder entries. order 1 is
// dF/dg_x; order 2 is the second derivative in g_x (y < 0 or y == x) or
// the mixed derivative d^2 F / dg_x dg_y.
double fd_derivative(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder, std::int64_t x,
                     double step, int order, std::int64_t y = -1,
                     int enumeration_cap = kDefaultEnumerationCap);

// d = 1 chains: F_n by a log-scaled product of 2x2 transfer matrices.
double transfer_matrix_log_partition(const ModelParams& params,
                                     const DisorderRealization& disorder);

struct ChainMarginals {
  double log_z = 0.0;
  std::vector<double> site_mean;
};

// d = 1 chains: exact single-site means by forward/backward recursion.
ChainMarginals transfer_matrix_marginals(const ModelParams& params,
                                         const DisorderRealization& disorder);

struct DerivativePair {
  double analytic;
  double finite_difference;
};

// Both sides of the j-th derivative identity for u -> <s_x^1 f>_{g_x=u}:
// analytic side h^j <s_x^1 (sum_s s_x^s - m s_x^{m+1})^j f> with m+1
// replicas, finite-difference side from re-evaluated states.
DerivativePair replica_derivative_check(const ExactGibbs& state, int m,
                                        const ReplicaFunction& f,
                                        std::int64_t x, int j);

}  // namespace rfim
