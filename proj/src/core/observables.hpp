#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/disorder.hpp"
#include "core/exact.hpp"

namespace rfim {

struct OverlapSample {
  double value = 0.0;
  int l = 1;
  int s = 2;
};

// R_{l,s} = (1/V) sum_x w_x s_x^l s_x^s with w_x = h_x^2; same-replica
// calls return 1 by convention.
OverlapSample overlap(std::span<const std::int8_t> sigma_l,
                      std::span<const std::int8_t> sigma_s,
                      std::span<const double> weights, int l = 1, int s = 2);

// Delta_n = (1/V) sum_x g_x s_x.
double delta_n(std::span<const std::int8_t> sigma,
               const DisorderRealization& disorder);

double magnetization(std::span<const std::int8_t> sigma);

// Estimator accumulation over disorder seeds. Records are kept sorted by
// seed and all reductions run in that order, so merging is associative,
// commutative, and bit-exact.
class QuenchedStats {
 public:
  void add(std::uint64_t seed, double value);
  static QuenchedStats merge(const QuenchedStats& a, const QuenchedStats& b);

  std::size_t count() const { return records_.size(); }
  double mean() const;
  double variance() const;             // sample variance (K - 1)
  double population_variance() const;  // divides by K
  double standard_error() const;

  const std::vector<std::pair<std::uint64_t, double>>& records() const {
    return records_;
  }

 private:
  std::vector<std::pair<std::uint64_t, double>> records_;
};

// Delete-one jackknife for a smooth function of per-seed term means.
// rows[k] holds the term vector of seed k.
struct JackknifeResult {
  double estimate = 0.0;
  double se = 0.0;
};
JackknifeResult jackknife(
    const std::vector<std::vector<double>>& rows,
    const std::function<double(const std::vector<double>&)>& statistic);

// Bounded functions of the overlap array used in the Ghirlanda-Guerra
// checks: products of up to two overlap entries, clipped to [-1, 1].
struct OverlapFunctionSpec {
  std::string name;                                // "one", "R12", "R23", "R12*R13"
  std::vector<std::pair<int, int>> factors;        // 1-based replica pairs
};

OverlapFunctionSpec parse_overlap_function(const std::string& name);
int replicas_needed(const OverlapFunctionSpec& f);

// Evaluate f on a sampled overlap matrix (row-major (m x m), ones on the
// diagonal), clipping the product into [-1, 1].
double eval_overlap_function(const OverlapFunctionSpec& f,
                             const std::vector<double>& overlap_matrix, int m);

// <prod_i R_{l_i, s_i}> on one exact state via marginal factorization
// (replicas are independent). Up to three factors.
double overlap_product_mean(const ExactGibbs& state,
                            const std::vector<std::pair<int, int>>& factors,
                            const std::vector<double>& weights);

// Per-seed Gibbs expectations entering the GG residual for (m, f):
// <f R_{1,m+1}>, <f>, <R_{1,2}>, and <f R_{1,s}> for s = 2..m.
struct GgTerms {
  double f_r_top = 0.0;
  double f_alone = 0.0;
  double r12 = 0.0;
  std::vector<double> f_r_s;
};

GgTerms gg_terms_exact(const ExactGibbs& state, int m,
                       const OverlapFunctionSpec& f,
                       const std::vector<double>& weights);

// nu-level residual nu(f R_{1,m+1}) - (1/m) nu(f) nu(R_{1,2})
//                 - (1/m) sum_s nu(f R_{1,s}), with jackknife SE.
JackknifeResult gg_residual(const std::vector<GgTerms>& per_seed, int m);

}  // namespace rfim
