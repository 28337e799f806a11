#include "core/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace rfim {

void validate_params(const ModelParams& p) {
  if (!(p.beta >= 0.0) || !std::isfinite(p.beta))
    fail(ErrorKind::invalid_argument, "params: beta must be finite and >= 0");
  if (!(p.h > 0.0) || !std::isfinite(p.h))
    fail(ErrorKind::invalid_argument, "params: h must be finite and > 0");
}

namespace {

void check_consistency(const LatticeSpec& spec, const DisorderRealization& dis) {
  if (dis.d != spec.d || dis.n != spec.n || dis.volume() != spec.volume)
    fail(ErrorKind::invalid_argument, "disorder does not match lattice");
}

}  // namespace

ExactGibbs::ExactGibbs(const LatticeSpec& spec, const ModelParams& params,
                       const DisorderRealization& disorder, int enumeration_cap)
    : spec_(spec), params_(params), disorder_(disorder), cap_(enumeration_cap) {
  validate_params(params_);
  check_consistency(spec_, disorder_);
  if (spec_.volume > cap_)
    fail(ErrorKind::capacity, "enumeration: volume " + std::to_string(spec_.volume) +
                                  " exceeds cap " + std::to_string(cap_));
  double mx = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  walk([&](std::uint64_t, double energy, double, const std::int8_t*) {
    if (energy <= mx) {
      acc += std::exp(energy - mx);
    } else {
      acc = acc * std::exp(mx - energy) + 1.0;
      mx = energy;
    }
  });
  log_z_ = mx + std::log(acc);
}

template <class V>
void ExactGibbs::walk(V&& visit) const {
  const int nsites = static_cast<int>(spec_.volume);
  const auto& nbrs = spec_.neighbors;
  const auto& g = disorder_.g;
  std::vector<std::int8_t> s(static_cast<std::size_t>(nsites), -1);

  auto recompute = [&](long long& edge_sum, double& field_sum) {
    edge_sum = 0;
    for (const auto& e : spec_.edges)
      edge_sum += static_cast<long long>(s[static_cast<std::size_t>(e.first)]) *
                  s[static_cast<std::size_t>(e.second)];
    field_sum = 0.0;
    for (int i = 0; i < nsites; ++i) field_sum += g[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i)];
  };

  long long edge_sum = 0;
  double field_sum = 0.0;
  recompute(edge_sum, field_sum);

  const std::uint64_t total = std::uint64_t{1} << nsites;
  visit(std::uint64_t{0}, params_.beta * edge_sum + params_.h * field_sum,
        field_sum, s.data());
  for (std::uint64_t k = 1; k < total; ++k) {
    const int b = std::countr_zero(k);
    const std::int8_t old = s[static_cast<std::size_t>(b)];
    long long nb_sum = 0;
    for (std::int64_t j : nbrs[static_cast<std::size_t>(b)])
      nb_sum += s[static_cast<std::size_t>(j)];
    edge_sum -= 2LL * old * nb_sum;
    field_sum -= 2.0 * old * g[static_cast<std::size_t>(b)];
    s[static_cast<std::size_t>(b)] = static_cast<std::int8_t>(-old);
    if ((k & 0xFFFFu) == 0) recompute(edge_sum, field_sum);  // kill fp drift
    visit(k ^ (k >> 1), params_.beta * edge_sum + params_.h * field_sum,
          field_sum, s.data());
  }
}

void ExactGibbs::ensure_site_means() const {
  if (site_means_) return;
  const int nsites = static_cast<int>(spec_.volume);
  std::vector<double> acc(static_cast<std::size_t>(nsites), 0.0);
  walk([&](std::uint64_t, double energy, double, const std::int8_t* s) {
    const double p = std::exp(energy - log_z_);
    for (int i = 0; i < nsites; ++i) acc[static_cast<std::size_t>(i)] += p * s[i];
  });
  site_means_ = std::move(acc);
}

void ExactGibbs::ensure_pair_means() const {
  if (pair_means_) return;
  const int nsites = static_cast<int>(spec_.volume);
  std::vector<double> acc(static_cast<std::size_t>(nsites) * nsites, 0.0);
  walk([&](std::uint64_t, double energy, double, const std::int8_t* s) {
    const double p = std::exp(energy - log_z_);
    for (int i = 0; i < nsites; ++i) {
      const double pi = p * s[i];
      double* row = acc.data() + static_cast<std::size_t>(i) * nsites;
      for (int j = i + 1; j < nsites; ++j) row[j] += pi * s[j];
    }
  });
  for (int i = 0; i < nsites; ++i) {
    acc[static_cast<std::size_t>(i) * nsites + i] = 1.0;
    for (int j = i + 1; j < nsites; ++j)
      acc[static_cast<std::size_t>(j) * nsites + i] =
          acc[static_cast<std::size_t>(i) * nsites + j];
  }
  pair_means_ = std::move(acc);
}

void ExactGibbs::ensure_triple_means() const {
  if (triple_means_) return;
  const int nsites = static_cast<int>(spec_.volume);
  if (nsites > 16)
    fail(ErrorKind::capacity, "triple moments limited to 16 sites");
  std::vector<double> acc(
      static_cast<std::size_t>(nsites) * nsites * nsites, 0.0);
  walk([&](std::uint64_t, double energy, double, const std::int8_t* s) {
    const double p = std::exp(energy - log_z_);
    for (int i = 0; i < nsites; ++i) {
      const double pi = p * s[i];
      for (int j = i + 1; j < nsites; ++j) {
        const double pij = pi * s[j];
        for (int k = j + 1; k < nsites; ++k)
          acc[(static_cast<std::size_t>(i) * nsites + j) * nsites + k] +=
              pij * s[k];
      }
    }
  });
  triple_means_ = std::move(acc);
}

const std::vector<double>& ExactGibbs::site_means() const {
  ensure_site_means();
  return *site_means_;
}

double ExactGibbs::site_mean(std::int64_t x) const {
  if (x < 0 || x >= spec_.volume)
    fail(ErrorKind::invalid_argument, "site_mean: unknown site");
  ensure_site_means();
  return (*site_means_)[static_cast<std::size_t>(x)];
}

double ExactGibbs::pair_mean(std::int64_t x, std::int64_t y) const {
  if (x < 0 || x >= spec_.volume || y < 0 || y >= spec_.volume)
    fail(ErrorKind::invalid_argument, "pair_mean: unknown site");
  ensure_pair_means();
  return (*pair_means_)[static_cast<std::size_t>(x) * spec_.volume + y];
}

double ExactGibbs::triple_mean(std::int64_t x, std::int64_t y, std::int64_t z) const {
  std::int64_t idx[3] = {x, y, z};
  std::sort(idx, idx + 3);
  for (std::int64_t v : idx)
    if (v < 0 || v >= spec_.volume)
      fail(ErrorKind::invalid_argument, "triple_mean: unknown site");
  // parity reduction via s^2 = 1
  if (idx[0] == idx[1]) return site_mean(idx[2]);
  if (idx[1] == idx[2]) return site_mean(idx[0]);
  ensure_triple_means();
  return (*triple_means_)[(static_cast<std::size_t>(idx[0]) * spec_.volume +
                           idx[1]) *
                              spec_.volume +
                          idx[2]];
}

double ExactGibbs::truncated_correlation(std::int64_t x, std::int64_t y) const {
  if (x == y) {
    const double m = site_mean(x);
    return 1.0 - m * m;
  }
  return pair_mean(x, y) - site_mean(x) * site_mean(y);
}

double ExactGibbs::derivative_stack(std::int64_t x, int order) const {
  const double m = site_mean(x);
  const double h = params_.h;
  const double var = 1.0 - m * m;  // <s^2> = 1
  switch (order) {
    case 1: return h * m;
    case 2: return h * h * var;
    case 3: return -2.0 * h * h * h * m * var;
    case 4: return 4.0 * h * h * h * h * (m * m - 0.5) * var;
    default:
      fail(ErrorKind::invalid_argument, "derivative_stack: order must be 1..4");
  }
}

double ExactGibbs::expectation(
    const std::function<double(const std::int8_t*)>& g) const {
  double acc = 0.0;
  walk([&](std::uint64_t, double energy, double, const std::int8_t* s) {
    acc += std::exp(energy - log_z_) * g(s);
  });
  return acc;
}

double ExactGibbs::delta_mean() const {
  const double v = static_cast<double>(spec_.volume);
  double acc = 0.0;
  walk([&](std::uint64_t, double energy, double field, const std::int8_t*) {
    acc += std::exp(energy - log_z_) * field;
  });
  return acc / v;
}

double ExactGibbs::delta_second_moment() const {
  const double v = static_cast<double>(spec_.volume);
  double acc = 0.0;
  walk([&](std::uint64_t, double energy, double field, const std::int8_t*) {
    const double d = field / v;
    acc += std::exp(energy - log_z_) * d * d;
  });
  return acc;
}

double ExactGibbs::abs_delta_deviation(double center) const {
  const double v = static_cast<double>(spec_.volume);
  double acc = 0.0;
  walk([&](std::uint64_t, double energy, double field, const std::int8_t*) {
    acc += std::exp(energy - log_z_) * std::abs(field / v - center);
  });
  return acc;
}

double log_partition(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder, int enumeration_cap) {
  return ExactGibbs(spec, params, disorder, enumeration_cap).log_partition();
}

double replica_expectation(const ExactGibbs& state, int m,
                           const ReplicaFunction& f) {
  if (m < 1) fail(ErrorKind::invalid_argument, "replica_expectation: m >= 1");
  const int nsites = static_cast<int>(state.spec_.volume);
  if (static_cast<std::int64_t>(m) * nsites > state.cap_)
    fail(ErrorKind::capacity,
         "replica_expectation: m * V exceeds the enumeration cap");

  const std::uint64_t nconf = std::uint64_t{1} << nsites;

  if (m == 1) {
    double acc = 0.0;
    std::vector<const std::int8_t*> view(1);
    state.walk([&](std::uint64_t, double energy, double, const std::int8_t* s) {
      view[0] = s;
      acc += std::exp(energy - state.log_z_) * f(view);
    });
    return acc;
  }

  // Cache per-configuration probabilities and spins, then run an odometer
  // over m-tuples. m >= 2 implies V <= cap/2, so the cache stays small.
  std::vector<double> prob(nconf, 0.0);
  std::vector<std::int8_t> spins(nconf * static_cast<std::size_t>(nsites));
  state.walk([&](std::uint64_t mask, double energy, double, const std::int8_t* s) {
    prob[mask] = std::exp(energy - state.log_z_);
    std::copy(s, s + nsites, spins.begin() + static_cast<std::size_t>(mask) * nsites);
  });

  std::vector<std::uint64_t> idx(static_cast<std::size_t>(m), 0);
  std::vector<const std::int8_t*> view(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) view[static_cast<std::size_t>(r)] = spins.data();

  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (int r = 0; r < m; ++r) w *= prob[idx[static_cast<std::size_t>(r)]];
    acc += w * f(view);
    int r = m - 1;
    while (r >= 0) {
      auto& i = idx[static_cast<std::size_t>(r)];
      if (++i < nconf) {
        view[static_cast<std::size_t>(r)] = spins.data() + i * static_cast<std::size_t>(nsites);
        break;
      }
      i = 0;
      view[static_cast<std::size_t>(r)] = spins.data();
      --r;
    }
    if (r < 0) break;
  }
  return acc;
}

double fd_derivative(const LatticeSpec& spec, const ModelParams& params,
                     const DisorderRealization& disorder, std::int64_t x,
                     double step, int order, std::int64_t y, int enumeration_cap) {
  if (!(step > 0.0))
    fail(ErrorKind::invalid_argument, "fd_derivative: step must be positive");
  if (x < 0 || x >= spec.volume)
    fail(ErrorKind::invalid_argument, "fd_derivative: unknown site");
  if (order != 1 && order != 2)
    fail(ErrorKind::invalid_argument, "fd_derivative: order must be 1 or 2");

  auto f_at = [&](double dx, double dy, std::int64_t ysite) {
    DisorderRealization d = disorder;
    d.g[static_cast<std::size_t>(x)] += dx;
    if (ysite >= 0) d.g[static_cast<std::size_t>(ysite)] += dy;
    return log_partition(spec, params, d, enumeration_cap);
  };

  if (order == 1)
    return (f_at(step, 0.0, -1) - f_at(-step, 0.0, -1)) / (2.0 * step);

  if (y < 0) y = x;
  if (y >= spec.volume)
    fail(ErrorKind::invalid_argument, "fd_derivative: unknown site y");
  if (y == x) {
    const double f0 = log_partition(spec, params, disorder, enumeration_cap);
    return (f_at(step, 0.0, -1) - 2.0 * f0 + f_at(-step, 0.0, -1)) /
           (step * step);
  }
  return (f_at(step, step, y) - f_at(step, -step, y) - f_at(-step, step, y) +
          f_at(-step, -step, y)) /
         (4.0 * step * step);
}

double transfer_matrix_log_partition(const ModelParams& params,
                                     const DisorderRealization& disorder) {
  validate_params(params);
  if (disorder.d != 1)
    fail(ErrorKind::invalid_argument, "transfer matrix requires d = 1");
  const std::int64_t n = disorder.volume();
  const double h = params.h;
  const double beta = params.beta;

  // u[0]: sigma = +1, u[1]: sigma = -1
  double u0 = std::exp(h * disorder.g[0]);
  double u1 = std::exp(-h * disorder.g[0]);
  double log_scale = 0.0;
  for (std::int64_t i = 1; i < n; ++i) {
    const double ep = std::exp(beta), em = std::exp(-beta);
    const double fp = std::exp(h * disorder.g[static_cast<std::size_t>(i)]);
    const double fm = 1.0 / fp;
    const double v0 = (u0 * ep + u1 * em) * fp;
    const double v1 = (u0 * em + u1 * ep) * fm;
    u0 = v0;
    u1 = v1;
    const double scale = std::max(u0, u1);
    u0 /= scale;
    u1 /= scale;
    log_scale += std::log(scale);
  }
  return std::log(u0 + u1) + log_scale;
}

ChainMarginals transfer_matrix_marginals(const ModelParams& params,
                                         const DisorderRealization& disorder) {
  validate_params(params);
  if (disorder.d != 1)
    fail(ErrorKind::invalid_argument, "transfer matrix requires d = 1");
  const std::int64_t n = disorder.volume();
  const double h = params.h;
  const double beta = params.beta;
  const double ep = std::exp(beta), em = std::exp(-beta);

  // forward a_i and backward b_i, normalized per step (scales cancel in
  // the single-site ratios)
  std::vector<double> a0(static_cast<std::size_t>(n)), a1(static_cast<std::size_t>(n));
  std::vector<double> b0(static_cast<std::size_t>(n)), b1(static_cast<std::size_t>(n));
  double log_scale = 0.0;

  a0[0] = std::exp(h * disorder.g[0]);
  a1[0] = std::exp(-h * disorder.g[0]);
  {
    const double scale = std::max(a0[0], a1[0]);
    a0[0] /= scale;
    a1[0] /= scale;
    log_scale += std::log(scale);
  }
  for (std::int64_t i = 1; i < n; ++i) {
    const double fp = std::exp(h * disorder.g[static_cast<std::size_t>(i)]);
    const double fm = 1.0 / fp;
    double v0 = (a0[i - 1] * ep + a1[i - 1] * em) * fp;
    double v1 = (a0[i - 1] * em + a1[i - 1] * ep) * fm;
    const double scale = std::max(v0, v1);
    a0[static_cast<std::size_t>(i)] = v0 / scale;
    a1[static_cast<std::size_t>(i)] = v1 / scale;
    log_scale += std::log(scale);
  }

  b0[static_cast<std::size_t>(n - 1)] = 1.0;
  b1[static_cast<std::size_t>(n - 1)] = 1.0;
  for (std::int64_t i = n - 2; i >= 0; --i) {
    const double fp = std::exp(h * disorder.g[static_cast<std::size_t>(i + 1)]);
    const double fm = 1.0 / fp;
    double v0 = ep * fp * b0[static_cast<std::size_t>(i + 1)] + em * fm * b1[static_cast<std::size_t>(i + 1)];
    double v1 = em * fp * b0[static_cast<std::size_t>(i + 1)] + ep * fm * b1[static_cast<std::size_t>(i + 1)];
    const double scale = std::max(v0, v1);
    b0[static_cast<std::size_t>(i)] = v0 / scale;
    b1[static_cast<std::size_t>(i)] = v1 / scale;
  }

  ChainMarginals out;
  out.site_mean.resize(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double wp = a0[static_cast<std::size_t>(i)] * b0[static_cast<std::size_t>(i)];
    const double wm = a1[static_cast<std::size_t>(i)] * b1[static_cast<std::size_t>(i)];
    out.site_mean[static_cast<std::size_t>(i)] = (wp - wm) / (wp + wm);
  }
  out.log_z = transfer_matrix_log_partition(params, disorder);
  (void)log_scale;
  return out;
}

DerivativePair replica_derivative_check(const ExactGibbs& state, int m,
                                        const ReplicaFunction& f,
                                        std::int64_t x, int j) {
  if (j != 1 && j != 2)
    fail(ErrorKind::invalid_argument, "replica_derivative_check: j must be 1 or 2");
  if (x < 0 || x >= state.spec().volume)
    fail(ErrorKind::invalid_argument, "replica_derivative_check: unknown site");
  const double h = state.params().h;

  // Differentiating an m-replica expectation in g_x multiplies the
  // integrand by h (sum_{s<=m} s_x^s - m s_x^{m+1}); the second
  // derivative repeats the step on the (m+1)-replica expectation, so each
  // order brings one fresh replica.
  double analytic;
  if (j == 1) {
    ReplicaFunction wrapped = [&, m, x](const std::vector<const std::int8_t*>& reps) {
      double bracket = 0.0;
      for (int s = 0; s < m; ++s) bracket += reps[static_cast<std::size_t>(s)][x];
      bracket -= static_cast<double>(m) * reps[static_cast<std::size_t>(m)][x];
      std::vector<const std::int8_t*> head(reps.begin(), reps.begin() + m);
      return reps[0][x] * bracket * f(head);
    };
    analytic = h * replica_expectation(state, m + 1, wrapped);
  } else {
    ReplicaFunction wrapped = [&, m, x](const std::vector<const std::int8_t*>& reps) {
      double first = 0.0;
      for (int s = 0; s < m; ++s) first += reps[static_cast<std::size_t>(s)][x];
      first -= static_cast<double>(m) * reps[static_cast<std::size_t>(m)][x];
      double second = 0.0;
      for (int s = 0; s <= m; ++s) second += reps[static_cast<std::size_t>(s)][x];
      second -= static_cast<double>(m + 1) * reps[static_cast<std::size_t>(m + 1)][x];
      std::vector<const std::int8_t*> head(reps.begin(), reps.begin() + m);
      return reps[0][x] * first * second * f(head);
    };
    analytic = h * h * replica_expectation(state, m + 2, wrapped);
  }

  // finite-difference side on u -> <s_x^1 f>_{g_x = u}
  auto eval_at = [&](double shift) {
    DisorderRealization d = state.disorder();
    d.g[static_cast<std::size_t>(x)] += shift;
    ExactGibbs st(state.spec(), state.params(), d, state.enumeration_cap());
    ReplicaFunction probe = [&, x](const std::vector<const std::int8_t*>& reps) {
      return reps[0][x] * f(reps);
    };
    return replica_expectation(st, m, probe);
  };
  double fd;
  if (j == 1) {
    const double step = 1e-4;
    fd = (eval_at(step) - eval_at(-step)) / (2.0 * step);
  } else {
    const double step = 1e-3;
    fd = (eval_at(step) - 2.0 * eval_at(0.0) + eval_at(-step)) / (step * step);
  }
  return {analytic, fd};
}

}  // namespace rfim
