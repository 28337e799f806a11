#include <chrono>
#include <cmath>

#include "core/exact.hpp"
#include "core/observables.hpp"
#include "doctest.h"

using namespace rfim;

namespace {

DisorderRealization manual_disorder(const LatticeSpec& spec,
                                    const std::vector<double>& g) {
  DisorderRealization dis;
  dis.d = spec.d;
  dis.n = spec.n;
  dis.seed = 0;
  dis.g = g;
  dis.zeta = g;
  dis.hprofile.assign(g.size(), 1.0);
  return dis;
}

DisorderRealization random_disorder(const LatticeSpec& spec, std::uint64_t seed,
                                    ZetaKind kind = ZetaKind::gaussian) {
  return realize_disorder(spec, FieldProfile::constant(1.0),
                          ZetaDistribution::make(kind), seed);
}

}  // namespace

TEST_CASE("single site log partition equals log 2cosh(h g)") {
  const auto spec = build_lattice(1, 1);
  const auto dis = manual_disorder(spec, {1.0});
  const double f = log_partition(spec, {1.0, 0.5}, dis);
  CHECK(f == doctest::Approx(std::log(2.0 * std::cosh(0.5))).epsilon(1e-12));
}

TEST_CASE("two-site chain with zero disorder") {
  const auto spec = build_lattice(1, 2);
  const auto dis = manual_disorder(spec, {0.0, 0.0});
  const double f = log_partition(spec, {1.0, 1.0}, dis);
  CHECK(f == doctest::Approx(std::log(2.0 * M_E + 2.0 / M_E)).epsilon(1e-12));
}

TEST_CASE("beta = 0 factorizes over sites") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const auto spec = build_lattice(2, n);  // up to 16 spins
    const auto dis = random_disorder(spec, seed);
    const double h = 0.3 + 0.1 * static_cast<double>(seed % 5);
    const double f = log_partition(spec, {0.0, h}, dis);
    double expected = 0.0;
    for (double g : dis.g) expected += std::log(2.0 * std::cosh(h * g));
    CHECK(std::abs(f - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("enumeration cap guards the volume") {
  const auto spec = build_lattice(1, 6);
  const auto dis = random_disorder(spec, 1);
  CHECK_THROWS_AS(ExactGibbs(spec, {1.0, 1.0}, dis, /*cap=*/4), Error);
}

TEST_CASE("replica expectation: spin-flip symmetry at zero disorder") {
  const auto spec = build_lattice(1, 2);
  const auto dis = manual_disorder(spec, {0.0, 0.0});
  ExactGibbs st(spec, {1.0, 1.0}, dis);
  const double m = replica_expectation(
      st, 1, [](const std::vector<const std::int8_t*>& r) {
        return static_cast<double>(r[0][0]);
      });
  CHECK(m == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("replica expectation factorizes across replicas") {
  const auto spec = build_lattice(1, 3);
  const auto dis = random_disorder(spec, 3);
  ExactGibbs st(spec, {0.8, 0.7}, dis);
  const double cross = replica_expectation(
      st, 2, [](const std::vector<const std::int8_t*>& r) {
        return static_cast<double>(r[0][1]) * r[1][1];
      });
  const double m = st.site_mean(1);
  CHECK(cross == doctest::Approx(m * m).epsilon(1e-12));
}

TEST_CASE("two-site chain pair mean is tanh(beta) at zero disorder") {
  const auto spec = build_lattice(1, 2);
  const auto dis = manual_disorder(spec, {0.0, 0.0});
  ExactGibbs st(spec, {1.0, 1.0}, dis);
  const double pair = replica_expectation(
      st, 1, [](const std::vector<const std::int8_t*>& r) {
        return static_cast<double>(r[0][0]) * r[0][1];
      });
  CHECK(pair == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
  CHECK(st.pair_mean(0, 1) == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
}

TEST_CASE("truncated correlation") {
  const auto spec = build_lattice(1, 2);
  const auto dis = manual_disorder(spec, {0.0, 0.0});
  ExactGibbs st(spec, {1.0, 1.0}, dis);
  CHECK(st.truncated_correlation(0, 1) ==
        doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
  // x = y: 1 - <s>^2 in [0, 1]
  const auto dis2 = random_disorder(spec, 4);
  ExactGibbs st2(spec, {0.5, 1.0}, dis2);
  const double self = st2.truncated_correlation(0, 0);
  CHECK(self >= 0.0);
  CHECK(self <= 1.0);
  // beta = 0: distinct sites decouple
  ExactGibbs st3(spec, {0.0, 1.0}, dis2);
  CHECK(st3.truncated_correlation(0, 1) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("derivative stack closed forms") {
  const auto spec = build_lattice(1, 1);
  const auto dis = manual_disorder(spec, {1.0});
  const double h = 0.5;
  ExactGibbs st(spec, {1.0, h}, dis);
  CHECK(st.derivative_stack(0, 1) ==
        doctest::Approx(h * std::tanh(h)).epsilon(1e-12));
  // zero disorder: odd orders vanish
  const auto spec2 = build_lattice(1, 2);
  const auto dis2 = manual_disorder(spec2, {0.0, 0.0});
  ExactGibbs st2(spec2, {1.0, 1.0}, dis2);
  CHECK(st2.derivative_stack(0, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(st2.derivative_stack(0, 3) == doctest::Approx(0.0).epsilon(1e-14));
  // order 2 in [0, h^2]
  const auto dis3 = random_disorder(spec2, 9);
  ExactGibbs st3(spec2, {0.7, 1.3}, dis3);
  for (int x = 0; x < 2; ++x) {
    const double second = st3.derivative_stack(x, 2);
    CHECK(second >= 0.0);
    CHECK(second <= 1.3 * 1.3);
  }
  CHECK_THROWS_AS(st3.derivative_stack(0, 5), Error);
}

TEST_CASE("finite differences match the analytic stack") {
  const auto spec = build_lattice(1, 1);
  const auto dis = manual_disorder(spec, {1.0});
  const ModelParams params{1.0, 0.5};
  const double fd1 = fd_derivative(spec, params, dis, 0, 1e-4, 1);
  CHECK(std::abs(fd1 - 0.5 * std::tanh(0.5)) < 1e-6);

  // mixed second derivatives against h^2 <s_x; s_y>
  const auto spec2 = build_lattice(2, 2);
  const auto dis2 = random_disorder(spec2, 21);
  const ModelParams p2{0.8, 0.9};
  ExactGibbs st(spec2, p2, dis2);
  for (std::int64_t x = 0; x < spec2.volume; ++x) {
    const double same = fd_derivative(spec2, p2, dis2, x, 1e-3, 2);
    CHECK(std::abs(same - p2.h * p2.h * st.truncated_correlation(x, x)) < 1e-5);
    for (std::int64_t y = x + 1; y < spec2.volume; ++y) {
      const double mixed = fd_derivative(spec2, p2, dis2, x, 1e-3, 2, y);
      CHECK(std::abs(mixed - p2.h * p2.h * st.truncated_correlation(x, y)) < 1e-5);
    }
  }
}

TEST_CASE("derivative identity suite on a 3x3 lattice") {
  const auto spec = build_lattice(2, 3);
  const ModelParams params{0.6, 0.8};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto dis = random_disorder(spec, seed);
    ExactGibbs st(spec, params, dis);
    for (std::int64_t x = 0; x < spec.volume; ++x) {
      const double fd1 = fd_derivative(spec, params, dis, x, 1e-4, 1);
      CHECK(std::abs(fd1 - st.derivative_stack(x, 1)) < 1e-6);
      // fourth vs second derivative inequality
      CHECK(st.derivative_stack(x, 4) / (params.h * params.h) <=
            4.0 * st.derivative_stack(x, 2) + 1e-14);
      // dF/dg_x = h <s_x> stays in [-h, h]
      CHECK(std::abs(st.derivative_stack(x, 1)) <= params.h + 1e-14);
    }
  }
}

TEST_CASE("FKG: truncated correlations never dip below -1e-12") {
  const auto spec = build_lattice(2, 3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto dis = random_disorder(spec, seed, ZetaKind::rademacher);
    ExactGibbs st(spec, {1.0, 0.5}, dis);
    for (std::int64_t x = 0; x < spec.volume; ++x)
      for (std::int64_t y = x; y < spec.volume; ++y)
        CHECK(st.truncated_correlation(x, y) >= -1e-12);
  }
}

TEST_CASE("transfer matrix: single factor") {
  const auto spec = build_lattice(1, 1);
  const auto dis = manual_disorder(spec, {1.0});
  CHECK(transfer_matrix_log_partition({1.0, 0.5}, dis) ==
        doctest::Approx(std::log(2.0 * std::cosh(0.5))).epsilon(1e-12));
}

TEST_CASE("transfer matrix equals enumeration on chains") {
  for (int n : {2, 5, 10, 16, 20}) {
    const auto spec = build_lattice(1, n);
    const auto dis = random_disorder(spec, static_cast<std::uint64_t>(n));
    const ModelParams params{0.9, 0.7};
    const double tm = transfer_matrix_log_partition(params, dis);
    const double en = log_partition(spec, params, dis);
    CHECK(std::abs(tm - en) < 1e-9);
  }
}

TEST_CASE("transfer matrix survives n = 10^4 without overflow") {
  const auto spec = build_lattice(1, 10000);
  const auto dis = random_disorder(spec, 5);
  const auto start = std::chrono::steady_clock::now();
  const double f = transfer_matrix_log_partition({1.0, 1.0}, dis);
  const auto elapsed = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  CHECK(std::isfinite(f));
  CHECK(f > 0.0);
  CHECK(elapsed < 1.0);
}

TEST_CASE("transfer matrix rejects d != 1") {
  const auto spec = build_lattice(2, 2);
  const auto dis = random_disorder(spec, 1);
  CHECK_THROWS_AS(transfer_matrix_log_partition({1.0, 1.0}, dis), Error);
}

TEST_CASE("transfer-matrix marginals match enumeration") {
  const auto spec = build_lattice(1, 8);
  const auto dis = random_disorder(spec, 17);
  const ModelParams params{0.8, 0.6};
  const auto marg = transfer_matrix_marginals(params, dis);
  ExactGibbs st(spec, params, dis);
  for (std::int64_t x = 0; x < spec.volume; ++x)
    CHECK(marg.site_mean[static_cast<std::size_t>(x)] ==
          doctest::Approx(st.site_mean(x)).epsilon(1e-10));
}

TEST_CASE("replica derivative identity, j = 1, f = 1, m = 1") {
  const auto spec = build_lattice(1, 2);
  const auto dis = random_disorder(spec, 31);
  ExactGibbs st(spec, {0.7, 0.9}, dis);
  const ReplicaFunction one = [](const std::vector<const std::int8_t*>&) {
    return 1.0;
  };
  const auto pair = replica_derivative_check(st, 1, one, 0, 1);
  // analytic side h (1 - <s_x>^2)
  const double m = st.site_mean(0);
  CHECK(pair.analytic == doctest::Approx(0.9 * (1.0 - m * m)).epsilon(1e-10));
  CHECK(std::abs(pair.analytic - pair.finite_difference) < 1e-5);

  // zero disorder: h (1 - 0) = h
  const auto dis0 = manual_disorder(spec, {0.0, 0.0});
  ExactGibbs st0(spec, {1.0, 0.8}, dis0);
  const auto pair0 = replica_derivative_check(st0, 1, one, 0, 1);
  CHECK(pair0.analytic == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("replica derivative identity with f = R12, m = 2") {
  const auto spec = build_lattice(1, 2);
  const auto dis = random_disorder(spec, 32, ZetaKind::rademacher);
  ExactGibbs st(spec, {0.6, 0.8}, dis);
  std::vector<double> w(2);
  for (int i = 0; i < 2; ++i) w[i] = dis.hprofile[i] * dis.hprofile[i];
  const ReplicaFunction f_r12 =
      [w](const std::vector<const std::int8_t*>& r) {
        double acc = 0;
        for (std::size_t x = 0; x < w.size(); ++x) acc += w[x] * r[0][x] * r[1][x];
        return acc / static_cast<double>(w.size());
      };
  for (int j : {1, 2}) {
    const auto pair = replica_derivative_check(st, 2, f_r12, 1, j);
    CHECK(std::abs(pair.analytic - pair.finite_difference) < 1e-5);
  }
}

TEST_CASE("expectation, delta helpers agree with direct sums") {
  const auto spec = build_lattice(1, 4);
  const auto dis = random_disorder(spec, 77);
  ExactGibbs st(spec, {0.5, 1.1}, dis);
  // <Delta> via the generic functional
  const double direct = st.expectation([&](const std::int8_t* s) {
    double acc = 0;
    for (std::int64_t x = 0; x < spec.volume; ++x) acc += dis.g[static_cast<std::size_t>(x)] * s[x];
    return acc / static_cast<double>(spec.volume);
  });
  CHECK(st.delta_mean() == doctest::Approx(direct).epsilon(1e-12));
  // and via marginals
  double via_means = 0;
  for (std::int64_t x = 0; x < spec.volume; ++x)
    via_means += dis.g[static_cast<std::size_t>(x)] * st.site_mean(x);
  via_means /= static_cast<double>(spec.volume);
  CHECK(st.delta_mean() == doctest::Approx(via_means).epsilon(1e-12));
}
