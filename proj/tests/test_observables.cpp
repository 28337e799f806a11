#include <cmath>

#include "core/observables.hpp"
#include "core/quadrature.hpp"
#include "doctest.h"

using namespace rfim;

namespace {

DisorderRealization manual_disorder(const LatticeSpec& spec,
                                    const std::vector<double>& g,
                                    const std::vector<double>& h) {
  DisorderRealization dis;
  dis.d = spec.d;
  dis.n = spec.n;
  dis.seed = 0;
  dis.g = g;
  dis.zeta = g;
  dis.hprofile = h;
  return dis;
}

// brute-force oracle for <prod R_{l,s}> via full replica enumeration
double overlap_product_oracle(const ExactGibbs& st,
                              const std::vector<std::pair<int, int>>& factors,
                              const std::vector<double>& w) {
  int m = 1;
  for (const auto& [l, s] : factors) m = std::max({m, l, s});
  const double v = static_cast<double>(st.spec().volume);
  return replica_expectation(
      st, m, [&](const std::vector<const std::int8_t*>& reps) {
        double prod = 1.0;
        for (const auto& [l, s] : factors) {
          if (l == s) continue;
          double acc = 0;
          for (std::size_t x = 0; x < w.size(); ++x)
            acc += w[x] * reps[static_cast<std::size_t>(l - 1)][x] *
                   reps[static_cast<std::size_t>(s - 1)][x];
          prod *= acc / v;
        }
        return prod;
      });
}

}  // namespace

TEST_CASE("overlap examples") {
  const std::vector<std::int8_t> up = {1, 1};
  const std::vector<std::int8_t> down = {-1, -1};
  const std::vector<std::int8_t> mixed = {1, -1};
  const std::vector<double> unit = {1.0, 1.0};
  CHECK(overlap(up, up, unit).value == doctest::Approx(1.0));
  CHECK(overlap(up, down, unit).value == doctest::Approx(-1.0));
  const std::vector<double> w = {1.0, 0.25};  // h = (1, 0.5)
  CHECK(overlap(up, mixed, w).value == doctest::Approx(0.375));
  // same replica index: 1 by convention
  CHECK(overlap(up, mixed, w, 2, 2).value == doctest::Approx(1.0));
  const std::vector<std::int8_t> three = {1, 1, 1};
  const std::vector<double> w3 = {1, 1, 1};
  CHECK_THROWS_AS(overlap(up, three, w3), Error);
}

TEST_CASE("overlap samples stay within [-1, 1]") {
  RngStream s(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int8_t> a(6), b(6);
    std::vector<double> w(6);
    for (int i = 0; i < 6; ++i) {
      a[static_cast<std::size_t>(i)] = s.uniform01() < 0.5 ? -1 : 1;
      b[static_cast<std::size_t>(i)] = s.uniform01() < 0.5 ? -1 : 1;
      w[static_cast<std::size_t>(i)] = s.uniform01();  // h^2 <= 1
    }
    const double r = overlap(a, b, w).value;
    CHECK(std::abs(r) <= 1.0);
  }
}

TEST_CASE("delta examples") {
  const auto spec = build_lattice(1, 2);
  const auto dis = manual_disorder(spec, {1.0, -0.5}, {1.0, 1.0});
  const std::vector<std::int8_t> up = {1, 1};
  CHECK(delta_n(up, dis) == doctest::Approx(0.25));
  const std::vector<std::int8_t> aligned = {1, -1};  // sign(g)
  CHECK(delta_n(aligned, dis) == doctest::Approx(0.75));
  const auto zero = manual_disorder(spec, {0.0, 0.0}, {1.0, 1.0});
  CHECK(delta_n(up, zero) == doctest::Approx(0.0));
  const std::vector<std::int8_t> three = {1, 1, 1};
  CHECK_THROWS_AS(delta_n(three, dis), Error);
}

TEST_CASE("magnetization examples") {
  const std::vector<std::int8_t> up = {1, 1, 1, 1};
  const std::vector<std::int8_t> down = {-1, -1, -1, -1};
  const std::vector<std::int8_t> mixed = {1, 1, -1, 1};
  CHECK(magnetization(up) == doctest::Approx(1.0));
  CHECK(magnetization(down) == doctest::Approx(-1.0));
  CHECK(magnetization(mixed) == doctest::Approx(0.5));
}

TEST_CASE("quenched stats basics") {
  QuenchedStats qs;
  for (std::uint64_t seed = 0; seed < 10; ++seed) qs.add(seed, 3.5);
  CHECK(qs.mean() == doctest::Approx(3.5));
  CHECK(qs.variance() == doctest::Approx(0.0));
  CHECK(qs.standard_error() == doctest::Approx(0.0));
  CHECK(qs.count() == 10);
}

TEST_CASE("quenched stats merge is order-independent and bit-exact") {
  RngStream s(9);
  QuenchedStats a, b, whole;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const double v = s.normal();
    whole.add(seed, v);
    if (seed % 3 == 0)
      a.add(seed, v);
    else
      b.add(seed, v);
  }
  const QuenchedStats ab = QuenchedStats::merge(a, b);
  const QuenchedStats ba = QuenchedStats::merge(b, a);
  CHECK(ab.records() == whole.records());
  CHECK(ba.records() == whole.records());
  CHECK(ab.mean() == whole.mean());        // bit-exact
  CHECK(ab.variance() == whole.variance());
  CHECK(ba.mean() == ab.mean());
  // SE = sqrt(variance / count)
  CHECK(whole.standard_error() ==
        doctest::Approx(std::sqrt(whole.variance() / 40.0)).epsilon(1e-15));
}

TEST_CASE("jackknife of the plain mean reproduces the classic SE") {
  QuenchedStats qs;
  std::vector<std::vector<double>> rows;
  RngStream s(14);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double v = s.normal() * 2.0 + 1.0;
    qs.add(seed, v);
    rows.push_back({v});
  }
  const JackknifeResult jk =
      jackknife(rows, [](const std::vector<double>& m) { return m[0]; });
  CHECK(jk.estimate == doctest::Approx(qs.mean()).epsilon(1e-12));
  CHECK(jk.se == doctest::Approx(qs.standard_error()).epsilon(1e-9));
}

TEST_CASE("overlap function parsing") {
  const auto one = parse_overlap_function("one");
  CHECK(one.factors.empty());
  CHECK(replicas_needed(one) == 0);
  const auto r23 = parse_overlap_function("R23");
  REQUIRE(r23.factors.size() == 1);
  CHECK(r23.factors[0] == std::pair<int, int>{2, 3});
  CHECK(replicas_needed(r23) == 3);
  const auto prod = parse_overlap_function("R12*R13");
  CHECK(prod.factors.size() == 2);
  CHECK(replicas_needed(prod) == 3);
  CHECK_THROWS_AS(parse_overlap_function("bogus"), Error);
  CHECK_THROWS_AS(parse_overlap_function("R12*R13*R14"), Error);
}

TEST_CASE("overlap product means match brute-force replica enumeration") {
  const auto spec = build_lattice(1, 3);
  const auto dis = realize_disorder(spec, FieldProfile::power_law(0.8, 1.0),
                                    ZetaDistribution::make(ZetaKind::gaussian), 5);
  ExactGibbs st(spec, {0.7, 1.1}, dis);
  std::vector<double> w(dis.hprofile.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = dis.hprofile[i] * dis.hprofile[i];

  const std::vector<std::vector<std::pair<int, int>>> cases = {
      {{1, 2}},
      {{1, 2}, {1, 3}},
      {{1, 2}, {3, 4}},
      {{2, 3}, {1, 4}},
      {{1, 2}, {1, 2}},
      {{2, 3}, {1, 2}},
      {{1, 1}},
  };
  for (const auto& factors : cases) {
    const double fast = overlap_product_mean(st, factors, w);
    const double slow = overlap_product_oracle(st, factors, w);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-11));
  }
}

TEST_CASE("three-factor products also match the oracle") {
  const auto spec = build_lattice(1, 2);
  const auto dis = realize_disorder(spec, FieldProfile::constant(0.9),
                                    ZetaDistribution::make(ZetaKind::uniform), 6);
  ExactGibbs st(spec, {0.5, 0.9}, dis);
  std::vector<double> w(dis.hprofile.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = dis.hprofile[i] * dis.hprofile[i];
  const std::vector<std::vector<std::pair<int, int>>> cases = {
      {{1, 2}, {1, 3}, {1, 4}},
      {{2, 3}, {1, 2}, {1, 4}},
      {{1, 2}, {3, 4}, {1, 5}},
  };
  for (const auto& factors : cases) {
    const double fast = overlap_product_mean(st, factors, w);
    const double slow = overlap_product_oracle(st, factors, w);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-11));
  }
}

TEST_CASE("gg residual vanishes identically for f = 1 on the exact engine") {
  const auto spec = build_lattice(1, 4);
  const auto f = parse_overlap_function("one");
  for (int m : {2, 3, 4}) {
    std::vector<GgTerms> per_seed;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const auto dis =
          realize_disorder(spec, FieldProfile::power_law(0.5, 1.0),
                           ZetaDistribution::make(ZetaKind::gaussian), seed);
      ExactGibbs st(spec, {0.9, 0.8}, dis);
      std::vector<double> w(dis.hprofile.size());
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = dis.hprofile[i] * dis.hprofile[i];
      per_seed.push_back(gg_terms_exact(st, m, f, w));
    }
    const JackknifeResult res = gg_residual(per_seed, m);
    CHECK(std::abs(res.estimate) < 1e-12);
  }
}

TEST_CASE("gg terms on one site match the hand enumeration") {
  const auto spec = build_lattice(1, 1);
  const double h1 = 0.8, beta = 0.5, h = 1.2;
  const double w = h1 * h1;
  const auto f = parse_overlap_function("R12");
  // zeta = +1 and zeta = -1, the full rademacher ensemble
  std::vector<GgTerms> per_seed;
  std::vector<GgTerms> hand;
  for (double zeta : {1.0, -1.0}) {
    const auto dis = manual_disorder(spec, {h1 * zeta}, {h1});
    ExactGibbs st(spec, {beta, h}, dis);
    per_seed.push_back(gg_terms_exact(st, 2, f, {w}));
    const double t = std::tanh(h * h1 * zeta);
    GgTerms expect;
    expect.f_r_top = w * w * t * t;  // <R12 R13> = w^2 <s2 s3>
    expect.f_alone = w * t * t;
    expect.r12 = w * t * t;
    expect.f_r_s = {w * w};  // <R12^2> = w^2
    hand.push_back(expect);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(per_seed[k].f_r_top == doctest::Approx(hand[k].f_r_top).epsilon(1e-12));
    CHECK(per_seed[k].f_alone == doctest::Approx(hand[k].f_alone).epsilon(1e-12));
    CHECK(per_seed[k].r12 == doctest::Approx(hand[k].r12).epsilon(1e-12));
    CHECK(per_seed[k].f_r_s[0] == doctest::Approx(hand[k].f_r_s[0]).epsilon(1e-12));
  }
  const double res_impl = gg_residual(per_seed, 2).estimate;
  const double res_hand = gg_residual(hand, 2).estimate;
  CHECK(std::abs(res_impl - res_hand) < 1e-12);
}

TEST_CASE("gg residual is bounded by 2 for |f| <= 1") {
  const auto spec = build_lattice(1, 3);
  for (const char* fname : {"one", "R12", "R23", "R12*R13"}) {
    const auto f = parse_overlap_function(fname);
    const int m = std::max(2, replicas_needed(f));
    std::vector<GgTerms> per_seed;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto dis =
          realize_disorder(spec, FieldProfile::constant(1.0),
                           ZetaDistribution::make(ZetaKind::rademacher), seed);
      ExactGibbs st(spec, {1.0, 1.0}, dis);
      std::vector<double> w(3, 1.0);
      per_seed.push_back(gg_terms_exact(st, m, f, w));
    }
    CHECK(std::abs(gg_residual(per_seed, m).estimate) <= 2.0);
  }
}

TEST_CASE("replica exchangeability on the exact engine") {
  const auto spec = build_lattice(1, 3);
  const auto dis = realize_disorder(spec, FieldProfile::power_law(0.6, 1.0),
                                    ZetaDistribution::make(ZetaKind::gaussian), 13);
  ExactGibbs st(spec, {0.8, 0.9}, dis);
  std::vector<double> w(dis.hprofile.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = dis.hprofile[i] * dis.hprofile[i];
  // permuting replica labels leaves every product mean unchanged
  const double a = overlap_product_mean(st, {{1, 2}}, w);
  const double b = overlap_product_mean(st, {{2, 3}}, w);
  const double c = overlap_product_mean(st, {{1, 4}}, w);
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
  CHECK(a == doctest::Approx(c).epsilon(1e-13));
  const double p1 = overlap_product_mean(st, {{1, 2}, {1, 3}}, w);
  const double p2 = overlap_product_mean(st, {{2, 3}, {2, 1}}, w);
  const double p3 = overlap_product_mean(st, {{1, 2}, {1, 4}}, w);
  CHECK(p1 == doctest::Approx(p2).epsilon(1e-13));
  CHECK(p1 == doctest::Approx(p3).epsilon(1e-13));
}

TEST_CASE("single-site overlap variance closed form") {
  const auto spec = build_lattice(1, 1);
  const double h1 = 0.7;
  const auto dis = manual_disorder(spec, {h1 * 1.0}, {h1});
  ExactGibbs st(spec, {0.4, 1.3}, dis);
  const std::vector<double> w = {h1 * h1};
  const double r_mean = overlap_product_mean(st, {{1, 2}}, w);
  const double r_sq = overlap_product_mean(st, {{1, 2}, {1, 2}}, w);
  const double m = st.site_mean(0);
  const double expected = std::pow(h1, 4) * (1.0 - std::pow(m, 4));
  CHECK(r_sq - r_mean * r_mean == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("beta = 0 overlap mean equals the per-site quadrature oracle") {
  // rademacher: tanh^2 is even in zeta, so every seed gives the exact value
  const auto spec = build_lattice(1, 5);
  const auto profile = FieldProfile::power_law(0.9, 1.0);
  const double h = 0.8;
  const auto dis = realize_disorder(spec, profile,
                                    ZetaDistribution::make(ZetaKind::rademacher), 3);
  ExactGibbs st(spec, {0.0, h}, dis);
  std::vector<double> w(dis.hprofile.size());
  double target = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = dis.hprofile[i] * dis.hprofile[i];
    const double t = std::tanh(h * dis.hprofile[i]);  // |zeta| = 1
    target += w[i] * t * t;
  }
  target /= static_cast<double>(spec.volume);
  CHECK(overlap_product_mean(st, {{1, 2}}, w) ==
        doctest::Approx(target).epsilon(1e-12));

  // gaussian: seed average approaches the Gauss-Hermite oracle
  const auto gauss = ZetaDistribution::make(ZetaKind::gaussian);
  const auto nodes = quad::gauss_hermite(64);
  double oracle = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double e = 0;
    for (std::size_t q = 0; q < nodes.x.size(); ++q) {
      const double z = std::sqrt(2.0) * nodes.x[q];
      const double t = std::tanh(h * dis.hprofile[i] * z);
      e += nodes.w[q] / std::sqrt(M_PI) * t * t;
    }
    oracle += w[i] * e;
  }
  oracle /= static_cast<double>(spec.volume);
  QuenchedStats qs;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const auto dg = realize_disorder(spec, profile, gauss, seed);
    ExactGibbs sg(spec, {0.0, h}, dg);
    qs.add(seed, overlap_product_mean(sg, {{1, 2}}, w));
  }
  CHECK(std::abs(qs.mean() - oracle) <= 3.0 * qs.standard_error());
}
