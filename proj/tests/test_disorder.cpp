#include <cmath>
#include <functional>

#include "core/disorder.hpp"
#include "doctest.h"

using namespace rfim;

namespace {

struct MomentTargets {
  double mean, var, abs3, abs5;
};

// closed-form absolute moments per law
MomentTargets targets_for(const ZetaDistribution& dist) {
  switch (dist.kind) {
    case ZetaKind::gaussian: {
      const double c = std::sqrt(2.0 / M_PI);
      return {0.0, 1.0, 2.0 * c, 8.0 * c};
    }
    case ZetaKind::rademacher:
      return {0.0, 1.0, 1.0, 1.0};
    case ZetaKind::uniform: {
      const double r = std::sqrt(3.0);
      return {0.0, 1.0, r * r * r / 4.0, r * r * r * r * r / 6.0};
    }
    case ZetaKind::centered_exponential:
      return {0.0, 1.0, 12.0 / M_E - 2.0, 240.0 / M_E - 44.0};
    case ZetaKind::student_t: {
      // E|zeta|^k = (nu-2)^{k/2} G((k+1)/2) G((nu-k)/2) / (sqrt(pi) G(nu/2))
      auto abs_moment = [&](double k) {
        return std::exp(0.5 * k * std::log(dist.nu - 2.0) +
                        std::lgamma(0.5 * (k + 1.0)) +
                        std::lgamma(0.5 * (dist.nu - k)) -
                        0.5 * std::log(M_PI) - std::lgamma(0.5 * dist.nu));
      };
      return {0.0, 1.0, abs_moment(3.0), abs_moment(5.0)};
    }
  }
  return {};
}

struct SampleMoment {
  double mean, se;
};

SampleMoment estimate(const ZetaDistribution& dist, long n,
                      const std::function<double(double)>& f) {
  RngStream stream(97531);
  double acc = 0, acc2 = 0;
  for (long i = 0; i < n; ++i) {
    const double v = f(dist.sample(stream));
    acc += v;
    acc2 += v * v;
  }
  const double mean = acc / static_cast<double>(n);
  const double var = std::max(0.0, acc2 / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

void check_moment(const ZetaDistribution& dist, long n, double target,
                  const std::function<double(double)>& f) {
  const SampleMoment m = estimate(dist, n, f);
  CHECK(std::abs(m.mean - target) <= 4.0 * m.se + 1e-12);
}

}  // namespace

TEST_CASE("moment property test per distribution") {
  const long n = 1000000;
  std::vector<ZetaDistribution> catalog = {
      ZetaDistribution::make(ZetaKind::gaussian),
      ZetaDistribution::make(ZetaKind::rademacher),
      ZetaDistribution::make(ZetaKind::uniform),
      ZetaDistribution::make(ZetaKind::centered_exponential),
      // 10th moment must be finite for the SE of the fifth-moment estimate
      ZetaDistribution::make(ZetaKind::student_t, 12.0),
  };
  for (const auto& dist : catalog) {
    CAPTURE(dist.name());
    const MomentTargets t = targets_for(dist);
    check_moment(dist, n, t.mean, [](double z) { return z; });
    check_moment(dist, n, t.var, [](double z) { return z * z; });
    check_moment(dist, n, t.abs3, [](double z) { return std::abs(z * z * z); });
    check_moment(dist, n, t.abs5,
                 [](double z) { return std::abs(z * z * z * z * z); });
  }
  // heavier tail: lower moments only
  const auto st7 = ZetaDistribution::make(ZetaKind::student_t, 7.0);
  const MomentTargets t7 = targets_for(st7);
  check_moment(st7, n, t7.mean, [](double z) { return z; });
  check_moment(st7, n, t7.var, [](double z) { return z * z; });
  check_moment(st7, n, t7.abs3, [](double z) { return std::abs(z * z * z); });
}

TEST_CASE("rademacher draws live on {-1, +1}") {
  const auto dist = ZetaDistribution::make(ZetaKind::rademacher);
  RngStream s(11);
  for (int i = 0; i < 1000; ++i) {
    const double z = dist.sample(s);
    CHECK((z == 1.0 || z == -1.0));
  }
}

TEST_CASE("uniform draws live on [-sqrt(3), sqrt(3)]") {
  const auto dist = ZetaDistribution::make(ZetaKind::uniform);
  RngStream s(12);
  for (int i = 0; i < 1000; ++i) {
    const double z = dist.sample(s);
    CHECK(std::abs(z) <= std::sqrt(3.0));
  }
}

TEST_CASE("centered exponential third moment is 2") {
  const auto dist = ZetaDistribution::make(ZetaKind::centered_exponential);
  check_moment(dist, 2000000, 2.0, [](double z) { return z * z * z; });
}

TEST_CASE("student-t needs nu > 5") {
  CHECK_THROWS_AS(ZetaDistribution::make(ZetaKind::student_t, 4.0), Error);
  CHECK_THROWS_AS(ZetaDistribution::make(ZetaKind::student_t, 5.0), Error);
  CHECK_NOTHROW(ZetaDistribution::make(ZetaKind::student_t, 5.5));
}

TEST_CASE("constant profile with rademacher noise gives g in {-1, +1}") {
  const auto spec = build_lattice(1, 8);
  const auto dis = realize_disorder(spec, FieldProfile::constant(1.0),
                                    ZetaDistribution::make(ZetaKind::rademacher), 5);
  for (double g : dis.g) CHECK(std::abs(g) == 1.0);
}

TEST_CASE("power-law profile values at distances 0, 1, 2") {
  const auto spec = build_lattice(1, 3);
  const auto profile = FieldProfile::power_law(0.5, 1.0);
  CHECK(profile.value_at(spec, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(profile.value_at(spec, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(profile.value_at(spec, 2) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("same seed reproduces g bit-exactly") {
  const auto spec = build_lattice(2, 3);
  const auto profile = FieldProfile::power_law(0.7, 1.5);
  const auto dist = ZetaDistribution::make(ZetaKind::gaussian);
  const auto a = realize_disorder(spec, profile, dist, 42);
  const auto b = realize_disorder(spec, profile, dist, 42);
  CHECK(a.g == b.g);
  CHECK(a.zeta == b.zeta);
  const auto c = realize_disorder(spec, profile, dist, 43);
  CHECK(a.g != c.g);
}

TEST_CASE("per-site draws do not depend on lattice size") {
  const auto profile = FieldProfile::constant(1.0);
  const auto dist = ZetaDistribution::make(ZetaKind::gaussian);
  const auto small = realize_disorder(build_lattice(1, 8), profile, dist, 7);
  const auto large = realize_disorder(build_lattice(1, 16), profile, dist, 7);
  for (std::size_t i = 0; i < small.zeta.size(); ++i)
    CHECK(small.zeta[i] == large.zeta[i]);
}

TEST_CASE("profile bound |h_x| <= 1 on every realization") {
  const auto spec = build_lattice(2, 4);
  for (double hstar : {0.1, 0.5, 1.0}) {
    const auto dis =
        realize_disorder(spec, FieldProfile::power_law(hstar, 0.5),
                         ZetaDistribution::make(ZetaKind::uniform), 3);
    for (double h : dis.hprofile) CHECK(std::abs(h) <= 1.0);
  }
  CHECK_THROWS_AS(FieldProfile::constant(1.5), Error);
  CHECK_THROWS_AS(FieldProfile::power_law(1.5, 1.0), Error);
  CHECK_THROWS_AS(FieldProfile::power_law(0.5, -1.0), Error);
}

TEST_CASE("smallness ratio: constant profile stays at 1") {
  for (int n : {2, 4, 8}) {
    const auto spec = build_lattice(1, n);
    CHECK(smallness_ratio(FieldProfile::constant(1.0), spec) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("smallness ratio: power-law d=1 alpha=1 n=4") {
  const auto spec = build_lattice(1, 4);
  const double expected = (1.0 + 1.0 + 0.5 + 1.0 / 3.0) / 4.0;
  CHECK(smallness_ratio(FieldProfile::power_law(1.0, 1.0), spec) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("smallness ratio is non-increasing in n for power-law profiles") {
  const auto profile = FieldProfile::power_law(0.5, 1.0);
  double prev = smallness_ratio(profile, build_lattice(1, 2));
  for (int n : {4, 8, 16, 32}) {
    const double cur = smallness_ratio(profile, build_lattice(1, n));
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  // alpha > d: clear decay
  const auto fast = FieldProfile::power_law(1.0, 2.0);
  CHECK(smallness_ratio(fast, build_lattice(1, 64)) <
        smallness_ratio(fast, build_lattice(1, 8)));
}

TEST_CASE("disorder json round trip") {
  const auto spec = build_lattice(1, 6);
  const auto profile = FieldProfile::power_law(0.5, 1.0);
  const auto dist = ZetaDistribution::make(ZetaKind::rademacher);
  const auto dis = realize_disorder(spec, profile, dist, 99);
  const std::string text = disorder_to_json(dis, profile, dist);
  const auto back = disorder_from_json(text);
  CHECK(back.g == dis.g);
  CHECK(back.seed == dis.seed);
}

