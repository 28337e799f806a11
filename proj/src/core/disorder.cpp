#include "core/disorder.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace rfim {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ZetaDistribution ZetaDistribution::make(ZetaKind kind, double nu) {
  ZetaDistribution d;
  d.kind = kind;
  d.nu = nu;
  if (kind == ZetaKind::student_t && !(nu > 5.0))
    fail(ErrorKind::invalid_argument, "student-t: finite fifth moment requires nu > 5");
  return d;
}

double ZetaDistribution::sample(RngStream& s) const {
  switch (kind) {
    case ZetaKind::gaussian:
      return s.normal();
    case ZetaKind::rademacher:
      return s.uniform01() < 0.5 ? -1.0 : 1.0;
    case ZetaKind::uniform:
      // uniform on [-sqrt(3), sqrt(3)] has unit variance
      return (2.0 * s.uniform01() - 1.0) * std::sqrt(3.0);
    case ZetaKind::centered_exponential:
      return -std::log(s.uniform_open01()) - 1.0;
    case ZetaKind::student_t: {
      // Bailey's polar method; scaled by sqrt((nu-2)/nu) for unit variance.
      const double u = s.uniform_open01();
      const double v = s.uniform01();
      const double t =
          std::sqrt(nu * (std::pow(u, -2.0 / nu) - 1.0)) * std::cos(2.0 * M_PI * v);
      return t * std::sqrt((nu - 2.0) / nu);
    }
  }
  fail(ErrorKind::invalid_argument, "unknown zeta kind");
}

double sample_zeta(const ZetaDistribution& dist, RngStream& stream) {
  return dist.sample(stream);
}

std::string ZetaDistribution::name() const {
  switch (kind) {
    case ZetaKind::gaussian: return "gaussian";
    case ZetaKind::rademacher: return "rademacher";
    case ZetaKind::uniform: return "uniform";
    case ZetaKind::centered_exponential: return "centered-exponential";
    case ZetaKind::student_t: return "student-t(nu=" + fmt_double(nu) + ")";
  }
  return "?";
}

std::string ZetaDistribution::to_json() const {
  json j;
  switch (kind) {
    case ZetaKind::gaussian: j["kind"] = "gaussian"; break;
    case ZetaKind::rademacher: j["kind"] = "rademacher"; break;
    case ZetaKind::uniform: j["kind"] = "uniform"; break;
    case ZetaKind::centered_exponential: j["kind"] = "centered-exponential"; break;
    case ZetaKind::student_t:
      j["kind"] = "student-t";
      j["nu"] = nu;
      break;
  }
  return j.dump();
}

ZetaDistribution ZetaDistribution::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("dist: bad json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::invalid_argument, "dist: expected object with string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "gaussian") return make(ZetaKind::gaussian);
  if (kind == "rademacher") return make(ZetaKind::rademacher);
  if (kind == "uniform") return make(ZetaKind::uniform);
  if (kind == "centered-exponential") return make(ZetaKind::centered_exponential);
  if (kind == "student-t") {
    if (!j.contains("nu") || !j["nu"].is_number())
      fail(ErrorKind::invalid_argument, "dist: student-t requires numeric 'nu'");
    return make(ZetaKind::student_t, j["nu"].get<double>());
  }
  fail(ErrorKind::invalid_argument, "dist: unknown kind '" + kind + "'");
}

FieldProfile FieldProfile::constant(double c) {
  if (!(std::abs(c) <= 1.0))
    fail(ErrorKind::invalid_argument, "profile: constant-sign requires |c| <= 1");
  FieldProfile p;
  p.kind = Kind::constant_sign;
  p.c = c;
  return p;
}

FieldProfile FieldProfile::power_law(double hstar, double alpha,
                                     std::vector<int> origin) {
  if (!(hstar > 0.0 && hstar <= 1.0))
    fail(ErrorKind::invalid_argument, "profile: power-law requires hstar in (0, 1]");
  if (!(alpha > 0.0))
    fail(ErrorKind::invalid_argument, "profile: power-law requires alpha > 0");
  FieldProfile p;
  p.kind = Kind::power_law;
  p.hstar = hstar;
  p.alpha = alpha;
  p.origin = std::move(origin);
  return p;
}

double FieldProfile::value_at(const LatticeSpec& spec, std::int64_t site) const {
  if (site < 0 || site >= spec.volume)
    fail(ErrorKind::invalid_argument, "profile: site index out of range");
  if (kind == Kind::constant_sign) return c;
  const std::vector<int>& s = spec.sites[static_cast<std::size_t>(site)];
  const std::vector<int> def_origin(spec.d, 1);
  const std::vector<int>& o = origin.empty() ? def_origin : origin;
  const double r = site_norm(s, o);
  if (r == 0.0) return hstar;  // exact value at the origin
  return hstar * std::pow(std::max(r, 1.0), -alpha);
}

std::string FieldProfile::name() const {
  if (kind == Kind::constant_sign) return "constant(c=" + fmt_double(c) + ")";
  return "power-law(hstar=" + fmt_double(hstar) + ",alpha=" + fmt_double(alpha) + ")";
}

std::string FieldProfile::to_json() const {
  json j;
  if (kind == Kind::constant_sign) {
    j["kind"] = "constant-sign";
    j["c"] = c;
  } else {
    j["kind"] = "power-law";
    j["hstar"] = hstar;
    j["alpha"] = alpha;
    if (!origin.empty()) j["origin"] = origin;
  }
  return j.dump();
}

FieldProfile FieldProfile::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("profile: bad json: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::invalid_argument, "profile: expected object with string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "constant-sign") {
    if (!j.contains("c") || !j["c"].is_number())
      fail(ErrorKind::invalid_argument, "profile: constant-sign requires numeric 'c'");
    return constant(j["c"].get<double>());
  }
  if (kind == "power-law") {
    if (!j.contains("hstar") || !j["hstar"].is_number())
      fail(ErrorKind::invalid_argument, "profile: power-law requires numeric 'hstar'");
    if (!j.contains("alpha") || !j["alpha"].is_number())
      fail(ErrorKind::invalid_argument, "profile: power-law requires numeric 'alpha'");
    std::vector<int> origin;
    if (j.contains("origin")) origin = j["origin"].get<std::vector<int>>();
    return power_law(j["hstar"].get<double>(), j["alpha"].get<double>(), origin);
  }
  fail(ErrorKind::invalid_argument, "profile: unknown kind '" + kind + "'");
}

DisorderRealization realize_disorder(const LatticeSpec& spec,
                                     const FieldProfile& profile,
                                     const ZetaDistribution& dist,
                                     std::uint64_t seed) {
  DisorderRealization out;
  out.d = spec.d;
  out.n = spec.n;
  out.seed = seed;
  const std::size_t v = static_cast<std::size_t>(spec.volume);
  out.g.resize(v);
  out.zeta.resize(v);
  out.hprofile.resize(v);
  for (std::size_t i = 0; i < v; ++i) {
    RngStream stream =
        RngStream::substream(seed, static_cast<std::uint64_t>(i));
    const double z = dist.sample(stream);
    const double h = profile.value_at(spec, static_cast<std::int64_t>(i));
    if (!(std::abs(h) <= 1.0))
      fail(ErrorKind::invalid_argument, "profile: |h_x| must stay <= 1");
    out.zeta[i] = z;
    out.hprofile[i] = h;
    out.g[i] = h * z;
  }
  return out;
}

double smallness_ratio(const FieldProfile& profile, const LatticeSpec& spec) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < spec.volume; ++i)
    acc += std::abs(profile.value_at(spec, i));
  return acc / static_cast<double>(spec.volume);
}

std::string disorder_to_json(const DisorderRealization& dis,
                             const FieldProfile& profile,
                             const ZetaDistribution& dist) {
  json j;
  j["seed"] = dis.seed;
  j["d"] = dis.d;
  j["n"] = dis.n;
  j["profile"] = json::parse(profile.to_json());
  j["dist"] = json::parse(dist.to_json());
  j["g"] = dis.g;
  return j.dump();
}

DisorderRealization disorder_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("disorder: bad json: ") + e.what());
  }
  for (const char* key : {"seed", "d", "n", "profile", "dist"})
    if (!j.contains(key))
      fail(ErrorKind::invalid_argument,
           std::string("disorder: missing key '") + key + "'");
  const LatticeSpec spec = build_lattice(j["d"].get<int>(), j["n"].get<int>());
  const FieldProfile profile = FieldProfile::parse(j["profile"].dump());
  const ZetaDistribution dist = ZetaDistribution::parse(j["dist"].dump());
  DisorderRealization dis =
      realize_disorder(spec, profile, dist, j["seed"].get<std::uint64_t>());
  if (j.contains("g")) {
    const auto g = j["g"].get<std::vector<double>>();
    if (g.size() != dis.g.size())
      fail(ErrorKind::invalid_argument, "disorder: g[] length mismatch");
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i] != dis.g[i])
        fail(ErrorKind::invalid_argument,
             "disorder: recorded g[] disagrees with regeneration from seed");
  }
  return dis;
}

}  // namespace rfim
