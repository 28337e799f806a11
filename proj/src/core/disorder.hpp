#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/lattice.hpp"
#include "core/rng.hpp"

namespace rfim {

enum class ZetaKind {
  gaussian,
  rademacher,
  uniform,
  centered_exponential,
  student_t
};

// A standardized noise law: zero mean, unit variance, finite fifth
// absolute moment. The catalog is closed; student-t requires nu > 5.
struct ZetaDistribution {
  ZetaKind kind = ZetaKind::gaussian;
  double nu = 0.0;  // student-t degrees of freedom

  static ZetaDistribution make(ZetaKind kind, double nu = 0.0);
  static ZetaDistribution parse(const std::string& json_text);

  double sample(RngStream& stream) const;
  std::string name() const;
  std::string to_json() const;
};

double sample_zeta(const ZetaDistribution& dist, RngStream& stream);

// Site-dependent field amplitude h_x with sup |h_x| <= 1.
struct FieldProfile {
  enum class Kind { constant_sign, power_law };

  Kind kind = Kind::constant_sign;
  double c = 1.0;       // constant-sign level, |c| <= 1
  double hstar = 0.5;   // power-law amplitude in (0, 1]
  double alpha = 1.0;   // power-law exponent > 0
  std::vector<int> origin;  // empty: lexicographically first site (1,...,1)

  static FieldProfile constant(double c);
  static FieldProfile power_law(double hstar, double alpha,
                                std::vector<int> origin = {});
  static FieldProfile parse(const std::string& json_text);

  double value_at(const LatticeSpec& spec, std::int64_t site) const;
  std::string name() const;
  std::string to_json() const;
};

// One quenched sample of the random field g_x = h_x * zeta_x.
struct DisorderRealization {
  int d = 0;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> g;
  std::vector<double> zeta;
  std::vector<double> hprofile;

  std::int64_t volume() const { return static_cast<std::int64_t>(g.size()); }
};

// Per-site draws come from substream(seed, site index), so the value at a
// site does not depend on lattice size for a fixed indexing scheme.
DisorderRealization realize_disorder(const LatticeSpec& spec,
                                     const FieldProfile& profile,
                                     const ZetaDistribution& dist,
                                     std::uint64_t seed);

// (sum_x |h_x|) / |V_n|; finite-n diagnostic compared across growing n.
double smallness_ratio(const FieldProfile& profile, const LatticeSpec& spec);

// Audit/replay record {seed, d, n, profile, dist, g[]}.
std::string disorder_to_json(const DisorderRealization& dis,
                             const FieldProfile& profile,
                             const ZetaDistribution& dist);
DisorderRealization disorder_from_json(const std::string& text);

}  // namespace rfim
