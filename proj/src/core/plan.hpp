#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/disorder.hpp"
#include "core/exact.hpp"
#include "core/mcmc.hpp"

namespace rfim {

struct ObservableSpec {
  std::string name;      // overlap-variance, gg-residual, delta-self-averaging,
                         // q-consistency, fkg-scan, ibp-suite, var-fn-scaling
  int m = 3;             // gg-residual
  std::string f = "R23"; // gg-residual
};

// A validated experiment plan: model grid x disorder choices x seed block,
// one engine policy, a named set of observables.
struct Plan {
  std::string name;
  int d = 1;
  std::vector<int> n;
  std::vector<double> beta;
  std::vector<double> h;
  std::vector<FieldProfile> profiles;
  std::vector<ZetaDistribution> dists;
  std::uint64_t seed_base = 1;
  int seed_count = 1;
  std::string engine_kind = "auto";  // exact | transfer-matrix | mcmc | auto
  int enumeration_cap = kDefaultEnumerationCap;
  SamplerConfig mcmc;
  std::vector<ObservableSpec> observables;
  std::vector<std::string> formats = {"csv", "json"};
  double bound_factor = 4.0;

  std::string to_json() const;  // normalized document (idempotent)
  bool wants(const std::string& observable) const;
};

struct Diagnostic {
  std::string path;
  std::string message;
};

struct ValidationResult {
  std::optional<Plan> plan;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

ValidationResult validate_plan(const std::string& text);

// Engine actually used for one (d, n) cell under the plan's policy.
// "mcmc" cells on d = 1 chains still have transfer-matrix access to
// F_n and exact site means.
std::string resolve_engine(const Plan& plan, int n);

std::string diagnostics_to_json(const std::vector<Diagnostic>& diags);

}  // namespace rfim
