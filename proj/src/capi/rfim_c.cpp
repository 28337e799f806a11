#include "rfim/rfim.h"

#include <cstring>
#include <string>
#include <thread>

#include "core/disorder.hpp"
#include "core/exact.hpp"
#include "core/ibp.hpp"
#include "core/lattice.hpp"
#include "core/plan.hpp"
#include "core/runner.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string g_last_error;

rfim_status status_of(const rfim::Error& e) {
  switch (e.kind()) {
    case rfim::ErrorKind::invalid_argument: return RFIM_ERR_INVALID_ARGUMENT;
    case rfim::ErrorKind::capacity: return RFIM_ERR_CAPACITY;
    case rfim::ErrorKind::validation: return RFIM_ERR_VALIDATION;
    case rfim::ErrorKind::execution: return RFIM_ERR_EXECUTION;
    case rfim::ErrorKind::io: return RFIM_ERR_IO;
  }
  return RFIM_ERR_EXECUTION;
}

template <class Fn>
rfim_status guarded(Fn&& fn) {
  try {
    fn();
    return RFIM_OK;
  } catch (const rfim::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFIM_ERR_EXECUTION;
  } catch (...) {
    g_last_error = "unknown failure";
    return RFIM_ERR_EXECUTION;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rfim_status require(bool cond, const char* message) {
  if (cond) return RFIM_OK;
  g_last_error = message;
  return RFIM_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct rfim_lattice {
  rfim::LatticeSpec spec;
};

struct rfim_disorder {
  rfim::DisorderRealization dis;
  rfim::FieldProfile profile;
  rfim::ZetaDistribution dist;
};

struct rfim_exact {
  rfim::ExactGibbs state;
};

extern "C" {

const char* rfim_version(void) { return rfim::kVersion; }

const char* rfim_last_error(void) { return g_last_error.c_str(); }

void rfim_string_free(char* s) { delete[] s; }

rfim_status rfim_lattice_create(int32_t d, int32_t n, rfim_lattice** out) {
  if (require(out != nullptr, "out must not be null") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() { *out = new rfim_lattice{rfim::build_lattice(d, n)}; });
}

void rfim_lattice_free(rfim_lattice* lat) { delete lat; }

int64_t rfim_lattice_volume(const rfim_lattice* lat) {
  return lat ? lat->spec.volume : -1;
}

int64_t rfim_lattice_edge_count(const rfim_lattice* lat) {
  return lat ? static_cast<int64_t>(lat->spec.edges.size()) : -1;
}

rfim_status rfim_lattice_site_coords(const rfim_lattice* lat, int64_t site,
                                     int32_t* coords) {
  if (require(lat && coords, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    if (site < 0 || site >= lat->spec.volume)
      rfim::fail(rfim::ErrorKind::invalid_argument, "site index out of range");
    const auto& c = lat->spec.sites[static_cast<std::size_t>(site)];
    for (std::size_t k = 0; k < c.size(); ++k) coords[k] = c[k];
  });
}

rfim_status rfim_lattice_site_norm(const rfim_lattice* lat, int64_t site,
                                   int64_t origin, double* out) {
  if (require(lat && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    if (site < 0 || site >= lat->spec.volume || origin < 0 ||
        origin >= lat->spec.volume)
      rfim::fail(rfim::ErrorKind::invalid_argument, "site index out of range");
    *out = rfim::site_norm(lat->spec.sites[static_cast<std::size_t>(site)],
                           lat->spec.sites[static_cast<std::size_t>(origin)]);
  });
}

rfim_status rfim_disorder_create(const rfim_lattice* lat,
                                 const char* profile_json,
                                 const char* dist_json, uint64_t seed,
                                 rfim_disorder** out) {
  if (require(lat && profile_json && dist_json && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const auto profile = rfim::FieldProfile::parse(profile_json);
    const auto dist = rfim::ZetaDistribution::parse(dist_json);
    auto dis = rfim::realize_disorder(lat->spec, profile, dist, seed);
    *out = new rfim_disorder{std::move(dis), profile, dist};
  });
}

void rfim_disorder_free(rfim_disorder* dis) { delete dis; }

rfim_status rfim_disorder_g(const rfim_disorder* dis, double* g) {
  if (require(dis && g, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  std::memcpy(g, dis->dis.g.data(), dis->dis.g.size() * sizeof(double));
  return RFIM_OK;
}

rfim_status rfim_disorder_h_profile(const rfim_disorder* dis, double* h) {
  if (require(dis && h, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  std::memcpy(h, dis->dis.hprofile.data(),
              dis->dis.hprofile.size() * sizeof(double));
  return RFIM_OK;
}

rfim_status rfim_disorder_smallness_ratio(const rfim_disorder* dis, double* out) {
  if (require(dis && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  double acc = 0.0;
  for (double h : dis->dis.hprofile) acc += std::abs(h);
  *out = acc / static_cast<double>(dis->dis.hprofile.size());
  return RFIM_OK;
}

rfim_status rfim_disorder_to_json(const rfim_disorder* dis, char** json_out) {
  if (require(dis && json_out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *json_out = dup_string(rfim::disorder_to_json(dis->dis, dis->profile, dis->dist));
  });
}

rfim_status rfim_exact_create(const rfim_lattice* lat, const rfim_disorder* dis,
                              double beta, double h, int32_t enumeration_cap,
                              rfim_exact** out) {
  if (require(lat && dis && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const int cap = enumeration_cap > 0 ? enumeration_cap : rfim::kDefaultEnumerationCap;
    *out = new rfim_exact{
        rfim::ExactGibbs(lat->spec, {beta, h}, dis->dis, cap)};
  });
}

void rfim_exact_free(rfim_exact* state) { delete state; }

rfim_status rfim_exact_log_partition(const rfim_exact* state, double* out) {
  if (require(state && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  *out = state->state.log_partition();
  return RFIM_OK;
}

rfim_status rfim_exact_site_mean(const rfim_exact* state, int64_t x, double* out) {
  if (require(state && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() { *out = state->state.site_mean(x); });
}

rfim_status rfim_exact_pair_mean(const rfim_exact* state, int64_t x, int64_t y,
                                 double* out) {
  if (require(state && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() { *out = state->state.pair_mean(x, y); });
}

rfim_status rfim_exact_truncated_correlation(const rfim_exact* state, int64_t x,
                                             int64_t y, double* out) {
  if (require(state && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() { *out = state->state.truncated_correlation(x, y); });
}

rfim_status rfim_exact_derivative_stack(const rfim_exact* state, int64_t x,
                                        int32_t order, double* out) {
  if (require(state && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() { *out = state->state.derivative_stack(x, order); });
}

rfim_status rfim_fd_derivative(const rfim_lattice* lat, const rfim_disorder* dis,
                               double beta, double h, int64_t x, double step,
                               int32_t order, int64_t y,
                               int32_t enumeration_cap, double* out) {
  if (require(lat && dis && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    const int cap = enumeration_cap > 0 ? enumeration_cap : rfim::kDefaultEnumerationCap;
    *out = rfim::fd_derivative(lat->spec, {beta, h}, dis->dis, x, step, order, y, cap);
  });
}

rfim_status rfim_transfer_matrix_log_partition(const rfim_disorder* dis,
                                               double beta, double h,
                                               double* out) {
  if (require(dis && out, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *out = rfim::transfer_matrix_log_partition({beta, h}, dis->dis);
  });
}

rfim_status rfim_plan_validate(const char* plan_json, char** normalized_json,
                               char** diagnostics_json) {
  if (require(plan_json != nullptr, "plan_json must not be null") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  try {
    const auto result = rfim::validate_plan(plan_json);
    if (result.ok()) {
      if (normalized_json) *normalized_json = dup_string(result.plan->to_json());
      return RFIM_OK;
    }
    if (diagnostics_json)
      *diagnostics_json = dup_string(rfim::diagnostics_to_json(result.diagnostics));
    g_last_error = "plan validation failed";
    return RFIM_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFIM_ERR_EXECUTION;
  }
}

rfim_status rfim_plan_run(const char* plan_json, const char* mode,
                          const char* out_dir, int32_t workers,
                          int64_t seed_base_override, char** summary_json) {
  if (require(plan_json && mode && out_dir, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  try {
    auto result = rfim::validate_plan(plan_json);
    if (!result.ok()) {
      g_last_error = "plan validation failed: " +
                     rfim::diagnostics_to_json(result.diagnostics);
      return RFIM_ERR_VALIDATION;
    }
    rfim::Plan plan = *result.plan;
    if (seed_base_override >= 0)
      plan.seed_base = static_cast<std::uint64_t>(seed_base_override);
    const int w = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    const auto out = rfim::run_plan(plan, mode, out_dir, std::max(1, w));
    if (summary_json) *summary_json = dup_string(out.summary_json);
    if (out.failed_cells > 0) {
      g_last_error = std::to_string(out.failed_cells) +
                     " cell(s) failed; see manifest errors";
      return RFIM_ERR_EXECUTION;
    }
    return RFIM_OK;
  } catch (const rfim::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFIM_ERR_EXECUTION;
  }
}

rfim_status rfim_manifest_replay(const char* manifest_json, const char* out_dir,
                                 int32_t workers, char** summary_json) {
  if (require(manifest_json && out_dir, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  try {
    const int w = workers > 0
                      ? workers
                      : static_cast<int>(std::thread::hardware_concurrency());
    const auto out =
        rfim::replay_manifest(manifest_json, out_dir, std::max(1, w));
    if (summary_json) *summary_json = dup_string(out.summary_json);
    if (out.failed_cells > 0) {
      g_last_error = std::to_string(out.failed_cells) +
                     " cell(s) failed; see manifest errors";
      return RFIM_ERR_EXECUTION;
    }
    return RFIM_OK;
  } catch (const rfim::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RFIM_ERR_EXECUTION;
  }
}

rfim_status rfim_trend_from_csv(const char* csv_text, const char* observable,
                                char** trend_json) {
  if (require(csv_text && observable && trend_json, "null argument") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *trend_json = dup_string(rfim::trend_from_csv(csv_text, observable));
  });
}

rfim_status rfim_ibp_run(char** reports_json) {
  if (require(reports_json != nullptr, "reports_json must not be null") != RFIM_OK)
    return RFIM_ERR_INVALID_ARGUMENT;
  return guarded([&]() {
    *reports_json = dup_string(rfim::ibp::reports_to_json(rfim::ibp::run_suite()));
  });
}

}  // extern "C"
