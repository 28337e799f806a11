// Command-line front end; talks to the core only through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rfim/rfim.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitExecution = 2;

int exit_code_for(rfim_status status) {
  switch (status) {
    case RFIM_OK: return kExitOk;
    case RFIM_ERR_VALIDATION:
    case RFIM_ERR_INVALID_ARGUMENT: return kExitValidation;
    default: return kExitExecution;
  }
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return {};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  ok = true;
  return buf.str();
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { rfim_string_free(ptr); }
};

int run_mode(const std::string& mode, const std::string& plan_path,
             const std::string& out_dir, int workers, long long seed_base) {
  bool ok = false;
  const std::string plan = read_file(plan_path, ok);
  if (!ok) {
    std::cerr << "error: cannot read plan file " << plan_path << "\n";
    return kExitValidation;
  }
  OwnedString summary;
  const rfim_status status = rfim_plan_run(plan.c_str(), mode.c_str(),
                                           out_dir.c_str(), workers, seed_base,
                                           &summary.ptr);
  if (status != RFIM_OK) {
    std::cerr << "error: " << rfim_last_error() << "\n";
    return exit_code_for(status);
  }
  std::cout << "wrote results to " << out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rfim — random-field Ising identity and trend laboratory"};
  app.require_subcommand(1);

  std::string plan_path;
  std::string out_dir = "out";
  int workers = 0;
  long long seed_base = -1;
  app.add_option("--plan", plan_path, "plan file (json)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads (0 = hardware)");
  app.add_option("--seed-base", seed_base, "override the plan's seed base");

  auto* exact = app.add_subcommand(
      "exact", "run the plan's enumeration/transfer-matrix cells");
  auto* mcmc = app.add_subcommand("mcmc", "run the plan's Monte Carlo cells");
  auto* gg = app.add_subcommand(
      "gg", "run only the Ghirlanda-Guerra residual observables");
  auto* ibp = app.add_subcommand(
      "ibp", "run the integration-by-parts verification suite");
  auto* validate = app.add_subcommand("validate", "validate a plan document");
  auto* run_all = app.add_subcommand("run", "run every cell and observable");

  auto* trend = app.add_subcommand("trend", "trend verdicts from a results CSV");
  std::string csv_path, observable;
  trend->add_option("--csv", csv_path, "results CSV emitted by a run")->required();
  trend->add_option("--observable", observable, "observable column to analyze")
      ->required();

  auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
  std::string manifest_path;
  replay->add_option("--manifest", manifest_path, "manifest.json of a prior run")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) {
    bool ok = false;
    const std::string plan = read_file(plan_path, ok);
    if (!ok) {
      std::cerr << "error: cannot read plan file " << plan_path << "\n";
      return kExitValidation;
    }
    OwnedString normalized, diagnostics;
    const rfim_status status =
        rfim_plan_validate(plan.c_str(), &normalized.ptr, &diagnostics.ptr);
    if (status == RFIM_OK) {
      std::cout << normalized.ptr << "\n";
      return kExitOk;
    }
    if (diagnostics.ptr) std::cerr << diagnostics.ptr << "\n";
    std::cerr << "error: " << rfim_last_error() << "\n";
    return exit_code_for(status);
  }

  if (trend->parsed()) {
    bool ok = false;
    const std::string csv = read_file(csv_path, ok);
    if (!ok) {
      std::cerr << "error: cannot read " << csv_path << "\n";
      return kExitValidation;
    }
    OwnedString report;
    const rfim_status status =
        rfim_trend_from_csv(csv.c_str(), observable.c_str(), &report.ptr);
    if (status != RFIM_OK) {
      std::cerr << "error: " << rfim_last_error() << "\n";
      return exit_code_for(status);
    }
    std::cout << report.ptr << "\n";
    return kExitOk;
  }

  if (replay->parsed()) {
    bool ok = false;
    const std::string manifest = read_file(manifest_path, ok);
    if (!ok) {
      std::cerr << "error: cannot read " << manifest_path << "\n";
      return kExitValidation;
    }
    OwnedString summary;
    const rfim_status status = rfim_manifest_replay(
        manifest.c_str(), out_dir.c_str(), workers, &summary.ptr);
    if (status != RFIM_OK) {
      std::cerr << "error: " << rfim_last_error() << "\n";
      return exit_code_for(status);
    }
    std::cout << "replayed into " << out_dir << "\n";
    return kExitOk;
  }

  std::string mode = "all";
  if (exact->parsed()) mode = "exact";
  if (mcmc->parsed()) mode = "mcmc";
  if (gg->parsed()) mode = "gg";
  if (ibp->parsed()) mode = "ibp";
  if (run_all->parsed()) mode = "all";
  if (plan_path.empty()) {
    std::cerr << "error: --plan is required\n";
    return kExitValidation;
  }
  return run_mode(mode, plan_path, out_dir, workers, seed_base);
}
