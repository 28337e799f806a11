#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/plan.hpp"
#include "core/trend.hpp"

namespace rfim {

struct Row {
  std::string observable;
  int n = 0;
  int d = 0;
  double beta = 0;
  double h = 0;
  std::string profile;
  std::string dist;
  double mean = 0;
  double variance = 0;
  double se = 0;
  std::size_t seeds = 0;
};

struct CellTrend {
  int d = 0;
  double beta = 0, h = 0;
  std::string profile, dist;
  TrendReport report;
};

struct RunOutput {
  std::vector<Row> rows;
  std::vector<CellTrend> trends;
  std::string summary_json;
  int failed_cells = 0;
};

// Executes the plan: parallel over (cell, seed) tasks, reductions in seed
// order, emits per-observable CSVs plus manifest.json and summary.json
// under out_dir. mode selects a slice: all | exact | mcmc | gg | ibp.
RunOutput run_plan(const Plan& plan, const std::string& mode,
                   const std::string& out_dir, int workers,
                   const std::vector<std::vector<std::uint64_t>>* seed_override =
                       nullptr);

// Re-runs a recorded manifest; outputs are byte-identical to the original
// run for any worker count.
RunOutput replay_manifest(const std::string& manifest_text,
                          const std::string& out_dir, int workers);

// Trend reports for one observable column of an emitted CSV.
std::string trend_from_csv(const std::string& csv_text,
                           const std::string& observable);

std::string format_g17(double v);

}  // namespace rfim
