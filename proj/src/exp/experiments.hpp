#pragma once

#include <optional>
#include <string>
#include <vector>

#include "exp/config.hpp"
#include "exp/runrecord.hpp"

namespace dpvi::exp {

inline const std::vector<std::string> kExperiments = {
    "hmm-ess-sweep", "dpmm-synthetic", "dpmm-csv", "ihmm-synthetic",
    "ihmm-text",     "irm",            "ising-bound"};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<int> repeats;
};

// Validates keys, folds in overrides and defaults; the result is the config
// snapshot stored in every record.
Config resolve_config(const std::string& experiment, Config cfg,
                      const RunOverrides& overrides);

int total_units(const std::string& experiment, const Config& cfg);

// Executes one atomic work item. Pure function of (config, unit): identical
// inputs give bit-identical records (timing aside).
RunRecord run_unit(const std::string& experiment, const Config& cfg, int unit);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::string summary_csv;
};

// Runs all units (parallel workers per DPVI_WORKERS, default all cores) and,
// when out_dir is non-empty, writes records.jsonl and summary.csv there.
ExperimentResult run_experiment(const std::string& experiment, Config cfg,
                                const RunOverrides& overrides,
                                const std::string& out_dir);

// Re-executes a record from its own config snapshot.
RunRecord replay(const RunRecord& record);
bool replay_matches(const RunRecord& record);

// Exact (enumeration / recursion) reference answers; returns a JSON report.
std::string oracle_report(const std::string& model, const Config& cfg);

}  // namespace dpvi::exp
