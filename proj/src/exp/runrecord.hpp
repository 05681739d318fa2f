#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace dpvi::exp {

// One experiment execution: enough state to re-run it bit-identically.
// `unit` indexes the atomic work item within the experiment (repeat,
// threshold cell, ...), and `config` is the full resolved configuration.
struct RunRecord {
  std::string experiment;
  std::string algorithm;
  int k = 0;
  std::uint64_t seed = 0;
  int unit = 0;
  std::map<std::string, std::string> config;
  std::map<std::string, std::string> group;
  std::vector<int> data_order;
  std::vector<Assignment> assignments;
  std::vector<double> log_weights;
  std::map<std::string, std::vector<double>> traces;
  std::map<std::string, double> metrics;
  double wall_seconds = 0.0;
  std::string version;

  // Canonical single-line JSON.
  std::string to_json() const;
  static RunRecord from_json(const std::string& line);

  // Canonical JSON of the deterministic payload (everything except timing
  // and version), used for replay comparison.
  std::string fingerprint() const;
};

std::vector<RunRecord> read_records(const std::string& path);
void write_records(const std::string& path,
                   const std::vector<RunRecord>& records);

// Aggregates records into a flat CSV: one row per (experiment, algorithm, k,
// group, metric) with count, mean, standard deviation and standard error.
std::string summarize_records(const std::vector<RunRecord>& records);

// Reads every *.jsonl under `dir` (non-recursive) and summarizes.
std::string summarize_dir(const std::string& dir);

// Writes via a temp file and atomic rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dpvi::exp
