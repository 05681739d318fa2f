// Command-line front end for the dpvi shared library.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "dpvi.h"

namespace {

int report_failure(int status) {
  std::fprintf(stderr, "error: %s\n", dpvi_last_error());
  return status == DPVI_INVALID_ARGUMENT ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle-based variational inference for discrete models"};
  app.set_version_flag("--version", std::string(dpvi_version()));
  app.require_subcommand(1);

  // run
  std::string experiment, config_path, out_dir;
  std::int64_t seed = -1;
  int k = -1;
  int repeats = -1;
  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("experiment", experiment,
                  "hmm-ess-sweep | dpmm-synthetic | dpmm-csv | ihmm-synthetic "
                  "| ihmm-text | irm | ising-bound")
      ->required();
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--k", k, "particle count override");
  run->add_option("--repeats", repeats, "repeat count override");
  run->add_option("--out", out_dir, "output directory for records + summary");

  // oracle
  std::string oracle_model, oracle_config;
  auto* oracle = app.add_subcommand(
      "oracle", "Exact reference answers (enumeration / transfer matrix)");
  oracle->add_option("model", oracle_model, "hmm | ising | dpmm | irm")
      ->required();
  oracle->add_option("--config", oracle_config, "key = value config file");

  // summarize
  std::string summarize_dir;
  auto* summarize =
      app.add_subcommand("summarize", "Aggregate record files into a CSV");
  summarize->add_option("dir", summarize_dir, "directory with *.jsonl files")
      ->required();

  // replay
  std::string replay_path;
  auto* replay = app.add_subcommand(
      "replay", "Re-execute records and verify bit-identical results");
  replay->add_option("records", replay_path, "records.jsonl file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    char* summary = nullptr;
    int status = dpvi_experiment_run(
        experiment.c_str(), config_path.empty() ? nullptr : config_path.c_str(),
        out_dir.empty() ? nullptr : out_dir.c_str(), seed, k, repeats,
        &summary);
    if (status != DPVI_OK) return report_failure(status);
    std::fputs(summary, stdout);
    dpvi_string_free(summary);
    if (!out_dir.empty())
      std::printf("wrote %s/records.jsonl and %s/summary.csv\n",
                  out_dir.c_str(), out_dir.c_str());
    return 0;
  }

  if (oracle->parsed()) {
    char* json = nullptr;
    int status = dpvi_oracle_report(
        oracle_model.c_str(),
        oracle_config.empty() ? nullptr : oracle_config.c_str(), &json);
    if (status != DPVI_OK) return report_failure(status);
    std::printf("%s\n", json);
    dpvi_string_free(json);
    return 0;
  }

  if (summarize->parsed()) {
    char* csv = nullptr;
    int status = dpvi_summarize_dir(summarize_dir.c_str(), &csv);
    if (status != DPVI_OK) return report_failure(status);
    std::fputs(csv, stdout);
    dpvi_string_free(csv);
    return 0;
  }

  if (replay->parsed()) {
    int mismatches = 0;
    int status = dpvi_replay_records(replay_path.c_str(), &mismatches);
    if (status != DPVI_OK) return report_failure(status);
    if (mismatches != 0) {
      std::fprintf(stderr, "%d record(s) did not replay identically\n",
                   mismatches);
      return 1;
    }
    std::printf("all records replayed identically\n");
    return 0;
  }
  return 0;
}
