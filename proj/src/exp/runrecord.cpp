#include "exp/runrecord.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dpvi::exp {

namespace {

using nlohmann::json;

json record_payload(const RunRecord& r) {
  json j;
  j["experiment"] = r.experiment;
  j["algorithm"] = r.algorithm;
  j["k"] = r.k;
  j["seed"] = r.seed;
  j["unit"] = r.unit;
  j["config"] = r.config;
  j["group"] = r.group;
  j["data_order"] = r.data_order;
  j["assignments"] = r.assignments;
  j["log_weights"] = r.log_weights;
  j["traces"] = r.traces;
  j["metrics"] = r.metrics;
  return j;
}

}  // namespace

std::string RunRecord::to_json() const {
  json j = record_payload(*this);
  j["wall_seconds"] = wall_seconds;
  j["version"] = version;
  return j.dump();
}

std::string RunRecord::fingerprint() const { return record_payload(*this).dump(); }

RunRecord RunRecord::from_json(const std::string& line) {
  json j = json::parse(line);
  RunRecord r;
  r.experiment = j.at("experiment").get<std::string>();
  r.algorithm = j.at("algorithm").get<std::string>();
  r.k = j.at("k").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.unit = j.at("unit").get<int>();
  r.config = j.at("config").get<std::map<std::string, std::string>>();
  r.group = j.at("group").get<std::map<std::string, std::string>>();
  r.data_order = j.at("data_order").get<std::vector<int>>();
  r.assignments = j.at("assignments").get<std::vector<Assignment>>();
  r.log_weights = j.at("log_weights").get<std::vector<double>>();
  r.traces =
      j.at("traces").get<std::map<std::string, std::vector<double>>>();
  r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  r.wall_seconds = j.value("wall_seconds", 0.0);
  r.version = j.value("version", "");
  return r;
}

std::vector<RunRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open record file: " + path);
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(RunRecord::from_json(line));
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_records(const std::string& path,
                   const std::vector<RunRecord>& records) {
  std::ostringstream out;
  for (const RunRecord& r : records) out << r.to_json() << "\n";
  write_file_atomic(path, out.str());
}

std::string summarize_records(const std::vector<RunRecord>& records) {
  struct Cell {
    std::vector<double> values;
  };
  std::map<std::string, Cell> cells;
  for (const RunRecord& r : records) {
    std::string group_key;
    for (const auto& [key, value] : r.group)
      group_key += key + "=" + value + ";";
    for (const auto& [metric, value] : r.metrics) {
      std::string key = r.experiment + "," + r.algorithm + "," +
                        std::to_string(r.k) + ",\"" + group_key + "\"," +
                        metric;
      cells[key].values.push_back(value);
    }
  }

  std::ostringstream out;
  out << "experiment,algorithm,k,group,metric,count,mean,sd,se\n";
  out.setf(std::ios::fmtflags(0), std::ios::floatfield);
  out.precision(17);
  for (const auto& [key, cell] : cells) {
    double n = static_cast<double>(cell.values.size());
    double mean = 0.0;
    for (double v : cell.values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : cell.values) var += (v - mean) * (v - mean);
    double sd = n > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    double se = n > 1 ? sd / std::sqrt(n) : 0.0;
    out << key << "," << cell.values.size() << "," << mean << "," << sd << ","
        << se << "\n";
  }
  return out.str();
}

std::string summarize_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<RunRecord> all;
  for (const auto& f : files) {
    std::vector<RunRecord> part = read_records(f.string());
    all.insert(all.end(), part.begin(), part.end());
  }
  if (all.empty()) throw Error("no .jsonl records under " + dir);
  return summarize_records(all);
}

}  // namespace dpvi::exp
