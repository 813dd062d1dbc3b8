#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gibbslab/error.hpp"

namespace gibbslab {

// Parsed experiment description. Config files are line-oriented
// `key = value` entries under `[section]` headers; `#` starts a comment.
// The seed is mandatory; every other key has a canned default.
struct ExperimentSpec {
  std::string name;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> params;  // [params] section, raw strings

  static ExperimentSpec parse_file(const std::string& path);
  static ExperimentSpec parse_text(const std::string& text, const std::string& origin = "<config>");

  bool has(const std::string& key) const { return params.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;  // supports lo:hi
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct RunReport {
  ExperimentSpec spec;
  std::string engine;
  int workers = 1;
  double wall_ms = 0;  // metadata only, never part of the result tables
  std::string version;
  std::vector<Table> tables;
};

// Validates the whole grid (capacities included) before computing anything,
// then evaluates grid cells on a bounded worker pool. Output is a pure
// function of (spec, seed), independent of the worker count.
RunReport run_experiment(const ExperimentSpec& spec, int workers = 1);

// <name>.csv for the main table, <name>_<table>.csv for the rest, plus a JSON
// mirror with metadata; all files written atomically (temp + rename).
std::vector<std::string> emit(const RunReport& report, const std::string& out_dir, bool csv = true,
                              bool json = true);

int default_worker_count();  // GIBBSLAB_WORKERS, else 1

}  // namespace gibbslab
