// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Config-driven batch runs that turn the library into plot-ready tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "invit/boson.hpp"
#include "invit/inverse_series.hpp"
#include "invit/noise_lab.hpp"

namespace invit {

enum class ExperimentKind { Iteration, SkewSweep, Trotter, Noise };

enum class SystemType { H2, PauliFile, BoseHubbard };

struct SystemSpec {
  SystemType type = SystemType::H2;
  std::filesystem::path path;  // pauli_file, resolved
  // bose_hubbard
  int n_sites = 5;
  int n_bosons = 5;
  int n_max = 5;
  double U = 1.0;
  double mu = 0.5;
  std::vector<double> J{0.1};
  Boundary boundary = Boundary::Open;
  double delta = 1.0;  // smallest shifted eigenvalue, units of U
};

enum class GridMode { FixedSteps, FixedDelta, Explicit };

// One entry of the "grid" block; expands to one GridParams per phi_max.
struct GridSpec {
  GridMode mode = GridMode::FixedSteps;
  int m_y = 30;
  int m_z = 30;
  double delta_y = 0.05;
  double delta_z = 0.05;
  double skew = 1.0;
  std::vector<double> phi_max_over_2pi;
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::Iteration;
  SystemSpec system;
  std::optional<double> shift_e0;
  std::optional<std::size_t> initial_index;  // default from the system
  std::vector<GridSpec> grids;
  std::vector<int> k_range;
  int trotter_steps = 0;  // 0 = exact evolution
  bool protocol_overlaps = false;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 20190917;
  std::size_t reference_index = 0;
  bool trace_distance = true;
  std::vector<std::pair<int, int>> correlations;  // (c, r), 0-based sites
  std::vector<double> skews;
  std::vector<int> trotter_step_list;
  NoiseConfig noise;
  std::vector<double> probe_phases_over_2pi;
  std::filesystem::path output;

  // Canonical form with defaults filled in; hashed without "output".
  nlohmann::json normalized;
};

// Throws ValidationError (ParseError for malformed text).  Relative paths in
// the config resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {},
                              const std::string& default_name = "experiment");
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::filesystem::path& base_dir = {},
                                   const std::string& default_name = "experiment");
// A file path, or the name of a bundled config.
ExperimentConfig load_config(const std::string& path_or_name);

std::filesystem::path bundled_config_dir();
std::vector<std::string> list_bundled();

// FNV-1a 64 over the canonical config without "output", as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

struct ResultTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

struct RunResult {
  std::vector<ResultTable> tables;  // first one is the primary table
  nlohmann::json metadata;
  std::vector<std::filesystem::path> written;
  std::string summary;
};

// Column set of the primary table for a kind.
std::vector<std::string> primary_columns(ExperimentKind kind);
std::string kind_name(ExperimentKind kind);

RunResult run_experiment(const ExperimentConfig& cfg);

// Writes <output>.csv for the primary table, <stem>_<table>.csv for the rest
// and <stem>.json metadata.  Fills result.written.
void write_result(const ExperimentConfig& cfg, RunResult& result);

const char* tool_version();

}  // namespace invit
