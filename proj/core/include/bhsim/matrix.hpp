#pragma once

// Experiment sweeps over speed x mode x seed and their CSV output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bhsim/engine.hpp"
#include "bhsim/metrics.hpp"
#include "bhsim/scenario.hpp"

namespace bhsim {

struct ExperimentMatrix {
  ScenarioConfig base;
  std::vector<double> speeds;
  std::vector<Mode> modes;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
};

struct MatrixOptions {
  bool trace = false;
  unsigned jobs = 1;
};

/// Throws ScenarioError when a list is empty or any cell fails validation.
void validate_matrix(const ExperimentMatrix& m);

/// Base config with attack and detection switched according to `mode`.
ScenarioConfig apply_mode(ScenarioConfig cfg, Mode mode);
ScenarioConfig cell_config(const ScenarioConfig& base, double speed, Mode mode, std::uint64_t seed);

struct CellResult {
  SweepRecord record;
  RunResult run;
};

/// Runs every cell, in speed, mode, seed order.
std::vector<CellResult> run_cells(const ExperimentMatrix& m, const MatrixOptions& options);

inline constexpr std::string_view kSummaryHeader = "speed,mode,seed,pdr,throughput_bps,originated,delivered,absorbed";

std::string summary_row(const SweepRecord& r);
std::string summary_csv(const std::vector<SweepRecord>& records);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trace_file_name(double speed, Mode mode, std::uint64_t seed);

/// Runs the matrix and writes summary.csv, sweep.csv and (when tracing) one
/// trace file per cell into `m.output_dir`.
std::vector<SweepRecord> run_matrix(const ExperimentMatrix& m, const MatrixOptions& options = {});

}  // namespace bhsim
