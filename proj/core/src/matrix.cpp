#include "bhsim/matrix.hpp"

#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace bhsim {

void validate_matrix(const ExperimentMatrix& m) {
  if (m.speeds.empty()) throw ScenarioError("speeds must not be empty");
  if (m.modes.empty()) throw ScenarioError("modes must not be empty");
  if (m.seeds.empty()) throw ScenarioError("seeds must not be empty");
  for (double s : m.speeds) {
    for (Mode mode : m.modes) validate_scenario(cell_config(m.base, s, mode, m.seeds.front()));
  }
}

ScenarioConfig apply_mode(ScenarioConfig cfg, Mode mode) {
  cfg.attack.enabled = mode != Mode::clean;
  cfg.detection.enabled = mode == Mode::attack_detection;
  return cfg;
}

ScenarioConfig cell_config(const ScenarioConfig& base, double speed, Mode mode, std::uint64_t seed) {
  ScenarioConfig cfg = apply_mode(base, mode);
  cfg.speed = speed;
  cfg.seed = seed;
  return cfg;
}

std::vector<CellResult> run_cells(const ExperimentMatrix& m, const MatrixOptions& options) {
  validate_matrix(m);
  std::vector<SweepRecord> cells;
  for (double s : m.speeds) {
    for (Mode mode : m.modes) {
      for (std::uint64_t seed : m.seeds) cells.push_back(SweepRecord{s, mode, seed, {}});
    }
  }

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const SweepRecord& c = cells[i];
        RunResult run = run_scenario(cell_config(m.base, c.speed, c.mode, c.seed), EngineOptions{options.trace});
        results[i] = CellResult{SweepRecord{c.speed, c.mode, c.seed, run.metrics}, std::move(run)};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string summary_row(const SweepRecord& r) {
  const FlowMetrics& t = r.metrics.totals;
  return fmt::format("{},{},{},{:.6f},{:.3f},{},{},{}", r.speed, mode_name(r.mode), r.seed, r.metrics.pdr,
                     r.metrics.throughput_bps, t.originated, t.delivered, t.absorbed);
}

std::string summary_csv(const std::vector<SweepRecord>& records) {
  std::string out = fmt::format("{}\n", kSummaryHeader);
  for (const SweepRecord& r : records) out += summary_row(r) + '\n';
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "speed,mode,runs,pdr_mean,pdr_min,pdr_max,throughput_mean,throughput_min,throughput_max\n";
  for (const SweepRow& r : rows) {
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.3f},{:.3f},{:.3f}\n", r.speed, mode_name(r.mode), r.runs,
                       r.pdr.mean, r.pdr.min, r.pdr.max, r.throughput_bps.mean, r.throughput_bps.min,
                       r.throughput_bps.max);
  }
  return out;
}

std::string trace_file_name(double speed, Mode mode, std::uint64_t seed) {
  return fmt::format("trace_{}_{}_{}.txt", speed, mode_name(mode), seed);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write failed: {}", path.string()));
}

}  // namespace

std::vector<SweepRecord> run_matrix(const ExperimentMatrix& m, const MatrixOptions& options) {
  const auto cells = run_cells(m, options);
  std::filesystem::create_directories(m.output_dir);

  std::vector<SweepRecord> records;
  for (const CellResult& c : cells) {
    records.push_back(c.record);
    if (options.trace) {
      std::string text;
      for (const TraceEvent& e : c.run.trace) text += format_trace_line(e) + '\n';
      write_file(m.output_dir / trace_file_name(c.record.speed, c.record.mode, c.record.seed), text);
    }
  }
  write_file(m.output_dir / "summary.csv", summary_csv(records));
  write_file(m.output_dir / "sweep.csv", sweep_csv(aggregate_sweep(records)));
  return records;
}

}  // namespace bhsim
