#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "frmanova/resampling.hpp"
#include "frmanova/simulation.hpp"
#include "frmanova/statistics.hpp"

namespace frmanova {

/// What a configured study estimates: global test size/power, or the
/// familywise error and per-pair rates of the pairwise procedure.
enum class StudyMode { global_size_power, pairwise_fwer };

[[nodiscard]] const char* to_string(StudyMode mode) noexcept;

/// One Monte Carlo study description, usually loaded from a config file.
/// The same study runs once per entry of rhos; base.rho is ignored.
struct SimulateConfig {
  StudyMode mode = StudyMode::global_size_power;
  SimulationSpec base;
  std::vector<double> rhos = {0.0};
  std::vector<StatisticKind> statistics = {StatisticKind::C, StatisticKind::D,
                                           StatisticKind::E};
  std::vector<ResamplingMethod> methods = {ResamplingMethod::P1, ResamplingMethod::P2,
                                           ResamplingMethod::B1, ResamplingMethod::B2,
                                           ResamplingMethod::B3};
  int threads = 0;

  void validate() const;
};

/// Parses the key = value config format: one assignment per line, `#`
/// comments, quoted strings, numbers and [a, b, c] lists. Keys: mode,
/// model, distribution, rho, xi, n, p, B, runs, alpha, seed, statistics,
/// methods, threads. `statistics`/`methods` accept "all". Unknown or
/// duplicate keys and malformed values fail with their line number.
[[nodiscard]] SimulateConfig parse_simulate_config(std::istream& in,
                                                   const std::string& origin = "<stream>");
[[nodiscard]] SimulateConfig load_simulate_config(const std::filesystem::path& path);

struct StudyResult {
  double rho;
  SimulationSummary summary;
};

/// Runs the configured study once per rho value, in order.
[[nodiscard]] std::vector<StudyResult> run_study(const SimulateConfig& config);

/// Percentage table with one row per estimate and one decimal place:
/// columns rho,statistic,method,measure,percent. Global mode emits the
/// measure `rejection`; pairwise mode emits `any_rejection`, `fwer` (when
/// some pair is truly null) and one `pair r-s` row per pair.
void write_study_csv(std::ostream& out, std::span<const StudyResult> results);
void write_study_csv(const std::filesystem::path& path, std::span<const StudyResult> results);

}  // namespace frmanova
