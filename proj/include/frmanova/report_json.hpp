#pragma once

#include <span>
#include <string>

#include "frmanova/dataset.hpp"
#include "frmanova/posthoc.hpp"
#include "frmanova/resampling.hpp"
#include "frmanova/sim_config.hpp"

namespace frmanova {

/// Schema identifiers embedded in (and shipped beside) every JSON report.
inline constexpr const char* test_report_schema = "frmanova-test-report/1";
inline constexpr const char* posthoc_report_schema = "frmanova-posthoc-report/1";
inline constexpr const char* study_report_schema = "frmanova-simulation-summary/1";

/// Global-test report: data shape, alpha, one entry per test with the
/// observed statistic, p-value and the p <= alpha decision. Output is a
/// deterministic function of the inputs (keys are sorted, numbers use
/// shortest round-trip formatting).
[[nodiscard]] std::string test_report_json(const FunctionalDataset& data,
                                           std::span<const TestResult> results, double alpha);

/// Pairwise-comparison report mirroring PosthocReport, one entry per
/// statistic/method combination.
[[nodiscard]] std::string posthoc_report_json(const FunctionalDataset& data,
                                              std::span<const PosthocReport> reports);

/// Simulation study report: the configuration echo plus, per rho, every
/// cell's rates at full precision.
[[nodiscard]] std::string study_report_json(const SimulateConfig& config,
                                            std::span<const StudyResult> results);

}  // namespace frmanova
