#include "frmanova/report_json.hpp"

#include <string>

#include "json.hpp"

namespace frmanova {

namespace {

using nlohmann::json;

json shape_of(const FunctionalDataset& data) {
  return {{"subjects", data.n_subjects()},
          {"conditions", data.n_conditions()},
          {"points", data.n_points()}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string test_report_json(const FunctionalDataset& data,
                             std::span<const TestResult> results, double alpha) {
  json entries = json::array();
  for (const TestResult& r : results) {
    entries.push_back({{"statistic", to_string(r.statistic)},
                       {"method", to_string(r.method)},
                       {"observed", r.observed},
                       {"p_value", r.p_value},
                       {"reject", r.p_value <= alpha},
                       {"B", r.B},
                       {"seed", r.seed}});
  }
  return dump({{"schema", test_report_schema},
               {"input", shape_of(data)},
               {"alpha", alpha},
               {"results", std::move(entries)}});
}

std::string posthoc_report_json(const FunctionalDataset& data,
                                std::span<const PosthocReport> reports) {
  json entries = json::array();
  for (const PosthocReport& report : reports) {
    json pairs = json::array();
    for (const auto& pc : report.pairs) {
      pairs.push_back({{"first", pc.first},
                       {"second", pc.second},
                       {"p_raw", pc.p_raw},
                       {"p_adjusted", pc.p_adjusted},
                       {"reject", pc.reject}});
    }
    entries.push_back({{"statistic", to_string(report.statistic)},
                       {"method", to_string(report.method)},
                       {"m", report.m},
                       {"alpha", report.alpha},
                       {"B", report.B},
                       {"seed", report.seed},
                       {"pairs", std::move(pairs)}});
  }
  return dump({{"schema", posthoc_report_schema},
               {"input", shape_of(data)},
               {"reports", std::move(entries)}});
}

std::string study_report_json(const SimulateConfig& config,
                              std::span<const StudyResult> results) {
  json config_echo = {{"mode", to_string(config.mode)},
                      {"model", to_string(config.base.model)},
                      {"distribution",
                       config.base.distribution == ErrorLaw::normal ? "normal" : "lognormal"},
                      {"xi", config.base.effective_xi()},
                      {"n", config.base.n},
                      {"p", config.base.p},
                      {"B", config.base.B},
                      {"runs", config.base.n_runs},
                      {"alpha", config.base.alpha},
                      {"seed", config.base.seed}};

  json studies = json::array();
  for (const StudyResult& result : results) {
    json cells = json::array();
    for (const auto& cell : result.summary.cells) {
      json entry = {{"statistic", to_string(cell.statistic)},
                    {"method", to_string(cell.method)},
                    {"rejection_rate", cell.rejection_rate},
                    {"mc_stderr", cell.mc_stderr}};
      if (cell.fwer) entry["fwer"] = *cell.fwer;
      if (!cell.per_pair.empty()) {
        json pairs = json::array();
        for (const auto& pr : cell.per_pair) {
          pairs.push_back({{"first", pr.first}, {"second", pr.second}, {"rate", pr.rate}});
        }
        entry["per_pair"] = std::move(pairs);
      }
      cells.push_back(std::move(entry));
    }
    studies.push_back({{"rho", result.rho}, {"cells", std::move(cells)}});
  }

  return dump({{"schema", study_report_schema},
               {"config", std::move(config_echo)},
               {"studies", std::move(studies)}});
}

}  // namespace frmanova
