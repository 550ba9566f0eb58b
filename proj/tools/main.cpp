#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frmanova/csv.hpp"
#include "frmanova/errors.hpp"
#include "frmanova/pointwise.hpp"
#include "frmanova/posthoc.hpp"
#include "frmanova/report_json.hpp"
#include "frmanova/resampling.hpp"
#include "frmanova/sim_config.hpp"
#include "frmanova/simulation.hpp"

namespace {

using frmanova::ConditionPair;
using frmanova::ResamplingMethod;
using frmanova::StatisticKind;

/// Statistic names, with "all" expanding to C, D, E. First occurrence wins
/// on duplicates.
std::vector<StatisticKind> expand_statistics(const std::vector<std::string>& names) {
  std::vector<StatisticKind> out;
  const auto add = [&](StatisticKind kind) {
    for (const auto seen : out) {
      if (seen == kind) return;
    }
    out.push_back(kind);
  };
  for (const std::string& name : names) {
    if (name == "all") {
      add(StatisticKind::C);
      add(StatisticKind::D);
      add(StatisticKind::E);
    } else {
      add(frmanova::parse_statistic_kind(name));
    }
  }
  return out;
}

std::vector<ResamplingMethod> expand_methods(const std::vector<std::string>& names) {
  std::vector<ResamplingMethod> out;
  const auto add = [&](ResamplingMethod method) {
    for (const auto seen : out) {
      if (seen == method) return;
    }
    out.push_back(method);
  };
  for (const std::string& name : names) {
    if (name == "all") {
      add(ResamplingMethod::P1);
      add(ResamplingMethod::P2);
      add(ResamplingMethod::B1);
      add(ResamplingMethod::B2);
      add(ResamplingMethod::B3);
    } else {
      add(frmanova::parse_resampling_method(name));
    }
  }
  return out;
}

/// "1-3,2-4" -> {(1,3), (2,4)}.
std::vector<ConditionPair> parse_pairs(const std::string& text) {
  std::vector<ConditionPair> pairs;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string token =
        text.substr(start, (comma == std::string::npos ? text.size() : comma) - start);
    const std::size_t dash = token.find('-');
    int r = 0, s = 0;
    try {
      std::size_t r_len = 0, s_len = 0;
      r = std::stoi(token, &r_len);
      s = std::stoi(token.substr(dash + 1), &s_len);
      if (dash == std::string::npos || r_len != dash || s_len != token.size() - dash - 1) {
        throw std::invalid_argument(token);
      }
    } catch (const std::exception&) {
      throw frmanova::ValidationError("cannot parse pair '" + token +
                                      "' (expected r-s, e.g. 1-3)");
    }
    pairs.emplace_back(r, s);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return pairs;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw frmanova::ValidationError("cannot open '" + path + "' for writing");
  out << text;
}

struct TestOptions {
  std::string input;
  std::string layout = "long";
  std::vector<std::string> statistics = {"all"};
  std::vector<std::string> methods = {"all"};
  int B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
  std::string trace_out;
  std::string csv_out;
  std::string pairs;
};

void add_common_options(CLI::App& cmd, TestOptions& opt) {
  cmd.add_option("--input", opt.input, "Dataset CSV path")->required();
  cmd.add_option("--layout", opt.layout, "Input layout: long or wide")
      ->check(CLI::IsMember({"long", "wide"}));
  cmd.add_option("--statistic", opt.statistics,
                 "Test statistic: C, D, E or all (repeatable)")
      ->delimiter(',');
  cmd.add_option("--method", opt.methods,
                 "Resampling method: P1, P2, B1, B2, B3 or all (repeatable)")
      ->delimiter(',');
  cmd.add_option("--B", opt.B, "Number of resampling replicates")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--alpha", opt.alpha, "Significance level");
  cmd.add_option("--seed", opt.seed, "Master random seed");
  cmd.add_option("--threads", opt.threads, "Worker threads (0 = auto)")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--out", opt.out, "JSON report path (default: stdout)");
}

int cmd_test(const TestOptions& opt) {
  const auto data =
      frmanova::read_dataset_csv(std::filesystem::path(opt.input),
                                 frmanova::parse_csv_layout(opt.layout));
  if (!opt.trace_out.empty()) {
    frmanova::write_trace_csv(std::filesystem::path(opt.trace_out),
                              frmanova::ssa_pointwise(data), frmanova::ssr_pointwise(data),
                              frmanova::f_pointwise(data));
  }
  const auto statistics = expand_statistics(opt.statistics);
  std::vector<frmanova::TestResult> results;
  for (const auto method : expand_methods(opt.methods)) {
    auto batch = frmanova::run_tests(data, statistics, method, opt.B, opt.seed, opt.threads);
    for (auto& result : batch) results.push_back(std::move(result));
  }
  write_output(frmanova::test_report_json(data, results, opt.alpha), opt.out);
  return 0;
}

int cmd_posthoc(const TestOptions& opt) {
  const auto data =
      frmanova::read_dataset_csv(std::filesystem::path(opt.input),
                                 frmanova::parse_csv_layout(opt.layout));
  const auto statistics = expand_statistics(opt.statistics);
  const auto pairs = opt.pairs.empty() ? std::vector<ConditionPair>{} : parse_pairs(opt.pairs);
  std::vector<frmanova::PosthocReport> reports;
  for (const auto method : expand_methods(opt.methods)) {
    auto batch = frmanova::run_posthoc_multi(data, statistics, method, opt.B, opt.alpha,
                                             opt.seed, pairs, opt.threads);
    for (auto& report : batch) reports.push_back(std::move(report));
  }
  if (!opt.csv_out.empty()) {
    frmanova::write_posthoc_csv(std::filesystem::path(opt.csv_out), reports);
  }
  write_output(frmanova::posthoc_report_json(data, reports), opt.out);
  return 0;
}

struct SimulateOptions {
  std::string config;
  std::string out;
  std::string csv_out;
  int threads = -1;  // -1: keep the config's value
};

int cmd_simulate(const SimulateOptions& opt) {
  auto config = frmanova::load_simulate_config(std::filesystem::path(opt.config));
  if (opt.threads >= 0) config.threads = opt.threads;
  const auto results = frmanova::run_study(config);
  if (!opt.csv_out.empty()) {
    frmanova::write_study_csv(std::filesystem::path(opt.csv_out), results);
  }
  write_output(frmanova::study_report_json(config, results), opt.out);
  return 0;
}

struct GenerateOptions {
  std::string model = "M1";
  std::string distribution = "normal";
  double rho = 0.0;
  double xi = 0.0;
  bool has_xi = false;
  int n = 35;
  int p = 101;
  std::uint64_t seed = 42;
  std::string layout = "long";
  std::string out;
};

int cmd_generate(const GenerateOptions& opt) {
  frmanova::SimulationSpec spec;
  spec.model = frmanova::parse_mean_model(opt.model);
  if (opt.distribution == "normal") spec.distribution = frmanova::ErrorLaw::normal;
  else if (opt.distribution == "lognormal") spec.distribution = frmanova::ErrorLaw::lognormal;
  else throw frmanova::ValidationError("unknown distribution '" + opt.distribution + "'");
  spec.rho = opt.rho;
  if (opt.has_xi) spec.xi = opt.xi;
  spec.n = opt.n;
  spec.p = opt.p;
  spec.seed = opt.seed;
  spec.validate();

  frmanova::RandomStream rng(
      frmanova::derive_seed(spec.seed, frmanova::StreamLabel::dataset));
  const auto data = frmanova::generate_dataset(spec, rng);
  std::ostringstream text;
  frmanova::write_dataset_csv(text, data, frmanova::parse_csv_layout(opt.layout));
  write_output(text.str(), opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampling-based repeated measures ANOVA for functional data"};
  app.set_version_flag("--version", "frmanova 0.1.0");
  app.require_subcommand(1);

  TestOptions test_opt;
  auto* test = app.add_subcommand("test", "Global tests of equal condition mean curves");
  add_common_options(*test, test_opt);
  test->add_option("--trace-out", test_opt.trace_out,
                   "Write the pointwise SSA/SSR/F curves of the data to this CSV");

  TestOptions posthoc_opt;
  auto* posthoc =
      app.add_subcommand("posthoc", "Bonferroni-adjusted pairwise condition comparisons");
  add_common_options(*posthoc, posthoc_opt);
  posthoc->add_option("--pairs", posthoc_opt.pairs,
                      "Condition pairs to compare, e.g. 1-3,2-4 (default: all)");
  posthoc->add_option("--csv-out", posthoc_opt.csv_out, "Also write the table as CSV");

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power/FWER studies");
  simulate->add_option("--config", sim_opt.config, "Study config file")->required();
  simulate->add_option("--out", sim_opt.out, "JSON report path (default: stdout)");
  simulate->add_option("--csv-out", sim_opt.csv_out, "Also write the percentage table as CSV");
  simulate->add_option("--threads", sim_opt.threads, "Worker threads (overrides the config)")
      ->check(CLI::NonNegativeNumber);

  GenerateOptions gen_opt;
  auto* generate =
      app.add_subcommand("generate", "Write a synthetic dataset from the study models");
  generate->add_option("--model", gen_opt.model, "Mean model M1..M6");
  generate->add_option("--distribution", gen_opt.distribution, "normal or lognormal");
  generate->add_option("--rho", gen_opt.rho, "Cross-condition correlation in [0,1)");
  auto* xi_opt = generate->add_option("--xi", gen_opt.xi, "Error scale (default per model)");
  generate->add_option("--n", gen_opt.n, "Subjects")->check(CLI::PositiveNumber);
  generate->add_option("--p", gen_opt.p, "Grid points")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_opt.seed, "Master random seed");
  generate->add_option("--layout", gen_opt.layout, "Output layout: long or wide")
      ->check(CLI::IsMember({"long", "wide"}));
  generate->add_option("--out", gen_opt.out, "Dataset CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
    gen_opt.has_xi = xi_opt->count() > 0;
    if (*test) return cmd_test(test_opt);
    if (*posthoc) return cmd_posthoc(posthoc_opt);
    if (*simulate) return cmd_simulate(sim_opt);
    if (*generate) return cmd_generate(gen_opt);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const frmanova::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const frmanova::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
