// Acceptance gate: end-to-end checks of the statistical contracts at desk
// scale (500 Monte Carlo runs x 500 replicates). Prints one PASS/FAIL line
// per criterion and exits nonzero if any criterion fails. Expected runtime
// is a few minutes on one core; the Monte Carlo tolerances below are fixed
// and must not be widened to make a run pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "frmanova/csv.hpp"
#include "frmanova/dataset.hpp"
#include "frmanova/pointwise.hpp"
#include "frmanova/posthoc.hpp"
#include "frmanova/resampling.hpp"
#include "frmanova/rng.hpp"
#include "frmanova/simulation.hpp"
#include "frmanova/statistics.hpp"
#include "json.hpp"
#include "support/helpers.hpp"
#include "support/oracle.hpp"

namespace fs = std::filesystem;
using frmanova::FunctionalDataset;
using frmanova::Grid;
using frmanova::RandomStream;
using frmanova::ResamplingMethod;
using frmanova::SimulationSpec;
using frmanova::SimulationSummary;
using frmanova::StatisticKind;
using testutil::close_rel;
using testutil::make_dataset;
using testutil::random_dataset;

namespace {

struct Gate {
  bool all_pass = true;
  bool current_pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      current_pass = false;
      notes.push_back(what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }

  bool finish(int id, const std::string& name, double seconds) {
    for (const std::string& n : notes) std::printf("        %s\n", n.c_str());
    std::printf("[%d/6] %s: %s (%.1f s)\n", id, name.c_str(),
                current_pass ? "PASS" : "FAIL", seconds);
    std::fflush(stdout);
    all_pass = all_pass && current_pass;
    const bool passed = current_pass;
    current_pass = true;
    notes.clear();
    return passed;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * rate);
  return buf;
}

const SimulationSummary::Cell& find_cell(const SimulationSummary& summary, StatisticKind stat,
                                         ResamplingMethod method) {
  for (const auto& cell : summary.cells) {
    if (cell.statistic == stat && cell.method == method) return cell;
  }
  std::fprintf(stderr, "summary misses a requested cell\n");
  std::abort();
}

// ---------------------------------------------------------------- criterion 1

void criterion_oracle_suite(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();

  // Hand example: conditions at 0 and 2, two identical subjects -> SSA = 4.
  {
    const auto d = make_dataset({0, 0, 2, 2, 0, 0, 2, 2}, 2, 2, 2);
    const auto ssa = frmanova::ssa_pointwise(d);
    for (int k = 0; k < 2; ++k) {
      gate.check(close_rel(ssa.values[static_cast<std::size_t>(k)], 4.0, 1e-10),
                 "SSA hand example != 4");
      gate.check(close_rel(oracle::ssa_at(d, k), 4.0, 1e-10), "SSA oracle != 4");
    }
  }
  // Hand example: subject rows (0,2) and (1,1) -> SSR = 1, SSA = 1, F = 1.
  {
    const auto d = make_dataset({0, 0, 2, 2, 1, 1, 1, 1}, 2, 2, 2);
    const auto ssr = frmanova::ssr_pointwise(d);
    const auto f = frmanova::f_pointwise(d);
    for (int k = 0; k < 2; ++k) {
      gate.check(close_rel(ssr.values[static_cast<std::size_t>(k)], 1.0, 1e-10),
                 "SSR hand example != 1");
      gate.check(close_rel(f.values[static_cast<std::size_t>(k)], 1.0, 1e-10),
                 "F hand example != 1");
      gate.check(close_rel(oracle::ssr_at(d, k), 1.0, 1e-10), "SSR oracle != 1");
      gate.check(close_rel(oracle::f_at(d, k), 1.0, 1e-10), "F oracle != 1");
    }
  }
  // Hand example: records f and -f -> covariance 2 f f^T, no jitter.
  {
    const std::vector<double> f = {1.0, -0.5, 2.0, 0.25};
    std::vector<double> values(f.begin(), f.end());
    for (const double x : f) values.push_back(-x);
    const auto cov = frmanova::estimate_covariance(make_dataset(values, 2, 2, 2));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        gate.check(close_rel(cov.matrix(a, b),
                             2.0 * f[static_cast<std::size_t>(a)] *
                                 f[static_cast<std::size_t>(b)],
                             1e-10),
                   "covariance hand example != 2 f f^T");
      }
    }
    gate.check(cov.jitter_applied == 0.0, "fresh covariance estimate reports jitter");
  }
  // Library vs brute-force oracle across random datasets.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = random_dataset(seed, 6, 3, 7);
    const auto ssa = frmanova::ssa_pointwise(d);
    const auto ssr = frmanova::ssr_pointwise(d);
    const auto f = frmanova::f_pointwise(d);
    for (int k = 0; k < d.n_points(); ++k) {
      gate.check(close_rel(ssa.values[static_cast<std::size_t>(k)], oracle::ssa_at(d, k), 1e-10),
                 "SSA disagrees with the oracle");
      gate.check(close_rel(ssr.values[static_cast<std::size_t>(k)], oracle::ssr_at(d, k), 1e-10),
                 "SSR disagrees with the oracle");
      gate.check(close_rel(f.values[static_cast<std::size_t>(k)], oracle::f_at(d, k), 1e-10),
                 "F disagrees with the oracle");
    }
    const auto cov = frmanova::estimate_covariance(d);
    const auto want = oracle::covariance(d);
    for (int a = 0; a < cov.matrix.rows(); ++a) {
      for (int b = 0; b < cov.matrix.cols(); ++b) {
        gate.check(close_rel(cov.matrix(a, b),
                             want[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)],
                             1e-10),
                   "covariance disagrees with the oracle");
      }
    }
  }
  // Bonferroni arithmetic against the defining formulas.
  {
    const auto d = random_dataset(99, 9, 4, 6);
    const auto report =
        frmanova::run_posthoc(d, StatisticKind::D, ResamplingMethod::P1, 16, 0.05, 7);
    gate.check(report.m == 6, "4 conditions must give 6 pairs");
    for (const auto& pc : report.pairs) {
      gate.check(pc.p_adjusted == std::min(1.0, 6.0 * pc.p_raw),
                 "p_adjusted != min(1, m * p_raw)");
      gate.check(pc.reject == (pc.p_raw <= 0.05 / 6.0), "reject != (p_raw <= alpha/m)");
    }
  }

  const double elapsed = seconds_since(start);
  gate.check(elapsed < 1.0, "oracle suite exceeded 1 s");
  gate.finish(1, "hand examples vs brute-force oracles", elapsed);
}

// ---------------------------------------------------------------- criterion 2

SimulationSpec desk_spec(frmanova::MeanModel model, double rho, std::uint64_t seed) {
  SimulationSpec spec;
  spec.model = model;
  spec.rho = rho;
  spec.n = 35;
  spec.p = 101;
  spec.B = 500;
  spec.n_runs = 500;
  spec.alpha = 0.05;
  spec.seed = seed;
  return spec;
}

void criterion_empirical_size(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<StatisticKind> cde = {StatisticKind::C, StatisticKind::D, StatisticKind::E};
  const std::vector<ResamplingMethod> p1p2 = {ResamplingMethod::P1, ResamplingMethod::P2};

  const auto at0 = frmanova::estimate_rejection_rates(
      desk_spec(frmanova::MeanModel::M1, 0.0, 101), cde,
      std::vector<ResamplingMethod>{ResamplingMethod::P1});
  const auto at75 =
      frmanova::estimate_rejection_rates(desk_spec(frmanova::MeanModel::M1, 0.75, 101), cde, p1p2);

  const double d_p1_0 = find_cell(at0, StatisticKind::D, ResamplingMethod::P1).rejection_rate;
  const double d_p1_75 = find_cell(at75, StatisticKind::D, ResamplingMethod::P1).rejection_rate;
  const double c_p2_75 = find_cell(at75, StatisticKind::C, ResamplingMethod::P2).rejection_rate;
  const double e_p1_75 = find_cell(at75, StatisticKind::E, ResamplingMethod::P1).rejection_rate;

  gate.note("size D+P1: rho=0 " + percent(d_p1_0) + ", rho=0.75 " + percent(d_p1_75) +
            " (want 5.1% +- 2.5pp)");
  gate.note("size C+P2 rho=0.75: " + percent(c_p2_75) + " (want <= 1%)   size E+P1 rho=0.75: " +
            percent(e_p1_75) + " (want 5%..12%)");
  gate.check(d_p1_0 >= 0.026 && d_p1_0 <= 0.076, "D+P1 size at rho=0 outside 5.1% +- 2.5pp");
  gate.check(d_p1_75 >= 0.026 && d_p1_75 <= 0.076,
             "D+P1 size at rho=0.75 outside 5.1% +- 2.5pp");
  gate.check(c_p2_75 <= 0.01, "C+P2 size at rho=0.75 above 1%");
  gate.check(e_p1_75 >= 0.05 && e_p1_75 <= 0.12, "E+P1 size at rho=0.75 outside [5%, 12%]");
  gate.finish(2, "empirical size under the true null (M1)", seconds_since(start));
}

// ---------------------------------------------------------------- criterion 3

void criterion_empirical_power(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<ResamplingMethod> p1 = {ResamplingMethod::P1};

  const auto at75 = frmanova::estimate_rejection_rates(
      desk_spec(frmanova::MeanModel::M2, 0.75, 202),
      std::vector<StatisticKind>{StatisticKind::C, StatisticKind::D, StatisticKind::E}, p1);
  const auto at0 = frmanova::estimate_rejection_rates(
      desk_spec(frmanova::MeanModel::M2, 0.0, 202),
      std::vector<StatisticKind>{StatisticKind::D}, p1);

  const double e_75 = find_cell(at75, StatisticKind::E, ResamplingMethod::P1).rejection_rate;
  const double c_75 = find_cell(at75, StatisticKind::C, ResamplingMethod::P1).rejection_rate;
  const double d_75 = find_cell(at75, StatisticKind::D, ResamplingMethod::P1).rejection_rate;
  const double d_0 = find_cell(at0, StatisticKind::D, ResamplingMethod::P1).rejection_rate;

  gate.note("power at rho=0.75: E+P1 " + percent(e_75) + " (want >= 99%), C+P1 " +
            percent(c_75) + " (want 93%..100%)");
  gate.note("power D+P1: rho=0.75 " + percent(d_75) + " vs rho=0 " + percent(d_0) +
            " (want gain >= 30pp)");
  gate.check(e_75 >= 0.99, "E+P1 power at rho=0.75 below 99%");
  gate.check(c_75 >= 0.93, "C+P1 power at rho=0.75 below 93%");
  gate.check(d_75 - d_0 >= 0.30, "D+P1 power gain from rho=0 to rho=0.75 below 30pp");
  gate.finish(3, "empirical power against M2", seconds_since(start));
}

// ---------------------------------------------------------------- criterion 4

void criterion_fwer(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<StatisticKind> cde = {StatisticKind::C, StatisticKind::D, StatisticKind::E};
  const std::vector<ResamplingMethod> all = {ResamplingMethod::P1, ResamplingMethod::P2,
                                             ResamplingMethod::B1, ResamplingMethod::B2,
                                             ResamplingMethod::B3};
  const auto summary =
      frmanova::estimate_fwer(desk_spec(frmanova::MeanModel::M1, 0.0, 303), cde, all);

  // All pairs are truly null under M1, so FWER must stay within Monte Carlo
  // noise of alpha: 5% + 3 * sqrt(.05 * .95 / 500) = 7.92%.
  const double bound = 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / 500.0);
  double worst = 0.0;
  gate.check(summary.cells.size() == 15, "expected 15 statistic x method cells");
  for (const auto& cell : summary.cells) {
    if (!cell.fwer.has_value()) {
      gate.check(false, "a cell is missing its FWER under an all-null model");
      continue;
    }
    worst = std::max(worst, *cell.fwer);
    if (*cell.fwer > bound) {
      gate.check(false, std::string("FWER of ") + frmanova::to_string(cell.statistic) + "+" +
                            frmanova::to_string(cell.method) + " = " + percent(*cell.fwer) +
                            " above " + percent(bound));
    }
  }
  gate.note("worst FWER cell: " + percent(worst) + " (bound " + percent(bound) + ")");
  gate.finish(4, "familywise error of the pairwise procedure (M1)", seconds_since(start));
}

// ---------------------------------------------------------------- criterion 5

void criterion_properties(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();

  // Pointwise two-way decomposition: SST = SSA + SSS + SSR at every point.
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const int ell = 2 + static_cast<int>(seed % 3);
    const int p = 2 + static_cast<int>(seed % 5);
    const auto d = random_dataset(1000 + seed, n, ell, p);
    const auto ssa = frmanova::ssa_pointwise(d);
    const auto ssr = frmanova::ssr_pointwise(d);
    const auto grand = oracle::grand_mean(d);
    for (int k = 0; k < p; ++k) {
      double sst = 0.0, sss = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto sm = oracle::subject_mean(d, j);
        const double dev = sm[static_cast<std::size_t>(k)] - grand[static_cast<std::size_t>(k)];
        sss += dev * dev;
        for (int i = 0; i < ell; ++i) {
          const double r = d.value(j, i, k) - grand[static_cast<std::size_t>(k)];
          sst += r * r;
        }
      }
      sss *= ell;
      gate.check(close_rel(sst,
                           ssa.values[static_cast<std::size_t>(k)] + sss +
                               ssr.values[static_cast<std::size_t>(k)],
                           1e-10),
                 "SST != SSA + SSS + SSR");
    }
  }

  // Affine invariance: Y -> a Y + c leaves F, D and E unchanged.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = random_dataset(2000 + seed, 5, 3, 9);
    std::vector<double> scaled(d.values().begin(), d.values().end());
    for (double& v : scaled) v = -2.5 * v + 0.75;
    const FunctionalDataset ad(std::move(scaled), d.grid(), 5, 3);
    gate.check(close_rel(frmanova::statistic_D(d), frmanova::statistic_D(ad), 1e-10),
               "D changed under an affine map of the values");
    gate.check(close_rel(frmanova::statistic_E(d), frmanova::statistic_E(ad), 1e-10),
               "E changed under an affine map of the values");
    const auto f = frmanova::f_pointwise(d), af = frmanova::f_pointwise(ad);
    for (int k = 0; k < d.n_points(); ++k) {
      gate.check(close_rel(f.values[static_cast<std::size_t>(k)],
                           af.values[static_cast<std::size_t>(k)], 1e-10),
                 "pointwise F changed under an affine map");
    }
  }

  // Subject relabeling invariance.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 6, ell = 3, p = 8;
    const auto d = random_dataset(3000 + seed, n, ell, p);
    std::vector<double> reversed(static_cast<std::size_t>(n) * ell * p);
    for (int j = 0; j < n; ++j) {
      const auto rec = d.subject_record(j);
      std::copy(rec.begin(), rec.end(),
                reversed.begin() + static_cast<std::ptrdiff_t>((n - 1 - j) * ell * p));
    }
    const FunctionalDataset rd(std::move(reversed), d.grid(), n, ell);
    gate.check(close_rel(frmanova::statistic_C(d), frmanova::statistic_C(rd), 1e-10),
               "C changed under subject relabeling");
    gate.check(close_rel(frmanova::statistic_D(d), frmanova::statistic_D(rd), 1e-10),
               "D changed under subject relabeling");
    gate.check(close_rel(frmanova::statistic_E(d), frmanova::statistic_E(rd), 1e-10),
               "E changed under subject relabeling");
  }

  // Permutations conserve the multiset of observed values.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = random_dataset(4000 + seed, 5, 3, 6);
    std::vector<double> original(d.values().begin(), d.values().end());
    std::sort(original.begin(), original.end());
    RandomStream rng(seed);
    for (auto* resample : {&frmanova::resample_P1, &frmanova::resample_P2}) {
      const auto r = (*resample)(d, rng);
      std::vector<double> shuffled(r.values().begin(), r.values().end());
      std::sort(shuffled.begin(), shuffled.end());
      gate.check(shuffled == original, "a permutation replicate altered the value multiset");
    }
  }

  // The centered bootstrap SSA of the identity bootstrap is exactly zero.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = random_dataset(5000 + seed, 6, 3, 7);
    const auto centered = frmanova::ssa_pointwise_B1(d, d);
    for (const double v : centered.values) {
      gate.check(v == 0.0, "ssa_pointwise_B1(d, d) != 0");
    }
  }

  // p-values are exact multiples of 1/B with the strict-exceedance count.
  {
    const auto d = random_dataset(6000, 6, 3, 7);
    for (const auto method : {ResamplingMethod::P1, ResamplingMethod::B1,
                              ResamplingMethod::B3}) {
      const auto result = frmanova::run_test(d, StatisticKind::D, method, 64, 11);
      int count = 0;
      for (const double v : result.resampled) count += v > result.observed ? 1 : 0;
      gate.check(result.p_value == static_cast<double>(count) / 64.0,
                 "p-value is not the strict exceedance fraction");
    }
  }

  // Thread-count independence, bit for bit.
  {
    const auto d = random_dataset(7000, 8, 3, 9);
    for (const auto method : {ResamplingMethod::P2, ResamplingMethod::B3}) {
      const auto one = frmanova::run_test(d, StatisticKind::E, method, 48, 13, 1);
      const auto four = frmanova::run_test(d, StatisticKind::E, method, 48, 13, 4);
      gate.check(one.observed == four.observed && one.p_value == four.p_value &&
                     one.resampled == four.resampled,
                 "results depend on the thread count");
    }
  }

  // Brownian bridge factor reproduces min(s,t) - st.
  {
    const frmanova::BrownianBridgeSampler bridge(Grid::equispaced(101));
    const auto& lower = bridge.interior_factor();
    const Eigen::MatrixXd gram = lower * lower.transpose();
    const auto& interior = bridge.interior_points();
    double worst = 0.0;
    for (std::size_t a = 0; a < interior.size(); ++a) {
      for (std::size_t b = 0; b < interior.size(); ++b) {
        const double s = bridge.grid().point(interior[a]);
        const double t = bridge.grid().point(interior[b]);
        worst = std::max(worst, std::abs(gram(static_cast<Eigen::Index>(a),
                                              static_cast<Eigen::Index>(b)) -
                                         oracle::bridge_cov(s, t)));
      }
    }
    gate.check(worst <= 1e-10, "bridge Gram matrix deviates from min(s,t) - st");
  }

  const double elapsed = seconds_since(start);
  gate.check(elapsed < 30.0, "property suite exceeded 30 s");
  gate.finish(5, "structural properties (no Monte Carlo)", elapsed);
}

// ---------------------------------------------------------------- criterion 6

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string command = std::string(FRMANOVA_CLI_PATH) + " " + args;
  const int status = std::system(command.c_str());
  return status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -1);
}

void criterion_dti_workflow(Gate& gate) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = fs::temp_directory_path() / "frmanova_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // Synthetic stand-in for a 4-visit tract-profile study: 17 subjects,
  // 93 grid points, records drawn from a fixed smooth covariance
  //   cov((i,s),(i',u)) = 0.02 * 0.6^|i-i'| * exp(-|s-u| / 0.3)
  // with a common FA-like mean curve added to every visit.
  const int n = 17, ell = 4, p = 93;
  const Grid grid = Grid::equispaced(p);
  Eigen::MatrixXd cov(ell * p, ell * p);
  for (int a = 0; a < ell * p; ++a) {
    for (int b = 0; b < ell * p; ++b) {
      const double s = grid.point(a % p), u = grid.point(b % p);
      cov(a, b) = 0.02 * std::pow(0.6, std::abs(a / p - b / p)) * std::exp(-std::abs(s - u) / 0.3);
    }
  }
  const frmanova::GaussianProcessSampler sampler(
      frmanova::CovarianceEstimate{std::move(cov), 0.0, grid, ell});
  RandomStream rng(frmanova::derive_seed(2026, frmanova::StreamLabel::dataset, 6));
  std::vector<double> values(static_cast<std::size_t>(n) * ell * p);
  sampler.draw_into(n, rng, values);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double t = grid.point(static_cast<int>(idx % static_cast<std::size_t>(p)));
    values[idx] += 0.45 + 0.05 * std::sin(2.0 * std::numbers::pi * t);
  }
  const FunctionalDataset data(std::move(values), grid, n, ell);
  const fs::path csv = dir / "fa_profiles.csv";
  frmanova::write_dataset_csv(csv, data, frmanova::CsvLayout::long_rows);

  // Global tests: every statistic and method, twice, byte-identical.
  const std::string test_args = "test --input " + csv.string() +
                                " --statistic all --method all --B 200 --seed 7";
  const fs::path test1 = dir / "tests1.json", test2 = dir / "tests2.json";
  gate.check(run_cli(test_args + " --out " + test1.string() + " --trace-out " +
                     (dir / "trace.csv").string()) == 0,
             "cli test run failed");
  gate.check(run_cli(test_args + " --out " + test2.string()) == 0, "cli test rerun failed");
  gate.check(!slurp(test1).empty() && slurp(test1) == slurp(test2),
             "test reports differ between identical runs");
  {
    const auto report = nlohmann::json::parse(slurp(test1));
    gate.check(report["input"]["subjects"] == n && report["input"]["conditions"] == ell &&
                   report["input"]["points"] == p,
               "test report has the wrong input shape");
    gate.check(report["results"].size() == 15, "expected 15 statistic x method results");
    const std::string trace = slurp(dir / "trace.csv");
    gate.check(static_cast<int>(std::count(trace.begin(), trace.end(), '\n')) == p + 1,
               "trace export is not one row per grid point");
  }

  // Pairwise comparisons: all 6 visit pairs for each statistic, twice.
  const std::string posthoc_args = "posthoc --input " + csv.string() +
                                   " --statistic all --method P1 --B 200 --seed 7";
  const fs::path post1 = dir / "pairs1.json", post2 = dir / "pairs2.json";
  const fs::path table = dir / "pairs.csv";
  gate.check(run_cli(posthoc_args + " --out " + post1.string() + " --csv-out " +
                     table.string()) == 0,
             "cli posthoc run failed");
  gate.check(run_cli(posthoc_args + " --out " + post2.string()) == 0,
             "cli posthoc rerun failed");
  gate.check(!slurp(post1).empty() && slurp(post1) == slurp(post2),
             "posthoc reports differ between identical runs");
  {
    const auto report = nlohmann::json::parse(slurp(post1));
    gate.check(report["reports"].size() == 3, "expected one pairwise report per statistic");
    for (const auto& entry : report["reports"]) {
      gate.check(entry["m"] == 6 && entry["pairs"].size() == 6,
                 "a pairwise report does not cover all 6 visit pairs");
    }
    const std::string rows = slurp(table);
    gate.check(static_cast<int>(std::count(rows.begin(), rows.end(), '\n')) == 1 + 3 * 6,
               "pairwise table is not 18 rows");
  }

  gate.finish(6, "tract-profile workflow end to end (n=17, 4 visits, 93 points)",
              seconds_since(start));
}

}  // namespace

int main() {
  std::printf("frmanova acceptance gate: 6 criteria, fixed tolerances, desk scale\n");
  Gate gate;
  criterion_oracle_suite(gate);
  criterion_empirical_size(gate);
  criterion_empirical_power(gate);
  criterion_fwer(gate);
  criterion_properties(gate);
  criterion_dti_workflow(gate);
  std::printf(gate.all_pass ? "acceptance: ALL CRITERIA PASS\n"
                            : "acceptance: AT LEAST ONE CRITERION FAILED\n");
  return gate.all_pass ? 0 : 1;
}
