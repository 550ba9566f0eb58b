#include "frmanova/posthoc.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "frmanova/errors.hpp"
#include "frmanova/rng.hpp"

namespace frmanova {

std::vector<ConditionPair> all_pairs(int ell) {
  std::vector<ConditionPair> pairs;
  for (int r = 1; r <= ell; ++r) {
    for (int s = r + 1; s <= ell; ++s) pairs.emplace_back(r, s);
  }
  return pairs;
}

FunctionalDataset extract_pair(const FunctionalDataset& data, int r, int s) {
  const int ell = data.n_conditions();
  if (r < 1 || s < 1 || r >= s || s > ell) {
    throw ValidationError("condition pair (" + std::to_string(r) + ", " + std::to_string(s) +
                          ") is invalid: need 1 <= r < s <= " + std::to_string(ell));
  }
  const int n = data.n_subjects(), p = data.n_points();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n) * 2u * static_cast<std::size_t>(p));
  for (int j = 0; j < n; ++j) {
    for (const int label : {r, s}) {
      const auto curve = data.curve(j, label - 1);
      values.insert(values.end(), curve.begin(), curve.end());
    }
  }
  return FunctionalDataset(std::move(values), data.grid(), n, 2);
}

std::vector<PosthocReport> run_posthoc_multi(const FunctionalDataset& data,
                                             std::span<const StatisticKind> statistics,
                                             ResamplingMethod method, int B, double alpha,
                                             std::uint64_t seed,
                                             std::span<const ConditionPair> pairs, int threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (statistics.empty()) throw ValidationError("at least one statistic required");

  std::vector<ConditionPair> selected(pairs.begin(), pairs.end());
  if (selected.empty()) selected = all_pairs(data.n_conditions());
  std::set<ConditionPair> unique(selected.begin(), selected.end());
  if (unique.size() != selected.size()) {
    throw ValidationError("condition pairs must not repeat");
  }

  const int m = static_cast<int>(selected.size());
  const double threshold = alpha / static_cast<double>(m);

  std::vector<PosthocReport> reports;
  reports.reserve(statistics.size());
  for (const StatisticKind statistic : statistics) {
    reports.push_back(PosthocReport{statistic, method, {}, m, alpha, B, seed});
    reports.back().pairs.reserve(selected.size());
  }

  for (const auto& [r, s] : selected) {
    const FunctionalDataset pair_data = extract_pair(data, r, s);
    const std::uint64_t pair_seed = derive_seed(seed, StreamLabel::pair,
                                                static_cast<std::uint64_t>(r),
                                                static_cast<std::uint64_t>(s));
    const std::vector<TestResult> tests =
        run_tests(pair_data, statistics, method, B, pair_seed, threads);
    for (std::size_t i = 0; i < statistics.size(); ++i) {
      const double p_raw = tests[i].p_value;
      reports[i].pairs.push_back(PosthocReport::PairComparison{
          r, s, p_raw, std::min(1.0, static_cast<double>(m) * p_raw), p_raw <= threshold});
    }
  }
  return reports;
}

PosthocReport run_posthoc(const FunctionalDataset& data, StatisticKind statistic,
                          ResamplingMethod method, int B, double alpha, std::uint64_t seed,
                          std::span<const ConditionPair> pairs, int threads) {
  const StatisticKind one[] = {statistic};
  return std::move(
      run_posthoc_multi(data, one, method, B, alpha, seed, pairs, threads).front());
}

}  // namespace frmanova
