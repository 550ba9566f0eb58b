#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "frmanova/dataset.hpp"
#include "frmanova/resampling.hpp"
#include "frmanova/statistics.hpp"

namespace frmanova {

/// Pair of condition labels, numbered from 1 as in reports (so (1, 3)
/// compares the first and third condition). Always ordered first < second.
using ConditionPair = std::pair<int, int>;

/// All C(ell, 2) pairwise contrasts in lexicographic order:
/// (1,2), (1,3), ..., (1,ell), (2,3), ...
[[nodiscard]] std::vector<ConditionPair> all_pairs(int ell);

/// Bonferroni-adjusted pairwise comparisons. For each pair, p_raw is the
/// resampling p-value of the two-condition test, p_adjusted = min(1, m*p_raw)
/// with m the number of pairs, and reject means p_raw <= alpha/m (the same
/// decision as p_adjusted <= alpha up to the cap).
struct PosthocReport {
  struct PairComparison {
    int first;   // 1-based condition labels
    int second;
    double p_raw;
    double p_adjusted;
    bool reject;
  };

  StatisticKind statistic;
  ResamplingMethod method;
  std::vector<PairComparison> pairs;
  int m;
  double alpha;
  int B;
  std::uint64_t seed;
};

/// Two-condition dataset holding conditions r and s (1-based, r < s) of all
/// subjects, in that order.
[[nodiscard]] FunctionalDataset extract_pair(const FunctionalDataset& data, int r, int s);

/// Pairwise comparisons for one statistic. Each pair runs its own
/// resampling test with a sub-seed derived from (seed, r, s), so adding or
/// removing pairs never changes the other pairs' p-values. An empty pair
/// list means all C(ell, 2) contrasts.
[[nodiscard]] PosthocReport run_posthoc(const FunctionalDataset& data, StatisticKind statistic,
                                        ResamplingMethod method, int B, double alpha,
                                        std::uint64_t seed,
                                        std::span<const ConditionPair> pairs = {},
                                        int threads = 0);

/// Same analysis for several statistics at once, sharing each pair's
/// replicate draws; element s matches run_posthoc(data, statistics[s], ...)
/// bit for bit.
[[nodiscard]] std::vector<PosthocReport> run_posthoc_multi(
    const FunctionalDataset& data, std::span<const StatisticKind> statistics,
    ResamplingMethod method, int B, double alpha, std::uint64_t seed,
    std::span<const ConditionPair> pairs = {}, int threads = 0);

}  // namespace frmanova
