#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frmanova/dataset.hpp"
#include "frmanova/pointwise.hpp"
#include "frmanova/rng.hpp"
#include "frmanova/statistics.hpp"

namespace frmanova {

/// Null-distribution approximation schemes.
///   P1 — within-subject permutation of the ell condition curves,
///   P2 — pooled permutation of all n*ell curves across cells,
///   B1 — bootstrap of whole subjects, replicates use a centered
///        between-condition sum of squares,
///   B2 — per-condition bootstrap of subject-centered curves,
///   B3 — parametric draws from a zero-mean Gaussian process with the
///        unbiased sample covariance.
enum class ResamplingMethod { P1, P2, B1, B2, B3 };

[[nodiscard]] const char* to_string(ResamplingMethod method) noexcept;
[[nodiscard]] ResamplingMethod parse_resampling_method(const std::string& name);

/// Outcome of one global test. p_value is always an integer multiple of 1/B:
/// the fraction of replicates whose statistic strictly exceeds the observed
/// one (ties count toward the null).
struct TestResult {
  StatisticKind statistic;
  ResamplingMethod method;
  double observed;
  std::vector<double> resampled;  // length B, indexed by replicate
  double p_value;
  int B;
  std::uint64_t seed;
};

/// Unbiased sample covariance of the concatenated records on the full
/// (ell*p) x (ell*p) grid, plus everything needed to reshape draws back
/// into datasets. jitter_applied records any diagonal regularization a
/// factorization consumer had to add (0 for a freshly estimated matrix).
struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  double jitter_applied;
  Grid grid;
  int n_conditions;
};

/// One within-subject permutation replicate.
[[nodiscard]] FunctionalDataset resample_P1(const FunctionalDataset& data, RandomStream& rng);

/// One pooled permutation replicate: all n*ell curves rearranged uniformly
/// at random into the n x ell cells.
[[nodiscard]] FunctionalDataset resample_P2(const FunctionalDataset& data, RandomStream& rng);

/// One subject bootstrap replicate: n whole records drawn with replacement.
[[nodiscard]] FunctionalDataset resample_B1(const FunctionalDataset& data, RandomStream& rng);

/// Centered bootstrap between-condition sum of squares:
///   n * sum_i ((boot cond mean - source cond mean) - (boot grand - source grand))^2,
/// identically zero when boot equals its source.
[[nodiscard]] PointwiseTrace ssa_pointwise_B1(const FunctionalDataset& boot,
                                              const FunctionalDataset& original);

/// One per-condition bootstrap replicate of the subject-centered curves:
/// cell (j, i) is a with-replacement draw from condition i's n centered
/// curves, independently across cells.
[[nodiscard]] FunctionalDataset resample_B2(const FunctionalDataset& data, RandomStream& rng);

[[nodiscard]] CovarianceEstimate estimate_covariance(const FunctionalDataset& data);

/// Zero-mean Gaussian sampler for a covariance estimate. Factorization
/// happens once at construction: the plain matrix first, then an escalating
/// diagonal jitter delta * (trace/dim) * I with delta from 1e-12 up to 1e-6
/// in factors of 10. The jitter actually used is recorded on the estimate
/// returned by covariance(); exhausting the ladder raises NumericalError.
class GaussianProcessSampler {
public:
  explicit GaussianProcessSampler(CovarianceEstimate cov);

  [[nodiscard]] const CovarianceEstimate& covariance() const noexcept { return cov_; }
  [[nodiscard]] const Eigen::MatrixXd& factor() const noexcept { return lower_; }

  /// n independent zero-mean draws, reshaped to an n x ell x p dataset.
  [[nodiscard]] FunctionalDataset draw(int n, RandomStream& rng) const;

  /// Engine entry point: fills out (size n*ell*p) without allocating.
  void draw_into(int n, RandomStream& rng, std::span<double> out) const;

private:
  CovarianceEstimate cov_;
  Eigen::MatrixXd lower_;
};

/// One parametric bootstrap replicate: n zero-mean Gaussian records with
/// the given covariance.
[[nodiscard]] FunctionalDataset resample_B3(const CovarianceEstimate& cov, int n,
                                            RandomStream& rng);

/// The full resampling test: observed statistic on data (ordinary formulas
/// for every method), B replicates with per-replicate streams derived purely
/// from (seed, replicate index), p-value by strict exceedance. Identical
/// output for every thread count; threads = 0 picks the default.
[[nodiscard]] TestResult run_test(const FunctionalDataset& data, StatisticKind statistic,
                                  ResamplingMethod method, int B, std::uint64_t seed,
                                  int threads = 0);

/// Same as run_test for several statistics at once, sharing the replicate
/// draws: element s of the result equals run_test(data, statistics[s], ...)
/// bit for bit, because replicate streams depend only on (seed, replicate).
[[nodiscard]] std::vector<TestResult> run_tests(const FunctionalDataset& data,
                                                std::span<const StatisticKind> statistics,
                                                ResamplingMethod method, int B,
                                                std::uint64_t seed, int threads = 0);

}  // namespace frmanova
