#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frmanova/dataset.hpp"
#include "frmanova/resampling.hpp"
#include "frmanova/rng.hpp"
#include "frmanova/statistics.hpp"

namespace frmanova {

/// Synthetic three-condition mean models. M1 and M4 put the same mean in
/// every condition (a true global null); the others perturb condition 3.
enum class MeanModel { M1, M2, M3, M4, M5, M6 };

enum class ErrorLaw { normal, lognormal };

[[nodiscard]] const char* to_string(MeanModel model) noexcept;
[[nodiscard]] MeanModel parse_mean_model(const std::string& name);

/// Mean of `condition` (1, 2 or 3) at t in [0, 1] under the given model.
[[nodiscard]] double mean_function(MeanModel model, int condition, double t);

/// One Monte Carlo study configuration over the three-condition models.
/// xi is the error scale; leave it unset to get the model's default
/// (0.5 for M1-M3, 0.05 for M4-M6). rho is the cross-condition correlation.
struct SimulationSpec {
  MeanModel model = MeanModel::M1;
  ErrorLaw distribution = ErrorLaw::normal;
  double rho = 0.0;
  std::optional<double> xi;
  int n = 35;
  int p = 101;
  int B = 500;
  int n_runs = 500;
  double alpha = 0.05;
  std::uint64_t seed = 42;

  [[nodiscard]] static double default_xi(MeanModel model) noexcept;
  [[nodiscard]] double effective_xi() const noexcept;
  void validate() const;
};

/// Zero-mean Gaussian sampler with covariance min(s, t) - s*t on a fixed
/// grid, built once by factoring the interior covariance matrix; values at
/// pinned grid points (t = 0 or t = 1) are exactly zero.
class BrownianBridgeSampler {
public:
  explicit BrownianBridgeSampler(const Grid& grid);

  /// One bridge path, `grid.size()` values written to out.
  void draw(RandomStream& rng, std::span<double> out) const;

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  /// Indices of the grid points strictly inside (0, 1), in grid order.
  [[nodiscard]] const std::vector<int>& interior_points() const noexcept { return interior_; }
  /// Lower Cholesky factor of the interior covariance matrix.
  [[nodiscard]] const Eigen::MatrixXd& interior_factor() const noexcept { return lower_; }

private:
  Grid grid_;
  std::vector<int> interior_;
  Eigen::MatrixXd lower_;
};

[[nodiscard]] std::vector<double> brownian_bridge(const Grid& grid, RandomStream& rng);

/// Error tensor (n x 3 x p, dataset layout) for one run. Normal setting:
/// block 1 is xi * bridge, blocks 2 and 3 follow the lag-one autoregression
/// rho * previous + xi * sqrt(1 - rho^2) * fresh bridge, so every block has
/// pointwise variance xi^2 t(1-t) and adjacent blocks correlate at rho.
/// Lognormal setting: exp of the normal errors minus the exact pointwise
/// mean exp(sigma^2(t)/2), which recenters every block to mean zero.
[[nodiscard]] std::vector<double> generate_errors(const SimulationSpec& spec, RandomStream& rng);

/// Mean surfaces plus generated errors on an equispaced p-point grid.
[[nodiscard]] FunctionalDataset generate_dataset(const SimulationSpec& spec, RandomStream& rng);

/// Monte Carlo estimates, one cell per (statistic, method) in caller order
/// (statistics outer). For global tests rejection_rate is the fraction of
/// runs with p <= alpha. For pairwise studies rejection_rate is the fraction
/// of runs with at least one rejection, fwer restricts that to pairs whose
/// model means are truly equal (absent when no pair is a true null), and
/// per_pair carries each pair's own rejection rate.
struct SimulationSummary {
  struct PairRate {
    int first;
    int second;
    double rate;
  };
  struct Cell {
    StatisticKind statistic;
    ResamplingMethod method;
    double rejection_rate;
    double mc_stderr;
    std::optional<double> fwer;
    std::vector<PairRate> per_pair;
  };

  std::vector<Cell> cells;
  int n_runs;
  int B;
  double alpha;
  std::uint64_t seed;
};

/// Size/power of the global tests over spec.n_runs independent datasets.
/// Run r draws its data from a stream derived from (seed, r) and its tests
/// from (seed, r, method), so rates are identical for every thread count.
[[nodiscard]] SimulationSummary estimate_rejection_rates(
    const SimulationSpec& spec, std::span<const StatisticKind> statistics,
    std::span<const ResamplingMethod> methods, int threads = 0);

/// Familywise error (and per-pair rates) of the Bonferroni pairwise
/// procedure under the same run discipline.
[[nodiscard]] SimulationSummary estimate_fwer(const SimulationSpec& spec,
                                              std::span<const StatisticKind> statistics,
                                              std::span<const ResamplingMethod> methods,
                                              int threads = 0);

/// Coordinate laws for the covariance-matched generator: all are
/// standardized to zero mean and unit variance before the Cholesky factor
/// and mean vector are applied, so every choice reproduces the requested
/// mean and covariance while varying tail weight and skewness.
enum class GpMarginal { normal, student_t5, chi_squared10 };

[[nodiscard]] const char* to_string(GpMarginal marginal) noexcept;

/// Mean used by the covariance-matched generator: `pooled` gives every
/// condition the pooled mean curve of the source data (a true global null),
/// `per_condition` keeps each condition's own sample mean.
enum class GpMeanStructure { pooled, per_condition };

struct GpStudySpec {
  GpMeanStructure mean_structure = GpMeanStructure::pooled;
  GpMarginal marginal = GpMarginal::normal;
  int n = 17;
  int B = 500;
  int n_runs = 500;
  double alpha = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
};

/// One draw of n records with the given mean (length ell*p, concatenated)
/// and the sampler's covariance, under the chosen coordinate law.
[[nodiscard]] FunctionalDataset sample_gp_dataset(const GaussianProcessSampler& sampler,
                                                  std::span<const double> mean,
                                                  GpMarginal marginal, int n,
                                                  RandomStream& rng);

/// Size/power of the global tests when data are generated from the source
/// dataset's sample mean(s) and sample covariance.
[[nodiscard]] SimulationSummary estimate_gp_rejection_rates(
    const FunctionalDataset& source, const GpStudySpec& spec,
    std::span<const StatisticKind> statistics, std::span<const ResamplingMethod> methods,
    int threads = 0);

/// Pairwise-procedure study under the covariance-matched generator. With a
/// pooled mean every pair is a true null; with per-condition means pairs
/// whose sample means happen to coincide (rare) are treated as true nulls.
[[nodiscard]] SimulationSummary estimate_gp_fwer(const FunctionalDataset& source,
                                                 const GpStudySpec& spec,
                                                 std::span<const StatisticKind> statistics,
                                                 std::span<const ResamplingMethod> methods,
                                                 int threads = 0);

}  // namespace frmanova
