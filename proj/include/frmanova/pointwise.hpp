#pragma once

#include <span>
#include <vector>

#include "frmanova/dataset.hpp"
#include "frmanova/grid.hpp"

namespace frmanova {

enum class TraceKind { ssa, ssr, f_stat };

/// A statistic evaluated at every grid point. For an F trace, grid points
/// where the ratio is undefined (between-condition variation present but
/// residual variation exactly zero) hold NaN and are listed in
/// degenerate_points; both sums being exactly zero yields F = 0 instead.
struct PointwiseTrace {
  TraceKind kind;
  Grid grid;
  std::vector<double> values;
  std::vector<int> degenerate_points;

  [[nodiscard]] bool has_degenerate_points() const noexcept {
    return !degenerate_points.empty();
  }
};

/// Between-condition sum of squares at each grid point:
/// n * sum_i (condition mean - grand mean)^2.
[[nodiscard]] PointwiseTrace ssa_pointwise(const FunctionalDataset& data);

/// Residual sum of squares at each grid point after removing condition and
/// subject effects: sum_{i,j} (Y_ij - condition mean_i - subject mean_j + grand)^2.
[[nodiscard]] PointwiseTrace ssr_pointwise(const FunctionalDataset& data);

/// Pointwise F ratio [SSA/(ell-1)] / [SSR/((ell-1)(n-1))].
[[nodiscard]] PointwiseTrace f_pointwise(const FunctionalDataset& data);

namespace detail {

/// Reusable buffers for one trace evaluation; sized once per worker and
/// recycled across resampling replicates.
struct TraceWorkspace {
  std::vector<double> cond_means;  // ell*p
  std::vector<double> subj_means;  // n*p
  std::vector<double> grand;       // p
  std::vector<double> ssa;         // p
  std::vector<double> ssr;         // p
  std::vector<double> f;           // p
  std::vector<double> resid;       // ell*p scratch for the residual pass
  std::vector<int> degenerate;

  void resize(int n, int ell, int p);
};

/// Fills ws.cond_means / ws.subj_means / ws.grand for v.
void compute_means(const TensorView& v, TraceWorkspace& ws);

/// SSA from ws.cond_means / ws.grand (compute_means must have run).
void compute_ssa(const TensorView& v, TraceWorkspace& ws);

/// Bootstrap-centered SSA: n * sum_i ((boot cond mean - boot grand) -
/// (source cond mean - source grand))^2, so the trace is exactly zero when
/// the bootstrap sample equals its source. compute_means must have run on
/// the bootstrap view; source_* are the means of the resampled-from data.
void compute_ssa_centered(const TensorView& v, std::span<const double> source_cond_means,
                          std::span<const double> source_grand, TraceWorkspace& ws);

/// SSR from the data and ws means (compute_means must have run).
void compute_ssr(const TensorView& v, TraceWorkspace& ws);

/// F from ws.ssa / ws.ssr; records degenerate points (SSA > 0, SSR == 0,
/// compared exactly) in ws.degenerate and stores NaN there. Points with
/// SSA == 0 and SSR == 0 get F = 0.
void compute_f(int n, int ell, TraceWorkspace& ws);

}  // namespace detail

}  // namespace frmanova
