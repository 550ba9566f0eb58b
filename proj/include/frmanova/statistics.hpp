#pragma once

#include <span>
#include <string>

#include "frmanova/dataset.hpp"
#include "frmanova/pointwise.hpp"

namespace frmanova {

/// Global test statistics summarizing a pointwise trace over the domain:
///   C — integrated between-condition sum of squares,
///   D — integrated pointwise F ratio,
///   E — supremum of the pointwise F ratio.
enum class StatisticKind { C, D, E };

[[nodiscard]] const char* to_string(StatisticKind kind) noexcept;
[[nodiscard]] StatisticKind parse_statistic_kind(const std::string& name);

/// Composite trapezoid integral of the trace over its grid (exact for
/// traces affine in t). Refuses traces carrying degenerate points.
[[nodiscard]] double integrate_trace(const PointwiseTrace& trace);

/// Largest trace value over the grid. Refuses degenerate traces.
[[nodiscard]] double sup_trace(const PointwiseTrace& trace);

[[nodiscard]] double statistic_C(const FunctionalDataset& data);
[[nodiscard]] double statistic_D(const FunctionalDataset& data);
[[nodiscard]] double statistic_E(const FunctionalDataset& data);

namespace detail {

/// Trapezoid rule over explicit nodes; values.size() == points.size().
[[nodiscard]] double trapezoid(std::span<const double> points, std::span<const double> values);

/// C/D/E directly from a filled workspace (compute_ssa / compute_ssr /
/// compute_f must have run as needed). D and E require ws.degenerate to be
/// empty; callers on the resampling hot path check it themselves.
[[nodiscard]] double statistic_from_workspace(StatisticKind kind,
                                              std::span<const double> grid_points,
                                              const TraceWorkspace& ws);

}  // namespace detail

}  // namespace frmanova
