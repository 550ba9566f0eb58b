#include "frmanova/statistics.hpp"

#include <algorithm>

#include "frmanova/errors.hpp"

namespace frmanova {

const char* to_string(StatisticKind kind) noexcept {
  switch (kind) {
    case StatisticKind::C: return "C";
    case StatisticKind::D: return "D";
    case StatisticKind::E: return "E";
  }
  return "?";
}

StatisticKind parse_statistic_kind(const std::string& name) {
  if (name == "C") return StatisticKind::C;
  if (name == "D") return StatisticKind::D;
  if (name == "E") return StatisticKind::E;
  throw ValidationError("unknown statistic '" + name + "' (expected C, D or E)");
}

namespace detail {

double trapezoid(std::span<const double> points, std::span<const double> values) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    sum += 0.5 * (points[k + 1] - points[k]) * (values[k] + values[k + 1]);
  }
  return sum;
}

double statistic_from_workspace(StatisticKind kind, std::span<const double> grid_points,
                                const TraceWorkspace& ws) {
  switch (kind) {
    case StatisticKind::C:
      return trapezoid(grid_points, ws.ssa);
    case StatisticKind::D:
      return trapezoid(grid_points, ws.f);
    case StatisticKind::E:
      return *std::max_element(ws.f.begin(), ws.f.end());
  }
  return 0.0;
}

}  // namespace detail

namespace {

void require_clean(const PointwiseTrace& trace) {
  if (trace.has_degenerate_points()) {
    throw DegeneracyError(
        "pointwise F ratio is undefined at " + std::to_string(trace.degenerate_points.size()) +
        " grid point(s); integral and supremum statistics are unavailable");
  }
  if (trace.values.size() != static_cast<std::size_t>(trace.grid.size())) {
    throw ValidationError("trace length does not match its grid");
  }
}

}  // namespace

double integrate_trace(const PointwiseTrace& trace) {
  require_clean(trace);
  return detail::trapezoid(trace.grid.points(), trace.values);
}

double sup_trace(const PointwiseTrace& trace) {
  require_clean(trace);
  return *std::max_element(trace.values.begin(), trace.values.end());
}

double statistic_C(const FunctionalDataset& data) {
  return integrate_trace(ssa_pointwise(data));
}

double statistic_D(const FunctionalDataset& data) {
  return integrate_trace(f_pointwise(data));
}

double statistic_E(const FunctionalDataset& data) {
  return sup_trace(f_pointwise(data));
}

}  // namespace frmanova
