#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "frmanova/dataset.hpp"
#include "frmanova/pointwise.hpp"
#include "frmanova/posthoc.hpp"

namespace frmanova {

/// Dataset file shapes. Long: one value per row with columns
/// subject,condition,grid_index[,t],value. Wide: one (subject, condition)
/// record per row with columns subject,condition,v1..vp, optionally
/// preceded by a row whose subject field is the word `grid` carrying the
/// grid points. Labels and grid indices are 1-based in files.
enum class CsvLayout { long_rows, wide_rows };

[[nodiscard]] const char* to_string(CsvLayout layout) noexcept;
[[nodiscard]] CsvLayout parse_csv_layout(const std::string& name);

/// Reads a comma-separated dataset (UTF-8, '.' decimal, header row
/// required). Every (subject, condition, grid index) cell must appear
/// exactly once; the first missing cell or any duplicate is reported with
/// its labels, malformed fields with their 1-based row number. Without grid
/// information the grid defaults to equispaced points on [0, 1]; explicit
/// grid values lying outside [0, 1] are mapped affinely onto [0, 1], which
/// leaves every test's p-value unchanged.
[[nodiscard]] FunctionalDataset read_dataset_csv(std::istream& in, CsvLayout layout,
                                                 const std::string& origin = "<stream>");
[[nodiscard]] FunctionalDataset read_dataset_csv(const std::filesystem::path& path,
                                                 CsvLayout layout);

/// Writes a dataset in the given shape with round-trippable precision.
/// include_grid adds the t column (long) or the grid row (wide).
void write_dataset_csv(std::ostream& out, const FunctionalDataset& data, CsvLayout layout,
                       bool include_grid = true);
void write_dataset_csv(const std::filesystem::path& path, const FunctionalDataset& data,
                       CsvLayout layout, bool include_grid = true);

/// Pointwise diagnostics table with columns t,ssa,ssr,f; degenerate F
/// points print as nan. All three traces must share one grid.
void write_trace_csv(std::ostream& out, const PointwiseTrace& ssa, const PointwiseTrace& ssr,
                     const PointwiseTrace& f);
void write_trace_csv(const std::filesystem::path& path, const PointwiseTrace& ssa,
                     const PointwiseTrace& ssr, const PointwiseTrace& f);

/// Pairwise-comparison table, one row per (report, pair) with columns
/// statistic,method,pair,p_raw,p_adjusted,reject.
void write_posthoc_csv(std::ostream& out, std::span<const PosthocReport> reports);
void write_posthoc_csv(const std::filesystem::path& path,
                       std::span<const PosthocReport> reports);

}  // namespace frmanova
