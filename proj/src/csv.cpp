#include "frmanova/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "frmanova/errors.hpp"

namespace frmanova {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    fields.emplace_back(trim(std::string_view(line).substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(const std::string& origin, int row, const std::string& what) {
  throw ValidationError(origin + ", row " + std::to_string(row) + ": " + what);
}

double parse_double(const std::string& field, const std::string& origin, int row) {
  const std::string_view s = field;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(origin, row, "expected a number, got '" + field + "'");
  }
  return value;
}

int parse_label(const std::string& field, const std::string& origin, int row,
                const char* what) {
  const std::string_view s = field;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || value < 1) {
    fail(origin, row, std::string("expected a positive integer ") + what + ", got '" + field +
                          "'");
  }
  return value;
}

/// Grid from explicit points: points outside [0,1] are mapped affinely.
Grid make_grid(std::vector<double> points, const std::string& origin) {
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
  if (*lo < 0.0 || *hi > 1.0) {
    if (*hi == *lo) {
      throw ValidationError(origin + ": grid points are all equal");
    }
    // For increasing input this pins the ends to exactly 0 and 1.
    const double span = *hi - *lo, base = *lo;
    for (double& t : points) t = (t - base) / span;
  }
  return Grid(std::move(points));
}

struct LongColumns {
  int subject = -1;
  int condition = -1;
  int grid_index = -1;
  int t = -1;
  int value = -1;
  int count = 0;
};

LongColumns parse_long_header(const std::vector<std::string>& fields,
                              const std::string& origin) {
  LongColumns cols;
  cols.count = static_cast<int>(fields.size());
  for (int c = 0; c < cols.count; ++c) {
    const std::string& name = fields[c];
    int* slot = nullptr;
    if (name == "subject") slot = &cols.subject;
    else if (name == "condition") slot = &cols.condition;
    else if (name == "grid_index") slot = &cols.grid_index;
    else if (name == "t") slot = &cols.t;
    else if (name == "value") slot = &cols.value;
    else fail(origin, 1, "unknown column '" + name + "'");
    if (*slot != -1) fail(origin, 1, "duplicate column '" + name + "'");
    *slot = c;
  }
  if (cols.subject == -1 || cols.condition == -1 || cols.grid_index == -1 || cols.value == -1) {
    fail(origin, 1, "header must name subject, condition, grid_index and value columns");
  }
  return cols;
}

FunctionalDataset read_long(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
  const LongColumns cols = parse_long_header(split_fields(line), origin);

  struct Cell {
    int subject, condition, grid_index, row;
    double t, value;
  };
  std::vector<Cell> cells;
  int n = 0, ell = 0, p = 0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != cols.count) {
      fail(origin, row,
           "expected " + std::to_string(cols.count) + " fields, got " +
               std::to_string(fields.size()));
    }
    Cell cell;
    cell.row = row;
    cell.subject = parse_label(fields[cols.subject], origin, row, "subject");
    cell.condition = parse_label(fields[cols.condition], origin, row, "condition");
    cell.grid_index = parse_label(fields[cols.grid_index], origin, row, "grid index");
    cell.value = parse_double(fields[cols.value], origin, row);
    cell.t = cols.t == -1 ? 0.0 : parse_double(fields[cols.t], origin, row);
    n = std::max(n, cell.subject);
    ell = std::max(ell, cell.condition);
    p = std::max(p, cell.grid_index);
    cells.push_back(cell);
  }
  if (cells.empty()) throw ValidationError(origin + ": no data rows");

  const std::size_t total =
      static_cast<std::size_t>(n) * static_cast<std::size_t>(ell) * static_cast<std::size_t>(p);
  std::vector<double> values(total);
  std::vector<char> seen(total, 0);
  std::vector<double> grid_points(static_cast<std::size_t>(p));
  std::vector<int> grid_row(static_cast<std::size_t>(p), 0);  // first defining row
  for (const Cell& cell : cells) {
    const std::size_t idx =
        (static_cast<std::size_t>(cell.subject - 1) * static_cast<std::size_t>(ell) +
         static_cast<std::size_t>(cell.condition - 1)) *
            static_cast<std::size_t>(p) +
        static_cast<std::size_t>(cell.grid_index - 1);
    if (seen[idx]) {
      fail(origin, cell.row,
           "duplicate cell (subject " + std::to_string(cell.subject) + ", condition " +
               std::to_string(cell.condition) + ", grid index " +
               std::to_string(cell.grid_index) + ")");
    }
    seen[idx] = 1;
    values[idx] = cell.value;
    if (cols.t != -1) {
      const std::size_t k = static_cast<std::size_t>(cell.grid_index - 1);
      if (grid_row[k] == 0) {
        grid_points[k] = cell.t;
        grid_row[k] = cell.row;
      } else if (grid_points[k] != cell.t) {
        fail(origin, cell.row,
             "grid index " + std::to_string(cell.grid_index) +
                 " has conflicting t values (first defined on row " +
                 std::to_string(grid_row[k]) + ")");
      }
    }
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!seen[idx]) {
      const int k = static_cast<int>(idx % static_cast<std::size_t>(p));
      const int i = static_cast<int>(idx / static_cast<std::size_t>(p)) % ell;
      const int j = static_cast<int>(idx / (static_cast<std::size_t>(p) * ell));
      throw ValidationError(origin + ": missing cell (subject " + std::to_string(j + 1) +
                            ", condition " + std::to_string(i + 1) + ", grid index " +
                            std::to_string(k + 1) + ")");
    }
  }

  Grid grid = cols.t == -1 ? Grid::equispaced(p) : make_grid(std::move(grid_points), origin);
  return FunctionalDataset(std::move(values), std::move(grid), n, ell);
}

FunctionalDataset read_wide(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(origin + ": empty file");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "subject" || header[1] != "condition") {
    throw ValidationError(origin +
                          ", row 1: wide header must start with subject, condition followed "
                          "by one column per grid point");
  }
  const int p = static_cast<int>(header.size()) - 2;

  std::optional<std::vector<double>> grid_points;
  struct Row {
    int subject, condition, row;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  int n = 0, ell = 0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(origin, row,
           "expected " + std::to_string(header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    if (fields[0] == "grid") {
      if (grid_points) fail(origin, row, "second grid row");
      grid_points.emplace();
      for (int k = 0; k < p; ++k) {
        grid_points->push_back(parse_double(fields[static_cast<std::size_t>(k) + 2], origin, row));
      }
      continue;
    }
    Row r;
    r.row = row;
    r.subject = parse_label(fields[0], origin, row, "subject");
    r.condition = parse_label(fields[1], origin, row, "condition");
    for (int k = 0; k < p; ++k) {
      r.values.push_back(parse_double(fields[static_cast<std::size_t>(k) + 2], origin, row));
    }
    n = std::max(n, r.subject);
    ell = std::max(ell, r.condition);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ValidationError(origin + ": no data rows");

  const std::size_t records = static_cast<std::size_t>(n) * static_cast<std::size_t>(ell);
  std::vector<double> values(records * static_cast<std::size_t>(p));
  std::vector<char> seen(records, 0);
  for (const Row& r : rows) {
    const std::size_t rec = static_cast<std::size_t>(r.subject - 1) * ell +
                            static_cast<std::size_t>(r.condition - 1);
    if (seen[rec]) {
      fail(origin, r.row,
           "duplicate row for (subject " + std::to_string(r.subject) + ", condition " +
               std::to_string(r.condition) + ")");
    }
    seen[rec] = 1;
    std::copy(r.values.begin(), r.values.end(),
              values.begin() + static_cast<std::ptrdiff_t>(rec * p));
  }
  for (std::size_t rec = 0; rec < records; ++rec) {
    if (!seen[rec]) {
      throw ValidationError(origin + ": missing cell (subject " +
                            std::to_string(rec / ell + 1) + ", condition " +
                            std::to_string(rec % ell + 1) + ", grid index 1)");
    }
  }

  Grid grid = grid_points ? make_grid(std::move(*grid_points), origin) : Grid::equispaced(p);
  return FunctionalDataset(std::move(values), std::move(grid), n, ell);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

const char* to_string(CsvLayout layout) noexcept {
  return layout == CsvLayout::long_rows ? "long" : "wide";
}

CsvLayout parse_csv_layout(const std::string& name) {
  if (name == "long") return CsvLayout::long_rows;
  if (name == "wide") return CsvLayout::wide_rows;
  throw ValidationError("unknown CSV layout '" + name + "' (use long or wide)");
}

FunctionalDataset read_dataset_csv(std::istream& in, CsvLayout layout,
                                   const std::string& origin) {
  return layout == CsvLayout::long_rows ? read_long(in, origin) : read_wide(in, origin);
}

FunctionalDataset read_dataset_csv(const std::filesystem::path& path, CsvLayout layout) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  return read_dataset_csv(in, layout, path.string());
}

void write_dataset_csv(std::ostream& out, const FunctionalDataset& data, CsvLayout layout,
                       bool include_grid) {
  const auto& points = data.grid().points();
  if (layout == CsvLayout::long_rows) {
    out << (include_grid ? "subject,condition,grid_index,t,value\n"
                         : "subject,condition,grid_index,value\n");
    for (int j = 0; j < data.n_subjects(); ++j) {
      for (int i = 0; i < data.n_conditions(); ++i) {
        for (int k = 0; k < data.n_points(); ++k) {
          out << (j + 1) << ',' << (i + 1) << ',' << (k + 1) << ',';
          if (include_grid) out << format_double(points[static_cast<std::size_t>(k)]) << ',';
          out << format_double(data.value(j, i, k)) << '\n';
        }
      }
    }
  } else {
    out << "subject,condition";
    for (int k = 0; k < data.n_points(); ++k) out << ",v" << (k + 1);
    out << '\n';
    if (include_grid) {
      out << "grid,0";
      for (const double t : points) out << ',' << format_double(t);
      out << '\n';
    }
    for (int j = 0; j < data.n_subjects(); ++j) {
      for (int i = 0; i < data.n_conditions(); ++i) {
        out << (j + 1) << ',' << (i + 1);
        for (const double v : data.curve(j, i)) out << ',' << format_double(v);
        out << '\n';
      }
    }
  }
}

void write_dataset_csv(const std::filesystem::path& path, const FunctionalDataset& data,
                       CsvLayout layout, bool include_grid) {
  auto out = open_for_write(path);
  write_dataset_csv(out, data, layout, include_grid);
}

void write_trace_csv(std::ostream& out, const PointwiseTrace& ssa, const PointwiseTrace& ssr,
                     const PointwiseTrace& f) {
  if (!(ssa.grid == ssr.grid) || !(ssa.grid == f.grid)) {
    throw ValidationError("trace export needs all three traces on one grid");
  }
  out << "t,ssa,ssr,f\n";
  const auto& points = ssa.grid.points();
  for (std::size_t k = 0; k < points.size(); ++k) {
    out << format_double(points[k]) << ',' << format_double(ssa.values[k]) << ','
        << format_double(ssr.values[k]) << ',' << format_double(f.values[k]) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const PointwiseTrace& ssa,
                     const PointwiseTrace& ssr, const PointwiseTrace& f) {
  auto out = open_for_write(path);
  write_trace_csv(out, ssa, ssr, f);
}

void write_posthoc_csv(std::ostream& out, std::span<const PosthocReport> reports) {
  out << "statistic,method,pair,p_raw,p_adjusted,reject\n";
  for (const PosthocReport& report : reports) {
    for (const auto& pc : report.pairs) {
      out << to_string(report.statistic) << ',' << to_string(report.method) << ',' << pc.first
          << '-' << pc.second << ',' << format_double(pc.p_raw) << ','
          << format_double(pc.p_adjusted) << ',' << (pc.reject ? 1 : 0) << '\n';
    }
  }
}

void write_posthoc_csv(const std::filesystem::path& path,
                       std::span<const PosthocReport> reports) {
  auto out = open_for_write(path);
  write_posthoc_csv(out, reports);
}

}  // namespace frmanova
