#pragma once

#include <span>
#include <vector>

namespace frmanova {

/// Evaluation grid for one condition: strictly increasing design points in
/// [0, 1], at least two of them. Physical argument scales (e.g. positions
/// 1..93 along a tract) are mapped affinely onto [0, 1] at ingestion time.
class Grid {
public:
  explicit Grid(std::vector<double> points);

  /// p equally spaced points covering [0, 1], endpoints included.
  [[nodiscard]] static Grid equispaced(int p);

  [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
  [[nodiscard]] double point(int k) const { return points_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] std::span<const double> points() const noexcept { return points_; }

  [[nodiscard]] bool operator==(const Grid& other) const noexcept {
    return points_ == other.points_;
  }

private:
  std::vector<double> points_;
};

}  // namespace frmanova
