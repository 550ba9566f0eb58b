#pragma once

#include <span>
#include <vector>

#include "frmanova/grid.hpp"

namespace frmanova {

/// Functional sample from a one-way repeated measures design: n subjects,
/// each observed under all ell conditions, every curve discretized on the
/// same per-condition grid. A subject's record is the concatenation of its
/// ell condition curves.
///
/// Values are stored densely in (subject, condition, point) order, so one
/// subject's full concatenated record occupies ell*p contiguous doubles.
/// All values must be finite and every (subject, condition, point) cell
/// must be present; n >= 2 and ell >= 2.
class FunctionalDataset {
public:
  FunctionalDataset(std::vector<double> values, Grid grid, int n_subjects, int n_conditions);

  [[nodiscard]] int n_subjects() const noexcept { return n_subjects_; }
  [[nodiscard]] int n_conditions() const noexcept { return n_conditions_; }
  [[nodiscard]] int n_points() const noexcept { return grid_.size(); }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  [[nodiscard]] double value(int subject, int condition, int point) const noexcept {
    return values_[index(subject, condition, point)];
  }

  /// One condition curve of one subject: p contiguous values.
  [[nodiscard]] std::span<const double> curve(int subject, int condition) const noexcept {
    return {values_.data() + index(subject, condition, 0), static_cast<std::size_t>(n_points())};
  }

  /// A subject's full concatenated record: ell*p contiguous values.
  [[nodiscard]] std::span<const double> subject_record(int subject) const noexcept {
    return {values_.data() + index(subject, 0, 0),
            static_cast<std::size_t>(n_conditions_) * static_cast<std::size_t>(n_points())};
  }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

private:
  [[nodiscard]] std::size_t index(int subject, int condition, int point) const noexcept {
    return (static_cast<std::size_t>(subject) * static_cast<std::size_t>(n_conditions_) +
            static_cast<std::size_t>(condition)) *
               static_cast<std::size_t>(grid_.size()) +
           static_cast<std::size_t>(point);
  }

  std::vector<double> values_;
  Grid grid_;
  int n_subjects_;
  int n_conditions_;
};

/// Sample mean curve of one condition across subjects (p values).
[[nodiscard]] std::vector<double> condition_mean(const FunctionalDataset& data, int condition);

/// Mean of one subject's ell condition curves (p values).
[[nodiscard]] std::vector<double> subject_mean(const FunctionalDataset& data, int subject);

/// Mean over all n*ell curves (p values).
[[nodiscard]] std::vector<double> grand_mean(const FunctionalDataset& data);

/// All ell condition means, concatenated condition-major (ell*p values).
[[nodiscard]] std::vector<double> condition_means(const FunctionalDataset& data);

namespace detail {

/// Non-owning view of a dense (subject, condition, point) tensor. The
/// resampling engine computes on raw replicate buffers through this view so
/// the hot path and the public dataset operations share one implementation.
struct TensorView {
  const double* data;
  int n;    // subjects
  int ell;  // conditions
  int p;    // grid points

  [[nodiscard]] double at(int subject, int condition, int point) const noexcept {
    return data[(static_cast<std::size_t>(subject) * static_cast<std::size_t>(ell) +
                 static_cast<std::size_t>(condition)) *
                    static_cast<std::size_t>(p) +
                static_cast<std::size_t>(point)];
  }

  [[nodiscard]] const double* curve(int subject, int condition) const noexcept {
    return data + (static_cast<std::size_t>(subject) * static_cast<std::size_t>(ell) +
                   static_cast<std::size_t>(condition)) *
                      static_cast<std::size_t>(p);
  }

  [[nodiscard]] std::size_t size() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(ell) *
           static_cast<std::size_t>(p);
  }
};

[[nodiscard]] inline TensorView view(const FunctionalDataset& data) noexcept {
  return {data.values().data(), data.n_subjects(), data.n_conditions(), data.n_points()};
}

/// Accumulates condition means (ell*p), subject means (n*p) and the grand
/// mean (p) in one subject-major pass; output buffers must be pre-sized.
void compute_means(const TensorView& v, std::span<double> cond_means,
                   std::span<double> subj_means, std::span<double> grand);

}  // namespace detail

}  // namespace frmanova
