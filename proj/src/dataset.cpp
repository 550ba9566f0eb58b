#include "frmanova/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "frmanova/errors.hpp"

namespace frmanova {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw ValidationError("grid needs at least two design points");
  }
  for (std::size_t k = 0; k < points_.size(); ++k) {
    const double t = points_[k];
    if (!std::isfinite(t) || t < 0.0 || t > 1.0) {
      throw ValidationError("grid points must be finite and lie in [0, 1]");
    }
    if (k > 0 && !(points_[k - 1] < t)) {
      throw ValidationError("grid points must be strictly increasing");
    }
  }
}

Grid Grid::equispaced(int p) {
  if (p < 2) {
    throw ValidationError("grid needs at least two design points");
  }
  std::vector<double> points(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    points[static_cast<std::size_t>(k)] = static_cast<double>(k) / static_cast<double>(p - 1);
  }
  // Force exact endpoints; the division already gives 0 and 1 but the intent
  // matters when other code compares against them exactly.
  points.front() = 0.0;
  points.back() = 1.0;
  return Grid(std::move(points));
}

FunctionalDataset::FunctionalDataset(std::vector<double> values, Grid grid, int n_subjects,
                                     int n_conditions)
    : values_(std::move(values)),
      grid_(std::move(grid)),
      n_subjects_(n_subjects),
      n_conditions_(n_conditions) {
  if (n_subjects_ < 2) {
    throw ValidationError("dataset needs at least two subjects");
  }
  if (n_conditions_ < 2) {
    throw ValidationError("dataset needs at least two conditions");
  }
  const std::size_t expected = static_cast<std::size_t>(n_subjects_) *
                               static_cast<std::size_t>(n_conditions_) *
                               static_cast<std::size_t>(grid_.size());
  if (values_.size() != expected) {
    throw ValidationError("dataset values do not fill an n x ell x p tensor");
  }
  for (const double v : values_) {
    if (!std::isfinite(v)) {
      throw ValidationError("dataset values must all be finite");
    }
  }
}

namespace detail {

void compute_means(const TensorView& v, std::span<double> cond_means,
                   std::span<double> subj_means, std::span<double> grand) {
  const int n = v.n, ell = v.ell, p = v.p;
  std::fill(cond_means.begin(), cond_means.end(), 0.0);
  std::fill(subj_means.begin(), subj_means.end(), 0.0);

  // Single subject-major pass; the accumulation order is part of the
  // reproducibility contract.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < ell; ++i) {
      const double* curve = v.curve(j, i);
      double* cm = cond_means.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
      double* sm = subj_means.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(p);
      for (int k = 0; k < p; ++k) {
        cm[k] += curve[k];
        sm[k] += curve[k];
      }
    }
  }
  for (double& x : cond_means) x /= static_cast<double>(n);
  for (double& x : subj_means) x /= static_cast<double>(ell);

  // A condition that sits on one value at a point gets that exact value
  // back. The F degeneracy rules compare the sums of squares against exact
  // zero, so the mean of n identical values must not pick up summation
  // rounding (pinned-noise generators produce such columns routinely).
  for (int i = 0; i < ell; ++i) {
    double* cm = cond_means.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
    for (int k = 0; k < p; ++k) {
      const double first = v.at(0, i, k);
      bool constant = true;
      for (int j = 1; j < n; ++j) {
        if (v.at(j, i, k) != first) {
          constant = false;
          break;
        }
      }
      if (constant) cm[k] = first;
    }
  }

  // The design is balanced, so the grand mean is the mean of the condition
  // means; evaluating it that way (with the same exact-constant rule) makes
  // the between-condition sum of squares vanish exactly whenever all
  // condition means coincide.
  for (int k = 0; k < p; ++k) {
    const double first = cond_means[static_cast<std::size_t>(k)];
    double sum = first;
    bool constant = true;
    for (int i = 1; i < ell; ++i) {
      const double cm =
          cond_means[static_cast<std::size_t>(i) * static_cast<std::size_t>(p) +
                     static_cast<std::size_t>(k)];
      constant = constant && cm == first;
      sum += cm;
    }
    grand[static_cast<std::size_t>(k)] = constant ? first : sum / static_cast<double>(ell);
  }
}

}  // namespace detail

namespace {

void require_condition(const FunctionalDataset& data, int condition) {
  if (condition < 0 || condition >= data.n_conditions()) {
    throw ValidationError("condition index out of range");
  }
}

}  // namespace

std::vector<double> condition_mean(const FunctionalDataset& data, int condition) {
  require_condition(data, condition);
  const int p = data.n_points();
  std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < data.n_subjects(); ++j) {
    const auto curve = data.curve(j, condition);
    for (int k = 0; k < p; ++k) mean[static_cast<std::size_t>(k)] += curve[static_cast<std::size_t>(k)];
  }
  for (double& x : mean) x /= static_cast<double>(data.n_subjects());
  return mean;
}

std::vector<double> subject_mean(const FunctionalDataset& data, int subject) {
  if (subject < 0 || subject >= data.n_subjects()) {
    throw ValidationError("subject index out of range");
  }
  const int p = data.n_points();
  std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
  for (int i = 0; i < data.n_conditions(); ++i) {
    const auto curve = data.curve(subject, i);
    for (int k = 0; k < p; ++k) mean[static_cast<std::size_t>(k)] += curve[static_cast<std::size_t>(k)];
  }
  for (double& x : mean) x /= static_cast<double>(data.n_conditions());
  return mean;
}

std::vector<double> grand_mean(const FunctionalDataset& data) {
  const int p = data.n_points();
  std::vector<double> mean(static_cast<std::size_t>(p), 0.0);
  for (int j = 0; j < data.n_subjects(); ++j) {
    for (int i = 0; i < data.n_conditions(); ++i) {
      const auto curve = data.curve(j, i);
      for (int k = 0; k < p; ++k) mean[static_cast<std::size_t>(k)] += curve[static_cast<std::size_t>(k)];
    }
  }
  const double total = static_cast<double>(data.n_subjects()) * static_cast<double>(data.n_conditions());
  for (double& x : mean) x /= total;
  return mean;
}

std::vector<double> condition_means(const FunctionalDataset& data) {
  const int p = data.n_points();
  std::vector<double> means(static_cast<std::size_t>(data.n_conditions()) * static_cast<std::size_t>(p));
  for (int i = 0; i < data.n_conditions(); ++i) {
    const auto mean = condition_mean(data, i);
    std::copy(mean.begin(), mean.end(),
              means.begin() + static_cast<std::ptrdiff_t>(i) * static_cast<std::ptrdiff_t>(p));
  }
  return means;
}

}  // namespace frmanova
