#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "frmanova/dataset.hpp"
#include "frmanova/rng.hpp"

namespace testutil {

// |a - b| <= tol * max(1, |a|, |b|): relative comparison with an absolute
// floor so values near zero do not demand impossible precision.
inline bool close_rel(double a, double b, double tol = 1e-10) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Dataset with the given per-cell values, laid out (subject, condition, point).
inline frmanova::FunctionalDataset make_dataset(std::vector<double> values, int n, int ell,
                                                int p) {
  return frmanova::FunctionalDataset(std::move(values), frmanova::Grid::equispaced(p), n, ell);
}

// Deterministic rough-and-ready random dataset for property tests.
inline frmanova::FunctionalDataset random_dataset(std::uint64_t seed, int n, int ell, int p) {
  frmanova::RandomStream rng(seed);
  std::vector<double> values(static_cast<std::size_t>(n) * ell * p);
  for (double& v : values) v = 2.0 * rng.uniform01() - 1.0 + 0.25 * rng.normal();
  return make_dataset(std::move(values), n, ell, p);
}

}  // namespace testutil
