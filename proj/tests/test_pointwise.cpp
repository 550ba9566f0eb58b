#include <cmath>
#include <vector>

#include "doctest.h"
#include "frmanova/errors.hpp"
#include "frmanova/pointwise.hpp"
#include "support/helpers.hpp"
#include "support/oracle.hpp"

using frmanova::f_pointwise;
using frmanova::ssa_pointwise;
using frmanova::ssr_pointwise;
using testutil::close_rel;
using testutil::make_dataset;

// Two subjects, two conditions, two points; condition means {0,0} and {2,2},
// grand mean 1, so SSA = 2 * ((0-1)^2 + (2-1)^2) = 4 at every point.
TEST_CASE("between-condition sum of squares: frozen hand example") {
  const auto d = make_dataset({0, 0, 2, 2, 0, 0, 2, 2}, 2, 2, 2);
  const auto trace = ssa_pointwise(d);
  REQUIRE(trace.values.size() == 2);
  for (double v : trace.values) CHECK(close_rel(v, 4.0));
  CHECK(close_rel(oracle::ssa_at(d, 0), 4.0));
}

// Subject 1 has (0, 2) across conditions, subject 2 has (1, 1); all four
// residuals are +-0.5, so SSR = 1 at every point, and with SSA = 1 the
// F ratio is (1/1) / (1/1) = 1.
TEST_CASE("residual sum of squares and F ratio: frozen hand example") {
  const auto d = make_dataset({0, 0, 2, 2, 1, 1, 1, 1}, 2, 2, 2);

  const auto ssr = ssr_pointwise(d);
  const auto ssa = ssa_pointwise(d);
  const auto f = f_pointwise(d);
  for (int k = 0; k < 2; ++k) {
    CHECK(close_rel(ssr.values[k], 1.0));
    CHECK(close_rel(ssa.values[k], 1.0));
    CHECK(close_rel(f.values[k], 1.0));
    CHECK(close_rel(oracle::ssr_at(d, k), 1.0));
    CHECK(close_rel(oracle::f_at(d, k), 1.0));
  }
  CHECK_FALSE(f.has_degenerate_points());
}

TEST_CASE("traces match the brute-force oracle on random data") {
  const auto d = testutil::random_dataset(2024, 9, 3, 17);
  const auto ssa = ssa_pointwise(d);
  const auto ssr = ssr_pointwise(d);
  const auto f = f_pointwise(d);
  for (int k = 0; k < d.n_points(); ++k) {
    CHECK(close_rel(ssa.values[k], oracle::ssa_at(d, k)));
    CHECK(close_rel(ssr.values[k], oracle::ssr_at(d, k)));
    CHECK(close_rel(f.values[k], oracle::f_at(d, k)));
  }
}

// Total centered sum of squares = SSA + ell * (between-subject SS) + SSR,
// pointwise. This ties all three mean layers together.
TEST_CASE("pointwise sum-of-squares decomposition") {
  const auto d = testutil::random_dataset(77, 8, 4, 11);
  const auto ssa = ssa_pointwise(d);
  const auto ssr = ssr_pointwise(d);
  const auto grand = frmanova::grand_mean(d);
  for (int k = 0; k < d.n_points(); ++k) {
    double total = 0.0, between_subject = 0.0;
    for (int j = 0; j < d.n_subjects(); ++j) {
      const double sm = frmanova::subject_mean(d, j)[k];
      between_subject += (sm - grand[k]) * (sm - grand[k]);
      for (int i = 0; i < d.n_conditions(); ++i) {
        const double r = d.value(j, i, k) - grand[k];
        total += r * r;
      }
    }
    const double rhs = ssa.values[k] + d.n_conditions() * between_subject + ssr.values[k];
    CHECK(close_rel(total, rhs));
  }
}

TEST_CASE("constant-at-a-point data: both sums zero gives F = 0") {
  const auto d = make_dataset(std::vector<double>(8, 3.25), 2, 2, 2);
  const auto f = f_pointwise(d);
  CHECK_FALSE(f.has_degenerate_points());
  for (double v : f.values) CHECK(v == 0.0);
}

// Identical subjects but different condition levels: residuals vanish while
// the condition contrast does not, so the F ratio is undefined.
TEST_CASE("degenerate points are flagged, not fabricated") {
  const auto d = make_dataset({0, 0, 2, 2, 0, 0, 2, 2}, 2, 2, 2);
  const auto f = f_pointwise(d);
  REQUIRE(f.has_degenerate_points());
  CHECK(f.degenerate_points == std::vector<int>{0, 1});
  for (double v : f.values) CHECK(std::isnan(v));
}

TEST_CASE("traces are invariant under subject relabeling") {
  const auto d = testutil::random_dataset(5150, 6, 3, 7);
  // Reverse the subject order.
  const int n = d.n_subjects(), ell = d.n_conditions(), p = d.n_points();
  std::vector<double> rev;
  for (int j = n - 1; j >= 0; --j) {
    const auto rec = d.subject_record(j);
    rev.insert(rev.end(), rec.begin(), rec.end());
  }
  const auto d2 = make_dataset(rev, n, ell, p);
  const auto a = ssa_pointwise(d), a2 = ssa_pointwise(d2);
  const auto r = ssr_pointwise(d), r2 = ssr_pointwise(d2);
  for (int k = 0; k < p; ++k) {
    CHECK(close_rel(a.values[k], a2.values[k]));
    CHECK(close_rel(r.values[k], r2.values[k]));
  }
}

// With two conditions, the pointwise F ratio collapses to the squared
// paired-t statistic of the condition differences.
TEST_CASE("two conditions reduce to the paired t statistic") {
  const auto d = testutil::random_dataset(31337, 12, 2, 9);
  const auto f = f_pointwise(d);
  for (int k = 0; k < d.n_points(); ++k) {
    CHECK(close_rel(f.values[k], oracle::paired_t_squared(d, k)));
  }
}
