#include "frmanova/pointwise.hpp"

#include <algorithm>
#include <limits>

#include "frmanova/errors.hpp"

namespace frmanova {
namespace detail {

void TraceWorkspace::resize(int n, int ell, int p) {
  cond_means.assign(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p), 0.0);
  subj_means.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(p), 0.0);
  grand.assign(static_cast<std::size_t>(p), 0.0);
  ssa.assign(static_cast<std::size_t>(p), 0.0);
  ssr.assign(static_cast<std::size_t>(p), 0.0);
  f.assign(static_cast<std::size_t>(p), 0.0);
  resid.assign(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p), 0.0);
  degenerate.clear();
}

void compute_means(const TensorView& v, TraceWorkspace& ws) {
  compute_means(v, ws.cond_means, ws.subj_means, ws.grand);
}

void compute_ssa(const TensorView& v, TraceWorkspace& ws) {
  const int ell = v.ell, p = v.p;
  const double n = static_cast<double>(v.n);
  std::fill(ws.ssa.begin(), ws.ssa.end(), 0.0);
  for (int i = 0; i < ell; ++i) {
    const double* cm = ws.cond_means.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
    for (int k = 0; k < p; ++k) {
      const double d = cm[k] - ws.grand[static_cast<std::size_t>(k)];
      ws.ssa[static_cast<std::size_t>(k)] += d * d;
    }
  }
  for (double& x : ws.ssa) x *= n;
}

void compute_ssa_centered(const TensorView& v, std::span<const double> source_cond_means,
                          std::span<const double> source_grand, TraceWorkspace& ws) {
  const int ell = v.ell, p = v.p;
  const double n = static_cast<double>(v.n);
  std::fill(ws.ssa.begin(), ws.ssa.end(), 0.0);
  for (int i = 0; i < ell; ++i) {
    const std::size_t off = static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
    for (int k = 0; k < p; ++k) {
      const std::size_t ik = off + static_cast<std::size_t>(k);
      const double d = (ws.cond_means[ik] - source_cond_means[ik]) -
                       (ws.grand[static_cast<std::size_t>(k)] - source_grand[static_cast<std::size_t>(k)]);
      ws.ssa[static_cast<std::size_t>(k)] += d * d;
    }
  }
  for (double& x : ws.ssa) x *= n;
}

void compute_ssr(const TensorView& v, TraceWorkspace& ws) {
  // Residual form of Y - cond mean - subject mean + grand: subtract each
  // condition mean first, then center the per-subject residuals across
  // conditions. Algebraically identical in a balanced design, and it keeps
  // the sum exactly zero when every condition sits on a single value (the
  // condition means are then exact, see compute_means).
  const int n = v.n, ell = v.ell, p = v.p;
  std::fill(ws.ssr.begin(), ws.ssr.end(), 0.0);
  double* e = ws.resid.data();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < ell; ++i) {
      const double* curve = v.curve(j, i);
      const double* cm = ws.cond_means.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
      double* row = e + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
      for (int k = 0; k < p; ++k) row[k] = curve[k] - cm[k];
    }
    for (int k = 0; k < p; ++k) {
      double bar = 0.0;
      for (int i = 0; i < ell; ++i) {
        bar += e[static_cast<std::size_t>(i) * static_cast<std::size_t>(p) + static_cast<std::size_t>(k)];
      }
      bar /= static_cast<double>(ell);
      double acc = 0.0;
      for (int i = 0; i < ell; ++i) {
        const double r =
            e[static_cast<std::size_t>(i) * static_cast<std::size_t>(p) + static_cast<std::size_t>(k)] - bar;
        acc += r * r;
      }
      ws.ssr[static_cast<std::size_t>(k)] += acc;
    }
  }
}

void compute_f(int n, int ell, TraceWorkspace& ws) {
  const int p = static_cast<int>(ws.f.size());
  const double num_df = static_cast<double>(ell - 1);
  const double den_df = static_cast<double>(ell - 1) * static_cast<double>(n - 1);
  ws.degenerate.clear();
  for (int k = 0; k < p; ++k) {
    const double ssa = ws.ssa[static_cast<std::size_t>(k)];
    const double ssr = ws.ssr[static_cast<std::size_t>(k)];
    if (ssr == 0.0) {
      // Exact comparison is deliberate: a constant-at-t sample produces an
      // exact zero, and only that case is treated specially.
      if (ssa == 0.0) {
        ws.f[static_cast<std::size_t>(k)] = 0.0;
      } else {
        ws.f[static_cast<std::size_t>(k)] = std::numeric_limits<double>::quiet_NaN();
        ws.degenerate.push_back(k);
      }
    } else {
      ws.f[static_cast<std::size_t>(k)] = (ssa / num_df) / (ssr / den_df);
    }
  }
}

}  // namespace detail

namespace {

detail::TraceWorkspace filled_workspace(const FunctionalDataset& data, bool need_ssr) {
  detail::TraceWorkspace ws;
  ws.resize(data.n_subjects(), data.n_conditions(), data.n_points());
  const detail::TensorView v = detail::view(data);
  detail::compute_means(v, ws);
  detail::compute_ssa(v, ws);
  if (need_ssr) detail::compute_ssr(v, ws);
  return ws;
}

}  // namespace

PointwiseTrace ssa_pointwise(const FunctionalDataset& data) {
  auto ws = filled_workspace(data, /*need_ssr=*/false);
  return {TraceKind::ssa, data.grid(), std::move(ws.ssa), {}};
}

PointwiseTrace ssr_pointwise(const FunctionalDataset& data) {
  auto ws = filled_workspace(data, /*need_ssr=*/true);
  return {TraceKind::ssr, data.grid(), std::move(ws.ssr), {}};
}

PointwiseTrace f_pointwise(const FunctionalDataset& data) {
  auto ws = filled_workspace(data, /*need_ssr=*/true);
  detail::compute_f(data.n_subjects(), data.n_conditions(), ws);
  return {TraceKind::f_stat, data.grid(), std::move(ws.f), std::move(ws.degenerate)};
}

}  // namespace frmanova
