#include "frmanova/resampling.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "frmanova/errors.hpp"
#include "frmanova/parallel.hpp"

namespace frmanova {

const char* to_string(ResamplingMethod method) noexcept {
  switch (method) {
    case ResamplingMethod::P1: return "P1";
    case ResamplingMethod::P2: return "P2";
    case ResamplingMethod::B1: return "B1";
    case ResamplingMethod::B2: return "B2";
    case ResamplingMethod::B3: return "B3";
  }
  return "?";
}

ResamplingMethod parse_resampling_method(const std::string& name) {
  if (name == "P1") return ResamplingMethod::P1;
  if (name == "P2") return ResamplingMethod::P2;
  if (name == "B1") return ResamplingMethod::B1;
  if (name == "B2") return ResamplingMethod::B2;
  if (name == "B3") return ResamplingMethod::B3;
  throw ValidationError("unknown resampling method '" + name +
                        "' (expected P1, P2, B1, B2 or B3)");
}

namespace {

using detail::TensorView;

std::size_t curve_bytes(int p) { return static_cast<std::size_t>(p) * sizeof(double); }

// Per subject, deal that subject's ell curves into a fresh uniform order.
void fill_p1(const TensorView& src, RandomStream& rng, double* out, std::span<int> perm) {
  const int n = src.n, ell = src.ell, p = src.p;
  for (int j = 0; j < n; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    double* dst = out + static_cast<std::size_t>(j) * static_cast<std::size_t>(ell) *
                            static_cast<std::size_t>(p);
    for (int i = 0; i < ell; ++i) {
      std::memcpy(dst + static_cast<std::size_t>(i) * static_cast<std::size_t>(p),
                  src.curve(j, perm[static_cast<std::size_t>(i)]), curve_bytes(p));
    }
  }
}

// Uniform permutation of all N = n*ell curves, dealt back into the cells.
void fill_p2(const TensorView& src, RandomStream& rng, double* out, std::span<int> perm) {
  const int n = src.n, ell = src.ell, p = src.p;
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  for (int cell = 0; cell < n * ell; ++cell) {
    const int from = perm[static_cast<std::size_t>(cell)];
    std::memcpy(out + static_cast<std::size_t>(cell) * static_cast<std::size_t>(p),
                src.curve(from / ell, from % ell), curve_bytes(p));
  }
}

// n whole records drawn with replacement.
void fill_b1(const TensorView& src, RandomStream& rng, double* out) {
  const int n = src.n, ell = src.ell, p = src.p;
  const std::size_t record = static_cast<std::size_t>(ell) * static_cast<std::size_t>(p);
  for (int j = 0; j < n; ++j) {
    const int pick = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
    std::memcpy(out + static_cast<std::size_t>(j) * record, src.curve(pick, 0),
                record * sizeof(double));
  }
}

// Cell (j, i) drawn from the n centered curves of condition i, independently
// across cells; `centered` is the pre-centered source tensor.
void fill_b2(const TensorView& centered, RandomStream& rng, double* out) {
  const int n = centered.n, ell = centered.ell, p = centered.p;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < ell; ++i) {
      const int pick = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n)));
      std::memcpy(out + (static_cast<std::size_t>(j) * static_cast<std::size_t>(ell) +
                         static_cast<std::size_t>(i)) *
                            static_cast<std::size_t>(p),
                  centered.curve(pick, i), curve_bytes(p));
    }
  }
}

// Columns of Z are filled coordinate-major per subject so the draw order is
// part of the determinism contract, then Y = L Z in one triangular product.
void fill_gaussian(const Eigen::MatrixXd& lower, int n, RandomStream& rng, double* out,
                   Eigen::MatrixXd& z, Eigen::MatrixXd& y) {
  const auto dim = lower.rows();
  z.resize(dim, n);
  y.resize(dim, n);
  for (int j = 0; j < n; ++j) {
    for (Eigen::Index d = 0; d < dim; ++d) z(d, j) = rng.normal();
  }
  y.noalias() = lower.triangularView<Eigen::Lower>() * z;
  for (int j = 0; j < n; ++j) {
    std::memcpy(out + static_cast<std::size_t>(j) * static_cast<std::size_t>(dim),
                y.col(j).data(), static_cast<std::size_t>(dim) * sizeof(double));
  }
}

// Everything a replicate worker needs that is shared read-only.
struct MethodContext {
  ResamplingMethod method;
  TensorView src;
  std::vector<double> src_cond_means;  // B1 centering
  std::vector<double> src_grand;       // B1 centering
  std::vector<double> centered;        // B2 source tensor
  Eigen::MatrixXd lower;               // B3 factor
};

MethodContext prepare_context(const FunctionalDataset& data, ResamplingMethod method) {
  MethodContext ctx;
  ctx.method = method;
  ctx.src = detail::view(data);
  const int n = data.n_subjects(), ell = data.n_conditions(), p = data.n_points();

  switch (method) {
    case ResamplingMethod::P1:
    case ResamplingMethod::P2:
      break;
    case ResamplingMethod::B1: {
      ctx.src_cond_means.resize(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p));
      std::vector<double> subj(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
      ctx.src_grand.resize(static_cast<std::size_t>(p));
      detail::compute_means(ctx.src, ctx.src_cond_means, subj, ctx.src_grand);
      break;
    }
    case ResamplingMethod::B2: {
      std::vector<double> cond(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p));
      std::vector<double> subj(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
      std::vector<double> grand(static_cast<std::size_t>(p));
      detail::compute_means(ctx.src, cond, subj, grand);
      ctx.centered.resize(ctx.src.size());
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < ell; ++i) {
          const double* curve = ctx.src.curve(j, i);
          const double* cm = cond.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
          double* dst = ctx.centered.data() +
                        (static_cast<std::size_t>(j) * static_cast<std::size_t>(ell) +
                         static_cast<std::size_t>(i)) *
                            static_cast<std::size_t>(p);
          for (int k = 0; k < p; ++k) dst[k] = curve[k] - cm[k];
        }
      }
      break;
    }
    case ResamplingMethod::B3: {
      GaussianProcessSampler sampler(estimate_covariance(data));
      ctx.lower = sampler.factor();
      break;
    }
  }
  return ctx;
}

// Fill one replicate of ctx into out using the replicate's private stream.
void fill_replicate(const MethodContext& ctx, RandomStream& rng, double* out,
                    std::span<int> perm, Eigen::MatrixXd& z, Eigen::MatrixXd& y) {
  switch (ctx.method) {
    case ResamplingMethod::P1:
      fill_p1(ctx.src, rng, out, perm.subspan(0, static_cast<std::size_t>(ctx.src.ell)));
      break;
    case ResamplingMethod::P2:
      fill_p2(ctx.src, rng, out, perm);
      break;
    case ResamplingMethod::B1:
      fill_b1(ctx.src, rng, out);
      break;
    case ResamplingMethod::B2: {
      const TensorView centered{ctx.centered.data(), ctx.src.n, ctx.src.ell, ctx.src.p};
      fill_b2(centered, rng, out);
      break;
    }
    case ResamplingMethod::B3:
      fill_gaussian(ctx.lower, ctx.src.n, rng, out, z, y);
      break;
  }
}

FunctionalDataset dataset_like(const FunctionalDataset& reference, std::vector<double> values) {
  return FunctionalDataset(std::move(values), reference.grid(), reference.n_subjects(),
                           reference.n_conditions());
}

}  // namespace

FunctionalDataset resample_P1(const FunctionalDataset& data, RandomStream& rng) {
  std::vector<double> out(data.values().size());
  std::vector<int> perm(static_cast<std::size_t>(data.n_conditions()));
  fill_p1(detail::view(data), rng, out.data(), perm);
  return dataset_like(data, std::move(out));
}

FunctionalDataset resample_P2(const FunctionalDataset& data, RandomStream& rng) {
  std::vector<double> out(data.values().size());
  std::vector<int> perm(static_cast<std::size_t>(data.n_subjects()) *
                        static_cast<std::size_t>(data.n_conditions()));
  fill_p2(detail::view(data), rng, out.data(), perm);
  return dataset_like(data, std::move(out));
}

FunctionalDataset resample_B1(const FunctionalDataset& data, RandomStream& rng) {
  std::vector<double> out(data.values().size());
  fill_b1(detail::view(data), rng, out.data());
  return dataset_like(data, std::move(out));
}

PointwiseTrace ssa_pointwise_B1(const FunctionalDataset& boot, const FunctionalDataset& original) {
  if (boot.n_subjects() != original.n_subjects() ||
      boot.n_conditions() != original.n_conditions() || !(boot.grid() == original.grid())) {
    throw ValidationError("bootstrap sample and original data must share n, ell and grid");
  }
  const int n = boot.n_subjects(), ell = boot.n_conditions(), p = boot.n_points();

  detail::TraceWorkspace ws;
  ws.resize(n, ell, p);
  detail::compute_means(detail::view(boot), ws);

  std::vector<double> src_cond(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p));
  std::vector<double> src_subj(static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
  std::vector<double> src_grand(static_cast<std::size_t>(p));
  detail::compute_means(detail::view(original), src_cond, src_subj, src_grand);

  detail::compute_ssa_centered(detail::view(boot), src_cond, src_grand, ws);
  return {TraceKind::ssa, boot.grid(), std::move(ws.ssa), {}};
}

FunctionalDataset resample_B2(const FunctionalDataset& data, RandomStream& rng) {
  const MethodContext ctx = prepare_context(data, ResamplingMethod::B2);
  std::vector<double> out(data.values().size());
  const TensorView centered{ctx.centered.data(), ctx.src.n, ctx.src.ell, ctx.src.p};
  fill_b2(centered, rng, out.data());
  return dataset_like(data, std::move(out));
}

CovarianceEstimate estimate_covariance(const FunctionalDataset& data) {
  const int n = data.n_subjects(), ell = data.n_conditions(), p = data.n_points();
  const int dim = ell * p;

  // Rows of X are the subject records minus the mean record (the
  // concatenated condition means).
  const std::vector<double> mean_record = condition_means(data);
  Eigen::MatrixXd x(n, dim);
  for (int j = 0; j < n; ++j) {
    const auto record = data.subject_record(j);
    for (int d = 0; d < dim; ++d) {
      x(j, d) = record[static_cast<std::size_t>(d)] - mean_record[static_cast<std::size_t>(d)];
    }
  }

  Eigen::MatrixXd cov(dim, dim);
  cov.noalias() = x.transpose() * x / static_cast<double>(n - 1);
  // The product is symmetric up to rounding; make it exact so downstream
  // factorizations see a clean input.
  cov = 0.5 * (cov + cov.transpose()).eval();
  return CovarianceEstimate{std::move(cov), 0.0, data.grid(), ell};
}

GaussianProcessSampler::GaussianProcessSampler(CovarianceEstimate cov) : cov_(std::move(cov)) {
  const Eigen::Index dim = cov_.matrix.rows();
  if (dim == 0 || cov_.matrix.cols() != dim) {
    throw ValidationError("covariance matrix must be square and non-empty");
  }

  if (cov_.matrix.isZero(0.0)) {
    // Degenerate but legitimate: all draws are exactly zero.
    lower_ = Eigen::MatrixXd::Zero(dim, dim);
    cov_.jitter_applied = 0.0;
    return;
  }

  const double scale = cov_.matrix.trace() / static_cast<double>(dim);
  double delta = 0.0;
  for (;;) {
    Eigen::MatrixXd attempt = cov_.matrix;
    if (delta > 0.0) attempt.diagonal().array() += delta;
    const Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success) {
      lower_ = llt.matrixL();
      cov_.jitter_applied = delta;
      return;
    }
    if (scale <= 0.0) break;  // nothing sensible to escalate with
    if (delta == 0.0) {
      delta = 1e-12 * scale;
    } else if (delta < 0.99e-6 * scale) {
      delta *= 10.0;
    } else {
      break;
    }
  }
  throw NumericalError(
      "covariance factorization failed even with maximum diagonal regularization");
}

FunctionalDataset GaussianProcessSampler::draw(int n, RandomStream& rng) const {
  if (n < 2) {
    throw ValidationError("at least two subjects required");
  }
  const int ell = cov_.n_conditions;
  const int p = cov_.grid.size();
  std::vector<double> out(static_cast<std::size_t>(n) * static_cast<std::size_t>(ell) *
                          static_cast<std::size_t>(p));
  draw_into(n, rng, out);
  return FunctionalDataset(std::move(out), cov_.grid, n, ell);
}

void GaussianProcessSampler::draw_into(int n, RandomStream& rng, std::span<double> out) const {
  Eigen::MatrixXd z, y;
  fill_gaussian(lower_, n, rng, out.data(), z, y);
}

FunctionalDataset resample_B3(const CovarianceEstimate& cov, int n, RandomStream& rng) {
  const GaussianProcessSampler sampler(cov);
  return sampler.draw(n, rng);
}

TestResult run_test(const FunctionalDataset& data, StatisticKind statistic,
                    ResamplingMethod method, int B, std::uint64_t seed, int threads) {
  const StatisticKind one[] = {statistic};
  return std::move(run_tests(data, one, method, B, seed, threads).front());
}

std::vector<TestResult> run_tests(const FunctionalDataset& data,
                                  std::span<const StatisticKind> statistics,
                                  ResamplingMethod method, int B, std::uint64_t seed,
                                  int threads) {
  if (B < 1) throw ValidationError("B must be at least 1");
  if (statistics.empty()) throw ValidationError("at least one statistic required");

  const int n = data.n_subjects(), ell = data.n_conditions(), p = data.n_points();
  const std::span<const double> grid_points = data.grid().points();
  bool need_f = false;
  for (const StatisticKind s : statistics) {
    need_f = need_f || s == StatisticKind::D || s == StatisticKind::E;
  }

  // Observed statistics use the ordinary formulas for every method.
  detail::TraceWorkspace observed_ws;
  observed_ws.resize(n, ell, p);
  const detail::TensorView src = detail::view(data);
  detail::compute_means(src, observed_ws);
  detail::compute_ssa(src, observed_ws);
  if (need_f) {
    detail::compute_ssr(src, observed_ws);
    detail::compute_f(n, ell, observed_ws);
    if (!observed_ws.degenerate.empty()) {
      throw DegeneracyError("pointwise F ratio of the observed data is undefined at " +
                            std::to_string(observed_ws.degenerate.size()) +
                            " grid point(s); statistics D and E are unavailable");
    }
  }
  std::vector<double> observed(statistics.size());
  for (std::size_t s = 0; s < statistics.size(); ++s) {
    observed[s] = detail::statistic_from_workspace(statistics[s], grid_points, observed_ws);
  }

  const MethodContext ctx = prepare_context(data, method);
  const bool centered_ssa = method == ResamplingMethod::B1;

  std::vector<double> replicate_values(statistics.size() * static_cast<std::size_t>(B));
  parallel_for(B, threads, [&](int begin, int end, int) {
    detail::TraceWorkspace ws;
    ws.resize(n, ell, p);
    std::vector<double> buffer(ctx.src.size());
    std::vector<int> perm(static_cast<std::size_t>(n) * static_cast<std::size_t>(ell));
    Eigen::MatrixXd z, y;

    for (int b = begin; b < end; ++b) {
      RandomStream rng(derive_seed(seed, StreamLabel::replicate, static_cast<std::uint64_t>(b)));
      fill_replicate(ctx, rng, buffer.data(), perm, z, y);
      const detail::TensorView rv{buffer.data(), n, ell, p};

      detail::compute_means(rv, ws);
      if (centered_ssa) {
        detail::compute_ssa_centered(rv, ctx.src_cond_means, ctx.src_grand, ws);
      } else {
        detail::compute_ssa(rv, ws);
      }
      if (need_f) {
        detail::compute_ssr(rv, ws);
        detail::compute_f(n, ell, ws);
        if (!ws.degenerate.empty()) {
          throw DegeneracyError("pointwise F ratio of replicate " + std::to_string(b) +
                                " is undefined at " + std::to_string(ws.degenerate.size()) +
                                " grid point(s)");
        }
      }
      for (std::size_t s = 0; s < statistics.size(); ++s) {
        replicate_values[s * static_cast<std::size_t>(B) + static_cast<std::size_t>(b)] =
            detail::statistic_from_workspace(statistics[s], grid_points, ws);
      }
    }
  });

  std::vector<TestResult> results;
  results.reserve(statistics.size());
  for (std::size_t s = 0; s < statistics.size(); ++s) {
    const auto first = replicate_values.begin() + static_cast<std::ptrdiff_t>(s * static_cast<std::size_t>(B));
    std::vector<double> resampled(first, first + B);
    int exceed = 0;
    for (const double v : resampled) {
      if (v > observed[s]) ++exceed;
    }
    results.push_back(TestResult{statistics[s], method, observed[s], std::move(resampled),
                                 static_cast<double>(exceed) / static_cast<double>(B), B, seed});
  }
  return results;
}

}  // namespace frmanova
