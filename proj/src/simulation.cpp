#include "frmanova/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "frmanova/errors.hpp"
#include "frmanova/parallel.hpp"
#include "frmanova/posthoc.hpp"

namespace frmanova {

const char* to_string(MeanModel model) noexcept {
  switch (model) {
    case MeanModel::M1: return "M1";
    case MeanModel::M2: return "M2";
    case MeanModel::M3: return "M3";
    case MeanModel::M4: return "M4";
    case MeanModel::M5: return "M5";
    case MeanModel::M6: return "M6";
  }
  return "?";
}

MeanModel parse_mean_model(const std::string& name) {
  if (name == "M1") return MeanModel::M1;
  if (name == "M2") return MeanModel::M2;
  if (name == "M3") return MeanModel::M3;
  if (name == "M4") return MeanModel::M4;
  if (name == "M5") return MeanModel::M5;
  if (name == "M6") return MeanModel::M6;
  throw ValidationError("unknown model '" + name + "' (expected M1..M6)");
}

const char* to_string(GpMarginal marginal) noexcept {
  switch (marginal) {
    case GpMarginal::normal: return "normal";
    case GpMarginal::student_t5: return "t5";
    case GpMarginal::chi_squared10: return "chisq10";
  }
  return "?";
}

namespace {

// Integer powers by multiplication: exact sign handling for negative bases.
double pow5(double x) {
  const double x2 = x * x;
  return x2 * x2 * x;
}
double pow3(double x) { return x * x * x; }
double pow7(double x) {
  const double x2 = x * x;
  return x2 * x2 * x2 * x;
}

double sine_hump(double t) {
  // sin(2*pi*x) with the argument reduced to [-1/2, 1/2] first. The
  // reduction keeps the structural zero at t = 1 exact; the raw product
  // 2*pi*1 is off by the rounding of pi, and a not-exactly-zero mean at a
  // noise-free grid point corrupts the F degeneracy bookkeeping.
  const double x = t * t;
  return std::sin(2.0 * std::numbers::pi * (x - std::round(x)));
}
double gamma_hump(double t) { return std::sqrt(6.0 * t / std::numbers::pi) * std::exp(-6.0 * t); }

}  // namespace

double mean_function(MeanModel model, int condition, double t) {
  if (condition < 1 || condition > 3) {
    throw ValidationError("condition must be 1, 2 or 3 for the synthetic models");
  }
  if (!(t >= 0.0 && t <= 1.0)) {
    throw ValidationError("t must lie in [0, 1]");
  }
  const bool third = condition == 3;
  switch (model) {
    case MeanModel::M1: return pow5(sine_hump(t));
    case MeanModel::M2: return third ? pow7(sine_hump(t)) : pow5(sine_hump(t));
    case MeanModel::M3: return third ? pow3(sine_hump(t)) : pow5(sine_hump(t));
    case MeanModel::M4: return gamma_hump(t);
    case MeanModel::M5:
      return third ? std::sqrt(13.0 * t / (2.0 * std::numbers::pi)) * std::exp(-13.0 * t / 2.0)
                   : gamma_hump(t);
    case MeanModel::M6:
      return third ? std::sqrt(11.0 * t / (2.0 * std::numbers::pi)) * std::exp(-11.0 * t / 2.0)
                   : gamma_hump(t);
  }
  throw ValidationError("unknown model");
}

double SimulationSpec::default_xi(MeanModel model) noexcept {
  switch (model) {
    case MeanModel::M1:
    case MeanModel::M2:
    case MeanModel::M3: return 0.5;
    case MeanModel::M4:
    case MeanModel::M5:
    case MeanModel::M6: return 0.05;
  }
  return 0.5;
}

double SimulationSpec::effective_xi() const noexcept { return xi ? *xi : default_xi(model); }

void SimulationSpec::validate() const {
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("rho must lie in [0, 1)");
  if (!(effective_xi() > 0.0)) throw ValidationError("xi must be positive");
  if (n < 2) throw ValidationError("n must be at least 2");
  if (p < 2) throw ValidationError("p must be at least 2");
  if (B < 1) throw ValidationError("B must be at least 1");
  if (n_runs < 1) throw ValidationError("runs must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
}

BrownianBridgeSampler::BrownianBridgeSampler(const Grid& grid) : grid_(grid) {
  for (int k = 0; k < grid_.size(); ++k) {
    const double t = grid_.point(k);
    if (t > 0.0 && t < 1.0) interior_.push_back(k);
  }
  const int m = static_cast<int>(interior_.size());
  if (m == 0) {
    lower_.resize(0, 0);
    return;
  }
  Eigen::MatrixXd cov(m, m);
  for (int a = 0; a < m; ++a) {
    const double s = grid_.point(interior_[static_cast<std::size_t>(a)]);
    for (int b = 0; b < m; ++b) {
      const double t = grid_.point(interior_[static_cast<std::size_t>(b)]);
      cov(a, b) = std::min(s, t) - s * t;
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Brownian bridge covariance factorization failed");
  }
  lower_ = llt.matrixL();
}

void BrownianBridgeSampler::draw(RandomStream& rng, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const Eigen::Index m = lower_.rows();
  if (m == 0) return;
  Eigen::VectorXd z(m);
  for (Eigen::Index d = 0; d < m; ++d) z(d) = rng.normal();
  const Eigen::VectorXd y = lower_.triangularView<Eigen::Lower>() * z;
  for (Eigen::Index a = 0; a < m; ++a) {
    out[static_cast<std::size_t>(interior_[static_cast<std::size_t>(a)])] = y(a);
  }
}

std::vector<double> brownian_bridge(const Grid& grid, RandomStream& rng) {
  const BrownianBridgeSampler sampler(grid);
  std::vector<double> out(static_cast<std::size_t>(grid.size()));
  sampler.draw(rng, out);
  return out;
}

namespace {

// One fully prepared model configuration: grid, bridge factor, mean
// surfaces and (for the lognormal law) the exact recentering curve. Built
// once per worker and reused across that worker's runs.
class ModelGenerator {
public:
  explicit ModelGenerator(const SimulationSpec& spec)
      : spec_(spec), grid_(Grid::equispaced(spec.p)), bridge_(grid_) {
    spec_.validate();
    const int p = spec_.p;
    means_.resize(3u * static_cast<std::size_t>(p));
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < p; ++k) {
        means_[static_cast<std::size_t>(i * p + k)] =
            mean_function(spec_.model, i + 1, grid_.point(k));
      }
    }
    if (spec_.distribution == ErrorLaw::lognormal) {
      const double xi = spec_.effective_xi();
      recenter_.resize(static_cast<std::size_t>(p));
      for (int k = 0; k < p; ++k) {
        const double t = grid_.point(k);
        recenter_[static_cast<std::size_t>(k)] = std::exp(0.5 * xi * xi * t * (1.0 - t));
      }
    }
  }

  [[nodiscard]] const std::vector<double>& mean_surfaces() const noexcept { return means_; }
  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }

  void errors_into(RandomStream& rng, std::span<double> out) const {
    const int n = spec_.n, p = spec_.p;
    const double xi = spec_.effective_xi();
    const double rho = spec_.rho;
    const double fresh = xi * std::sqrt(1.0 - rho * rho);
    std::vector<double> bridge(static_cast<std::size_t>(p));
    for (int j = 0; j < n; ++j) {
      double* record = out.data() + static_cast<std::size_t>(j) * 3u * static_cast<std::size_t>(p);
      double* e1 = record;
      double* e2 = record + p;
      double* e3 = record + 2 * p;
      bridge_.draw(rng, bridge);
      for (int k = 0; k < p; ++k) e1[k] = xi * bridge[static_cast<std::size_t>(k)];
      bridge_.draw(rng, bridge);
      for (int k = 0; k < p; ++k) e2[k] = rho * e1[k] + fresh * bridge[static_cast<std::size_t>(k)];
      bridge_.draw(rng, bridge);
      for (int k = 0; k < p; ++k) e3[k] = rho * e2[k] + fresh * bridge[static_cast<std::size_t>(k)];
      if (spec_.distribution == ErrorLaw::lognormal) {
        for (int i = 0; i < 3; ++i) {
          double* block = record + static_cast<std::size_t>(i) * static_cast<std::size_t>(p);
          for (int k = 0; k < p; ++k) {
            block[k] = std::exp(block[k]) - recenter_[static_cast<std::size_t>(k)];
          }
        }
      }
    }
  }

  [[nodiscard]] FunctionalDataset generate(RandomStream& rng) const {
    const int n = spec_.n, p = spec_.p;
    std::vector<double> values(static_cast<std::size_t>(n) * 3u * static_cast<std::size_t>(p));
    errors_into(rng, values);
    for (int j = 0; j < n; ++j) {
      double* record = values.data() + static_cast<std::size_t>(j) * 3u * static_cast<std::size_t>(p);
      for (std::size_t d = 0; d < means_.size(); ++d) record[d] += means_[d];
    }
    return FunctionalDataset(std::move(values), grid_, n, 3);
  }

private:
  SimulationSpec spec_;
  Grid grid_;
  BrownianBridgeSampler bridge_;
  std::vector<double> means_;
  std::vector<double> recenter_;
};

std::uint64_t method_tag(ResamplingMethod method) {
  return static_cast<std::uint64_t>(method) + 1;
}

// Factory so each worker can build its own generator (the factorizations
// are cheap next to the runs and the draws depend only on the run stream).
using RunSampler = std::function<FunctionalDataset(RandomStream&)>;
using SamplerFactory = std::function<RunSampler()>;

SimulationSummary run_global_study(const SamplerFactory& factory, int n_runs, int B, double alpha,
                                   std::uint64_t seed,
                                   std::span<const StatisticKind> statistics,
                                   std::span<const ResamplingMethod> methods, int threads) {
  if (statistics.empty() || methods.empty()) {
    throw ValidationError("at least one statistic and one method required");
  }
  const std::size_t S = statistics.size(), M = methods.size();
  std::vector<std::uint8_t> rejected(static_cast<std::size_t>(n_runs) * S * M, 0);

  parallel_for(n_runs, threads, [&](int begin, int end, int) {
    const RunSampler sample = factory();
    for (int r = begin; r < end; ++r) {
      RandomStream rng(derive_seed(seed, StreamLabel::run, static_cast<std::uint64_t>(r)));
      const FunctionalDataset data = sample(rng);
      for (std::size_t mi = 0; mi < M; ++mi) {
        const std::uint64_t test_seed =
            derive_seed(seed, StreamLabel::test, static_cast<std::uint64_t>(r),
                        method_tag(methods[mi]));
        const std::vector<TestResult> results =
            run_tests(data, statistics, methods[mi], B, test_seed, 1);
        for (std::size_t si = 0; si < S; ++si) {
          rejected[(static_cast<std::size_t>(r) * S + si) * M + mi] =
              results[si].p_value <= alpha ? 1 : 0;
        }
      }
    }
  });

  SimulationSummary summary{{}, n_runs, B, alpha, seed};
  for (std::size_t si = 0; si < S; ++si) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      long long count = 0;
      for (int r = 0; r < n_runs; ++r) {
        count += rejected[(static_cast<std::size_t>(r) * S + si) * M + mi];
      }
      const double rate = static_cast<double>(count) / static_cast<double>(n_runs);
      summary.cells.push_back(SimulationSummary::Cell{
          statistics[si], methods[mi], rate,
          std::sqrt(rate * (1.0 - rate) / static_cast<double>(n_runs)), std::nullopt, {}});
    }
  }
  return summary;
}

SimulationSummary run_pairwise_study(const SamplerFactory& factory, int n_runs, int B,
                                     double alpha, std::uint64_t seed,
                                     std::span<const StatisticKind> statistics,
                                     std::span<const ResamplingMethod> methods,
                                     const std::vector<ConditionPair>& pairs,
                                     const std::vector<bool>& true_null, int threads) {
  if (statistics.empty() || methods.empty()) {
    throw ValidationError("at least one statistic and one method required");
  }
  const std::size_t S = statistics.size(), M = methods.size(), P = pairs.size();
  std::vector<std::uint8_t> pair_rejected(static_cast<std::size_t>(n_runs) * S * M * P, 0);

  parallel_for(n_runs, threads, [&](int begin, int end, int) {
    const RunSampler sample = factory();
    for (int r = begin; r < end; ++r) {
      RandomStream rng(derive_seed(seed, StreamLabel::run, static_cast<std::uint64_t>(r)));
      const FunctionalDataset data = sample(rng);
      for (std::size_t mi = 0; mi < M; ++mi) {
        const std::uint64_t test_seed =
            derive_seed(seed, StreamLabel::test, static_cast<std::uint64_t>(r),
                        method_tag(methods[mi]));
        const std::vector<PosthocReport> reports =
            run_posthoc_multi(data, statistics, methods[mi], B, alpha, test_seed, pairs, 1);
        for (std::size_t si = 0; si < S; ++si) {
          for (std::size_t pi = 0; pi < P; ++pi) {
            pair_rejected[((static_cast<std::size_t>(r) * S + si) * M + mi) * P + pi] =
                reports[si].pairs[pi].reject ? 1 : 0;
          }
        }
      }
    }
  });

  const bool any_true_null = std::any_of(true_null.begin(), true_null.end(),
                                         [](bool b) { return b; });

  SimulationSummary summary{{}, n_runs, B, alpha, seed};
  for (std::size_t si = 0; si < S; ++si) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      long long any_count = 0, tn_count = 0;
      std::vector<long long> per_pair(P, 0);
      for (int r = 0; r < n_runs; ++r) {
        bool any = false, tn = false;
        for (std::size_t pi = 0; pi < P; ++pi) {
          const bool rej =
              pair_rejected[((static_cast<std::size_t>(r) * S + si) * M + mi) * P + pi] != 0;
          any = any || rej;
          tn = tn || (rej && true_null[pi]);
          per_pair[pi] += rej ? 1 : 0;
        }
        any_count += any ? 1 : 0;
        tn_count += tn ? 1 : 0;
      }
      const double rate = static_cast<double>(any_count) / static_cast<double>(n_runs);
      SimulationSummary::Cell cell{
          statistics[si], methods[mi], rate,
          std::sqrt(rate * (1.0 - rate) / static_cast<double>(n_runs)), std::nullopt, {}};
      if (any_true_null) {
        cell.fwer = static_cast<double>(tn_count) / static_cast<double>(n_runs);
      }
      for (std::size_t pi = 0; pi < P; ++pi) {
        cell.per_pair.push_back(SimulationSummary::PairRate{
            pairs[pi].first, pairs[pi].second,
            static_cast<double>(per_pair[pi]) / static_cast<double>(n_runs)});
      }
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

// True-null pairs are exactly those whose mean surfaces coincide.
std::vector<bool> true_null_mask(const std::vector<ConditionPair>& pairs,
                                 std::span<const double> mean_record, int p) {
  std::vector<bool> mask;
  mask.reserve(pairs.size());
  for (const auto& [r, s] : pairs) {
    bool equal = true;
    for (int k = 0; k < p && equal; ++k) {
      equal = mean_record[static_cast<std::size_t>((r - 1) * p + k)] ==
              mean_record[static_cast<std::size_t>((s - 1) * p + k)];
    }
    mask.push_back(equal);
  }
  return mask;
}

}  // namespace

std::vector<double> generate_errors(const SimulationSpec& spec, RandomStream& rng) {
  const ModelGenerator generator(spec);
  std::vector<double> out(static_cast<std::size_t>(spec.n) * 3u *
                          static_cast<std::size_t>(spec.p));
  generator.errors_into(rng, out);
  return out;
}

FunctionalDataset generate_dataset(const SimulationSpec& spec, RandomStream& rng) {
  return ModelGenerator(spec).generate(rng);
}

SimulationSummary estimate_rejection_rates(const SimulationSpec& spec,
                                           std::span<const StatisticKind> statistics,
                                           std::span<const ResamplingMethod> methods,
                                           int threads) {
  spec.validate();
  const SamplerFactory factory = [spec]() {
    auto generator = std::make_shared<const ModelGenerator>(spec);
    return RunSampler([generator](RandomStream& rng) { return generator->generate(rng); });
  };
  return run_global_study(factory, spec.n_runs, spec.B, spec.alpha, spec.seed, statistics,
                          methods, threads);
}

SimulationSummary estimate_fwer(const SimulationSpec& spec,
                                std::span<const StatisticKind> statistics,
                                std::span<const ResamplingMethod> methods, int threads) {
  spec.validate();
  const ModelGenerator probe(spec);
  const std::vector<ConditionPair> pairs = all_pairs(3);
  const std::vector<bool> mask = true_null_mask(pairs, probe.mean_surfaces(), spec.p);
  const SamplerFactory factory = [spec]() {
    auto generator = std::make_shared<const ModelGenerator>(spec);
    return RunSampler([generator](RandomStream& rng) { return generator->generate(rng); });
  };
  return run_pairwise_study(factory, spec.n_runs, spec.B, spec.alpha, spec.seed, statistics,
                            methods, pairs, mask, threads);
}

void GpStudySpec::validate() const {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (B < 1) throw ValidationError("B must be at least 1");
  if (n_runs < 1) throw ValidationError("runs must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
}

namespace {

double marginal_draw(GpMarginal marginal, RandomStream& rng) {
  switch (marginal) {
    case GpMarginal::normal:
      return rng.normal();
    case GpMarginal::student_t5: {
      // t with 5 degrees of freedom, divided by its standard deviation
      // sqrt(5/3) so the coordinate has unit variance.
      const double numerator = rng.normal();
      double chi = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double w = rng.normal();
        chi += w * w;
      }
      return (numerator / std::sqrt(chi / 5.0)) / std::sqrt(5.0 / 3.0);
    }
    case GpMarginal::chi_squared10: {
      // chi-square with 10 degrees of freedom, shifted and scaled to zero
      // mean and unit variance: (X - 10) / sqrt(20).
      double chi = 0.0;
      for (int i = 0; i < 10; ++i) {
        const double w = rng.normal();
        chi += w * w;
      }
      return (chi - 10.0) / std::sqrt(20.0);
    }
  }
  throw ValidationError("unknown marginal");
}

std::vector<double> gp_mean_record(const FunctionalDataset& source, GpMeanStructure structure) {
  const int ell = source.n_conditions(), p = source.n_points();
  if (structure == GpMeanStructure::per_condition) return condition_means(source);
  const std::vector<double> pooled = grand_mean(source);
  std::vector<double> record(static_cast<std::size_t>(ell) * static_cast<std::size_t>(p));
  for (int i = 0; i < ell; ++i) {
    std::copy(pooled.begin(), pooled.end(),
              record.begin() + static_cast<std::ptrdiff_t>(i) * static_cast<std::ptrdiff_t>(p));
  }
  return record;
}

}  // namespace

FunctionalDataset sample_gp_dataset(const GaussianProcessSampler& sampler,
                                    std::span<const double> mean, GpMarginal marginal, int n,
                                    RandomStream& rng) {
  const Eigen::Index dim = sampler.factor().rows();
  if (static_cast<Eigen::Index>(mean.size()) != dim) {
    throw ValidationError("mean vector length must match the covariance dimension");
  }
  if (n < 2) throw ValidationError("n must be at least 2");

  Eigen::MatrixXd z(dim, n);
  for (int j = 0; j < n; ++j) {
    for (Eigen::Index d = 0; d < dim; ++d) z(d, j) = marginal_draw(marginal, rng);
  }
  const Eigen::MatrixXd y = sampler.factor().triangularView<Eigen::Lower>() * z;

  std::vector<double> values(static_cast<std::size_t>(n) * static_cast<std::size_t>(dim));
  for (int j = 0; j < n; ++j) {
    double* record = values.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      record[d] = y(d, j) + mean[static_cast<std::size_t>(d)];
    }
  }
  return FunctionalDataset(std::move(values), sampler.covariance().grid, n,
                           sampler.covariance().n_conditions);
}

SimulationSummary estimate_gp_rejection_rates(const FunctionalDataset& source,
                                              const GpStudySpec& spec,
                                              std::span<const StatisticKind> statistics,
                                              std::span<const ResamplingMethod> methods,
                                              int threads) {
  spec.validate();
  auto sampler = std::make_shared<const GaussianProcessSampler>(estimate_covariance(source));
  auto mean = std::make_shared<const std::vector<double>>(
      gp_mean_record(source, spec.mean_structure));
  const GpMarginal marginal = spec.marginal;
  const int n = spec.n;
  const SamplerFactory factory = [sampler, mean, marginal, n]() {
    return RunSampler([sampler, mean, marginal, n](RandomStream& rng) {
      return sample_gp_dataset(*sampler, *mean, marginal, n, rng);
    });
  };
  return run_global_study(factory, spec.n_runs, spec.B, spec.alpha, spec.seed, statistics,
                          methods, threads);
}

SimulationSummary estimate_gp_fwer(const FunctionalDataset& source, const GpStudySpec& spec,
                                   std::span<const StatisticKind> statistics,
                                   std::span<const ResamplingMethod> methods, int threads) {
  spec.validate();
  auto sampler = std::make_shared<const GaussianProcessSampler>(estimate_covariance(source));
  auto mean = std::make_shared<const std::vector<double>>(
      gp_mean_record(source, spec.mean_structure));
  const std::vector<ConditionPair> pairs = all_pairs(source.n_conditions());
  const std::vector<bool> mask = true_null_mask(pairs, *mean, source.n_points());
  const GpMarginal marginal = spec.marginal;
  const int n = spec.n;
  const SamplerFactory factory = [sampler, mean, marginal, n]() {
    return RunSampler([sampler, mean, marginal, n](RandomStream& rng) {
      return sample_gp_dataset(*sampler, *mean, marginal, n, rng);
    });
  };
  return run_pairwise_study(factory, spec.n_runs, spec.B, spec.alpha, spec.seed, statistics,
                            methods, pairs, mask, threads);
}

}  // namespace frmanova
