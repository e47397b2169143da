#include "gridfisher/spike_sim.hpp"

#include "gridfisher/errors.hpp"
#include "gridfisher/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace gridfisher {

namespace {

constexpr std::uint64_t kPhaseStream = 0x8000000000000000ULL;

void check_position(const ModuleConfig& cfg, const Vector& x) {
  if (x.size() != cfg.lattice.dim()) throw DomainError("position dimension does not match lattice");
  if (!x.allFinite()) throw DomainError("position has non-finite coordinates");
}

// Kernel valid for every x + y_j + offset with |offset| <= slack.
ThetaKernel module_kernel(const ModuleConfig& cfg, const Vector& x, double slack) {
  double reach = 0.0;
  for (const auto& y : cfg.phases) reach = std::max(reach, (x + y).norm());
  return ThetaKernel(cfg.lattice, cfg.theta, reach + slack);
}

struct PhaseSample {
  double omega;
  std::array<double, 3> grad;
};

std::vector<PhaseSample> phase_samples(const ModuleConfig& cfg, const ThetaKernel& kernel,
                                       const Vector& x) {
  std::vector<PhaseSample> out;
  out.reserve(cfg.phases.size());
  for (const auto& y : cfg.phases) {
    const Vector w = x + y;
    const auto s = kernel(w.data());
    out.push_back({s.value, s.gradient});
  }
  return out;
}

}  // namespace

void ModuleConfig::validate() const {
  if (neurons_per_phase < 1) throw DomainError("neurons_per_phase must be >= 1");
  if (phases.empty()) throw DomainError("module needs at least one phase");
  for (const auto& y : phases) {
    if (y.size() != lattice.dim()) throw DomainError("phase dimension does not match lattice");
    if (!y.allFinite()) throw DomainError("phase has non-finite coordinates");
  }
  theta.validate();
}

double tuning_curve(const ModuleConfig& cfg, std::size_t j, const Vector& x) {
  check_position(cfg, x);
  if (j >= cfg.phases.size()) throw DomainError("phase index out of range");
  return theta_translated(cfg.lattice, x + cfg.phases[j], cfg.theta).value;
}

std::vector<SpikeSample> sample_spikes(const ModuleConfig& cfg, const Vector& x, int trials) {
  cfg.validate();
  check_position(cfg, x);
  if (trials < 1) throw DomainError("trials must be >= 1");
  const ThetaKernel kernel = module_kernel(cfg, x, 0.0);
  const auto ph = phase_samples(cfg, kernel, x);
  const int N = static_cast<int>(cfg.phases.size());
  const int n = cfg.neurons_per_phase;
  std::vector<SpikeSample> out(trials);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < trials; ++t) {
    CounterStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    Eigen::MatrixXi k(N, n);
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < n; ++i) k(j, i) = static_cast<int>(rng.poisson(ph[j].omega));
    }
    out[t] = {std::move(k), x};
  }
  return out;
}

double analytic_fisher_trace(const ModuleConfig& cfg, const Vector& x) {
  cfg.validate();
  check_position(cfg, x);
  const ThetaKernel kernel = module_kernel(cfg, x, 0.0);
  double s = 0.0;
  for (const auto& y : cfg.phases) {
    const Vector w = x + y;
    s += kernel.q(w.data());
  }
  return 4.0 * cfg.neurons_per_phase * s;
}

Matrix fisher_matrix(const ModuleConfig& cfg, const Vector& x) {
  cfg.validate();
  check_position(cfg, x);
  const int d = cfg.lattice.dim();
  const ThetaKernel kernel = module_kernel(cfg, x, 0.0);
  Matrix J = Matrix::Zero(d, d);
  for (const auto& p : phase_samples(cfg, kernel, x)) {
    const Eigen::Map<const Vector> g(p.grad.data(), d);
    J += g * g.transpose() / p.omega;
  }
  return cfg.neurons_per_phase * J;
}

TraceEstimate empirical_fisher_trace(const ModuleConfig& cfg, const Vector& x, int trials) {
  cfg.validate();
  check_position(cfg, x);
  if (trials < 1000) throw DomainError("trials must be >= 1000");
  const int d = cfg.lattice.dim();
  const int N = static_cast<int>(cfg.phases.size());
  const int n = cfg.neurons_per_phase;
  const ThetaKernel kernel = module_kernel(cfg, x, 0.0);
  const auto ph = phase_samples(cfg, kernel, x);

  // Per-trial scores, reduced afterwards in trial order.
  std::vector<double> scores(static_cast<std::size_t>(trials) * d);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < trials; ++t) {
    CounterStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    double s[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < N; ++j) {
      std::int64_t k = 0;
      for (int i = 0; i < n; ++i) k += rng.poisson(ph[j].omega);
      const double c = static_cast<double>(k) / ph[j].omega - n;
      for (int l = 0; l < d; ++l) s[l] += c * ph[j].grad[l];
    }
    for (int l = 0; l < d; ++l) scores[static_cast<std::size_t>(t) * d + l] = s[l];
  }

  TraceEstimate est;
  est.analytic = analytic_fisher_trace(cfg, x);
  est.score_mean = Vector::Zero(d);
  Vector score_sq = Vector::Zero(d);
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    double norm2 = 0.0;
    for (int l = 0; l < d; ++l) {
      const double s = scores[static_cast<std::size_t>(t) * d + l];
      est.score_mean[l] += s;
      score_sq[l] += s * s;
      norm2 += s * s;
    }
    sum += norm2;
    sum2 += norm2 * norm2;
  }
  const double m = static_cast<double>(trials);
  est.mean = sum / m;
  est.standard_error = std::sqrt(std::max(0.0, sum2 / m - est.mean * est.mean) / (m - 1.0));
  est.score_mean /= m;
  est.score_standard_error.resize(d);
  for (int l = 0; l < d; ++l) {
    const double var = score_sq[l] / m - est.score_mean[l] * est.score_mean[l];
    est.score_standard_error[l] = std::sqrt(std::max(0.0, var) / (m - 1.0));
  }
  return est;
}

std::vector<Vector> sample_uniform_ball_phases(int dim, double radius, std::size_t count,
                                               std::uint64_t seed) {
  if (dim != 2 && dim != 3) throw DomainError("phase dimension must be 2 or 3");
  if (!(radius > 0.0)) throw DomainError("phase ball radius must be positive");
  CounterStream rng(seed, kPhaseStream + static_cast<std::uint64_t>(dim));
  std::vector<Vector> out;
  out.reserve(count);
  while (out.size() < count) {
    Vector y(dim);
    for (int k = 0; k < dim; ++k) y[k] = radius * (2.0 * rng.uniform() - 1.0);
    if (y.norm() <= radius) out.push_back(std::move(y));
  }
  return out;
}

double aggregate_phases(const ModuleConfig& cfg) {
  cfg.validate();
  const Vector origin = Vector::Zero(cfg.lattice.dim());
  const ThetaKernel kernel = module_kernel(cfg, origin, 0.0);
  const long N = static_cast<long>(cfg.phases.size());
  std::vector<double> q(cfg.phases.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < N; ++j) q[j] = kernel.q(cfg.phases[j].data());
  double s = 0.0;
  for (double v : q) s += v;
  return s / static_cast<double>(N);
}

DecodeResult decode_mse(const ModuleConfig& cfg, const Vector& true_x, int trials,
                        const DecodeOptions& options) {
  cfg.validate();
  check_position(cfg, true_x);
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (!(options.half_width > 0.0) || options.nodes_per_axis < 3) {
    throw DomainError("decoder window needs half_width > 0 and at least 3 nodes per axis");
  }
  const int d = cfg.lattice.dim();
  const int m = options.nodes_per_axis;
  const int N = static_cast<int>(cfg.phases.size());
  const int n = cfg.neurons_per_phase;
  const double step = 2.0 * options.half_width / (m - 1);
  std::size_t G = 1;
  for (int k = 0; k < d; ++k) G *= static_cast<std::size_t>(m);

  const ThetaKernel kernel = module_kernel(cfg, true_x, options.half_width * std::sqrt(d));
  auto node_offset = [&](std::size_t g, int axis) {
    for (int k = d - 1; k > axis; --k) g /= m;
    return -options.half_width + step * static_cast<double>(g % m);
  };

  // log Omega_j and n sum_j Omega_j on the window grid.
  std::vector<double> log_omega(G * N), total(G);
#pragma omp parallel for schedule(static)
  for (long gl = 0; gl < static_cast<long>(G); ++gl) {
    const auto g = static_cast<std::size_t>(gl);
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
      double w[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < d; ++k) w[k] = true_x[k] + node_offset(g, k) + cfg.phases[j][k];
      const double om = kernel(w).value;
      log_omega[g * N + j] = std::log(om);
      s += om;
    }
    total[g] = n * s;
  }

  const ThetaKernel truth = module_kernel(cfg, true_x, 0.0);
  std::vector<double> omega(N);
  for (int j = 0; j < N; ++j) {
    const Vector w = true_x + cfg.phases[j];
    omega[j] = truth(w.data()).value;
  }

  std::vector<double> err2(trials);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < trials; ++t) {
    CounterStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    std::vector<double> K(N);
    for (int j = 0; j < N; ++j) {
      std::int64_t k = 0;
      for (int i = 0; i < n; ++i) k += rng.poisson(omega[j]);
      K[j] = static_cast<double>(k);
    }
    auto loglik = [&](std::size_t g) {
      double s = -total[g];
      const double* lo = log_omega.data() + g * N;
      for (int j = 0; j < N; ++j) s += K[j] * lo[j];
      return s;
    };
    std::size_t best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < G; ++g) {
      const double ll = loglik(g);
      if (ll > best_ll) {
        best_ll = ll;
        best = g;
      }
    }
    double e2 = 0.0;
    std::size_t stride = 1;
    for (int k = d - 1; k >= 0; --k) {
      double off = node_offset(best, k);
      const std::size_t idx = (best / stride) % m;
      if (idx > 0 && idx + 1 < static_cast<std::size_t>(m)) {
        const double lm = loglik(best - stride), lp = loglik(best + stride);
        const double curv = lm - 2.0 * best_ll + lp;
        if (curv < 0.0) off += std::clamp(0.5 * (lm - lp) / curv, -1.0, 1.0) * step;
      }
      e2 += off * off;
      stride *= static_cast<std::size_t>(m);
    }
    err2[t] = e2;
  }

  DecodeResult res;
  res.trials = trials;
  for (double e : err2) res.mse += e;
  res.mse /= trials;
  res.crlb = std::numeric_limits<double>::quiet_NaN();
  return res;
}

DecodeResult ml_decode(const ModuleConfig& cfg, const Vector& true_x, int trials,
                       const DecodeOptions& options) {
  const Matrix J = fisher_matrix(cfg, true_x);
  Eigen::SelfAdjointEigenSolver<Matrix> es(J, Eigen::EigenvaluesOnly);
  const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  // Information scale of the module: each neuron contributes at most ~ 2 pi alpha Omega per axis.
  double scale = 0.0;
  for (std::size_t j = 0; j < cfg.phases.size(); ++j) scale += tuning_curve(cfg, j, true_x);
  scale *= 2.0 * std::numbers::pi * cfg.theta.alpha * cfg.neurons_per_phase;
  if (!(hi > 1e-12 * scale) || !(lo > 1e-12 * hi)) {
    throw UnidentifiableError("Fisher matrix is singular at the true position; the configuration is unidentifiable");
  }
  DecodeResult res = decode_mse(cfg, true_x, trials, options);
  res.crlb = J.inverse().trace();
  return res;
}

}  // namespace gridfisher
