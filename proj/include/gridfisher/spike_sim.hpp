#pragma once

#include "gridfisher/lattice.hpp"
#include "gridfisher/theta.hpp"

#include <cstdint>
#include <vector>

namespace gridfisher {

/// A grid module: N phase-shifted copies of one lattice tuning curve, n neurons per phase.
struct ModuleConfig {
  Lattice lattice;
  std::vector<Vector> phases;
  int neurons_per_phase = 1;
  ThetaParams theta;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SpikeSample {
  Eigen::MatrixXi counts;  ///< N x n
  Vector position;
};

/// Omega_{L+y_j}(x) = theta_{L+x+y_j}(alpha).
double tuning_curve(const ModuleConfig& cfg, std::size_t j, const Vector& x);

/// Trial t draws from the substream keyed by (seed, t), so any subset of trials is reproducible.
std::vector<SpikeSample> sample_spikes(const ModuleConfig& cfg, const Vector& x, int trials);

/// Analytic Poisson Fisher trace n sum_j |grad Omega_j|^2 / Omega_j = 4 n sum_j Q(x + y_j).
double analytic_fisher_trace(const ModuleConfig& cfg, const Vector& x);

/// J_lm = n sum_j d_l Omega_j d_m Omega_j / Omega_j.
Matrix fisher_matrix(const ModuleConfig& cfg, const Vector& x);

struct TraceEstimate {
  double mean = 0.0;            ///< Monte-Carlo mean of |score|^2
  double standard_error = 0.0;
  double analytic = 0.0;        ///< analytic_fisher_trace
  Vector score_mean;
  Vector score_standard_error;
};

/// Monte-Carlo estimate of Tr J(x) as the mean squared score.
TraceEstimate empirical_fisher_trace(const ModuleConfig& cfg, const Vector& x, int trials);

/// N points uniform in the ball B_R, from the substream keyed by (seed, 2^63 + dim).
std::vector<Vector> sample_uniform_ball_phases(int dim, double radius, std::size_t count,
                                               std::uint64_t seed);

/// (1/N) sum_j Q(y_j): the phase average that converges to F for the normalized uniform field.
double aggregate_phases(const ModuleConfig& cfg);

struct DecodeOptions {
  double half_width = 0.25;
  int nodes_per_axis = 101;
};

struct DecodeResult {
  double mse = 0.0;
  double crlb = 0.0;  ///< Tr J^{-1}; NaN from decode_mse
  int trials = 0;
};

/// Grid maximum-likelihood decoding with one quadratic refinement per axis; MSE only.
DecodeResult decode_mse(const ModuleConfig& cfg, const Vector& true_x, int trials,
                        const DecodeOptions& options = {});

/// decode_mse plus the Cramer-Rao value. Throws UnidentifiableError if J(true_x) is singular.
DecodeResult ml_decode(const ModuleConfig& cfg, const Vector& true_x, int trials,
                       const DecodeOptions& options = {});

}  // namespace gridfisher
