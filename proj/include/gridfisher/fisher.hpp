#pragma once

#include "gridfisher/lattice.hpp"
#include "gridfisher/quadrature.hpp"
#include "gridfisher/theta.hpp"

#include <memory>

namespace gridfisher {

/// Quadrature nodes for one field, reused across lattices and alphas.
/// Node evaluations run in parallel (OpenMP); the weighted sum is taken in node order,
/// so results do not depend on the thread count.
class FisherIntegrator {
 public:
  FisherIntegrator(FiringField field, QuadratureRule rule);

  const FiringField& field() const noexcept { return field_; }
  const FieldQuadrature& quadrature() const noexcept { return *quad_; }

  /// F = integral of Q_L^alpha over the field (divided by mu(B_R) if normalized).
  double fisher(const Lattice& lattice, const ThetaParams& params) const;
  /// Integral of theta_{L+y}(alpha) over the field.
  double avg_theta(const Lattice& lattice, const ThetaParams& params) const;
  /// Fourier transform of the field measure, integral of cos(2 pi q.y) d mu (real by symmetry).
  double fourier(const double* q) const;

 private:
  double weighted_sum(const std::vector<double>& values) const;

  FiringField field_;
  QuadratureRule rule_;
  std::shared_ptr<const FieldQuadrature> quad_;
};

double fisher_functional(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule = {});

/// Left side of the scaling identity: F over the pushforward field evaluated at lambda L.
double fisher_scaled(const Lattice& lattice, const FiringField& field, double lambda,
                     const ThetaParams& params, const QuadratureRule& rule = {});

double avg_theta(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                 const QuadratureRule& rule = {});

/// Same quantity through the dual lattice: V^{-1} alpha^{-d/2} sum_q exp(-pi |q|^2 / alpha) mu^(q).
double avg_theta_dual(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                      const QuadratureRule& rule = {});

/// F / (4 pi^2 alpha^2 avg_theta).
double small_alpha_ratio(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule = {});

namespace reference {

/// Serial evaluation with one independent theta_translated call per node.
double fisher_functional(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule = {});

}  // namespace reference

}  // namespace gridfisher
