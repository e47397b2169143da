#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace gridfisher {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

enum class FieldKind { UniformBall, RadialDensity };

/// Measure mu on the ball B_R: d mu = rho(|y|^2) dy. Not normalized unless `normalize`.
struct FiringField {
  FieldKind kind = FieldKind::UniformBall;
  int dim = 2;
  double radius = 0.5;
  std::function<double(double)> density;  ///< rho(r^2); empty means constant `uniform_density`
  double uniform_density = 1.0;
  bool normalize = false;

  static FiringField uniform(int dim, double radius, bool normalize = false);
  static FiringField radial(int dim, double radius, std::function<double(double)> rho,
                            bool normalize = false);
  /// rho(s) = exp(-s) truncated to B_R, a completely monotone kernel.
  static FiringField exponential_kernel(int dim, double radius, bool normalize = false);

  double rho(double r2) const { return density ? density(r2) : uniform_density; }
  void validate() const;
};

/// Pushforward of `base` under y -> lambda y: supported on B_{lambda R}, same total mass.
struct ScaledField {
  FiringField base;
  double lambda = 1.0;

  FiringField materialize() const;
};

struct QuadratureRule {
  int radial_nodes = 64;
  int angular_nodes = 128;  ///< trapezoidal angle nodes in 2D
  int polar_nodes = 32;     ///< Gauss-Legendre in cos(polar) in 3D
  int azimuth_nodes = 64;   ///< trapezoidal azimuth nodes in 3D

  void validate() const;
};

/// Product-rule nodes and weights for a field: Gauss-Legendre in r (weight r^{d-1} rho),
/// trapezoidal in angle, Gauss-Legendre in cos(polar) for 3D.
class FieldQuadrature {
 public:
  FieldQuadrature(const FiringField& field, const QuadratureRule& rule);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  const double* node(std::size_t i) const noexcept { return points_.data() + i * dim_; }
  double weight(std::size_t i) const noexcept { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Sum of weights, i.e. mu(B_R).
  double total_mass() const noexcept { return total_mass_; }
  double radius() const noexcept { return radius_; }

 private:
  int dim_;
  double radius_;
  std::vector<double> points_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

}  // namespace gridfisher
