#pragma once

#include "gridfisher/lattice.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace gridfisher {

/// How a translated theta sum is evaluated.
///   Direct:     sum over p in L of exp(-pi alpha |p + y|^2).
///   Reciprocal: Poisson-dual form (1 / (V alpha^{d/2})) sum over q in L* of
///               exp(-pi |q|^2 / alpha) cos(2 pi q.y).
///   Automatic:  Direct when alpha V^{2/d} >= 1, Reciprocal otherwise. The direct gradient
///               cancels catastrophically for small alpha.
enum class SummationRoute { Automatic, Direct, Reciprocal };

struct ThetaParams {
  double alpha = 10.0 / 3.14159265358979323846;
  double tail_epsilon = 1e-14;
  double max_shell_radius = 40.0;
  SummationRoute route = SummationRoute::Automatic;

  void validate() const;
};

struct ThetaValue {
  double value = 0.0;
  Vector gradient;  ///< d/dy of theta_{L+y}(alpha)
  double truncation_radius = 0.0;
};

/// Radius R with c_d (R + diam)^d / V * exp(-pi alpha R^2) <= eps, where diam bounds the
/// diameter of a fundamental cell. Throws TruncationError past `cap`.
double direct_truncation_radius(const Lattice& lattice, double alpha, double eps, double cap);

SummationRoute resolve_route(const Lattice& lattice, const ThetaParams& params) noexcept;

/// Prepared evaluator of y -> (theta_{L+y}(alpha), grad) for all y with |y - center| <= reach.
/// Holds the lattice (or dual-lattice) points once so repeated evaluations only pay for the
/// exponentials. Every stored term is summed, so the result is smooth in y.
class ThetaKernel {
 public:
  struct Sample {
    double value;
    std::array<double, 3> gradient;
  };

  ThetaKernel(const Lattice& lattice, const ThetaParams& params, std::span<const double> center,
              double reach);
  /// Kernel centered at the origin.
  ThetaKernel(const Lattice& lattice, const ThetaParams& params, double reach);

  Sample operator()(const double* y) const noexcept;
  /// |grad theta|^2 / (4 theta)
  double q(const double* y) const noexcept;

  int dim() const noexcept { return dim_; }
  SummationRoute route() const noexcept { return route_; }
  double truncation_radius() const noexcept { return truncation_radius_; }
  std::size_t term_count() const noexcept { return weights_.size(); }

 private:
  int dim_;
  SummationRoute route_;
  double alpha_;
  double truncation_radius_;
  std::vector<double> points_;   // stride dim_
  std::vector<double> weights_;  // reciprocal route: amplitude per +/- pair
};

ThetaValue theta_translated(const Lattice& lattice, const Vector& y, const ThetaParams& params);

/// Direct sum of theta_L(alpha) at y = 0.
double theta_lattice(const Lattice& lattice, double alpha, double tail_epsilon = 1e-15,
                     double cap = 200.0);

/// Relative gap |theta_L(alpha) - V^{-1} alpha^{-d/2} theta_{L*}(1/alpha)| / theta_L(alpha),
/// both sides summed directly.
double theta_dual_check(const Lattice& lattice, const ThetaParams& params);

/// Q_L^alpha(y) = |grad_y sqrt(theta_{L+y})|^2 = |grad theta|^2 / (4 theta).
double q_value(const Lattice& lattice, const Vector& y, const ThetaParams& params);

/// Mean of the discrete Gaussian on L + y with weights exp(-pi alpha |w|^2), summed directly.
Vector discrete_gaussian_mean(const Lattice& lattice, const Vector& y, const ThetaParams& params);

/// Central-difference gradient of (x, y) -> Q_{L(x,y)}(point) with step h.
Eigen::Vector2d q_gradient_wrt_params(const LatticeParams2D& params, const Vector& point,
                                      const ThetaParams& theta, double h);

/// g_r(angle) = Q_{Z2}(r cos, r sin) - Q_{A2}(r cos, r sin) for each angle.
std::vector<double> gr_profile(double r, std::span<const double> angles, const ThetaParams& params);

}  // namespace gridfisher
