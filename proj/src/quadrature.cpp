#include "gridfisher/quadrature.hpp"

#include "gridfisher/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gridfisher {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = weight;
    w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {std::move(x), std::move(w)};
}

FiringField FiringField::uniform(int dim, double radius, bool normalize) {
  FiringField f;
  f.kind = FieldKind::UniformBall;
  f.dim = dim;
  f.radius = radius;
  f.normalize = normalize;
  f.validate();
  return f;
}

FiringField FiringField::radial(int dim, double radius, std::function<double(double)> rho,
                                bool normalize) {
  FiringField f;
  f.kind = FieldKind::RadialDensity;
  f.dim = dim;
  f.radius = radius;
  f.density = std::move(rho);
  f.normalize = normalize;
  f.validate();
  return f;
}

FiringField FiringField::exponential_kernel(int dim, double radius, bool normalize) {
  return radial(dim, radius, [](double s) { return std::exp(-s); }, normalize);
}

void FiringField::validate() const {
  if (dim != 2 && dim != 3) throw DomainError("firing field dimension must be 2 or 3");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("firing field radius must be positive");
  if (kind == FieldKind::RadialDensity && !density) {
    throw DomainError("radial firing field needs a density");
  }
  if (!(uniform_density > 0.0)) throw DomainError("uniform density must be positive");
}

FiringField ScaledField::materialize() const {
  if (!(lambda > 0.0)) throw DomainError("scale factor must be positive");
  FiringField f = base;
  f.radius = base.radius * lambda;
  const double jac = std::pow(lambda, -base.dim);
  if (base.density) {
    auto rho = base.density;
    const double l2 = lambda * lambda;
    f.density = [rho, jac, l2](double s) { return jac * rho(s / l2); };
  } else {
    f.uniform_density = base.uniform_density * jac;
  }
  return f;
}

void QuadratureRule::validate() const {
  if (radial_nodes < 1 || angular_nodes < 1 || polar_nodes < 1 || azimuth_nodes < 1) {
    throw DomainError("quadrature node counts must be >= 1");
  }
}

FieldQuadrature::FieldQuadrature(const FiringField& field, const QuadratureRule& rule)
    : dim_(field.dim), radius_(field.radius) {
  field.validate();
  rule.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const auto [rt, rw] = gauss_legendre(rule.radial_nodes);
  const double half_r = 0.5 * field.radius;

  if (dim_ == 2) {
    const int m = rule.angular_nodes;
    points_.reserve(2 * rt.size() * m);
    for (std::size_t i = 0; i < rt.size(); ++i) {
      const double r = half_r * (rt[i] + 1.0);
      const double wr = half_r * rw[i] * r * field.rho(r * r) * two_pi / m;
      for (int a = 0; a < m; ++a) {
        const double phi = two_pi * a / m;
        points_.push_back(r * std::cos(phi));
        points_.push_back(r * std::sin(phi));
        weights_.push_back(wr);
      }
    }
  } else {
    const auto [ct, cw] = gauss_legendre(rule.polar_nodes);
    const int m = rule.azimuth_nodes;
    points_.reserve(3 * rt.size() * ct.size() * m);
    for (std::size_t i = 0; i < rt.size(); ++i) {
      const double r = half_r * (rt[i] + 1.0);
      const double wr = half_r * rw[i] * r * r * field.rho(r * r) * two_pi / m;
      for (std::size_t j = 0; j < ct.size(); ++j) {
        const double c = ct[j];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int a = 0; a < m; ++a) {
          const double phi = two_pi * a / m;
          points_.push_back(r * s * std::cos(phi));
          points_.push_back(r * s * std::sin(phi));
          points_.push_back(r * c);
          weights_.push_back(wr * cw[j]);
        }
      }
    }
  }
  for (double w : weights_) total_mass_ += w;
}

}  // namespace gridfisher
