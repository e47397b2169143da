#include "gridfisher/fisher.hpp"

#include "gridfisher/errors.hpp"

#include <cmath>
#include <numbers>

namespace gridfisher {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dims(const Lattice& lattice, const FiringField& field) {
  if (lattice.dim() != field.dim) throw DomainError("lattice and firing field dimensions differ");
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " is not finite");
  return v;
}

}  // namespace

FisherIntegrator::FisherIntegrator(FiringField field, QuadratureRule rule)
    : field_(std::move(field)),
      rule_(rule),
      quad_(std::make_shared<const FieldQuadrature>(field_, rule_)) {}

double FisherIntegrator::weighted_sum(const std::vector<double>& values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += quad_->weight(i) * values[i];
  if (field_.normalize) s /= quad_->total_mass();
  return s;
}

double FisherIntegrator::fisher(const Lattice& lattice, const ThetaParams& params) const {
  check_dims(lattice, field_);
  const ThetaKernel kernel(lattice, params, field_.radius);
  const auto n = static_cast<long>(quad_->size());
  std::vector<double> q(quad_->size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) q[i] = kernel.q(quad_->node(i));
  return finite_or_throw(weighted_sum(q), "Fisher functional");
}

double FisherIntegrator::avg_theta(const Lattice& lattice, const ThetaParams& params) const {
  check_dims(lattice, field_);
  const ThetaKernel kernel(lattice, params, field_.radius);
  const auto n = static_cast<long>(quad_->size());
  std::vector<double> t(quad_->size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) t[i] = kernel(quad_->node(i)).value;
  return finite_or_throw(weighted_sum(t), "averaged theta");
}

double FisherIntegrator::fourier(const double* q) const {
  const int d = field_.dim;
  const auto n = static_cast<long>(quad_->size());
  std::vector<double> c(quad_->size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const double* y = quad_->node(i);
    double phase = 0.0;
    for (int k = 0; k < d; ++k) phase += q[k] * y[k];
    c[i] = std::cos(2.0 * kPi * phase);
  }
  return weighted_sum(c);
}

double fisher_functional(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule) {
  check_dims(lattice, field);
  return FisherIntegrator(field, rule).fisher(lattice, params);
}

double fisher_scaled(const Lattice& lattice, const FiringField& field, double lambda,
                     const ThetaParams& params, const QuadratureRule& rule) {
  if (!(lambda > 0.0)) throw DomainError("scale factor must be positive");
  const FiringField scaled = ScaledField{field, lambda}.materialize();
  return fisher_functional(lattice.scaled(lambda), scaled, params, rule);
}

double avg_theta(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                 const QuadratureRule& rule) {
  check_dims(lattice, field);
  return FisherIntegrator(field, rule).avg_theta(lattice, params);
}

double avg_theta_dual(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                      const QuadratureRule& rule) {
  check_dims(lattice, field);
  params.validate();
  const FisherIntegrator integ(field, rule);
  const int d = lattice.dim();
  const Lattice dual = dual_lattice(lattice);
  const double amp = 1.0 / (lattice.covolume() * std::pow(params.alpha, 0.5 * d));
  // |mu^(q)| <= mu(B_R), so the tail bound only needs the Gaussian factor.
  const double mass = integ.quadrature().total_mass();
  const double cut = direct_truncation_radius(dual, 1.0 / params.alpha,
                                              params.tail_epsilon / (amp * mass),
                                              params.max_shell_radius);
  const std::vector<double> origin(d, 0.0);
  const std::vector<double> qs = lattice_points_within(dual, origin, cut);
  double s = 0.0;
  for (std::size_t i = 0; i < qs.size(); i += d) {
    const double* q = qs.data() + i;
    double q2 = 0.0;
    for (int k = 0; k < d; ++k) q2 += q[k] * q[k];
    s += std::exp(-kPi * q2 / params.alpha) * integ.fourier(q);
  }
  return amp * s;
}

double small_alpha_ratio(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule) {
  check_dims(lattice, field);
  const FisherIntegrator integ(field, rule);
  const double f = integ.fisher(lattice, params);
  const double t = integ.avg_theta(lattice, params);
  return f / (4.0 * kPi * kPi * params.alpha * params.alpha * t);
}

}  // namespace gridfisher
