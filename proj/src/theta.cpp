#include "gridfisher/theta.hpp"

#include "gridfisher/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace gridfisher {

namespace {

constexpr double kPi = std::numbers::pi;

double unit_ball_volume(int d) { return d == 2 ? kPi : 4.0 * kPi / 3.0; }

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void ThetaParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) {
    throw DomainError("tail_epsilon must lie in (0, 1)");
  }
  if (!(max_shell_radius > 0.0)) throw DomainError("max_shell_radius must be positive");
}

double direct_truncation_radius(const Lattice& lattice, double alpha, double eps, double cap) {
  const int d = lattice.dim();
  const double diam = lattice.basis().colwise().norm().sum();
  const double count_scale = unit_ball_volume(d) / lattice.covolume();
  double r = std::sqrt(std::max(std::log(1.0 / eps), 0.0) / (kPi * alpha));
  for (int iter = 0; iter < 200; ++iter) {
    const double count = count_scale * std::pow(r + diam, d);
    const double next = std::sqrt(std::max(std::log(count / eps), 0.0) / (kPi * alpha));
    if (std::abs(next - r) < 1e-12 * (1.0 + r)) {
      r = next;
      break;
    }
    r = next;
    if (r > 1e3 * cap) break;
  }
  if (r > cap) {
    throw TruncationError("truncation radius " + num(r) + " exceeds cap " + num(cap) +
                          " (alpha=" + num(alpha) +
                          " too small for a direct sum)");
  }
  return r;
}

SummationRoute resolve_route(const Lattice& lattice, const ThetaParams& params) noexcept {
  if (params.route != SummationRoute::Automatic) return params.route;
  const double scale = std::pow(lattice.covolume(), 2.0 / lattice.dim());
  return params.alpha * scale >= 1.0 ? SummationRoute::Direct : SummationRoute::Reciprocal;
}

ThetaKernel::ThetaKernel(const Lattice& lattice, const ThetaParams& params, double reach)
    : ThetaKernel(lattice, params, std::vector<double>(lattice.dim(), 0.0), reach) {}

ThetaKernel::ThetaKernel(const Lattice& lattice, const ThetaParams& params,
                         std::span<const double> center, double reach)
    : dim_(lattice.dim()), route_(resolve_route(lattice, params)), alpha_(params.alpha) {
  params.validate();
  if (static_cast<int>(center.size()) != dim_) throw DomainError("kernel center dimension mismatch");
  if (!(reach >= 0.0)) throw DomainError("kernel reach must be >= 0");

  if (route_ == SummationRoute::Direct) {
    truncation_radius_ = direct_truncation_radius(lattice, alpha_, params.tail_epsilon,
                                                  params.max_shell_radius);
    std::vector<double> neg(center.begin(), center.end());
    for (double& c : neg) c = -c;
    points_ = lattice_points_within(lattice, neg, truncation_radius_ + reach);
    return;
  }

  // Reciprocal route: theta = C sum_q exp(-pi |q|^2 / alpha) cos(2 pi q.y), C = 1/(V alpha^{d/2}).
  const Lattice dual = dual_lattice(lattice);
  const double amp = 1.0 / (lattice.covolume() * std::pow(alpha_, 0.5 * dim_));
  // The gradient is carried by q != 0 alone, so the tail is bounded relative to the first dual
  // shell rather than to theta; otherwise small alpha would drop every oscillating term.
  const double q_min = enumerate_shells(dual, 1).front().radius;
  const double rel = direct_truncation_radius(dual, 1.0 / alpha_, params.tail_epsilon,
                                              params.max_shell_radius);
  truncation_radius_ = std::sqrt(q_min * q_min + rel * rel);
  if (truncation_radius_ > params.max_shell_radius) {
    throw TruncationError("reciprocal truncation radius exceeds cap (alpha=" + num(alpha_) +
                          " too large for the reciprocal sum)");
  }
  const std::vector<double> origin(dim_, 0.0);
  const std::vector<double> all = lattice_points_within(dual, origin, truncation_radius_);
  for (std::size_t i = 0; i < all.size(); i += dim_) {
    const double* q = all.data() + i;
    int sign = 0;
    for (int k = 0; k < dim_ && sign == 0; ++k) sign = (q[k] > 0.0) - (q[k] < 0.0);
    if (sign < 0) continue;  // -q is folded into q
    double q2 = 0.0;
    for (int k = 0; k < dim_; ++k) q2 += q[k] * q[k];
    points_.insert(points_.end(), q, q + dim_);
    weights_.push_back((sign == 0 ? 1.0 : 2.0) * amp * std::exp(-kPi * q2 / alpha_));
  }
}

ThetaKernel::Sample ThetaKernel::operator()(const double* y) const noexcept {
  Sample s{0.0, {0.0, 0.0, 0.0}};
  const std::size_t n = points_.size() / dim_;
  if (route_ == SummationRoute::Direct) {
    const double c = -kPi * alpha_;
    double g[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = points_.data() + i * dim_;
      double w[3] = {0.0, 0.0, 0.0};
      double w2 = 0.0;
      for (int k = 0; k < dim_; ++k) {
        w[k] = p[k] + y[k];
        w2 += w[k] * w[k];
      }
      const double e = std::exp(c * w2);
      s.value += e;
      for (int k = 0; k < dim_; ++k) g[k] += w[k] * e;
    }
    for (int k = 0; k < dim_; ++k) s.gradient[k] = -2.0 * kPi * alpha_ * g[k];
    return s;
  }

  double g[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double* q = points_.data() + i * dim_;
    double phase = 0.0;
    for (int k = 0; k < dim_; ++k) phase += q[k] * y[k];
    phase *= 2.0 * kPi;
    const double a = weights_[i];
    s.value += a * std::cos(phase);
    const double sn = a * std::sin(phase);
    for (int k = 0; k < dim_; ++k) g[k] += q[k] * sn;
  }
  for (int k = 0; k < dim_; ++k) s.gradient[k] = -2.0 * kPi * g[k];
  return s;
}

double ThetaKernel::q(const double* y) const noexcept {
  const Sample s = (*this)(y);
  double g2 = 0.0;
  for (int k = 0; k < dim_; ++k) g2 += s.gradient[k] * s.gradient[k];
  return g2 / (4.0 * s.value);
}

namespace {

void check_point(const Lattice& lattice, const Vector& y) {
  if (y.size() != lattice.dim()) throw DomainError("point dimension does not match lattice");
  if (!y.allFinite()) throw DomainError("point has non-finite coordinates");
}

}  // namespace

ThetaValue theta_translated(const Lattice& lattice, const Vector& y, const ThetaParams& params) {
  check_point(lattice, y);
  const ThetaKernel kernel(lattice, params, std::span<const double>(y.data(), y.size()), 0.0);
  const auto s = kernel(y.data());
  ThetaValue out;
  out.value = s.value;
  out.gradient = Eigen::Map<const Vector>(s.gradient.data(), lattice.dim());
  out.truncation_radius = kernel.truncation_radius();
  return out;
}

double theta_lattice(const Lattice& lattice, double alpha, double tail_epsilon, double cap) {
  ThetaParams p;
  p.alpha = alpha;
  p.tail_epsilon = tail_epsilon;
  p.max_shell_radius = cap;
  p.route = SummationRoute::Direct;
  const ThetaKernel kernel(lattice, p, 0.0);
  const std::vector<double> zero(lattice.dim(), 0.0);
  return kernel(zero.data()).value;
}

double theta_dual_check(const Lattice& lattice, const ThetaParams& params) {
  params.validate();
  const double cap = std::max(params.max_shell_radius, 200.0);
  const double eps = std::min(params.tail_epsilon, 1e-15);
  const double lhs = theta_lattice(lattice, params.alpha, eps, cap);
  const double rhs = theta_lattice(dual_lattice(lattice), 1.0 / params.alpha, eps, cap) /
                     (lattice.covolume() * std::pow(params.alpha, 0.5 * lattice.dim()));
  return std::abs(lhs - rhs) / lhs;
}

double q_value(const Lattice& lattice, const Vector& y, const ThetaParams& params) {
  check_point(lattice, y);
  const ThetaKernel kernel(lattice, params, std::span<const double>(y.data(), y.size()), 0.0);
  return kernel.q(y.data());
}

Vector discrete_gaussian_mean(const Lattice& lattice, const Vector& y, const ThetaParams& params) {
  check_point(lattice, y);
  params.validate();
  const int d = lattice.dim();
  const double r = direct_truncation_radius(lattice, params.alpha, params.tail_epsilon,
                                            params.max_shell_radius);
  const Vector neg = -y;
  const std::vector<double> pts =
      lattice_points_within(lattice, std::span<const double>(neg.data(), d), r);
  double mass = 0.0;
  Vector moment = Vector::Zero(d);
  for (std::size_t i = 0; i < pts.size(); i += d) {
    const Vector w = Eigen::Map<const Vector>(pts.data() + i, d) + y;
    const double e = std::exp(-kPi * params.alpha * w.squaredNorm());
    mass += e;
    moment += e * w;
  }
  return moment / mass;
}

Eigen::Vector2d q_gradient_wrt_params(const LatticeParams2D& params, const Vector& point,
                                      const ThetaParams& theta, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(params.y > h)) throw DomainError("chart point too close to y = 0 for the step");
  auto q_at = [&](double x, double y) {
    return q_value(lattice_from_params2d({x, y}), point, theta);
  };
  Eigen::Vector2d g;
  g[0] = (q_at(params.x + h, params.y) - q_at(params.x - h, params.y)) / (2.0 * h);
  g[1] = (q_at(params.x, params.y + h) - q_at(params.x, params.y - h)) / (2.0 * h);
  return g;
}

std::vector<double> gr_profile(double r, std::span<const double> angles, const ThetaParams& params) {
  if (!(r >= 0.0)) throw DomainError("profile radius must be >= 0");
  const ThetaKernel square(named_lattice(NamedLattice::Z2), params, r);
  const ThetaKernel triangular(named_lattice(NamedLattice::A2), params, r);
  std::vector<double> out;
  out.reserve(angles.size());
  for (double a : angles) {
    const double y[2] = {r * std::cos(a), r * std::sin(a)};
    out.push_back(square.q(y) - triangular.q(y));
  }
  return out;
}

}  // namespace gridfisher
