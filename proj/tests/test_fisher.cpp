#include "gridfisher/errors.hpp"
#include "gridfisher/fisher.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gridfisher;

namespace {

constexpr double kPi = std::numbers::pi;

ThetaParams at(double alpha) {
  ThetaParams p;
  p.alpha = alpha;
  return p;
}

// Q from a plain box sum over |k_i| <= box, no truncation logic shared with the library.
double brute_q(const Lattice& L, double x, double y, double alpha, int box) {
  double th = 0.0, gx = 0.0, gy = 0.0;
  for (int a = -box; a <= box; ++a)
    for (int b = -box; b <= box; ++b) {
      const double wx = L.basis()(0, 0) * a + L.basis()(0, 1) * b + x;
      const double wy = L.basis()(1, 0) * a + L.basis()(1, 1) * b + y;
      const double e = std::exp(-kPi * alpha * (wx * wx + wy * wy));
      th += e;
      gx += wx * e;
      gy += wy * e;
    }
  const double c = 2.0 * kPi * alpha;
  return c * c * (gx * gx + gy * gy) / (4.0 * th);
}

// Midpoint rule in polar coordinates over the uniform disk.
double midpoint_fisher(const Lattice& L, double R, double alpha, int nr, int nt) {
  double s = 0.0;
  const double dr = R / nr, dt = 2.0 * kPi / nt;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * dr;
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) * dt;
      s += brute_q(L, r * std::cos(t), r * std::sin(t), alpha, 6) * r * dr * dt;
    }
  }
  return s;
}

Matrix rotation2(double deg) {
  const double t = deg * kPi / 180.0;
  Matrix m(2, 2);
  m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return m;
}

}  // namespace

TEST_CASE("parallel kernel matches the serial reference") {
  for (auto n : {NamedLattice::A2, NamedLattice::Z2, NamedLattice::D3}) {
    const Lattice L = named_lattice(n);
    const int d = L.dim();
    for (double alpha : {10.0 / kPi, 0.7}) {
      const FiringField f = FiringField::uniform(d, 0.3);
      const QuadratureRule rule{24, 48, 12, 24};
      const double par = fisher_functional(L, f, at(alpha), rule);
      const double ref = reference::fisher_functional(L, f, at(alpha), rule);
      CHECK(std::abs(par - ref) <= 1e-12 * std::abs(ref));
    }
  }
}

TEST_CASE("independent midpoint quadrature oracle") {
  for (auto n : {NamedLattice::A2, NamedLattice::Z2}) {
    const Lattice L = named_lattice(n);
    const double oracle = midpoint_fisher(L, 0.3, 10.0 / kPi, 200, 256);
    const double f = fisher_functional(L, FiringField::uniform(2, 0.3), at(10.0 / kPi));
    CHECK(std::abs(f - oracle) < 1e-4 * oracle);
  }
}

TEST_CASE("small fields carry almost no information") {
  const Lattice L = named_lattice(NamedLattice::A2);
  const double big = fisher_functional(L, FiringField::uniform(2, 0.5), at(10.0 / kPi));
  const double tiny = fisher_functional(L, FiringField::uniform(2, 1e-3), at(10.0 / kPi));
  CHECK(tiny >= 0.0);
  CHECK(tiny <= 1e-6 * big);
}

TEST_CASE("orderings of A2 and Z2") {
  const Lattice a2 = named_lattice(NamedLattice::A2), z2 = named_lattice(NamedLattice::Z2);
  CHECK(fisher_functional(a2, FiringField::uniform(2, 0.5), at(10.0 / kPi)) >
        fisher_functional(z2, FiringField::uniform(2, 0.5), at(10.0 / kPi)));
  CHECK(fisher_functional(a2, FiringField::uniform(2, 0.1), at(2.0 / kPi)) <
        fisher_functional(z2, FiringField::uniform(2, 0.1), at(2.0 / kPi)));
}

TEST_CASE("volume scaling identity") {
  const QuadratureRule rule{32, 64, 16, 32};
  for (auto n : {NamedLattice::A2, NamedLattice::Z2, NamedLattice::D3}) {
    const Lattice L = named_lattice(n);
    for (double R : {0.1, 0.3}) {
      const FiringField f = FiringField::uniform(L.dim(), R);
      for (double lambda : {0.5, 0.7, 1.0, 1.5, 2.0}) {
        const double alpha = 10.0 / kPi;
        const double lhs = fisher_scaled(L, f, lambda, at(alpha), rule);
        const double rhs = fisher_functional(L, f, at(lambda * lambda * alpha), rule) / (lambda * lambda);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
      }
    }
  }
  // Along the scaled family the functional vanishes at both ends: as lambda -> 0 the small-alpha
  // gradient is exponentially small, and as lambda -> infinity F^{lambda^2 alpha} tends to a constant.
  const Lattice a2 = named_lattice(NamedLattice::A2);
  const FiringField f = FiringField::uniform(2, 0.3);
  const double alpha = 10.0 / kPi;
  CHECK(fisher_scaled(a2, f, 0.25, at(alpha)) < fisher_scaled(a2, f, 0.5, at(alpha)));
  CHECK(fisher_scaled(a2, f, 0.5, at(alpha)) < fisher_scaled(a2, f, 1.0, at(alpha)));
  CHECK(fisher_scaled(a2, f, 8.0, at(alpha)) < fisher_scaled(a2, f, 4.0, at(alpha)));
  // One Gaussian dominates at large alpha: F = pi (1 - (1 + t) e^{-t}), t = pi alpha R^2.
  const double big = 1e3;
  const double t = kPi * big * 0.09;
  CHECK(fisher_functional(a2, f, at(big)) == doctest::Approx(kPi * (1.0 - (1.0 + t) * std::exp(-t))).epsilon(1e-9));
  const double r = fisher_scaled(a2, f, 16.0, at(alpha)) / fisher_scaled(a2, f, 8.0, at(alpha));
  CHECK(r == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("invariance under rotation and change of basis") {
  const FiringField f = FiringField::uniform(2, 0.4);
  for (const Lattice& L : {named_lattice(NamedLattice::A2), lattice_from_params2d({0.23, 1.17})}) {
    const double base = fisher_functional(L, f, at(10.0 / kPi));
    CHECK(std::abs(fisher_functional(L.transformed(rotation2(17.0)), f, at(10.0 / kPi)) - base) < 1e-9 * base);
    Matrix swapped(2, 2);
    swapped << L.basis().col(1), L.basis().col(0);
    CHECK(std::abs(fisher_functional(Lattice(swapped), f, at(10.0 / kPi)) - base) < 1e-9 * base);
    Matrix sheared(2, 2);
    sheared << L.basis().col(0), L.basis().col(0) + L.basis().col(1);
    CHECK(std::abs(fisher_functional(Lattice(sheared), f, at(10.0 / kPi)) - base) < 1e-9 * base);
  }
}

TEST_CASE("angular refinement converges") {
  const Lattice L = lattice_from_params2d({0.17, 1.08});
  const FiringField f = FiringField::uniform(2, 0.5);
  const double coarse = fisher_functional(L, f, at(10.0 / kPi), QuadratureRule{64, 128, 32, 64});
  const double fine = fisher_functional(L, f, at(10.0 / kPi), QuadratureRule{64, 256, 32, 64});
  CHECK(std::abs(coarse - fine) < 1e-8 * fine);
  const Lattice L3 = named_lattice(NamedLattice::D3);
  const FiringField f3 = FiringField::uniform(3, 0.3);
  const double c3 = fisher_functional(L3, f3, at(10.0 / kPi), QuadratureRule{32, 64, 16, 32});
  const double f3v = fisher_functional(L3, f3, at(10.0 / kPi), QuadratureRule{32, 64, 32, 64});
  CHECK(std::abs(c3 - f3v) < 1e-8 * f3v);
}

TEST_CASE("normalized field divides by the mass") {
  const Lattice L = named_lattice(NamedLattice::Z2);
  const double raw = fisher_functional(L, FiringField::uniform(2, 0.3), at(1.0));
  const double norm = fisher_functional(L, FiringField::uniform(2, 0.3, true), at(1.0));
  CHECK(std::abs(norm - raw / (kPi * 0.09)) < 1e-12 * norm);
}

TEST_CASE("averaged theta") {
  const Lattice a2 = named_lattice(NamedLattice::A2), z2 = named_lattice(NamedLattice::Z2);
  // Small disk: theta(0) pi R^2 + tr(Hess theta)(0) pi R^4 / 8.
  const double R = 1e-3, alpha = 10.0 / kPi;
  double th = 0.0, lap = 0.0;
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b) {
      const double p2 = (a2.basis() * Vector{{double(a), double(b)}}).squaredNorm();
      const double e = std::exp(-kPi * alpha * p2);
      th += e;
      lap += e * (4.0 * kPi * kPi * alpha * alpha * p2 - 4.0 * kPi * alpha);
    }
  const double expect = th * kPi * R * R + lap * kPi * std::pow(R, 4) / 8.0;
  CHECK(std::abs(avg_theta(a2, FiringField::uniform(2, R), at(alpha)) - expect) < 1e-9 * expect);

  CHECK(avg_theta(a2, FiringField::uniform(2, 0.1), at(10.0 / kPi)) <
        avg_theta(z2, FiringField::uniform(2, 0.1), at(10.0 / kPi)));

  for (const Lattice& L : {a2, named_lattice(NamedLattice::D3)}) {
    const FiringField f = FiringField::uniform(L.dim(), 0.3);
    const double direct = avg_theta(L, f, at(1.0));
    CHECK(std::abs(direct - avg_theta_dual(L, f, at(1.0))) < 1e-8 * direct);
  }
}

TEST_CASE("small alpha regime") {
  const Lattice a2 = named_lattice(NamedLattice::A2), z2 = named_lattice(NamedLattice::Z2);
  const FiringField f = FiringField::uniform(2, 0.05);
  // The ratio F / (4 pi^2 alpha^2 avg_theta) decays toward 0: the gradient lives on q != 0 terms only.
  double prev_a = 1.0, prev_z = 1.0;
  for (double alpha : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const double ra = small_alpha_ratio(a2, f, at(alpha));
    const double rz = small_alpha_ratio(z2, f, at(alpha));
    CHECK(ra > 0.0);
    CHECK(rz > 0.0);
    CHECK(ra < prev_a);
    CHECK(rz < prev_z);
    prev_a = ra;
    prev_z = rz;
  }
  CHECK(prev_a < 1e-40);

  // Sign of F(Z2) - F(A2) agrees with the sign of the oscillating part of avg_theta(Z2) - avg_theta(A2),
  // taken from the dual sum with the disk transform R J1(2 pi R |q|) / |q|.
  auto oscillating = [&](const Lattice& L, double alpha) {
    const double R = f.radius;
    double s = 0.0;
    for (const auto& sh : shells_within(dual_lattice(L), std::sqrt(alpha * 40.0 / kPi) + 1.5)) {
      s += sh.vectors.size() * std::exp(-kPi * sh.radius * sh.radius / alpha) * R *
           std::cyl_bessel_j(1.0, 2.0 * kPi * R * sh.radius) / sh.radius;
    }
    return s / alpha;
  };
  for (double alpha : {0.2, 0.1, 0.05}) {
    const double df = fisher_functional(z2, f, at(alpha)) - fisher_functional(a2, f, at(alpha));
    const double dt = oscillating(z2, alpha) - oscillating(a2, alpha);
    CHECK(df * dt > 0.0);
  }
  // Where both averages are still resolvable in double precision the library agrees too.
  CHECK(avg_theta(z2, f, at(0.2)) > avg_theta(a2, f, at(0.2)));
  CHECK(fisher_functional(z2, f, at(0.2)) > fisher_functional(a2, f, at(0.2)));
}

TEST_CASE("integrator reuse and errors") {
  const FisherIntegrator integ(FiringField::uniform(2, 0.3), QuadratureRule{});
  const Lattice a2 = named_lattice(NamedLattice::A2);
  CHECK(integ.fisher(a2, at(2.0)) == fisher_functional(a2, FiringField::uniform(2, 0.3), at(2.0)));
  const double zero[2] = {0.0, 0.0};
  CHECK(std::abs(integ.fourier(zero) - kPi * 0.09) < 1e-12);
  CHECK_THROWS_AS(integ.fisher(named_lattice(NamedLattice::D3), at(2.0)), DomainError);
  CHECK_THROWS_AS(fisher_functional(a2, FiringField::uniform(2, 0.3), at(-1.0)), DomainError);
}
