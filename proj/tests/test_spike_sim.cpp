#include "gridfisher/errors.hpp"
#include "gridfisher/fisher.hpp"
#include "gridfisher/rng.hpp"
#include "gridfisher/spike_sim.hpp"

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

Vector v2(double a, double b) { return Vector{{a, b}}; }

ModuleConfig module(NamedLattice n, std::vector<Vector> phases, int per_phase, std::uint64_t seed = 1) {
  return ModuleConfig{named_lattice(n), std::move(phases), per_phase, at(10.0 / kPi), seed};
}

std::vector<Vector> cell_phases(int count, std::uint64_t seed) {
  CounterStream s(seed, 99);
  std::vector<Vector> out;
  for (int i = 0; i < count; ++i) out.push_back(v2(s.uniform(), s.uniform()));
  return out;
}

}  // namespace

TEST_CASE("tuning curves") {
  const auto cfg = module(NamedLattice::Z2, {v2(0, 0), v2(0.5, 0.5), v2(0.2, -0.1)}, 1);
  // Z2 is a product of two one-dimensional sums, each a fast-converging series.
  double one = 0.0;
  for (int k = -10; k <= 10; ++k) one += std::exp(-10.0 * k * k);
  CHECK(tuning_curve(cfg, 0, v2(0, 0)) == doctest::Approx(one * one).epsilon(1e-14));
  CHECK(tuning_curve(cfg, 0, v2(0, 0)) == doctest::Approx(1.00018160796).epsilon(1e-11));

  for (std::size_t j = 0; j < 3; ++j) {
    const Vector x = v2(0.13, 0.41);
    CHECK(std::abs(tuning_curve(cfg, j, x + v2(1, 0)) - tuning_curve(cfg, j, x)) < 1e-12);
    CHECK(std::abs(tuning_curve(cfg, j, x + v2(-2, 3)) - tuning_curve(cfg, j, x)) < 1e-12);
    CHECK(tuning_curve(cfg, j, x) ==
          doctest::Approx(theta_translated(cfg.lattice, x + cfg.phases[j], cfg.theta).value).epsilon(1e-15));
  }
  // The cell center is a local minimum.
  const double centre = tuning_curve(cfg, 1, v2(0, 0));
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      if (a || b) CHECK(tuning_curve(cfg, 1, v2(0.01 * a, 0.01 * b)) > centre);
  CHECK_THROWS_AS(tuning_curve(cfg, 3, v2(0, 0)), DomainError);
}

TEST_CASE("module validation") {
  CHECK_THROWS_AS(module(NamedLattice::Z2, {}, 1).validate(), DomainError);
  CHECK_THROWS_AS(module(NamedLattice::Z2, {v2(0, 0)}, 0).validate(), DomainError);
  CHECK_THROWS_AS(module(NamedLattice::Z2, {Vector::Zero(3)}, 1).validate(), DomainError);
}

TEST_CASE("spike counts are Poisson, independent and reproducible") {
  const auto cfg = module(NamedLattice::A2, {v2(0.05, 0.02), v2(0.3, 0.1)}, 2, 17);
  const Vector x = v2(0.01, -0.02);
  const int trials = 100000;
  const auto samples = sample_spikes(cfg, x, trials);
  REQUIRE(samples.size() == static_cast<std::size_t>(trials));
  for (int j = 0; j < 2; ++j) {
    const double omega = tuning_curve(cfg, j, x);
    double s = 0.0, s2 = 0.0;
    for (const auto& smp : samples) {
      const double k = smp.counts(j, 0);
      s += k;
      s2 += k * k;
    }
    const double mean = s / trials, var = s2 / trials - mean * mean;
    CHECK(std::abs(mean - omega) < 4.0 * std::sqrt(omega / trials));
    CHECK(std::abs(var - omega) < 5.0 * std::sqrt((omega + 2.0 * omega * omega) / trials));
  }
  double m0 = 0, m1 = 0, s00 = 0, s11 = 0, s01 = 0;
  for (const auto& smp : samples) {
    m0 += smp.counts(0, 0);
    m1 += smp.counts(1, 1);
  }
  m0 /= trials;
  m1 /= trials;
  for (const auto& smp : samples) {
    const double a = smp.counts(0, 0) - m0, b = smp.counts(1, 1) - m1;
    s00 += a * a;
    s11 += b * b;
    s01 += a * b;
  }
  CHECK(std::abs(s01 / std::sqrt(s00 * s11)) <= 4.0 / std::sqrt(double(trials)));

  const auto again = sample_spikes(cfg, x, 50);
  const auto shorter = sample_spikes(cfg, x, 10);
  for (int t = 0; t < 10; ++t) {
    CHECK(again[t].counts == samples[t].counts);
    CHECK(shorter[t].counts == samples[t].counts);
  }
  auto other = cfg;
  other.seed = 18;
  bool differs = false;
  const auto o = sample_spikes(other, x, 50);
  for (int t = 0; t < 50; ++t) differs |= o[t].counts != again[t].counts;
  CHECK(differs);
  CHECK_THROWS_AS(sample_spikes(cfg, x, 0), DomainError);
}

TEST_CASE("analytic trace and Fisher matrix") {
  const auto cfg = module(NamedLattice::Z2, cell_phases(8, 5), 3);
  const Vector x = Vector::Zero(2);
  double q_sum = 0.0;
  for (const auto& y : cfg.phases) q_sum += q_value(cfg.lattice, x + y, cfg.theta);
  CHECK(analytic_fisher_trace(cfg, x) == doctest::Approx(4.0 * 3.0 * q_sum).epsilon(1e-12));
  const Matrix J = fisher_matrix(cfg, x);
  CHECK(J.trace() == doctest::Approx(analytic_fisher_trace(cfg, x)).epsilon(1e-12));
  CHECK((J - J.transpose()).cwiseAbs().maxCoeff() < 1e-14 * J.cwiseAbs().maxCoeff());

  // Linear in n, and invariant under permuting phases.
  auto bigger = cfg;
  bigger.neurons_per_phase = 12;
  CHECK(analytic_fisher_trace(bigger, x) == doctest::Approx(4.0 * analytic_fisher_trace(cfg, x)).epsilon(1e-14));
  auto permuted = cfg;
  std::reverse(permuted.phases.begin(), permuted.phases.end());
  CHECK(std::abs(analytic_fisher_trace(permuted, x) - analytic_fisher_trace(cfg, x)) <=
        1e-15 * analytic_fisher_trace(cfg, x) * 8);
}

TEST_CASE("empirical Fisher trace matches the analytic trace") {
  const auto cfg = module(NamedLattice::Z2, cell_phases(8, 5), 3, 2024);
  const Vector x = Vector::Zero(2);
  const TraceEstimate est = empirical_fisher_trace(cfg, x, 200000);
  CHECK(est.analytic == doctest::Approx(analytic_fisher_trace(cfg, x)));
  CHECK(std::abs(est.mean - est.analytic) <= 5.0 * est.standard_error);
  CHECK(est.standard_error < 0.02 * est.analytic);
  for (int l = 0; l < 2; ++l) CHECK(std::abs(est.score_mean[l]) <= 4.0 * est.score_standard_error[l]);
  CHECK_THROWS_AS(empirical_fisher_trace(cfg, x, 999), DomainError);
}

TEST_CASE("trivial zeros carry no information at the origin") {
  const std::vector<Vector> zeros{v2(0.5, 0.5), v2(0.5, 0.0), v2(0.0, 0.5), v2(0.0, 0.0)};
  const auto cfg = module(NamedLattice::Z2, zeros, 3, 9);
  const Vector x = Vector::Zero(2);
  CHECK(analytic_fisher_trace(cfg, x) < 1e-25);
  const TraceEstimate est = empirical_fisher_trace(cfg, x, 5000);
  CHECK(std::abs(est.mean) < 1e-25);
  CHECK_THROWS_AS(ml_decode(cfg, x, 10), UnidentifiableError);
}

TEST_CASE("two-phase traces: the triangular lattice is not always ahead") {
  const Vector x = Vector::Zero(2);
  int sign_changes = 0;
  double prev = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = i / 20.0;
    const std::vector<Vector> ph{v2(0.1, 0.1), v2(t, 0.2)};
    const double d = analytic_fisher_trace(module(NamedLattice::A2, ph, 1), x) -
                     analytic_fisher_trace(module(NamedLattice::Z2, ph, 1), x);
    if (i > 0 && d * prev < 0.0) ++sign_changes;
    prev = d;
  }
  CHECK(sign_changes >= 1);
}

TEST_CASE("phase aggregation converges to the normalized functional") {
  const double target = fisher_functional(named_lattice(NamedLattice::A2), FiringField::uniform(2, 0.3, true),
                                          at(10.0 / kPi));
  for (auto [count, tol] : {std::pair{10000, 0.02}, std::pair{100000, 0.007}}) {
    const auto cfg = module(NamedLattice::A2, sample_uniform_ball_phases(2, 0.3, count, 77), 1);
    CHECK(std::abs(aggregate_phases(cfg) - target) < tol * target);
  }
  CHECK(aggregate_phases(module(NamedLattice::A2, {v2(0, 0)}, 4)) < 1e-30);

  const auto pts = sample_uniform_ball_phases(3, 0.4, 2000, 1);
  double mean_r2 = 0.0;
  for (const auto& p : pts) {
    CHECK(p.norm() <= 0.4);
    mean_r2 += p.squaredNorm() / pts.size();
  }
  // E|y|^2 = 3 R^2 / 5 for the uniform 3-ball.
  CHECK(mean_r2 == doctest::Approx(0.6 * 0.16).epsilon(0.03));
}

TEST_CASE("maximum-likelihood decoding and the Cramer-Rao bound") {
  const auto phases = sample_uniform_ball_phases(2, 0.3, 50, 11);
  const Vector x = Vector::Zero(2);
  const DecodeResult r5 = ml_decode(module(NamedLattice::A2, phases, 5, 5), x, 2000);
  CHECK(r5.mse >= 0.9 * r5.crlb);
  CHECK(r5.trials == 2000);
  const DecodeResult r20 = ml_decode(module(NamedLattice::A2, phases, 20, 5), x, 2000);
  CHECK(r20.mse >= 0.9 * r20.crlb);
  CHECK(r5.mse / r20.mse == doctest::Approx(4.0).epsilon(0.25));
  CHECK(r5.crlb / r20.crlb == doctest::Approx(4.0).epsilon(1e-12));

  // At trivial zeros the likelihood is flat to fourth order, so the error shrinks like n^{-1/2}, not n^{-1}.
  const std::vector<Vector> zeros{v2(0.5, 0.5), v2(0.5, 0.0), v2(0.0, 0.5), v2(0.0, 0.0)};
  const DecodeResult z5 = decode_mse(module(NamedLattice::Z2, zeros, 5, 3), x, 500);
  const DecodeResult z20 = decode_mse(module(NamedLattice::Z2, zeros, 20, 3), x, 500);
  CHECK(std::isnan(z5.crlb));
  CHECK(z5.mse / z20.mse > 1.5);
  CHECK(z5.mse / z20.mse < 2.7);
}
