#pragma once

#include "gridfisher/fisher.hpp"

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gridfisher {

/// Rectangular grid over the 2D chart, masked to the fundamental domain.
struct ScanGrid2D {
  double x_min = 0.0;
  double x_max = 0.5;
  int nx = 33;
  double y_min = 0.8;
  double y_max = 1.4;
  int ny = 33;

  void validate() const;
  double x(int i) const noexcept;
  double y(int j) const noexcept;
  double cell_dx() const noexcept { return nx > 1 ? (x_max - x_min) / (nx - 1) : 0.0; }
  double cell_dy() const noexcept { return ny > 1 ? (y_max - y_min) / (ny - 1) : 0.0; }
};

struct ScanPoint {
  double x;
  double y;
  bool in_domain;
  double F;  ///< NaN outside the domain
};

struct ScanResult {
  std::vector<ScanPoint> points;  ///< x-major order
  std::size_t argmax = 0;
  std::size_t argmin = 0;

  const ScanPoint& max() const { return points.at(argmax); }
  const ScanPoint& min() const { return points.at(argmin); }
};

/// Throws DomainError when no node lies in the fundamental domain.
ScanResult scan_2d(const FisherIntegrator& integrator, const ThetaParams& params,
                   const ScanGrid2D& grid);

struct RefineOptions {
  double initial_step = 0.02;
  double x_tolerance = 1e-8;
  int max_iterations = 400;
  double y_cap = 16.0;  ///< leaving y <= y_cap ends the search with converged = false
};

struct RefineResult {
  LatticeParams2D point;  ///< reduced to the fundamental domain
  double F = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Nelder-Mead ascent of F over the 2D chart.
RefineResult refine_local(LatticeParams2D start, const FisherIntegrator& integrator,
                          const ThetaParams& params, const RefineOptions& options = {});

/// Table of functional values: one row per parameter value, one column per series.
struct SweepRecord {
  std::string parameter;
  std::vector<std::string> columns;
  std::vector<double> values;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;
};

/// F per lattice per radius; in 2D with both A2 and Z2 present a column "A2-Z2" is appended.
SweepRecord sweep_radius(const std::vector<NamedLattice>& lattices,
                         const std::vector<double>& radii, const ThetaParams& params,
                         const QuadratureRule& rule = {}, bool normalize = false);

SweepRecord sweep_alpha(const std::vector<NamedLattice>& lattices,
                        const std::vector<double>& alphas, double radius,
                        const ThetaParams& params, const QuadratureRule& rule = {},
                        bool normalize = false);

/// F for D3, D3star and Z3 on one field; a single row keyed by the field radius.
SweepRecord compare_3d(const FiringField& field, const ThetaParams& params,
                       const QuadratureRule& rule = {});

/// Bisection for a sign change of f on [lo, hi] down to width `tol`.
/// Throws DomainError if f(lo) and f(hi) have the same sign.
double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi,
                          double tol);

enum class CriticalKind { LocalMax, LocalMin, Saddle, Degenerate };
std::string_view to_string(CriticalKind kind) noexcept;

struct HessianReport {
  std::vector<double> point;
  Matrix matrix;
  std::vector<double> eigenvalues;  ///< ascending
  CriticalKind classification = CriticalKind::Degenerate;
  double asymmetry = 0.0;  ///< max |H - H^T| / max |H| before symmetrization
  double value = 0.0;      ///< F at the point
};

/// Eigenvalues with |lambda| < rel_tol * max |lambda| count as zero.
CriticalKind classify_eigenvalues(const std::vector<double>& eigenvalues, double rel_tol = 1e-7);

/// Central finite-difference Hessian of F over the 2- or 5-parameter chart.
HessianReport hessian_at(std::span<const double> point, const FisherIntegrator& integrator,
                         const ThetaParams& params, double h = 3e-3);

/// Central finite-difference chart gradient of F at `point`.
std::vector<double> chart_gradient(std::span<const double> point, const FisherIntegrator& integrator,
                                   const ThetaParams& params, double h = 1e-3);

struct StationarityReport {
  std::vector<double> point;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> gradients;  ///< one chart gradient per lambda
  double max_gradient = 0.0;                   ///< max over lambdas and components of |grad|
};

/// Chart gradient of lambda -> F_{mu_lambda}(lambda L) for each lambda, evaluated through the
/// scaling identity as lambda^{-2} F^{lambda^2 alpha}_mu(L).
StationarityReport volume_stationarity_check(std::span<const double> point,
                                             const FisherIntegrator& integrator,
                                             const ThetaParams& params,
                                             const std::vector<double>& lambdas, double h = 1e-3);

/// F along L_t = lattice_from_params2d(0, t), with F(A2) and the difference as extra columns.
SweepRecord degenerate_family_probe(const FisherIntegrator& integrator, const ThetaParams& params,
                                    const std::vector<double>& t_values);

struct QFieldPoint {
  double y1;
  double y2;
  double q;
};

/// Q on an n x n grid over [-extent, extent]^2 (the plane y3 = 0 in 3D).
std::vector<QFieldPoint> q_field(const Lattice& lattice, const ThetaParams& params, double extent,
                                 int n);

}  // namespace gridfisher
