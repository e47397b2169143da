#include "gridfisher/landscape.hpp"

#include "gridfisher/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gridfisher {

void ScanGrid2D::validate() const {
  if (nx < 1 || ny < 1) throw DomainError("scan grid needs at least one node per axis");
  if (!(x_max >= x_min) || !(y_max >= y_min)) throw DomainError("scan grid ranges are inverted");
  if (!(y_min > 0.0)) throw DomainError("scan grid requires y_min > 0");
}

double ScanGrid2D::x(int i) const noexcept {
  return nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1);
}

double ScanGrid2D::y(int j) const noexcept {
  return ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1);
}

ScanResult scan_2d(const FisherIntegrator& integrator, const ThetaParams& params,
                   const ScanGrid2D& grid) {
  grid.validate();
  if (integrator.field().dim != 2) throw DomainError("scan_2d needs a 2D firing field");
  ScanResult out;
  out.points.reserve(static_cast<std::size_t>(grid.nx) * grid.ny);
  bool any = false;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.ny; ++j) {
      const LatticeParams2D p{grid.x(i), grid.y(j)};
      ScanPoint pt{p.x, p.y, p.in_fundamental_domain(), std::numeric_limits<double>::quiet_NaN()};
      if (pt.in_domain) {
        pt.F = integrator.fisher(lattice_from_params2d(p), params);
        const std::size_t k = out.points.size();
        if (!any || pt.F > out.points[out.argmax].F) out.argmax = k;
        if (!any || pt.F < out.points[out.argmin].F) out.argmin = k;
        any = true;
      }
      out.points.push_back(pt);
    }
  }
  if (!any) throw DomainError("scan grid has no node inside the fundamental domain");
  return out;
}

RefineResult refine_local(LatticeParams2D start, const FisherIntegrator& integrator,
                          const ThetaParams& params, const RefineOptions& options) {
  if (!(start.y > 0.0)) throw DomainError("refine_local start needs y > 0");
  using P = std::array<double, 2>;
  auto value = [&](const P& p) {
    if (!(p[1] > 0.0)) return -std::numeric_limits<double>::infinity();
    return integrator.fisher(lattice_from_params2d({p[0], p[1]}), params);
  };

  std::array<P, 3> v{P{start.x, start.y}, P{start.x + options.initial_step, start.y},
                     P{start.x, start.y + options.initial_step}};
  std::array<double, 3> f{};
  for (int k = 0; k < 3; ++k) f[k] = value(v[k]);

  RefineResult res;
  bool capped = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    // Sort descending by F: v[0] best, v[2] worst.
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] > f[b]; });
    const std::array<P, 3> vs{v[idx[0]], v[idx[1]], v[idx[2]]};
    const std::array<double, 3> fs{f[idx[0]], f[idx[1]], f[idx[2]]};
    v = vs;
    f = fs;

    double diam = 0.0;
    for (int k = 1; k < 3; ++k) {
      diam = std::max(diam, std::hypot(v[k][0] - v[0][0], v[k][1] - v[0][1]));
    }
    if (diam < options.x_tolerance) {
      res.converged = true;
      break;
    }
    if (v[0][1] > options.y_cap) {
      capped = true;
      break;
    }

    const P c{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    auto along = [&](double t) { return P{c[0] + t * (v[2][0] - c[0]), c[1] + t * (v[2][1] - c[1])}; };
    const P r = along(-1.0);
    const double fr = value(r);
    if (fr > f[0]) {
      const P e = along(-2.0);
      const double fe = value(e);
      if (fe > fr) {
        v[2] = e;
        f[2] = fe;
      } else {
        v[2] = r;
        f[2] = fr;
      }
    } else if (fr > f[1]) {
      v[2] = r;
      f[2] = fr;
    } else {
      const bool outside = fr > f[2];
      const P k = along(outside ? -0.5 : 0.5);
      const double fk = value(k);
      if (fk > (outside ? fr : f[2])) {
        v[2] = k;
        f[2] = fk;
      } else {
        for (int j = 1; j < 3; ++j) {
          v[j] = P{v[0][0] + 0.5 * (v[j][0] - v[0][0]), v[0][1] + 0.5 * (v[j][1] - v[0][1])};
          f[j] = value(v[j]);
        }
      }
    }
  }

  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (f[k] > f[best]) best = k;
  }
  res.iterations = it;
  res.F = f[best];
  res.point = reduce_to_fundamental_domain({v[best][0], v[best][1]});
  if (capped) res.converged = false;
  return res;
}

std::size_t SweepRecord::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw DomainError("sweep has no column " + std::string(name));
}

namespace {

std::vector<double> lattice_row(const std::vector<Lattice>& lattices,
                                const FisherIntegrator& integ, const ThetaParams& params) {
  std::vector<double> row;
  row.reserve(lattices.size() + 1);
  for (const auto& l : lattices) row.push_back(integ.fisher(l, params));
  return row;
}

SweepRecord sweep_header(const std::string& parameter, const std::vector<NamedLattice>& lattices,
                         int& dim, std::ptrdiff_t& a2, std::ptrdiff_t& z2) {
  if (lattices.empty()) throw DomainError("sweep needs at least one lattice");
  SweepRecord rec;
  rec.parameter = parameter;
  dim = dimension_of(lattices.front());
  a2 = z2 = -1;
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    if (dimension_of(lattices[i]) != dim) throw DomainError("sweep lattices must share a dimension");
    rec.columns.emplace_back(to_string(lattices[i]));
    if (lattices[i] == NamedLattice::A2) a2 = static_cast<std::ptrdiff_t>(i);
    if (lattices[i] == NamedLattice::Z2) z2 = static_cast<std::ptrdiff_t>(i);
  }
  if (a2 >= 0 && z2 >= 0) rec.columns.emplace_back("A2-Z2");
  return rec;
}

std::vector<Lattice> build(const std::vector<NamedLattice>& names) {
  std::vector<Lattice> out;
  for (auto n : names) out.push_back(named_lattice(n));
  return out;
}

}  // namespace

SweepRecord sweep_radius(const std::vector<NamedLattice>& lattices,
                         const std::vector<double>& radii, const ThetaParams& params,
                         const QuadratureRule& rule, bool normalize) {
  int dim = 0;
  std::ptrdiff_t a2 = -1, z2 = -1;
  SweepRecord rec = sweep_header("R", lattices, dim, a2, z2);
  const auto ls = build(lattices);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly ascending");
    const FisherIntegrator integ(FiringField::uniform(dim, radii[i], normalize), rule);
    auto row = lattice_row(ls, integ, params);
    if (a2 >= 0 && z2 >= 0) row.push_back(row[a2] - row[z2]);
    rec.values.push_back(radii[i]);
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

SweepRecord sweep_alpha(const std::vector<NamedLattice>& lattices,
                        const std::vector<double>& alphas, double radius,
                        const ThetaParams& params, const QuadratureRule& rule, bool normalize) {
  int dim = 0;
  std::ptrdiff_t a2 = -1, z2 = -1;
  SweepRecord rec = sweep_header("alpha", lattices, dim, a2, z2);
  const auto ls = build(lattices);
  const FisherIntegrator integ(FiringField::uniform(dim, radius, normalize), rule);
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end());
  for (double a : sorted) {
    ThetaParams p = params;
    p.alpha = a;
    auto row = lattice_row(ls, integ, p);
    if (a2 >= 0 && z2 >= 0) row.push_back(row[a2] - row[z2]);
    rec.values.push_back(a);
    rec.rows.push_back(std::move(row));
  }
  return rec;
}

SweepRecord compare_3d(const FiringField& field, const ThetaParams& params,
                       const QuadratureRule& rule) {
  if (field.dim != 3) throw DomainError("compare_3d needs a 3D firing field");
  const std::vector<NamedLattice> names{NamedLattice::D3, NamedLattice::D3Star, NamedLattice::Z3};
  SweepRecord rec;
  rec.parameter = "R";
  for (auto n : names) rec.columns.emplace_back(to_string(n));
  const FisherIntegrator integ(field, rule);
  rec.values.push_back(field.radius);
  rec.rows.push_back(lattice_row(build(names), integ, params));
  return rec;
}

double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi,
                          double tol) {
  if (!(hi > lo) || !(tol > 0.0)) throw DomainError("bisection needs lo < hi and tol > 0");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw DomainError("no sign change on the bisection bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string_view to_string(CriticalKind kind) noexcept {
  switch (kind) {
    case CriticalKind::LocalMax: return "LocalMax";
    case CriticalKind::LocalMin: return "LocalMin";
    case CriticalKind::Saddle: return "Saddle";
    case CriticalKind::Degenerate: return "Degenerate";
  }
  return "?";
}

CriticalKind classify_eigenvalues(const std::vector<double>& eigenvalues, double rel_tol) {
  double scale = 0.0;
  for (double e : eigenvalues) scale = std::max(scale, std::abs(e));
  if (eigenvalues.empty() || scale == 0.0) return CriticalKind::Degenerate;
  int neg = 0, pos = 0;
  for (double e : eigenvalues) {
    if (std::abs(e) < rel_tol * scale) return CriticalKind::Degenerate;
    (e < 0.0 ? neg : pos)++;
  }
  if (pos == 0) return CriticalKind::LocalMax;
  if (neg == 0) return CriticalKind::LocalMin;
  return CriticalKind::Saddle;
}

namespace {

double chart_value(std::span<const double> point, const FisherIntegrator& integ,
                   const ThetaParams& params) {
  const double v = integ.fisher(lattice_from_chart(point), params);
  if (!std::isfinite(v)) throw EvaluationError("non-finite F at a stencil point");
  return v;
}

void check_chart(std::span<const double> point, const FisherIntegrator& integ) {
  const std::size_t expect = integ.field().dim == 2 ? 2 : 5;
  if (point.size() != expect) throw DomainError("chart point size does not match field dimension");
}

}  // namespace

HessianReport hessian_at(std::span<const double> point, const FisherIntegrator& integrator,
                         const ThetaParams& params, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  check_chart(point, integrator);
  const int n = static_cast<int>(point.size());
  std::vector<double> x(point.begin(), point.end());
  auto at = [&](int i, double di, int j, double dj) {
    std::vector<double> y = x;
    y[i] += di;
    y[j] += dj;
    return chart_value(y, integrator, params);
  };

  HessianReport rep;
  rep.point = x;
  rep.value = chart_value(x, integrator, params);
  Matrix H(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = (at(i, h, i, 0.0) - 2.0 * rep.value + at(i, -h, i, 0.0)) / (h * h);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      H(i, j) = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) /
                (4.0 * h * h);
    }
  }
  const double scale = H.cwiseAbs().maxCoeff();
  rep.asymmetry = scale > 0.0 ? (H - H.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  rep.matrix = 0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(rep.matrix, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  rep.classification = classify_eigenvalues(rep.eigenvalues);
  return rep;
}

std::vector<double> chart_gradient(std::span<const double> point, const FisherIntegrator& integrator,
                                   const ThetaParams& params, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  check_chart(point, integrator);
  std::vector<double> x(point.begin(), point.end()), g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (chart_value(a, integrator, params) - chart_value(b, integrator, params)) / (2.0 * h);
  }
  return g;
}

StationarityReport volume_stationarity_check(std::span<const double> point,
                                             const FisherIntegrator& integrator,
                                             const ThetaParams& params,
                                             const std::vector<double>& lambdas, double h) {
  if (lambdas.empty()) throw DomainError("stationarity check needs at least one lambda");
  StationarityReport rep;
  rep.point.assign(point.begin(), point.end());
  rep.lambdas = lambdas;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw DomainError("scale factor must be positive");
    ThetaParams p = params;
    p.alpha = params.alpha * lam * lam;
    auto g = chart_gradient(point, integrator, p, h);
    for (double& c : g) {
      c /= lam * lam;
      rep.max_gradient = std::max(rep.max_gradient, std::abs(c));
    }
    rep.gradients.push_back(std::move(g));
  }
  return rep;
}

SweepRecord degenerate_family_probe(const FisherIntegrator& integrator, const ThetaParams& params,
                                    const std::vector<double>& t_values) {
  if (integrator.field().dim != 2) throw DomainError("degenerate family probe is two-dimensional");
  SweepRecord rec;
  rec.parameter = "t";
  rec.columns = {"F_t", "F_A2", "F_t-F_A2"};
  const double fa2 = integrator.fisher(named_lattice(NamedLattice::A2), params);
  std::vector<double> ts = t_values;
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    if (!(t >= 1.0)) throw DomainError("degenerate family needs t >= 1");
    const double ft = integrator.fisher(lattice_from_params2d({0.0, t}), params);
    rec.values.push_back(t);
    rec.rows.push_back({ft, fa2, ft - fa2});
  }
  return rec;
}

std::vector<QFieldPoint> q_field(const Lattice& lattice, const ThetaParams& params, double extent,
                                 int n) {
  if (!(extent > 0.0) || n < 2) throw DomainError("q_field needs extent > 0 and n >= 2");
  const ThetaKernel kernel(lattice, params, extent * std::sqrt(2.0));
  std::vector<QFieldPoint> out(static_cast<std::size_t>(n) * n);
  const long total = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < total; ++k) {
    const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
    const double y[3] = {-extent + 2.0 * extent * i / (n - 1), -extent + 2.0 * extent * j / (n - 1),
                         0.0};
    out[k] = {y[0], y[1], kernel.q(y)};
  }
  return out;
}

}  // namespace gridfisher
