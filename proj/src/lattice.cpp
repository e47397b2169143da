#include "gridfisher/lattice.hpp"

#include "gridfisher/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace gridfisher {

Lattice::Lattice(Matrix basis) : basis_(std::move(basis)) {
  if (basis_.rows() != basis_.cols() || (basis_.rows() != 2 && basis_.rows() != 3)) {
    throw DomainError("lattice basis must be a 2x2 or 3x3 matrix");
  }
  if (!basis_.allFinite()) {
    throw DomainError("lattice basis has non-finite entries");
  }
  covolume_ = std::abs(basis_.determinant());
  if (!(covolume_ > 0.0)) {
    throw DomainError("lattice basis is singular");
  }
}

Vector Lattice::point(std::span<const int> coeffs) const {
  if (static_cast<int>(coeffs.size()) != dim()) {
    throw DomainError("coefficient count does not match lattice dimension");
  }
  Vector c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = coeffs[i];
  return basis_ * c;
}

Lattice Lattice::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw DomainError("scale factor must be positive");
  return Lattice(lambda * basis_);
}

Lattice Lattice::transformed(const Matrix& map) const { return Lattice(map * basis_); }

bool LatticeParams2D::in_fundamental_domain(double tol) const noexcept {
  return x >= -tol && x <= 0.5 + tol && y > 0.0 && x * x + y * y >= 1.0 - tol;
}

Lattice lattice_from_params2d(const LatticeParams2D& p) {
  if (!(p.y > 0.0)) throw DomainError("2D chart requires y > 0");
  const double s = std::sqrt(p.y);
  Matrix b(2, 2);
  b << 1.0 / s, p.x / s,
       0.0,     s;
  return Lattice(std::move(b));
}

Lattice lattice_from_params3d(const LatticeParams3D& p) {
  if (!(p.u > 0.0) || !(p.v > 0.0)) throw DomainError("3D chart requires u > 0 and v > 0");
  const double su = std::sqrt(p.u);
  const double scale = std::pow(2.0, 1.0 / 6.0);
  Matrix b(3, 3);
  b << 1.0 / su, p.x / su, p.y / su,
       0.0,      p.v / su, p.v * p.z / su,
       0.0,      0.0,      p.u / (p.v * std::numbers::sqrt2);
  return Lattice(scale * b);
}

LatticeParams2D reduce_to_fundamental_domain(LatticeParams2D p) {
  if (!(p.y > 0.0)) throw DomainError("2D chart requires y > 0");
  // tau = x + i y is the basis ratio; SL2(Z) plus the reflection tau -> -conj(tau).
  for (int iter = 0; iter < 1000; ++iter) {
    p.x -= std::round(p.x);
    const double n2 = p.x * p.x + p.y * p.y;
    if (n2 >= 1.0 - 1e-15) break;
    p.x = -p.x / n2;
    p.y = p.y / n2;
  }
  p.x = std::abs(p.x);
  return p;
}

Lattice named_lattice(NamedLattice name) {
  switch (name) {
    case NamedLattice::A2: {
      const double s = std::sqrt(2.0 / std::sqrt(3.0));
      Matrix b(2, 2);
      b << 1.0, 0.5,
           0.0, std::sqrt(3.0) / 2.0;
      return Lattice(s * b);
    }
    case NamedLattice::Z2:
      return Lattice(Matrix::Identity(2, 2));
    case NamedLattice::Z3:
      return Lattice(Matrix::Identity(3, 3));
    case NamedLattice::D3: {
      Matrix b(3, 3);
      b << 1.0, 0.0, 1.0,
           0.0, 1.0, 1.0,
           1.0, 1.0, 0.0;
      return Lattice(std::pow(2.0, -1.0 / 3.0) * b);
    }
    case NamedLattice::D3Star: {
      Matrix b(3, 3);
      b << 1.0, 0.0, 0.5,
           0.0, 1.0, 0.5,
           0.0, 0.0, 0.5;
      return Lattice(std::pow(2.0, 1.0 / 3.0) * b);
    }
  }
  throw DomainError("unknown named lattice");
}

NamedLattice parse_named_lattice(std::string_view name) {
  if (name == "A2") return NamedLattice::A2;
  if (name == "Z2") return NamedLattice::Z2;
  if (name == "Z3") return NamedLattice::Z3;
  if (name == "D3") return NamedLattice::D3;
  if (name == "D3star" || name == "D3*") return NamedLattice::D3Star;
  throw DomainError("unknown lattice name: " + std::string(name));
}

std::string_view to_string(NamedLattice name) noexcept {
  switch (name) {
    case NamedLattice::A2: return "A2";
    case NamedLattice::Z2: return "Z2";
    case NamedLattice::Z3: return "Z3";
    case NamedLattice::D3: return "D3";
    case NamedLattice::D3Star: return "D3star";
  }
  return "?";
}

int dimension_of(NamedLattice name) noexcept {
  return (name == NamedLattice::A2 || name == NamedLattice::Z2) ? 2 : 3;
}

std::vector<double> chart_point(NamedLattice name) {
  const double c = std::cbrt(2.0);
  switch (name) {
    case NamedLattice::A2: return {0.5, std::sqrt(3.0) / 2.0};
    case NamedLattice::Z2: return {0.0, 1.0};
    case NamedLattice::Z3: return {c, 1.0, 0.0, 0.0, 0.0};
    case NamedLattice::D3: return {1.0, 1.0, 0.0, 0.5, 0.5};
    case NamedLattice::D3Star: return {1.0 / c, 1.0, 0.0, 0.5, 0.5};
  }
  throw DomainError("unknown named lattice");
}

Lattice lattice_from_chart(std::span<const double> coords) {
  if (coords.size() == 2) return lattice_from_params2d({coords[0], coords[1]});
  if (coords.size() == 5) {
    return lattice_from_params3d({coords[0], coords[1], coords[2], coords[3], coords[4]});
  }
  throw DomainError("chart point must have 2 or 5 coordinates");
}

Lattice dual_lattice(const Lattice& lattice) {
  return Lattice(lattice.basis().inverse().transpose());
}

namespace {

bool integral_in(const Matrix& basis, const Matrix& vectors, double tol) {
  const Matrix coords = basis.inverse() * vectors;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    const double c = coords.data()[i];
    if (std::abs(c - std::round(c)) > tol) return false;
  }
  return true;
}

}  // namespace

bool same_lattice(const Lattice& a, const Lattice& b, double tol) {
  if (a.dim() != b.dim()) return false;
  return integral_in(a.basis(), b.basis(), tol) && integral_in(b.basis(), a.basis(), tol);
}

std::vector<double> lattice_points_within(const Lattice& lattice, std::span<const double> center,
                                          double radius) {
  const int d = lattice.dim();
  if (static_cast<int>(center.size()) != d) throw DomainError("center dimension mismatch");
  if (!(radius >= 0.0) || !std::isfinite(radius)) throw DomainError("radius must be finite and >= 0");

  const Matrix& b = lattice.basis();
  const Matrix inv = b.inverse();
  Vector c(d);
  for (int i = 0; i < d; ++i) c[i] = center[i];
  const Vector cc = inv * c;

  // |coeff_i - cc_i| <= radius * |row_i(B^-1)| for every point of the ball.
  std::array<long, 3> lo{0, 0, 0};
  std::array<long, 3> hi{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    const double span = radius * inv.row(i).norm();
    lo[i] = static_cast<long>(std::ceil(cc[i] - span - 1e-12));
    hi[i] = static_cast<long>(std::floor(cc[i] + span + 1e-12));
  }

  std::vector<double> out;
  const double r2 = radius * radius;
  std::array<long, 3> k = lo;
  for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0]) {
    for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1]) {
      for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
        double p[3] = {0.0, 0.0, 0.0};
        double dist2 = 0.0;
        for (int r = 0; r < d; ++r) {
          double s = 0.0;
          for (int j = 0; j < d; ++j) s += b(r, j) * static_cast<double>(k[j]);
          p[r] = s;
          dist2 += (s - center[r]) * (s - center[r]);
        }
        if (dist2 <= r2) out.insert(out.end(), p, p + d);
      }
    }
  }
  return out;
}

namespace {

constexpr double kShellTol = 1e-9;

// Groups the nonzero points of norm <= max_radius into layers.
std::vector<Shell> group_shells(const Lattice& lattice, double max_radius) {
  const int d = lattice.dim();
  const std::vector<double> origin(d, 0.0);
  const std::vector<double> flat = lattice_points_within(lattice, origin, max_radius);
  struct Entry {
    double norm;
    Vector p;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < flat.size(); i += d) {
    Vector p = Eigen::Map<const Vector>(flat.data() + i, d);
    const double n = p.norm();
    if (n > kShellTol) entries.push_back({n, std::move(p)});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.norm < b.norm; });

  std::vector<Shell> shells;
  for (auto& e : entries) {
    if (shells.empty() || e.norm - shells.back().radius > kShellTol) {
      shells.push_back({e.norm, {}});
    }
    shells.back().vectors.push_back(std::move(e.p));
  }
  return shells;
}

}  // namespace

std::vector<Shell> shells_within(const Lattice& lattice, double max_radius) {
  auto shells = group_shells(lattice, max_radius + kShellTol);
  while (!shells.empty() && shells.back().radius > max_radius + kShellTol) shells.pop_back();
  return shells;
}

std::vector<Shell> enumerate_shells(const Lattice& lattice, int count) {
  if (count < 1) throw DomainError("shell count must be >= 1");
  double r = 1.5 * lattice.basis().colwise().norm().minCoeff();
  for (;;) {
    // Layers strictly inside r are complete; the last one may straddle r.
    auto shells = group_shells(lattice, r);
    while (!shells.empty() && shells.back().radius > r - 2 * kShellTol) shells.pop_back();
    if (static_cast<int>(shells.size()) >= count) {
      shells.resize(count);
      return shells;
    }
    r *= 1.5;
  }
}

double eutaxy_defect(const Shell& shell) {
  if (shell.vectors.empty()) throw DomainError("empty shell");
  const int d = static_cast<int>(shell.vectors.front().size());
  Matrix m = Matrix::Zero(d, d);
  for (const auto& p : shell.vectors) m += p * p.transpose() / p.squaredNorm();
  const double target = static_cast<double>(shell.vectors.size()) / d;
  return (m - target * Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

bool is_strongly_eutactic(const Shell& shell, double tol) {
  if (shell.vectors.size() % 2 != 0) return false;
  return eutaxy_defect(shell) <= tol;
}

}  // namespace gridfisher
