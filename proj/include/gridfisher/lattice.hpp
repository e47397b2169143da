#pragma once

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace gridfisher {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Full-rank lattice in dimension 2 or 3. Basis vectors are the matrix columns.
class Lattice {
 public:
  explicit Lattice(Matrix basis);

  int dim() const noexcept { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const noexcept { return basis_; }
  double covolume() const noexcept { return covolume_; }

  /// Lattice point with the given integer coordinates.
  Vector point(std::span<const int> coeffs) const;

  /// lambda * L
  Lattice scaled(double lambda) const;
  /// A * L for an invertible linear map A (rotations, reflections).
  Lattice transformed(const Matrix& map) const;

 private:
  Matrix basis_;
  double covolume_;
};

/// Coordinates (x, y) of the upper-half-plane chart for unit-covolume 2D lattices.
struct LatticeParams2D {
  double x = 0.0;
  double y = 1.0;

  /// Membership in D2 = {0 <= x <= 1/2, x^2 + y^2 >= 1}.
  bool in_fundamental_domain(double tol = 1e-12) const noexcept;
};

/// Five-parameter chart for unit-covolume 3D lattices. No fundamental domain is enforced.
struct LatticeParams3D {
  double u = 1.0;
  double v = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

Lattice lattice_from_params2d(const LatticeParams2D& p);
Lattice lattice_from_params3d(const LatticeParams3D& p);

/// Maps (x, y) to the point of D2 describing the same lattice up to isometry.
LatticeParams2D reduce_to_fundamental_domain(LatticeParams2D p);

enum class NamedLattice { A2, Z2, Z3, D3, D3Star };

Lattice named_lattice(NamedLattice name);
NamedLattice parse_named_lattice(std::string_view name);
std::string_view to_string(NamedLattice name) noexcept;
int dimension_of(NamedLattice name) noexcept;

/// Chart coordinates of a named lattice: (x, y) in 2D, (u, v, x, y, z) in 3D.
std::vector<double> chart_point(NamedLattice name);
/// Builds a lattice from 2 or 5 chart coordinates.
Lattice lattice_from_chart(std::span<const double> coords);

/// Basis is the inverse transpose of L's basis.
Lattice dual_lattice(const Lattice& lattice);

/// Same point set: every basis vector of each lattice has integer coordinates in the other.
bool same_lattice(const Lattice& a, const Lattice& b, double tol = 1e-9);

/// All lattice points p with |p - center| <= radius, flattened with stride dim.
/// Enumeration order is deterministic (lexicographic in integer coordinates).
std::vector<double> lattice_points_within(const Lattice& lattice, std::span<const double> center,
                                          double radius);

struct Shell {
  double radius = 0.0;
  std::vector<Vector> vectors;
};

/// The first `count` nonzero layers {p : |p| = r}, radii increasing. Norms are grouped
/// with absolute tolerance 1e-9.
std::vector<Shell> enumerate_shells(const Lattice& lattice, int count);
/// Every nonzero layer with radius <= max_radius.
std::vector<Shell> shells_within(const Lattice& lattice, double max_radius);

/// Largest entry of |sum p p^T / |p|^2 - (|m| / d) I| over the shell.
double eutaxy_defect(const Shell& shell);
bool is_strongly_eutactic(const Shell& shell, double tol);

}  // namespace gridfisher
