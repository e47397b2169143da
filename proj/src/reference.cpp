// Serial reference paths kept for cross-checking the parallel kernels.
#include "gridfisher/errors.hpp"
#include "gridfisher/fisher.hpp"

namespace gridfisher::reference {

double fisher_functional(const Lattice& lattice, const FiringField& field, const ThetaParams& params,
                         const QuadratureRule& rule) {
  if (lattice.dim() != field.dim) throw DomainError("lattice and firing field dimensions differ");
  const FieldQuadrature quad(field, rule);
  const int d = field.dim;
  double s = 0.0;
  for (std::size_t i = 0; i < quad.size(); ++i) {
    const Vector y = Eigen::Map<const Vector>(quad.node(i), d);
    s += quad.weight(i) * q_value(lattice, y, params);
  }
  if (field.normalize) s /= quad.total_mass();
  return s;
}

}  // namespace gridfisher::reference
