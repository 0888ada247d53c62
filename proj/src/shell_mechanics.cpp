#include "tdcshell/shell_mechanics.hpp"

#include <sstream>

#include "tdcshell/errors.hpp"

namespace tdcshell {

void Material::validate() const {
  std::ostringstream os;
  if (!(E > 0.0)) os << "Young's modulus must be positive (got " << E << "); ";
  if (!(t > 0.0)) os << "thickness must be positive (got " << t << "); ";
  if (!(nu >= 0.0 && nu <= 0.5)) os << "Poisson ratio must lie in [0, 0.5] (got " << nu << "); ";
  if (!(alpha_s > 0.0)) os << "shear correction factor must be positive (got " << alpha_s << "); ";
  const std::string msg = os.str();
  if (!msg.empty()) throw ArgumentError("invalid material: " + msg.substr(0, msg.size() - 2));
}

EnergyDensity energy_density(const SurfaceFrame& f, const Material& mat, const FieldPointState<double>& s) {
  const StrainState<double> e = strains(f, s);
  const Mat3 m = inplane_law<double>(e.eps_bend, f.P, mat.D_B(), mat.nu);
  const Mat3 n = inplane_law<double>(e.eps_mem, f.P, mat.D_M(), mat.nu);
  const Mat3 q = (2.0 * mat.D_shear()) * e.eps_shear;
  EnergyDensity d;
  d.membrane = 0.5 * e.eps_mem.cwiseProduct(n).sum();
  d.bending = 0.5 * e.eps_bend.cwiseProduct(m).sum();
  d.shear = 0.5 * e.eps_shear.cwiseProduct(q).sum();
  return d;
}

}  // namespace tdcshell
