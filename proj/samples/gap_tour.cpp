// Walks through the catalog: pointwise ‖α‖², mean curvature, the Π residual
// and the total scalar curvature identity for each spherical entry.

#include <iomanip>
#include <iostream>

#include "spaceform.hpp"

using namespace spaceform;

int main() {
  std::cout << std::left << std::setw(42) << "immersion" << std::setw(12) << "|alpha|^2" << std::setw(12) << "h"
            << std::setw(14) << "Pi residual" << "scalar identity (rel)\n";
  for (const auto& e : {minimal_clifford_torus(1, 2), clifford_torus(1, 2, 0.6), minimal_clifford_torus(1, 3), veronese(),
                        equatorial_sphere(2, 1), small_sphere(2, 0.8)}) {
    const Immersion& imm = e.immersion;
    const ShapeData sd = local_shape(imm, ChartPoint::Constant(imm.domain_dim(), 0.7));
    const auto coarse = make_grid(imm, std::nullopt, {imm.domain_dim() == 3 ? 6 : 16});
    const double residual = el_residual_pi(imm, coarse).sup_residual;
    const ScalarIdentity s = total_scalar_identity(imm, coarse);
    std::cout << std::setw(42) << imm.name() << std::setw(12) << sd.alpha_sq << std::setw(12) << sd.mean_curvature
              << std::setw(14) << residual << s.relative_defect << "\n";
  }
  const Lemma11Result r = lemma11_maximize(2, 1, 1.0, 16, 2000, 1);
  std::cout << "\nmax trace(A1 sum A_k^2) at n=2, p=1, h=1: " << r.value << " (bound 1.5)\n";
}
