// Gradient descent of Ψ = ∫‖H‖² from a non-minimal Clifford torus in S³
// over a small normal deformation family.

#include <iomanip>
#include <iostream>

#include "spaceform.hpp"

using namespace spaceform;

int main() {
  const auto base = clifford_torus(1, 2, 0.6);
  const DeformationFamily fam(base.immersion, 3);
  const auto grid = make_grid(base.immersion, std::nullopt, {12});
  const DescentResult r = descend(fam, Eigen::VectorXd::Zero(fam.size()), grid, Functional::Psi, {.budget = 25});
  std::cout << std::setw(6) << "iter" << std::setw(16) << "energy" << std::setw(16) << "|grad|" << std::setw(16) << "step" << "\n";
  for (const auto& s : r.trace)
    std::cout << std::setw(6) << s.iteration << std::setw(16) << s.energy << std::setw(16) << s.grad_norm << std::setw(16) << s.step << "\n";
  std::cout << (r.converged ? "converged" : "budget exhausted") << ", final Psi = " << r.energy << "\n";
}
