// Small tour of the library: lump a system, compare it with a perturbed
// copy, and check a simulation.

#include <iostream>

#include "probisim/probisim.hpp"

using namespace probisim;

int main() {
  // Two-state quotient: `go` leaves idle for busy or stays, `tick` finishes.
  const auto quotient_doc = parse_pts(R"(
states: idle busy
actions: go tick
idle go idle 1/4
idle go busy 3/4
busy tick idle 1
)");

  // Refine it to five states, then recover the quotient.
  const auto planted = gen_planted(quotient_doc.pts, {2, 3}, 7);
  const auto coarsest = coarsest_bisimulation(planted.lift);
  std::cout << "lifted states: " << planted.lift.n << ", bisimulation classes: " << coarsest.size() << '\n';

  const auto q = quotient(planted.lift, partition_to_classification(coarsest));
  std::cout << print_pts({q, default_state_names(q.n, "q")});
  std::cout << "bisimilar to the original: " << std::boolalpha << are_bisimilar(planted.lift, quotient_doc.pts).bisimilar
            << '\n';

  // Move up to 0.01 of mass per row; epsilon stays within twice that.
  const auto noisy = perturb(planted.lift, 0.01, 3);
  const auto r = epsilon_bisim_exact(planted.lift, noisy, NormKind::OpInf);
  std::cout << "epsilon after perturbation: " << r.epsilon << " with " << r.k1->m() << " classes\n";

  // A three-step chain is simulated by a single looping state.
  const KripkeStructure chain(3, {{0, 1}, {1, 2}});
  const KripkeStructure loop(1, {{0, 0}});
  std::cout << "largest simulation has " << largest_simulation(chain, loop).size() << " pairs\n";
}
