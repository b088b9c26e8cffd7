// Exact-mode VQE at the half-filled self-consistent point for both register
// layouts, followed by one 5000-shot re-evaluation at the optimal angles.
#include <iostream>

#include "qdmft/qdmft.hpp"

using namespace qdmft;

int main() {
  const TwoSiteParams p{4.0, 2.0, 0.0, 0.745356};
  const ImpurityModel model = ImpurityModel::two_site(p);
  const SpectralData exact = exact_spectral_data(model);

  for (Method m : {Method::PT, Method::CR}) {
    SolveOptions o;
    o.method = m;
    o.seed = 7;
    const SpectrumSolution sol = solve_spectrum(model, o);
    const SpectralData shots = evaluate_at_angles(sol, p, m, EvalMode::sampled(5000, 1));

    std::cout << method_name(m) << (m == Method::PT ? " (4 qubits)" : " (2 qubits)") << "\n";
    const auto rows = detail::comparison_rows({&exact, &sol.spectral, &shots}, 0.0);
    std::cout << detail::render_table({"quantity", "exact", "vqe", "5000_shots"}, rows) << "\n";
  }
}
