// Solves the symmetric two-variable model p = (1/3, 1/3, 1/3), alpha = (0, 1, -1)
// and prints the roots, the dual probabilities and a few polynomial values.

#include <cstdio>
#include <vector>

#include "mkg/mkg.hpp"

int main() {
  const std::vector<double> p{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const std::vector<double> alpha{0.0, 1.0, -1.0};
  const mkg::GaudinModel model = mkg::solve(p, alpha);

  std::printf("beta    = %.16g %.16g\n", model.beta[1], model.beta[2]);
  std::printf("p_tilde = %.16g %.16g %.16g\n", model.kappa.p_tilde[0], model.kappa.p_tilde[1], model.kappa.p_tilde[2]);

  const int N = 4;
  const mkg::BasisTable table = mkg::basis_table(model.kappa, N);
  for (std::size_t n = 0; n < 6; ++n) {
    std::printf("P_%s(x):", table.grid.unrank(n).to_string().c_str());
    for (std::size_t x = 0; x < 6; ++x) std::printf(" %9.5f", table.values(n, x));
    std::printf("\n");
  }

  mkg::SuiteConfig cfg;
  cfg.p = p;
  cfg.alpha = alpha;
  cfg.N = N;
  const mkg::VerificationReport report = mkg::full_suite(cfg);
  std::fputs(mkg::report_table(report).c_str(), stdout);
  return report.all_passed() ? 0 : 1;
}
