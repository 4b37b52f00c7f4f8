// Acceptance run: one PASS/FAIL line per property, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "mkg/mkg.hpp"
#include "oracles.hpp"

using namespace mkg;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

/// Tracks the worst value of a quantity that must stay at or below `limit`.
struct Bound {
  const char* what;
  double limit;
  double worst = 0;
  void see(double v) {
    if (std::isnan(v) || v > worst) worst = v;
  }
  bool ok() const { return worst <= limit; }
  std::string str() const {
    std::ostringstream os;
    os.precision(3);
    os << what << ' ' << std::scientific << worst << (ok() ? " <= " : " > ") << limit;
    return os.str();
  }
};

Outcome combine(std::initializer_list<const Bound*> bounds, std::string extra = {}, bool extra_ok = true) {
  Outcome o;
  o.passed = extra_ok;
  for (const auto* b : bounds) {
    o.passed = o.passed && b->ok();
    o.detail += (o.detail.empty() ? "" : "; ") + b->str();
  }
  if (!extra.empty()) o.detail += (o.detail.empty() ? "" : "; ") + extra;
  return o;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<double> unit_vector(int d, int c) {
  std::vector<double> z(static_cast<std::size_t>(d + 1), 0.0);
  z[static_cast<std::size_t>(c)] = 1.0;
  return z;
}

// ---------------------------------------------------------------------------

Outcome kd_relations() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  Bound b{"max commutator residual", 1e-10};
  int runs = 0;
  for (int d : {2, 3, 4})
    for (int N : {3, 5})
      for (int t = 0; t < 20; ++t) {
        const auto p = oracle::random_p(d, rng);
        const LatticeGrid grid(d, N);
        std::mt19937_64 sampler(static_cast<std::uint64_t>(t));
        for (const auto& c : check_kd_relations(LFamily(p, grid), 1e-10, sampler)) {
          if (!c.vacuous) b.see(c.residual);
        }
        ++runs;
      }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return combine({&b}, std::to_string(runs) + " models in " + std::to_string(secs).substr(0, 5) + " s", secs <= 60);
}

Outcome self_adjoint_and_degree() {
  std::mt19937_64 rng(2);
  Bound sa{"self-adjoint", 1e-12}, deg{"degree fit", 1e-9};
  for (int d = 1; d <= 3; ++d)
    for (int N = 1; N <= 4; ++N)
      for (int t = 0; t < 3; ++t) {
        const auto params = ModelParams::multinomial(oracle::random_p(d, rng), N);
        const LatticeGrid grid(d, N);
        const LFamily L(params.p, grid);
        sa.see(check_self_adjointness(L, grid_weights(params, grid), 1e-12).residual);
        deg.see(check_degree_preservation(L, grid, 1e-9).residual);
      }
  return combine({&sa, &deg});
}

Outcome hamiltonian_spectrum() {
  std::mt19937_64 rng(3);
  Bound b{"max eigenvalue deviation", 1e-8};
  const LatticeGrid grid(2, 4);
  b.see(check_hamiltonian_spectrum(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, grid, 1e-8).residual);
  for (int t = 0; t < 10; ++t) b.see(check_hamiltonian_spectrum(oracle::random_p(2, rng), grid, 1e-8).residual);
  return combine({&b}, "multiplicities 1,2,3,4,5");
}

Outcome orthogonality() {
  std::mt19937_64 rng(4);
  Bound b{"relative Gram error", 1e-9};
  for (int d = 1; d <= 3; ++d)
    for (int N = 1; N <= 6; ++N)
      for (int t = 0; t < 2; ++t) {
        const auto kappa = random_kappa(oracle::random_p(d, rng), rng());
        b.see(orthogonality_residual(kappa, basis_table(kappa, LatticeGrid(d, N))));
      }
  return combine({&b}, "random kappa, d <= 3, N <= 6");
}

Outcome bispectrality() {
  std::mt19937_64 rng(5);
  Bound bx{"in x", 1e-9}, bn{"in n", 1e-9};
  for (int d = 1; d <= 3; ++d)
    for (int N = 1; N <= 5; ++N)
      for (int t = 0; t < 2; ++t) {
        const auto kappa = random_kappa(oracle::random_p(d, rng), rng());
        const auto table = basis_table(kappa, LatticeGrid(d, N));
        bx.see(check_bispectral_x(kappa, table, 1e-9).residual);
        bn.see(check_bispectral_n(kappa, table, 1e-9).residual);
      }
  return combine({&bx, &bn});
}

/// 50 solved models per d = 1..8, shared by the Gaudin-related properties.
struct SolvedSet {
  std::vector<GaudinModel> models;
  int fallbacks = 0;
  int failures = 0;
  std::string first_error;
};

const SolvedSet& solved_models() {
  static const SolvedSet set = [] {
    SolvedSet s;
    std::mt19937_64 rng(6);
    for (int d = 1; d <= 8; ++d)
      for (int t = 0; t < 50; ++t) {
        const auto p = oracle::random_p(d, rng);
        const auto alpha = oracle::random_alpha(d, rng);
        try {
          s.models.push_back(solve(p, alpha));
          if (s.models.back().solver.path != RootPath::bracketed) ++s.fallbacks;
        } catch (const std::exception& e) {
          ++s.failures;
          if (s.first_error.empty()) s.first_error = e.what();
        }
      }
    return s;
  }();
  return set;
}

Outcome gaudin_theorem() {
  const auto& set = solved_models();
  Bound root{"root residual", 1e-12}, sx{"spectral x", 1e-10}, sn{"spectral n", 1e-10}, com{"commutators", 1e-10};
  for (const auto& m : set.models) {
    root.see(m.solver.root_residual);
    const int N = m.dim() <= 4 ? 3 : 2;
    const auto checks = check_gaudin_diagonalization(m, basis_table(m.kappa, LatticeGrid(m.dim(), N)), 1e-10);
    sx.see(checks[0].residual);
    sn.see(checks[1].residual);
    com.see(checks[2].residual);
  }
  const bool ok = set.failures == 0 && set.fallbacks == 0 && set.models.size() == 400;
  return combine({&root, &sx, &sn, &com},
                 std::to_string(set.models.size()) + " solved, " + std::to_string(set.fallbacks) + " fallbacks, " +
                     std::to_string(set.failures) + " failures" + (set.first_error.empty() ? "" : " (" + set.first_error + ")"),
                 ok);
}

Outcome gaudin_conditions() {
  const auto& set = solved_models();
  Bound cond{"solved-model conditions", 1e-10}, agree{"eigenvalue formulas", 1e-12};
  std::mt19937_64 rng(7);
  for (const auto& m : set.models) {
    cond.see(check_prop32(m.kappa, m.alpha).max());
    if (m.dim() <= 4) {
      agree.see(check_eigenvalue_agreement(m, LatticeGrid(m.dim(), 3), 1e-12, rng, 3).residual);
    }
  }
  double weakest = std::numeric_limits<double>::infinity();
  const std::vector<double> alpha{0.0, 1.0, -0.5, 2.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto kappa = random_kappa(oracle::random_p(3, rng), seed);
    weakest = std::min(weakest, check_prop32(kappa, alpha).pairwise);
  }
  std::ostringstream os;
  os.precision(3);
  os << "generic kappa min violation " << weakest << " > 1e-3";
  return combine({&cond, &agree}, os.str(), weakest > 1e-3);
}

Outcome symmetric_case() {
  const auto m = solve(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, std::vector<double>{0.0, 1.0, -1.0});
  const double r3 = std::sqrt(3.0);
  Bound beta{"beta - (-sqrt3, sqrt3)", 1e-12}, pt{"p~ - 1/3", 1e-12}, half{"pairwise value - 1/2", 1e-15};
  beta.see(std::max(std::abs(m.beta[1] + r3), std::abs(m.beta[2] - r3)));
  for (double v : m.kappa.p_tilde) pt.see(std::abs(v - 1.0 / 3));
  half.see(std::max(std::abs(prop32_pairwise_value(m.kappa, 1, 2) - 0.5), std::abs(prop32_pairwise_value(m.kappa, 2, 1) - 0.5)));
  return combine({&beta, &pt, &half});
}

Outcome d1_reduction() {
  Bound beta{"beta_1", 1e-12}, u{"u_11", 1e-12}, spec{"-L01 spectrum", 1e-10}, vals{"2F1 values", 1e-12};
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto p = oracle::random_p(1, rng);
    const auto alpha = oracle::random_alpha(1, rng);
    const auto m = solve(p, alpha);
    const double b = -1 / (p[0] * alpha[1]);
    beta.see(std::abs(m.beta[1] - b) / std::abs(b));
    u.see(std::abs(m.kappa.U(1, 1) + p[0] / p[1]));
    for (int N = 1; N <= 6; ++N) {
      const LatticeGrid grid(1, N);
      const auto w = grid_weights(ModelParams::multinomial(p, N), grid);
      const auto L = build_L(0, 1, p, grid);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-symmetrized_dense(L, w), Eigen::EigenvaluesOnly);
      for (int k = 0; k <= N; ++k) spec.see(std::abs(es.eigenvalues()[k] - k));
      for (int n = 0; n <= N; ++n)
        for (int x = 0; x <= N; ++x) {
          const auto ref = static_cast<double>(oracle::classical_2f1(n, x, N, p[1]));
          vals.see(std::abs(eval_poly(MultiIndex{n}, MultiIndex{x}, m.kappa, N) - ref) / std::max(1.0, std::abs(ref)));
        }
    }
  }
  return combine({&beta, &u, &spec, &vals});
}

Outcome duality() {
  std::mt19937_64 rng(10);
  Bound b{"transpose mismatch", 1e-12};
  bool idempotent = true;
  for (int d = 1; d <= 3; ++d)
    for (int N = 1; N <= 4; ++N) {
      const auto kappa = random_kappa(oracle::random_p(d, rng), rng());
      const auto c = check_duality(kappa, basis_table(kappa, LatticeGrid(d, N)), 1e-12);
      b.see(c.residual);
      idempotent = idempotent && involution(involution(kappa)) == kappa;
    }
  return combine({&b}, idempotent ? "involution exactly idempotent" : "involution NOT idempotent", idempotent);
}

Outcome algebraic_relations() {
  std::mt19937_64 rng(11);
  Bound cubic{"cubic", 1e-10}, bracket{"bracket", 1e-10}, ratio{"min singular ratio", 0};
  for (int t = 0; t < 5; ++t) {
    const LFamily L(oracle::random_p(3, rng), LatticeGrid(3, 3));
    cubic.see(check_cubic_relation(L, 1e-10, rng).residual);
    bracket.see(check_bracket_dependency(L, 1e-10, rng).residual);
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 4; ++d)
    for (int N = 1; N <= 3; ++N) {
      const LatticeGrid grid(d, N);
      const LFamily L(oracle::random_p(d, rng), grid);
      smallest = std::min(smallest, 1.0 / check_linear_independence(L, grid, 1e8).residual);
    }
  std::ostringstream os;
  os.precision(3);
  os << "independence ratio " << smallest << " >= 1e-8";
  return combine({&cubic, &bracket}, os.str(), smallest >= 1e-8);
}

Outcome dual_R() {
  Bound coef{"coefficient deviation", 1e-10}, at_alpha{"|R(alpha_k)|", 1e-10};
  for (const auto& m : solved_models().models) {
    const auto r = dual_R_residual(m, std::vector<double>{0.0, 0.5});
    coef.see(r.coefficient_deviation);
    at_alpha.see(r.root_residual);
  }
  return combine({&coef, &at_alpha});
}

Outcome negative_multinomial() {
  NegativeSetup s{ModelParams::negative_multinomial({0.25, 0.25}, 2.0), {}, 6, 40, 2};
  s.kappa = random_kappa(s.params.p, 0, {.allow_generic_p = true});
  Bound bx{"pointwise x", 1e-9}, bn{"pointwise n", 1e-9}, orth{"truncated orthogonality", 1e-6};
  bx.see(check_negative_bispectral_x(s, 1e-9).residual);
  bn.see(check_negative_bispectral_n(s, 1e-9).residual);
  const auto o = check_negative_orthogonality(s, 1e-6);
  orth.see(o.passed ? o.residual : std::numeric_limits<double>::infinity());
  return combine({&bx, &bn, &orth}, "R = 40, |n| <= 2");
}

Outcome cli_round_trip() {
  const std::string cli = MKG_CLI_PATH;
  const auto dir = std::filesystem::temp_directory_path() / ("mkg_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto model = (dir / "model.json").string(), report = (dir / "report.json").string();
  std::vector<std::string> problems;

  if (run(cli + " solve --p 1/3,1/3,1/3 --alpha 1,-1 --out " + model) != 0) problems.push_back("solve exit");
  const int verify_exit = run(cli + " verify --model " + model + " --N 4 --seed 3 --out " + report);
  if (verify_exit != 0) problems.push_back("verify exit " + std::to_string(verify_exit));

  SuiteConfig cfg;
  cfg.p = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.alpha = {0.0, 1.0, -1.0};
  cfg.N = 4;
  cfg.seed = 3;
  const auto local = full_suite(cfg);
  try {
    const auto remote = report_from_json(read_json_file(report));
    if (remote.checks.size() != local.checks.size()) problems.push_back("entry count differs");
    for (std::size_t k = 0; k < std::min(remote.checks.size(), local.checks.size()); ++k) {
      if (remote.checks[k].name != local.checks[k].name || remote.checks[k].residual != local.checks[k].residual) {
        problems.push_back("residual differs: " + local.checks[k].name);
      }
    }
  } catch (const std::exception& e) {
    problems.push_back(e.what());
  }

  if (run(cli + " verify --model " + model + " --N 4 --tol operator=1e-30") != 1) problems.push_back("failure path");
  if (run(cli + " solve --p 1/3,1/3,1/3") != 64) problems.push_back("missing --alpha");
  if (run(cli + " frobnicate") != 64) problems.push_back("unknown command");
  if (run(cli + " solve --p 1/3,1/3,1/3 --alpha 1,1") != 2) problems.push_back("computation error path");
  std::filesystem::remove_all(dir);

  Outcome o;
  o.passed = problems.empty();
  o.detail = o.passed ? "residuals bit-identical; exit codes 0/1/2/64 honored" : "";
  for (const auto& p : problems) o.detail += (o.detail.empty() ? "" : "; ") + p;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> items{
      {"Kohno-Drinfeld relations", kd_relations},
      {"self-adjointness and degree preservation", self_adjoint_and_degree},
      {"Hamiltonian spectrum", hamiltonian_spectrum},
      {"orthogonality for random kappa", orthogonality},
      {"bispectrality for random kappa", bispectrality},
      {"Gaudin diagonalization", gaudin_theorem},
      {"Gaudin conditions and eigenvalues", gaudin_conditions},
      {"symmetric two-variable case", symmetric_case},
      {"one-variable reduction", d1_reduction},
      {"duality", duality},
      {"cubic, bracket and independence relations", algebraic_relations},
      {"dual R identity", dual_R},
      {"negative multinomial", negative_multinomial},
      {"CLI round trip and exit codes", cli_round_trip},
  };
  int failed = 0;
  int k = 0;
  for (const auto& [name, fn] : items) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("[%s] %2d %s: %s\n", o.passed ? "PASS" : "FAIL", k, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
