// mkg: solve, tabulate and verify multinomial Krawtchouk / Gaudin models.
//
// Exit codes: 0 pass, 1 check failure, 2 computation error, 64 usage.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mkg/mkg.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitComputation = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> reals(const std::string& text, const char* flag) {
  try {
    return mkg::parse_real_list(text);
  } catch (const mkg::Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::vector<int> ints(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (double v : reals(text, flag)) {
    if (v != std::floor(v) || v < 0) throw UsageError(std::string(flag) + ": entries must be nonnegative integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

/// alpha with d + 1 entries; a missing leading 0 is prepended.
std::vector<double> full_alpha(std::vector<double> alpha, std::size_t d) {
  if (alpha.size() == d) alpha.insert(alpha.begin(), 0.0);
  if (alpha.size() != d + 1) {
    throw UsageError("--alpha needs d = " + std::to_string(d) + " entries (or d + 1 with a leading 0)");
  }
  if (alpha[0] != 0.0) throw UsageError("--alpha: the entry for slot 0 must be 0");
  return alpha;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

mkg::Tolerances profile_tolerances() {
  mkg::Tolerances t;
  const char* env = std::getenv("MKG_TOLERANCE_PROFILE");
  const std::string profile = env ? env : "default";
  double factor = 1;
  if (profile == "strict") {
    factor = 0.1;
  } else if (profile == "loose") {
    factor = 100;
  } else if (profile != "default" && !profile.empty()) {
    throw UsageError("MKG_TOLERANCE_PROFILE must be default, strict or loose");
  }
  for (double* v : {&t.op, &t.hypergeometric, &t.truncated, &t.self_adjoint, &t.degree_fit, &t.spectrum, &t.root,
                    &t.eigen_agreement, &t.normalization}) {
    *v *= factor;
  }
  t.independence_condition /= factor;
  return t;
}

void apply_override(mkg::Tolerances& t, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--tol expects category=value, got '" + spec + "'");
  const std::string key = spec.substr(0, eq);
  const double value = reals(spec.substr(eq + 1), "--tol").at(0);
  const std::map<std::string, double*> slots{
      {"operator", &t.op},          {"hypergeometric", &t.hypergeometric},
      {"truncated", &t.truncated},  {"self_adjoint", &t.self_adjoint},
      {"degree", &t.degree_fit},    {"independence", &t.independence_condition},
      {"spectrum", &t.spectrum},    {"root", &t.root},
      {"eigen", &t.eigen_agreement}, {"normalization", &t.normalization}};
  const auto it = slots.find(key);
  if (it == slots.end()) throw UsageError("--tol: unknown category '" + key + "'");
  *it->second = value;
}

std::string join_reals(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + mkg::format_double(v[i]);
  return s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multinomial Krawtchouk polynomials and the Gaudin model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mkg::kVersion));

  // solve
  std::string p_text, alpha_text, out_path, model_path;
  bool force_companion = false, allow_generic = false;
  auto* solve = app.add_subcommand("solve", "solve R(z; p, alpha) for beta and build the model");
  solve->add_option("--p", p_text, "probabilities p_0..p_d (decimal or a/b)")->required();
  solve->add_option("--alpha", alpha_text, "alpha_1..alpha_d (leading 0 optional)")->required();
  solve->add_option("--out", out_path, "write the model JSON here instead of stdout");
  solve->add_flag("--companion", force_companion, "use the companion-matrix root path");
  solve->add_flag("--allow-generic", allow_generic, "accept nonzero p of any sign");

  // table
  int N = -1;
  bool gram = false;
  unsigned threads = 0;
  auto* table = app.add_subcommand("table", "tabulate P_n(x) over the lattice as CSV");
  table->add_option("--model", model_path, "model or kappa JSON")->required();
  table->add_option("--N", N, "lattice bound")->required()->check(CLI::NonNegativeNumber);
  table->add_flag("--gram", gram, "append the Gram matrix and the norm comparison");
  table->add_option("--out", out_path, "CSV output path");
  table->add_option("--threads", threads, "worker threads (0 = all cores)");

  // eval
  std::string n_text, x_text, c_text, s_text;
  auto* eval = app.add_subcommand("eval", "evaluate one P_n(x)");
  eval->add_option("--model", model_path, "model or kappa JSON")->required();
  eval->add_option("--n", n_text, "degree index n_1..n_d")->required();
  eval->add_option("--x", x_text, "point x_1..x_d")->required();
  eval->add_option("--N", N, "lattice bound (multinomial)");
  eval->add_option("--c", c_text, "negative multinomial c_1..c_d");
  eval->add_option("--s", s_text, "negative multinomial s");

  // random-kappa
  std::uint64_t seed = 0;
  auto* rk = app.add_subcommand("random-kappa", "draw a random parameter point for p");
  rk->add_option("--p", p_text, "probabilities p_0..p_d")->required();
  rk->add_option("--seed", seed, "random seed");
  rk->add_flag("--allow-generic", allow_generic, "accept nonzero p of any sign");
  rk->add_option("--out", out_path, "JSON output path");

  // verify
  std::string mode_text;
  std::vector<std::string> tol_specs;
  bool json_stdout = false;
  int radius = 40;
  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--p", p_text, "probabilities p_0..p_d");
  verify->add_option("--alpha", alpha_text, "alpha_1..alpha_d");
  verify->add_option("--model", model_path, "verify a solved model JSON");
  verify->add_option("--N", N, "lattice bound")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--mode", mode_text, "multinomial, negative or all")
      ->check(CLI::IsMember({"multinomial", "negative", "all"}));
  verify->add_option("--c", c_text, "negative multinomial c_1..c_d");
  verify->add_option("--s", s_text, "negative multinomial s");
  verify->add_option("--radius", radius, "truncation radius for negative mode")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol_specs, "tolerance override category=value (repeatable)");
  verify->add_option("--out", out_path, "write the JSON report here");
  verify->add_flag("--json", json_stdout, "print JSON instead of the text table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*solve) {
      const auto p = reals(p_text, "--p");
      const auto alpha = full_alpha(reals(alpha_text, "--alpha"), p.size() - 1);
      mkg::SolveOptions opts;
      opts.roots.force_companion = force_companion;
      opts.allow_generic_p = allow_generic;
      const auto model = mkg::solve(p, alpha, opts);
      const std::string text = mkg::model_to_json(model).dump(2) + "\n";
      std::ostream& info = out_path.empty() || out_path == "-" ? std::cerr : std::cout;
      write_output(out_path, text);
      std::vector<double> beta(model.beta.begin() + 1, model.beta.end());
      info << "beta    = " << join_reals(beta) << '\n'
           << "p_tilde = " << join_reals(model.kappa.p_tilde) << '\n'
           << "solver  = " << mkg::to_string(model.solver.path) << ", " << model.solver.iterations
           << " iterations, root residual " << model.solver.root_residual << ", kappa residual "
           << model.solver.kappa_residual << '\n';
      return kExitPass;
    }

    if (*table) {
      const auto kappa = mkg::kappa_from_any(mkg::read_json_file(model_path));
      const auto t = mkg::basis_table(kappa, mkg::LatticeGrid(kappa.dim(), N), threads);
      std::ostringstream os;
      mkg::write_table_csv(os, t);
      if (gram) mkg::write_gram_csv(os, t, kappa);
      write_output(out_path, os.str());
      return kExitPass;
    }

    if (*eval) {
      const auto kappa = mkg::kappa_from_any(mkg::read_json_file(model_path));
      const mkg::MultiIndex n(ints(n_text, "--n")), x(ints(x_text, "--x"));
      double value = 0;
      if (!c_text.empty() || !s_text.empty()) {
        if (c_text.empty() || s_text.empty() || N >= 0) throw UsageError("negative mode needs --c and --s and no --N");
        value = mkg::eval_neg_poly(n, x, kappa, reals(c_text, "--c"), reals(s_text, "--s").at(0));
      } else {
        if (N < 0) throw UsageError("--N is required");
        value = mkg::eval_poly(n, x, kappa, N);
      }
      std::cout << mkg::format_double(value) << '\n';
      return kExitPass;
    }

    if (*rk) {
      const auto p = reals(p_text, "--p");
      const auto kappa = mkg::random_kappa(p, seed, {.allow_generic_p = allow_generic});
      write_output(out_path, mkg::kappa_to_json(kappa).dump(2) + "\n");
      return kExitPass;
    }

    // verify
    mkg::SuiteConfig cfg;
    cfg.seed = seed;
    cfg.tol = profile_tolerances();
    for (const auto& spec : tol_specs) apply_override(cfg.tol, spec);
    const bool has_multinomial = !p_text.empty() || !model_path.empty();
    const bool has_negative = !c_text.empty() || !s_text.empty();
    if (!p_text.empty() && !model_path.empty()) throw UsageError("give either --p/--alpha or --model");
    if (has_negative && (c_text.empty() || s_text.empty())) throw UsageError("negative mode needs both --c and --s");
    if (mode_text.empty()) {
      mode_text = has_multinomial && has_negative ? "all" : has_negative ? "negative" : "multinomial";
    }
    cfg.mode = mode_text == "all" ? mkg::SuiteMode::all
               : mode_text == "negative" ? mkg::SuiteMode::negative
                                         : mkg::SuiteMode::multinomial;
    if (cfg.mode != mkg::SuiteMode::negative) {
      if (!has_multinomial) throw UsageError("multinomial checks need --p and --alpha, or --model");
      if (N < 0) throw UsageError("--N is required");
      cfg.N = N;
      if (!model_path.empty()) {
        cfg.model = mkg::model_from_json(mkg::read_json_file(model_path));
        cfg.p = cfg.model->p;
        cfg.alpha = cfg.model->alpha;
      } else {
        if (alpha_text.empty()) throw UsageError("--alpha is required with --p");
        cfg.p = reals(p_text, "--p");
        cfg.alpha = full_alpha(reals(alpha_text, "--alpha"), cfg.p.size() - 1);
      }
    } else if (has_multinomial) {
      throw UsageError("--mode negative takes --c and --s only");
    }
    if (cfg.mode != mkg::SuiteMode::multinomial) {
      if (!has_negative) throw UsageError("negative checks need --c and --s");
      cfg.c = reals(c_text, "--c");
      cfg.s = reals(s_text, "--s").at(0);
      cfg.truncation_radius = radius;
    }

    const auto report = mkg::full_suite(cfg);
    const std::string js = mkg::report_to_json(report).dump(2) + "\n";
    if (!out_path.empty()) write_output(out_path, js);
    std::cout << (json_stdout ? js : mkg::report_table(report));
    if (report.any_errored()) return kExitComputation;
    return report.all_passed() ? kExitPass : kExitCheckFailure;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const mkg::Error& e) {
    std::cerr << mkg::json{{"error", mkg::to_string(e.kind())}, {"message", e.what()}}.dump() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << mkg::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return kExitComputation;
  }
}
