#pragma once

// JSON and CSV serialization. Doubles are written in shortest round-trip form,
// so reading a file back reproduces every value bit for bit.

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mkg/error.hpp"
#include "mkg/gaudin.hpp"
#include "mkg/kappa.hpp"
#include "mkg/krawtchouk.hpp"
#include "mkg/lattice.hpp"
#include "mkg/verify.hpp"

namespace mkg {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Scalars

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Parses a decimal or a rational literal "a/b"; the quotient is rounded once.
inline double parse_real(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto number = [&](std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
      fail(ErrorKind::argument, "not a number: '" + std::string(s) + "'");
    }
    return v;
  };
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return number(text);
  const double den = number(text.substr(slash + 1));
  if (den == 0) fail(ErrorKind::argument, "zero denominator in '" + std::string(text) + "'");
  return number(text.substr(0, slash)) / den;
}

inline std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json matrix_rows(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_rows(const json& rows, std::size_t n) {
  if (!rows.is_array() || rows.size() != n) fail(ErrorKind::argument, "U must have d + 1 rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) fail(ErrorKind::argument, "U must have d + 1 columns");
    for (std::size_t c = 0; c < n; ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
  }
  return M;
}

/// Residuals may be infinite; JSON has no literal for that.
inline json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double real_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace detail

inline json kappa_to_json(const KrawtchoukParam& k) {
  json meta{{"generator", k.meta.generator}};
  meta["seed"] = k.meta.seed ? json(*k.meta.seed) : json(nullptr);
  return json{{"d", k.dim()}, {"nu", k.nu}, {"p", k.p}, {"p_tilde", k.p_tilde}, {"U", detail::matrix_rows(k.U)}, {"meta", meta}};
}

inline KrawtchoukParam kappa_from_json(const json& j) {
  try {
    KrawtchoukParam k;
    k.nu = j.at("nu").get<double>();
    k.p = j.at("p").get<std::vector<double>>();
    k.p_tilde = j.at("p_tilde").get<std::vector<double>>();
    if (k.p.size() < 2 || k.p_tilde.size() != k.p.size()) fail(ErrorKind::argument, "p and p_tilde need d + 1 entries");
    if (j.contains("d") && j.at("d").get<int>() != k.dim()) fail(ErrorKind::argument, "d disagrees with p");
    k.U = detail::matrix_from_rows(j.at("U"), k.p.size());
    if (j.contains("meta")) {
      const auto& m = j.at("meta");
      k.meta.generator = m.value("generator", std::string("manual"));
      if (m.contains("seed") && !m.at("seed").is_null()) k.meta.seed = m.at("seed").get<std::uint64_t>();
    }
    return k;
  } catch (const json::exception& e) {
    fail(ErrorKind::argument, std::string("malformed kappa JSON: ") + e.what());
  }
}

inline json model_to_json(const GaudinModel& m) {
  return json{{"d", m.dim()},
              {"p", m.p},
              {"alpha", m.alpha},
              {"beta", m.beta},
              {"kappa", kappa_to_json(m.kappa)},
              {"solver",
               {{"path", to_string(m.solver.path)},
                {"iterations", m.solver.iterations},
                {"root_residual", m.solver.root_residual},
                {"kappa_residual", m.solver.kappa_residual}}}};
}

inline GaudinModel model_from_json(const json& j) {
  try {
    GaudinModel m;
    m.p = j.at("p").get<std::vector<double>>();
    m.alpha = j.at("alpha").get<std::vector<double>>();
    m.beta = j.at("beta").get<std::vector<double>>();
    m.kappa = kappa_from_json(j.at("kappa"));
    if (m.alpha.size() != m.p.size() || m.beta.size() != m.p.size() || m.kappa.p != m.p) {
      fail(ErrorKind::argument, "model JSON: p, alpha, beta and kappa disagree");
    }
    const auto& s = j.at("solver");
    const auto path = s.at("path").get<std::string>();
    m.solver.path = path == "companion" ? RootPath::companion : RootPath::bracketed;
    m.solver.iterations = s.at("iterations").get<int>();
    m.solver.root_residual = s.at("root_residual").get<double>();
    m.solver.kappa_residual = s.at("kappa_residual").get<double>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::argument, std::string("malformed model JSON: ") + e.what());
  }
}

inline json check_to_json(const Check& c) {
  return json{{"name", c.name},       {"residual", detail::real_or_null(c.residual)},
              {"tolerance", c.tolerance}, {"passed", c.passed},
              {"vacuous", c.vacuous}, {"errored", c.errored},
              {"context", c.context}};
}

inline json report_to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(check_to_json(c));
  return json{{"version", r.version}, {"seed", r.seed}, {"passed", r.all_passed()}, {"checks", checks}};
}

inline VerificationReport report_from_json(const json& j) {
  try {
    VerificationReport r;
    r.version = j.at("version").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("checks")) {
      r.checks.push_back(Check{c.at("name").get<std::string>(), detail::real_from(c.at("residual")),
                               c.at("tolerance").get<double>(), c.at("passed").get<bool>(),
                               c.value("vacuous", false), c.value("context", std::string()),
                               c.value("errored", false)});
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::argument, std::string("malformed report JSON: ") + e.what());
  }
}

/// A model file or a bare kappa file; models are recognized by their "kappa" member.
inline KrawtchoukParam kappa_from_any(const json& j) {
  return j.contains("kappa") ? model_from_json(j).kappa : kappa_from_json(j);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::argument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::argument, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Text report

inline std::string report_table(const VerificationReport& r) {
  std::size_t w = 5;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  std::ostringstream os;
  auto pad = [](std::string s, std::size_t n) {
    s.resize(std::max(n, s.size()), ' ');
    return s;
  };
  os << pad("check", w) << "  " << pad("residual", 12) << "  " << pad("tolerance", 10) << "  " << pad("status", 7)
     << "  context\n";
  for (const auto& c : r.checks) {
    std::ostringstream res, tol;
    res.precision(3);
    tol.precision(3);
    res << std::scientific << c.residual;
    tol << std::scientific << c.tolerance;
    const char* status = c.errored ? "ERROR" : !c.passed ? "FAIL" : c.vacuous ? "vacuous" : "pass";
    os << pad(c.name, w) << "  " << pad(res.str(), 12) << "  " << pad(tol.str(), 10) << "  " << pad(status, 7) << "  "
       << c.context << '\n';
  }
  os << (r.all_passed() ? "all checks passed" : "some checks FAILED") << " (seed " << r.seed << ", version " << r.version
     << ")\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// CSV

/// Rows are degree indices n, columns are points x, both in grid order.
/// Multi-indices are written with '-' between entries.
inline void write_table_csv(std::ostream& os, const BasisTable& t) {
  const auto& g = t.grid;
  os << "n\\x";
  for (std::size_t c = 0; c < g.size(); ++c) os << ',' << g.unrank(c).to_string();
  os << '\n';
  for (std::size_t r = 0; r < g.size(); ++r) {
    os << g.unrank(r).to_string();
    for (const double v : t.row(r)) os << ',' << format_double(v);
    os << '\n';
  }
}

/// Appends the Gram matrix under the weight of kappa.p and, per n, the
/// computed squared norm next to p_0^N / W_{p~,N}(n).
inline void write_gram_csv(std::ostream& os, const BasisTable& t, const KrawtchoukParam& kappa) {
  const auto& g = t.grid;
  const auto params = ModelParams::multinomial(kappa.p, g.bound(), 1e-10);
  const Eigen::MatrixXd G = gram_matrix(t, grid_weights(params, g));
  os << "\ngram n\\m";
  for (std::size_t c = 0; c < g.size(); ++c) os << ',' << g.unrank(c).to_string();
  os << '\n';
  double off = 0;
  for (std::size_t r = 0; r < g.size(); ++r) {
    os << g.unrank(r).to_string();
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double v = G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (r != c) off = std::max(off, std::abs(v));
      os << ',' << format_double(v);
    }
    os << '\n';
  }
  os << "\nn,computed,formula,relative_error\n";
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double computed = G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    const double formula = norm_sq(g.unrank(r), kappa, g.bound());
    os << g.unrank(r).to_string() << ',' << format_double(computed) << ',' << format_double(formula) << ','
       << format_double(std::abs(computed - formula) / formula) << '\n';
  }
  os << "max_offdiagonal," << format_double(off) << '\n';
}

}  // namespace mkg
