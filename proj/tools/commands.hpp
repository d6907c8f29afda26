#pragma once

// Subcommand implementations. Each takes the effective configuration as JSON
// (defaults <- config file section <- command-line flags) and returns a report
// plus exit code: 0 all checks pass, 1 a check failed, 2 usage or config error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbo/pbo.hpp"

namespace pbo::cli {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  Json report;
  int exit_code = kExitPass;
};

inline Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw UsageError("config file must hold a JSON object: " + path);
    return j;
  } catch (const Json::parse_error& e) {
    throw UsageError("malformed config file " + path + ": " + e.what());
  }
}

/// defaults, patched by config[section], patched by flags; parsed into T.
template <class T>
T resolve(const Json& config, const char* section, const Json& flags) {
  Json merged = T{};
  if (config.contains(section)) {
    if (!config[section].is_object()) throw UsageError(std::string("config section '") + section + "' must be an object");
    merged.merge_patch(config[section]);
  }
  merged.merge_patch(flags);
  try {
    T out = merged.get<T>();
    out.validate();
    return out;
  } catch (const Json::exception& e) {
    throw UsageError(std::string("invalid ") + section + " configuration: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid ") + section + " configuration: " + e.what());
  }
}

inline Json report_header(const char* command, const Json& config) {
  return Json{{"schema_version", kSchemaVersion}, {"command", command}, {"config", config}};
}

// ---------------------------------------------------------------- verify

struct VerifyConfig {
  std::uint64_t seed = 20240917;
  unsigned formula_max_order = 6;
  int correspondence_pairs = 200;
  unsigned correspondence_max_degree = 4;
  int law_triples = 100;
  unsigned law_max_degree = 3;
  std::string law_commutators = "standard";  // "standard" (i hbar) or "formal" (distinct c_i)
  int classical_pairs = 50;
  int dynamics_trials = 20;
  unsigned potential_degree = 6;
  int lindblad_trials = 20;
  int matrix_dim = 40;
  int matrix_margin = 12;
  double matrix_tolerance = 1e-10;
  int matrix_trials = 5;

  void validate() const {
    if (formula_max_order < 1 || formula_max_order > 12) throw std::invalid_argument("formula_max_order must be in [1, 12]");
    if (correspondence_pairs < 1 || law_triples < 1 || classical_pairs < 1 || dynamics_trials < 1 ||
        lindblad_trials < 1 || matrix_trials < 1)
      throw std::invalid_argument("trial counts must be positive");
    if (law_commutators != "standard" && law_commutators != "formal")
      throw std::invalid_argument("law_commutators must be \"standard\" or \"formal\"");
    if (potential_degree > HamiltonianSpec::kMaxPotentialDegree) throw std::invalid_argument("potential_degree too large");
    if (matrix_dim < 4 || matrix_margin < 0 || matrix_margin >= matrix_dim)
      throw std::invalid_argument("need matrix_dim >= 4 and 0 <= matrix_margin < matrix_dim");
    if (!(matrix_tolerance > 0.0)) throw std::invalid_argument("matrix_tolerance must be positive");
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(VerifyConfig, seed, formula_max_order, correspondence_pairs,
                                                correspondence_max_degree, law_triples, law_max_degree,
                                                law_commutators, classical_pairs, dynamics_trials, potential_degree,
                                                lindblad_trials, matrix_dim, matrix_margin, matrix_tolerance,
                                                matrix_trials)

struct Check {
  std::string id;
  std::string status;  // "pass", "fail" or "exploratory"
  Json detail = Json::object();
};

struct MatrixResidual {
  std::string identity_id;
  int dim = 0;
  int margin = 0;
  double residual = 0.0;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MatrixResidual, identity_id, dim, margin, residual)

namespace detail {

inline Check counted(std::string id, int trials, int failures, Json extra = Json::object()) {
  extra["trials"] = trials;
  extra["failures"] = failures;
  return {std::move(id), failures == 0 ? "pass" : "fail", std::move(extra)};
}

/// Random potential coefficients v_0 .. v_degree.
inline HamiltonianSpec random_hamiltonian(std::mt19937_64& rng, unsigned degree) {
  HamiltonianSpec h{ScalarPoly::symbol("m"), {}};
  for (unsigned k = 0; k <= degree; ++k) h.potential.push_back(random_coefficient(rng, {.complex_coefficients = true}));
  return h;
}

inline void formula_checks(const VerifyConfig& c, std::vector<Check>& out) {
  int trials[3] = {0, 0, 0}, failures[3] = {0, 0, 0};
  Json first_failure = nullptr;
  for (const auto& r : formula_sweep(c.formula_max_order)) {
    const int k = r.formula[1] - '1';
    ++trials[k];
    if (!r.residual_is_zero) {
      ++failures[k];
      if (first_failure.is_null()) first_failure = to_json(r);
    }
  }
  for (int k = 0; k < 3; ++k) {
    Json extra{{"max_order", c.formula_max_order}};
    if (failures[k] > 0) extra["first_failure"] = first_failure;
    out.push_back(counted("formulas.F" + std::to_string(k + 1), trials[k], failures[k], extra));
  }
}

inline void correspondence_checks(const VerifyConfig& c, std::mt19937_64& rng, std::vector<Check>& out) {
  for (std::size_t n = 1; n <= 3; ++n) {
    auto sys = formal_system(n);
    const int pairs = (c.correspondence_pairs + 2) / 3;
    int failures = 0;
    for (int t = 0; t < pairs; ++t) {
      auto f = random_poly(sys, rng, {.max_degree = c.correspondence_max_degree});
      auto g = random_poly(sys, rng, {.max_degree = c.correspondence_max_degree});
      if (!correspondence_residual(f, g).is_zero()) ++failures;
    }
    out.push_back(counted("correspondence.N" + std::to_string(n), pairs, failures,
                          {{"max_degree", c.correspondence_max_degree}}));
  }
}

inline void law_checks_sweep(const VerifyConfig& c, std::mt19937_64& rng, std::vector<Check>& out) {
  auto sys = c.law_commutators == "standard" ? standard_system(2) : formal_system(2);
  std::map<std::string, std::pair<int, int>> tally;  // law -> (nonzero residuals, asserted count)
  std::map<std::string, std::string> first_digest;
  for (int t = 0; t < c.law_triples; ++t) {
    auto f = random_poly(sys, rng, {.max_degree = c.law_max_degree});
    auto g = random_poly(sys, rng, {.max_degree = c.law_max_degree});
    auto h = random_poly(sys, rng, {.max_degree = c.law_max_degree});
    for (const auto& r : law_checks(f, g, h)) {
      auto& [nonzero, asserted] = tally[r.law];
      if (!r.residual_zero()) {
        ++nonzero;
        first_digest.emplace(r.law, r.inputs_digest);
      }
      if (r.asserted) ++asserted;
    }
  }
  for (const auto& [law, counts] : tally) {
    const auto [nonzero, asserted] = counts;
    Json detail{{"commutators", c.law_commutators}, {"trials", c.law_triples}, {"nonzero_residuals", nonzero},
                {"mode", asserted > 0 ? "asserted" : "exploratory"}};
    if (auto it = first_digest.find(law); it != first_digest.end()) detail["first_failing_inputs_digest"] = it->second;
    const std::string status = asserted == 0 ? "exploratory" : (nonzero == 0 ? "pass" : "fail");
    out.push_back({"laws." + law, status, detail});
  }
}

/// With all c_i = 0 the bracket must equal sum_i df/dA_i dg/dB_i - df/dB_i dg/dA_i
/// built from c-number derivatives, and every commutator vanishes.
inline void classical_checks(const VerifyConfig& c, std::mt19937_64& rng, std::vector<Check>& out) {
  auto sys = System::with_commutators({ScalarPoly(0), ScalarPoly(0)});
  int failures = 0;
  for (int t = 0; t < c.classical_pairs; ++t) {
    auto f = random_poly(sys, rng, {.max_degree = 4});
    auto g = random_poly(sys, rng, {.max_degree = 4});
    Poly expected(sys);
    for (std::size_t i = 0; i < 2; ++i)
      expected += partial_derivative(f, gen_a(i)) * partial_derivative(g, gen_b(i)) -
                  partial_derivative(f, gen_b(i)) * partial_derivative(g, gen_a(i));
    if (!(poisson_bracket_total(f, g) - expected).is_zero() || !commutator(f, g).is_zero()) ++failures;
  }
  out.push_back(counted("classical_limit", c.classical_pairs, failures));
}

inline void dynamics_checks(const VerifyConfig& c, std::mt19937_64& rng, std::vector<Check>& out) {
  auto sys = position_momentum_system();
  int heis = 0, forms = 0, chain = 0;
  for (int t = 0; t < c.dynamics_trials; ++t) {
    auto f = random_poly(sys, rng, {.max_degree = 4, .complex_coefficients = true});
    auto spec = random_hamiltonian(rng, c.potential_degree);
    auto H = spec.to_poly(sys);
    auto ref = qce_rhs(f, H);
    if (ref != heisenberg_rhs(f, H)) ++heis;
    if (delta_expansion_rhs(f, spec) != ref || derivative_expansion_rhs(f, spec) != ref ||
        compact_form_rhs(f, spec) != ref)
      ++forms;
    if (!chain_rule_check(f, H).is_zero()) ++chain;
  }
  const Json extra{{"potential_degree", c.potential_degree}};
  out.push_back(counted("dynamics.qce_vs_heisenberg", c.dynamics_trials, heis, extra));
  out.push_back(counted("dynamics.rhs_forms", c.dynamics_trials, forms, extra));
  out.push_back(counted("dynamics.chain_rule", c.dynamics_trials, chain, extra));
}

inline void lindblad_symbolic_checks(const VerifyConfig& c, std::mt19937_64& rng, std::vector<Check>& out) {
  auto sys = position_momentum_system();
  const auto D = ScalarPoly::symbol("D");
  int consistent = 0, published = 0;
  for (int t = 0; t < c.lindblad_trials; ++t) {
    auto rho = random_poly(sys, rng, {.complex_coefficients = true});
    if (!lindblad_check(rho, D, JumpForm::Consistent).exact()) ++consistent;
    if (!lindblad_check(rho, D, JumpForm::Published).exact()) ++published;
  }
  out.push_back(counted("lindblad.symbolic_consistent", c.lindblad_trials, consistent,
                        {{"jump_operator", "sqrt(2D) p / hbar"}}));
  out.push_back({"lindblad.symbolic_published", "exploratory",
                 {{"jump_operator", "sqrt(2D/hbar) p"}, {"trials", c.lindblad_trials}, {"nonzero_residuals", published}}});
}

}  // namespace detail

/// Literal matrix products against the matrix of the symbolic result, on the interior block.
inline std::vector<MatrixResidual> matrix_identity_table(int dim, int margin, unsigned max_order, int trials,
                                                         std::mt19937_64& rng) {
  auto sys = position_momentum_system();
  auto rep = build_rep(dim, 1.0);
  InteriorProjector proj(dim, margin);
  auto x = Poly::generator(sys, gen_a()), p = Poly::generator(sys, gen_b());
  std::vector<MatrixResidual> rows;
  auto add = [&](std::string id, const Matrix& lhs, const Matrix& rhs) {
    rows.push_back({std::move(id), dim, margin, interior_residual(lhs, rhs, proj)});
  };
  const Matrix ih = std::complex<double>(0.0, rep.hbar) * rep.identity();
  add("ccr", rep.x * rep.p - rep.p * rep.x, ih);
  for (unsigned n = 1; n <= max_order; ++n) {
    Matrix literal = Matrix::Zero(dim, dim);
    for (unsigned k = 0; k <= n; ++k) {
      std::vector<Factor> w{{gen_a(), n - k}, {gen_b(), 1}, {gen_a(), k}};
      literal += eval_factors(w, rep);
    }
    add("F1.n" + std::to_string(n), literal / static_cast<double>(n + 1), eval(lambda_integral_power(gen_a(), n, p), rep));
  }
  for (unsigned n = 1; n <= max_order; ++n)
    for (unsigned m = 1; m <= max_order; ++m) {
      const std::string nm = ".n" + std::to_string(n) + ".m" + std::to_string(m);
      std::vector<Factor> ba{{gen_b(), n}, {gen_a(), m}}, ab{{gen_a(), m}, {gen_b(), n}};
      add("F2" + nm, eval_factors(ba, rep) - eval_factors(ab, rep), eval(formula2_rhs(sys, 0, n, m), rep));
      add("F3" + nm, eval(lambda_integral_power(gen_b(), n - 1, pow(x, m - 1)), rep),
          eval(lambda_integral_power(gen_a(), m - 1, pow(p, n - 1)), rep));
    }
  for (int t = 0; t < trials; ++t) {
    auto f = random_poly(sys, rng, {.max_degree = 4, .complex_coefficients = true});
    auto g = random_poly(sys, rng, {.max_degree = 4, .complex_coefficients = true});
    const Matrix F = eval(f, rep), G = eval(g, rep);
    add("correspondence." + std::to_string(t), F * G - G * F, eval(i_hbar() * poisson_bracket_total(f, g), rep));
  }
  HamiltonianSpec spec{ScalarPoly(1), {ScalarPoly(0), ScalarPoly::ratio(1, 3), ScalarPoly::ratio(1, 2), ScalarPoly(0),
                                       ScalarPoly::ratio(1, 10), ScalarPoly(0), ScalarPoly::ratio(1, 50)}};
  const auto Hs = spec.to_poly(sys);
  const Matrix H = eval(Hs, rep);
  for (int t = 0; t < trials; ++t) {
    auto f = random_poly(sys, rng, {.max_degree = 4});
    const Matrix F = eval(f, rep);
    add("qce_vs_heisenberg." + std::to_string(t), std::complex<double>(0.0, -1.0 / rep.hbar) * (F * H - H * F),
        eval(qce_rhs(f, Hs), rep));
  }
  return rows;
}

inline CommandResult run_verify(const VerifyConfig& c) {
  std::mt19937_64 rng(c.seed);
  std::vector<Check> checks;
  detail::formula_checks(c, checks);
  detail::correspondence_checks(c, rng, checks);
  detail::law_checks_sweep(c, rng, checks);
  detail::classical_checks(c, rng, checks);
  detail::dynamics_checks(c, rng, checks);
  detail::lindblad_symbolic_checks(c, rng, checks);

  const auto table = matrix_identity_table(c.matrix_dim, c.matrix_margin, c.formula_max_order, c.matrix_trials, rng);
  double worst = 0.0;
  for (const auto& r : table) worst = std::max(worst, r.residual);
  checks.push_back({"matrix.identities", worst < c.matrix_tolerance ? "pass" : "fail",
                    {{"rows", table.size()}, {"max_residual", worst}, {"tolerance", c.matrix_tolerance}}});

  std::sort(checks.begin(), checks.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
  CommandResult res{report_header("verify", c), kExitPass};
  Json list = Json::array();
  for (const auto& ch : checks) {
    list.push_back({{"id", ch.id}, {"status", ch.status}, {"detail", ch.detail}});
    if (ch.status == "fail") res.exit_code = kExitFailure;
  }
  res.report["checks"] = std::move(list);
  res.report["matrix_residuals"] = table;
  res.report["passed"] = res.exit_code == kExitPass;
  return res;
}

// ---------------------------------------------------------------- hybrid

struct HybridConfig {
  double m = 1.0, M = 2.0, alpha = 1.0, hbar = 1.0;
  double t_end = 10.0;
  double dt = 1e-3;
  int samples = 100;
  double x0 = 0.3, p0 = -0.4, mean_X = 0.2, mean_P = 0.5;
  double sigma_XX = 0.5, sigma_PP = 0.5, sigma_XP = 0.0;
  double coefficient_tolerance = 1e-8;
  double commutator_tolerance = 1e-12;
  double energy_tolerance = 1e-8;
  std::string observable = "x";  // trajectory written to the CSV

  HybridParams params() const { return {m, M, alpha, hbar}; }
  GaussianInitialState initial_state() const { return {x0, p0, mean_X, mean_P, sigma_XX, sigma_PP, sigma_XP}; }

  void validate() const {
    params().validate();
    initial_state().validate(hbar);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    member();
  }

  LinearObservable HybridState::*member() const {
    static const std::map<std::string, LinearObservable HybridState::*> table{
        {"x", &HybridState::x},   {"p", &HybridState::p},   {"X", &HybridState::X}, {"P", &HybridState::P},
        {"XC", &HybridState::XC}, {"PC", &HybridState::PC}, {"q", &HybridState::q}, {"pq", &HybridState::pq}};
    auto it = table.find(observable);
    if (it == table.end()) throw std::invalid_argument("unknown observable '" + observable + "'");
    return it->second;
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HybridConfig, m, M, alpha, hbar, t_end, dt, samples, x0, p0, mean_X,
                                                mean_P, sigma_XX, sigma_PP, sigma_XP, coefficient_tolerance,
                                                commutator_tolerance, energy_tolerance, observable)

inline double max_state_diff(const HybridState& a, const HybridState& b) {
  double d = 0.0;
  for (auto mem : {&HybridState::x, &HybridState::p, &HybridState::X, &HybridState::P, &HybridState::XC,
                   &HybridState::PC, &HybridState::q, &HybridState::pq})
    d = std::max(d, (a.*mem).max_abs_diff(b.*mem));
  return d;
}

inline CommandResult run_hybrid(const HybridConfig& c, std::ostream* csv = nullptr) {
  const auto prm = c.params();
  const auto s0 = c.initial_state();
  const auto tr = integrate_numeric(c.t_end, c.dt, prm);
  if (csv) write_trajectory_csv(*csv, tr, c.member());

  double coeff_err = 0.0, energy_drift = 0.0, pc_numeric = 0.0;
  const double e0 = energy(evolve_analytic(0.0, prm), prm, s0);
  const auto pc0 = LinearObservable::basis(LinearObservable::kp) + LinearObservable::basis(LinearObservable::kP);
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    coeff_err = std::max(coeff_err, max_state_diff(tr.states[i], evolve_analytic(tr.t[i], prm)));
    energy_drift = std::max(energy_drift, std::abs(energy(tr.states[i], prm, s0) - e0) / std::max(1.0, std::abs(e0)));
    pc_numeric = std::max(pc_numeric, tr.states[i].PC.max_abs_diff(pc0));
  }

  double comm_err = 0.0;
  bool pc_exact = true;
  for (int k = 0; k < c.samples; ++k) {
    const double t = c.t_end * (k + 1) / c.samples;
    const auto st = evolve_analytic(t, prm);
    const auto got = commutators_from(st, prm);
    const auto want = closed_form_commutators(t, prm);
    comm_err = std::max({comm_err, std::abs(got.XC_PC - want.XC_PC), std::abs(got.q_pq - want.q_pq),
                         std::abs(got.q_XC - want.q_XC), std::abs(got.pq_PC - want.pq_PC)});
    pc_exact = pc_exact && st.PC == pc0;
  }
  const auto brackets = energy_bracket_check();

  CommandResult res{report_header("hybrid", c), kExitPass};
  auto& r = res.report;
  auto verdict = [&](bool ok) {
    if (!ok) res.exit_code = kExitFailure;
    return ok;
  };
  r["rk4_vs_analytic"] = {{"max_coefficient_error", coeff_err}, {"tolerance", c.coefficient_tolerance},
                          {"steps", tr.t.size() - 1}, {"pass", verdict(coeff_err < c.coefficient_tolerance)}};
  r["commutators"] = {{"max_error", comm_err}, {"samples", c.samples}, {"tolerance", c.commutator_tolerance},
                      {"pass", verdict(comm_err < c.commutator_tolerance)}};
  r["center_of_mass_momentum"] = {{"analytic_exactly_constant", pc_exact},
                                  {"numeric_max_deviation", pc_numeric},
                                  {"pass", verdict(pc_exact)}};
  r["energy"] = {{"initial", e0}, {"relative_drift", energy_drift}, {"tolerance", c.energy_tolerance},
                 {"pass", verdict(energy_drift < c.energy_tolerance)}};
  r["energy_brackets"] = {{"exact", brackets.ok()}, {"pass", verdict(brackets.ok())}};
  if (prm.alpha == 0.0) {
    const auto ni = noninteracting_limit_check(prm, c.t_end, c.samples);
    r["noninteracting"] = {{"free_motion_exact", ni.free_motion_exact},
                           {"commutators_exact", ni.commutators_exact},
                           {"pass", verdict(ni.exact())}};
  }
  r["passed"] = res.exit_code == kExitPass;
  return res;
}

// ---------------------------------------------------------------- wigner

struct WignerConfig {
  std::vector<double> potential{0.0, 0.0, 0.5};
  std::string state = "gaussian:1,0.5,0.7071067811865476";  // gaussian:x0,p0,sigma or eigenstate:n
  double mass = 1.0;
  double hbar = 1.0;
  int nx = 256;
  double half_width = 10.0;
  double t_end = 1.0;
  double dt = 1e-3;
  int snapshots = 2;
  double tolerance = 0.0;  // 0 selects 1e-3 for quadratic potentials and 5e-3 otherwise
  std::string scheme = "spectral";

  wigner::Potential potential_obj() const { return {potential}; }
  wigner::Grid1D grid() const { return wigner::Grid1D::centered(nx, half_width); }

  double effective_tolerance() const {
    if (tolerance > 0.0) return tolerance;
    return potential_obj().derivative(3).is_zero() ? 1e-3 : 5e-3;
  }

  wigner::DerivativeScheme scheme_enum() const {
    if (scheme == "spectral") return wigner::DerivativeScheme::Spectral;
    if (scheme == "fd8") return wigner::DerivativeScheme::FiniteDifference8;
    throw std::invalid_argument("scheme must be \"spectral\" or \"fd8\"");
  }

  wigner::WavefunctionGrid initial_state() const {
    const auto colon = state.find(':');
    const std::string kind = state.substr(0, colon);
    std::vector<double> args;
    if (colon != std::string::npos) {
      std::stringstream ss(state.substr(colon + 1));
      std::string item;
      while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(item, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != item.size()) throw std::invalid_argument("state: bad number '" + item + "'");
        args.push_back(v);
      }
    }
    if (kind == "gaussian" && args.size() == 3) return wigner::gaussian_state(grid(), args[0], args[1], args[2], hbar);
    if (kind == "eigenstate" && args.size() == 1 && args[0] >= 0 && args[0] == std::floor(args[0])) {
      const auto V = potential_obj();
      if (V.coeffs.size() != 3 || !(V.coeffs[2] > 0.0))
        throw std::invalid_argument("eigenstate requires a harmonic potential c0 + c1 x + c2 x^2 with c1 = 0, c2 > 0");
      if (V.coeffs[1] != 0.0) throw std::invalid_argument("eigenstate requires c1 = 0");
      return wigner::oscillator_eigenstate(grid(), static_cast<int>(args[0]), mass, std::sqrt(2.0 * V.coeffs[2] / mass),
                                           hbar);
    }
    throw std::invalid_argument("state must be gaussian:x0,p0,sigma or eigenstate:n");
  }

  void validate() const {
    potential_obj().validate();
    if (!(mass > 0.0) || !(hbar > 0.0)) throw std::invalid_argument("mass and hbar must be positive");
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("need dt > 0 and t_end >= 0");
    if (snapshots < 1) throw std::invalid_argument("snapshots must be positive");
    scheme_enum();
    wigner::SplitOperator(grid(), potential_obj(), mass, hbar, dt);
    initial_state();
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(WignerConfig, potential, state, mass, hbar, nx, half_width, t_end, dt,
                                                snapshots, tolerance, scheme)

/// Writes snapshot k to `csv_prefix`_k.csv when the prefix is non-empty.
inline CommandResult run_wigner(const WignerConfig& c, const std::string& csv_prefix = {}) {
  using namespace wigner;
  const auto V = c.potential_obj();
  const MoyalOptions opt{c.scheme_enum()};
  const double tol = c.effective_tolerance();
  const long long total_steps = std::llround(c.t_end / c.dt);
  SplitOperator op(c.grid(), V, c.mass, c.hbar, c.dt);
  auto psi = c.initial_state();

  CommandResult res{report_header("wigner", c), kExitPass};
  Json snaps = Json::array();
  long long done = 0;
  for (int s = 0; s < c.snapshots; ++s) {
    const long long target = c.snapshots == 1 ? 0 : total_steps * s / (c.snapshots - 1);
    for (; done < target; ++done) op.step(psi);
    const auto W = wigner_transform(psi, c.hbar);
    const auto terms = moyal_terms(W, V, c.mass, opt);
    const double rhs_integral = terms.total().sum() * W.x.step * W.p.step;
    const auto cc = consistency_check(psi, V, c.mass, c.hbar, c.dt, opt);
    // Stationary states have no meaningful relative residual; use the sup norm of dW/dt - rhs.
    const bool stationary = cc.rhs_norm < 1e-6;
    const bool ok = cc.resolved && std::abs(W.integral() - 1.0) < 1e-8 && std::abs(rhs_integral) < 1e-8 &&
                    (stationary ? cc.absolute_residual < 1e-6 : cc.residual < tol);
    if (!ok) res.exit_code = kExitFailure;
    Json terms_json{{"drift_norm", terms.drift.norm()}, {"force_norm", terms.force.norm()}};
    Json quantum = Json::array();
    for (std::size_t l = 0; l < cc.quantum_term_norms.size(); ++l)
      quantum.push_back({{"l", l + 1}, {"norm", cc.quantum_term_norms[l]}});
    terms_json["quantum"] = quantum;
    snaps.push_back({{"t", static_cast<double>(done) * c.dt},
                     {"phase_space_integral", W.integral()},
                     {"rhs_integral", rhs_integral},
                     {"consistency_residual", cc.residual},
                     {"absolute_residual", cc.absolute_residual},
                     {"stationary", stationary},
                     {"resolved", cc.resolved},
                     {"moyal_terms", terms_json},
                     {"pass", ok}});
    if (!csv_prefix.empty()) {
      std::ofstream f(csv_prefix + "_" + std::to_string(s) + ".csv");
      if (!f) throw UsageError("cannot write " + csv_prefix + "_" + std::to_string(s) + ".csv");
      write_wigner_csv(f, W);
    }
  }
  res.report["tolerance"] = tol;
  res.report["snapshots"] = std::move(snaps);
  res.report["passed"] = res.exit_code == kExitPass;
  return res;
}

// ---------------------------------------------------------------- lindblad

struct LindbladConfig {
  int dim = 30;
  double hbar = 1.0;
  double D = 0.3;
  std::uint64_t seed = 20240917;
  int trials = 5;
  std::string form = "consistent";  // "consistent" or "published"
  double tolerance = 1e-12;

  JumpForm jump_form() const {
    if (form == "consistent") return JumpForm::Consistent;
    if (form == "published") return JumpForm::Published;
    throw std::invalid_argument("form must be \"consistent\" or \"published\"");
  }

  void validate() const {
    if (dim < 4) throw std::invalid_argument("dim must be at least 4");
    if (!(hbar > 0.0) || !(D >= 0.0)) throw std::invalid_argument("need hbar > 0 and D >= 0");
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    jump_form();
  }
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LindbladConfig, dim, hbar, D, seed, trials, form, tolerance)

inline CommandResult run_lindblad(const LindbladConfig& c) {
  std::mt19937_64 rng(c.seed);
  const auto rep = build_rep(c.dim, c.hbar);
  double numeric = 0.0;
  for (int t = 0; t < c.trials; ++t)
    numeric = std::max(numeric, lindblad_matrix_residual(random_hermitian(c.dim, rng), rep, c.D, c.jump_form()));

  auto sys = position_momentum_system();
  int symbolic_failures = 0;
  for (int t = 0; t < c.trials; ++t) {
    auto rho = random_poly(sys, rng, {.complex_coefficients = true});
    if (!lindblad_check(rho, ScalarPoly::symbol("D"), c.jump_form()).exact()) ++symbolic_failures;
  }
  CommandResult res{report_header("lindblad", c), kExitPass};
  const bool numeric_ok = numeric < c.tolerance;
  res.report["numeric"] = {{"max_residual", numeric}, {"tolerance", c.tolerance}, {"pass", numeric_ok}};
  res.report["symbolic"] = {{"trials", c.trials}, {"failures", symbolic_failures}, {"pass", symbolic_failures == 0}};
  res.exit_code = numeric_ok && symbolic_failures == 0 ? kExitPass : kExitFailure;
  res.report["passed"] = res.exit_code == kExitPass;
  return res;
}

}  // namespace pbo::cli
