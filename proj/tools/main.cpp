#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using pbo::cli::Json;

/// Adds --name as an optional flag whose value, when given, lands in flags[key].
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  template <class V>
  void add(const std::string& name, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<std::optional<V>>();
    app_->add_option(name, *holder, help);
    apply_.push_back([holder, key](Json& j) {
      if (holder->has_value()) j[key] = **holder;
    });
  }

  Json collect() const {
    Json j = Json::object();
    for (const auto& f : apply_) f(j);
    return j;
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(Json&)>> apply_;
};

int emit(const pbo::cli::CommandResult& r, const std::string& report_path) {
  const std::string text = r.report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "error: cannot write report " << report_path << "\n";
      return pbo::cli::kExitUsage;
    }
    out << text;
  }
  if (!r.report.value("passed", false)) std::cerr << "one or more checks failed\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact operator-derivative algebra: verification runs and simulations"};
  app.require_subcommand(1);
  app.fallthrough();  // --config and --report may follow the subcommand
  std::string config_path, report_path;
  app.add_option("--config", config_path, "JSON config; one object per subcommand (verify, hybrid, wigner, lindblad)");
  app.add_option("--report", report_path, "Write the JSON report here instead of stdout");

  auto* verify = app.add_subcommand("verify", "Symbolic sweeps and matrix residual table");
  FlagSet vf(verify);
  vf.add<std::uint64_t>("--seed", "seed", "Random seed");
  vf.add<unsigned>("--max-order", "formula_max_order", "Largest n, m in the formula sweeps");
  vf.add<std::string>("--law-commutators", "law_commutators", "standard | formal");
  vf.add<int>("--dim", "matrix_dim", "Matrix dimension");
  vf.add<int>("--margin", "matrix_margin", "Interior margin");

  auto* hybrid = app.add_subcommand("hybrid", "Hybrid two-particle model: RK4 versus closed form");
  FlagSet hf(hybrid);
  std::string hybrid_out;
  hf.add<double>("--m", "m", "Mass of the classical particle");
  hf.add<double>("--M", "M", "Mass of the quantum particle");
  hf.add<double>("--alpha", "alpha", "Coupling");
  hf.add<double>("--hbar", "hbar", "Planck constant");
  hf.add<double>("--t-end", "t_end", "Final time");
  hf.add<double>("--dt", "dt", "RK4 step");
  hf.add<int>("--samples", "samples", "Sample times for commutator checks");
  hf.add<std::string>("--observable", "observable", "Observable written to --out (x p X P XC PC q pq)");
  hybrid->add_option("--out", hybrid_out, "Trajectory CSV");

  auto* wig = app.add_subcommand("wigner", "Wigner function evolution versus the Schrodinger reference");
  FlagSet wf(wig);
  std::string wigner_out, potential_text;
  wig->add_option("--potential", potential_text, "Potential coefficients c0,c1,... of sum c_k x^k");
  wf.add<std::string>("--state", "state", "gaussian:x0,p0,sigma or eigenstate:n");
  wf.add<double>("--mass", "mass", "Mass");
  wf.add<double>("--hbar", "hbar", "Planck constant");
  wf.add<int>("--nx", "nx", "Grid points (power of two)");
  wf.add<double>("--half-width", "half_width", "Grid half width");
  wf.add<double>("--t-end", "t_end", "Final time");
  wf.add<double>("--dt", "dt", "Time step");
  wf.add<int>("--snapshots", "snapshots", "Number of snapshots from 0 to t-end");
  wf.add<double>("--tolerance", "tolerance", "Consistency tolerance");
  wf.add<std::string>("--scheme", "scheme", "spectral | fd8");
  wig->add_option("--out", wigner_out, "CSV prefix; snapshot k goes to <prefix>_k.csv");

  auto* lind = app.add_subcommand("lindblad", "Diffusion term versus the Lindblad dissipator");
  FlagSet lf(lind);
  lf.add<int>("--dim", "dim", "Matrix dimension");
  lf.add<double>("--hbar", "hbar", "Planck constant");
  lf.add<double>("--D", "D", "Diffusion constant");
  lf.add<std::uint64_t>("--seed", "seed", "Random seed");
  lf.add<int>("--trials", "trials", "Random density matrices and polynomials");
  lf.add<std::string>("--form", "form", "consistent | published");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return pbo::cli::kExitUsage;
  }

  try {
    const Json config = config_path.empty() ? Json::object() : pbo::cli::load_config(config_path);
    if (verify->parsed()) {
      return emit(pbo::cli::run_verify(pbo::cli::resolve<pbo::cli::VerifyConfig>(config, "verify", vf.collect())),
                  report_path);
    }
    if (hybrid->parsed()) {
      const auto cfg = pbo::cli::resolve<pbo::cli::HybridConfig>(config, "hybrid", hf.collect());
      std::ofstream csv;
      if (!hybrid_out.empty()) {
        csv.open(hybrid_out);
        if (!csv) throw pbo::cli::UsageError("cannot write " + hybrid_out);
      }
      return emit(pbo::cli::run_hybrid(cfg, hybrid_out.empty() ? nullptr : &csv), report_path);
    }
    if (wig->parsed()) {
      Json flags = wf.collect();
      if (!potential_text.empty()) {
        std::vector<double> coeffs;
        for (const auto& item : CLI::detail::split(potential_text, ',')) {
          double v = 0.0;
          if (!CLI::detail::lexical_cast(CLI::detail::trim_copy(item), v))
            throw pbo::cli::UsageError("--potential: bad coefficient '" + item + "'");
          coeffs.push_back(v);
        }
        flags["potential"] = coeffs;
      }
      return emit(pbo::cli::run_wigner(pbo::cli::resolve<pbo::cli::WignerConfig>(config, "wigner", flags), wigner_out),
                  report_path);
    }
    if (lind->parsed()) {
      return emit(pbo::cli::run_lindblad(pbo::cli::resolve<pbo::cli::LindbladConfig>(config, "lindblad", lf.collect())),
                  report_path);
    }
  } catch (const pbo::cli::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pbo::cli::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pbo::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "check aborted: " << e.what() << "\n";
    return pbo::cli::kExitFailure;
  }
  return pbo::cli::kExitUsage;
}
