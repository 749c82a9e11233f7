#include "cli_app.hpp"

#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "experiments.hpp"
#include "ksc/format.hpp"
#include "ksc/parallel.hpp"

namespace ksc::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Flat key=value file. Keys are long option names without the dashes; a key
// already given on the command line keeps its command-line value.
void apply_config(CLI::App* active, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    const std::string entry = trim(line);
    if (entry.empty() || entry[0] == '#') continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(where + ": expected key=value");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty() || key == "config")
      throw std::runtime_error(where + ": invalid config key '" + key + "'");
    CLI::Option* opt = active->get_option_no_throw("--" + key);
    if (!opt)
      throw std::runtime_error(where + ": unknown config key '" + key + "'");
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw std::runtime_error(where + ": bad value for '" + key +
                               "': " + e.what());
    }
  }
}

void add_common(CLI::App* sub, std::string* out_dir, std::uint64_t* seed,
                std::string* config_path) {
  sub->add_option("--config", *config_path,
                  "config file with key=value lines; flags override it");
  sub->add_option("--out", *out_dir, "output directory")
      ->capture_default_str();
  sub->add_option("--seed", *seed, "base seed")->capture_default_str();
}

int dispatch(CLI::App& app, Figure3Config& f3, ConcentrationConfig& conc,
             MeanKernelCheckConfig& mk, BoundCheckConfig& bc) {
  if (app.got_subcommand("figure3")) {
    const auto result = run_figure3(f3);
    for (const auto& path : result.csv_paths)
      std::cout << "wrote " << path << "\n";
    for (const auto& path : result.svg_paths)
      std::cout << "wrote " << path << "\n";
    return 0;
  }
  if (app.got_subcommand("concentration")) {
    const auto result = run_concentration(conc);
    const char* what =
        conc.kernel == "prodthresh" ? "exceedances" : "violations";
    std::cout << what << " " << result.violations << " / " << conc.trials
              << " (rate " << fmt_double(result.rate) << ")\n";
    std::cout << "wrote " << result.csv_path << "\n";
    std::cout << "wrote " << result.json_path << "\n";
    return 0;
  }
  if (app.got_subcommand("meankernel")) {
    const auto result = run_meankernel_check(mk);
    int checked = 0, failed = 0;
    for (const auto& row : result.rows) {
      if (row.fallback) continue;
      ++checked;
      if (!row.ok) {
        ++failed;
        std::cout << "mismatch: " << row.check << "[" << row.index
                  << "] closed " << fmt_double(row.closed) << " vs mc "
                  << fmt_double(row.mc) << " (se "
                  << fmt_double(row.std_error) << ")\n";
      }
    }
    std::cout << checked - failed << " / " << checked
              << " closed-form values within 4 standard errors\n";
    std::cout << "wrote " << result.csv_path << "\n";
    return result.all_ok ? 0 : 2;
  }
  const auto result = run_bound_check(bc);
  std::cout << "valid runs " << result.valid_runs << " / " << bc.reps
            << ", bound violations " << result.violations << "\n";
  std::cout << "wrote " << result.csv_path << "\n";
  std::cout << "wrote " << result.json_path << "\n";
  return result.violations > 0 ? 2 : 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"kernel spectral clustering experiments"};
  app.require_subcommand(1);
  std::string config_path;

  Figure3Config f3;
  f3.threads = default_thread_count();
  auto* s_f3 = app.add_subcommand(
      "figure3", "clustering quality across dimensions, with bound columns");
  add_common(s_f3, &f3.out_dir, &f3.base_seed, &config_path);
  s_f3->add_option("--n", f3.n, "points per run")->capture_default_str();
  s_f3->add_option("--sigma", f3.sigma, "noise level")->capture_default_str();
  s_f3->add_option("--radii", f3.radii, "component radii")
      ->delimiter(',')
      ->capture_default_str();
  s_f3->add_option("--dims", f3.dims, "ambient dimensions")
      ->delimiter(',')
      ->capture_default_str();
  s_f3->add_option("--alphas", f3.alphas, "bandwidth multipliers")
      ->delimiter(',')
      ->capture_default_str();
  s_f3->add_option("--kernels", f3.kernels, "kernels: gauss, pairdist")
      ->delimiter(',')
      ->capture_default_str();
  s_f3->add_option("--noise", f3.noises, "noise models: iso, radial")
      ->delimiter(',')
      ->capture_default_str();
  s_f3->add_option("--reps", f3.reps, "replicates per configuration")
      ->capture_default_str();
  s_f3->add_option("--threads", f3.threads, "worker threads")
      ->capture_default_str();

  ConcentrationConfig conc;
  conc.threads = default_thread_count();
  auto* s_conc = app.add_subcommand(
      "concentration", "kernel matrix deviation against its tail bound");
  add_common(s_conc, &conc.out_dir, &conc.base_seed, &config_path);
  s_conc
      ->add_option("--kernel", conc.kernel,
                   "kernel: gauss, pairdist or prodthresh")
      ->capture_default_str();
  s_conc->add_option("--n", conc.n, "points per trial")->capture_default_str();
  s_conc->add_option("--d", conc.d, "ambient dimension")
      ->capture_default_str();
  s_conc->add_option("--tau", conc.tau, "kernel bandwidth")
      ->capture_default_str();
  s_conc->add_option("--sigma", conc.sigma, "noise level")
      ->capture_default_str();
  s_conc->add_option("--t", conc.t, "tail parameter")->capture_default_str();
  s_conc->add_option("--trials", conc.trials, "independent trials")
      ->capture_default_str();
  s_conc->add_option("--threads", conc.threads, "worker threads")
      ->capture_default_str();

  MeanKernelCheckConfig mk;
  auto* s_mk = app.add_subcommand(
      "meankernel", "closed-form mean kernels against Monte Carlo");
  add_common(s_mk, &mk.out_dir, &mk.base_seed, &config_path);
  s_mk->add_option("--pairs", mk.pairs, "pairs per noise model")
      ->capture_default_str();
  s_mk->add_option("--draws", mk.draws, "Monte Carlo draws per pair")
      ->capture_default_str();
  s_mk->add_option("--d-iso", mk.d_iso, "dimension for isotropic checks")
      ->capture_default_str();
  s_mk->add_option("--d-radial", mk.d_radial, "dimension for radial checks")
      ->capture_default_str();
  s_mk->add_option("--sigma", mk.sigma, "noise level")->capture_default_str();
  s_mk->add_option("--tau", mk.tau, "kernel bandwidth")
      ->capture_default_str();

  BoundCheckConfig bc;
  bc.threads = default_thread_count();
  auto* s_bc = app.add_subcommand(
      "bound", "misclassification bound against observed error");
  add_common(s_bc, &bc.out_dir, &bc.base_seed, &config_path);
  s_bc->add_option("--n", bc.n, "points per run")->capture_default_str();
  s_bc->add_option("--d", bc.d, "ambient dimension")->capture_default_str();
  s_bc->add_option("--sigma", bc.sigma, "noise level")->capture_default_str();
  s_bc->add_option("--alpha", bc.alpha, "bandwidth multiplier")
      ->capture_default_str();
  s_bc->add_option("--noise", bc.noise, "noise model: iso or radial")
      ->capture_default_str();
  s_bc->add_option("--radii", bc.radii, "component radii")
      ->delimiter(',')
      ->capture_default_str();
  s_bc->add_option("--t", bc.t, "tail parameter")->capture_default_str();
  s_bc->add_option("--kappa", bc.kappa, "clustering approximation constant")
      ->capture_default_str();
  s_bc->add_option("--reps", bc.reps, "replicates")->capture_default_str();
  s_bc->add_option("--threads", bc.threads, "worker threads")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (!config_path.empty())
      apply_config(app.get_subcommands().front(), config_path);
    return dispatch(app, f3, conc, mk, bc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ksc::cli
