#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"
#include "helpers.hpp"

using namespace ksc;
using namespace ksc::cli;

namespace {

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::current_path() / "test_out" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

std::string drop_last_field(const std::string& line) {
  const auto pos = line.rfind(',');
  REQUIRE(pos != std::string::npos);
  return line.substr(0, pos);
}

Figure3Config tiny_figure3(const std::string& out_dir) {
  Figure3Config cfg;
  cfg.n = 30;
  cfg.sigma = 1.0;
  cfg.radii = {1.0, 3.0};
  cfg.dims = {5};
  cfg.alphas = {1.0, 2.0};
  cfg.kernels = {"gauss", "pairdist"};
  cfg.noises = {"iso", "radial"};
  cfg.reps = 2;
  cfg.base_seed = 7;
  cfg.out_dir = out_dir;
  cfg.threads = 2;
  return cfg;
}

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& args, const std::string& dir) {
  const std::string log = dir + "/cmd_output.txt";
  const std::string cmd =
      std::string(KSCEXP_BIN) + " " + args + " > " + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = slurp(log);
  return r;
}

}  // namespace

TEST_CASE("tiny clustering experiment writes the expected tables") {
  const auto dir = fresh_dir("fig3_tiny");
  const auto cfg = tiny_figure3(dir);
  const auto result = run_figure3(cfg);

  // 2 noises x 3 series x 1 dim x 2 reps
  CHECK(result.records.size() == 12);
  REQUIRE(result.csv_paths.size() == 2);
  REQUIRE(result.svg_paths.size() == 2);

  const auto iso_lines = lines_of(slurp(result.csv_paths[0]));
  REQUIRE(iso_lines.size() == 7);
  CHECK(iso_lines[0] ==
        "kernel,noise,alpha,d,rep,seed,nmi,misrate,gamma2,vbar2,F_bound,"
        "deviation,runtime_ms");

  // seed column follows base + 1e6 * config_index + rep in enumeration order
  CHECK(fields_of(iso_lines[1])[5] == "7");
  CHECK(fields_of(iso_lines[2])[5] == "8");
  CHECK(fields_of(iso_lines[3])[5] == "1000007");
  CHECK(fields_of(iso_lines[5])[5] == "2000007");
  const auto radial_lines = lines_of(slurp(result.csv_paths[1]));
  REQUIRE(radial_lines.size() == 7);
  CHECK(fields_of(radial_lines[1])[5] == "3000007");

  for (std::size_t li = 1; li < iso_lines.size(); ++li) {
    const auto f = fields_of(iso_lines[li]);
    REQUIRE(f.size() == 13);
    CHECK(f[1] == "iso");
    CHECK(f[3] == "5");
    const double nmi_v = std::stod(f[6]);
    const double mis_v = std::stod(f[7]);
    CHECK(nmi_v >= 0.0);
    CHECK(nmi_v <= 1.0);
    CHECK(mis_v >= 0.0);
    CHECK(mis_v <= 0.5);
    if (f[0] == "gauss") {
      CHECK(std::stod(f[8]) > 0.0);
      CHECK(std::stod(f[9]) >= 0.0);
      CHECK(std::stod(f[10]) > 0.0);
      CHECK(std::stod(f[11]) > 0.0);
    } else {
      CHECK(f[2] == "0");
      CHECK(f[8] == "nan");
      CHECK(f[9] == "nan");
      CHECK(f[10] == "nan");
      CHECK(f[11] == "nan");
    }
  }

  for (const auto& rec : result.records) {
    if (rec.kernel != "gauss") continue;
    CHECK(std::isfinite(rec.F));
    CHECK(std::isfinite(rec.F_tilde));
    CHECK(rec.F_tilde >= rec.F);
    CHECK(rec.C1 == 16.0);
    CHECK(rec.F_bound == doctest::Approx(rec.C1 * rec.F).epsilon(1e-12));
  }
}

TEST_CASE("experiment reruns reproduce every column except the timings") {
  const auto dir_a = fresh_dir("fig3_det_a");
  const auto dir_b = fresh_dir("fig3_det_b");
  auto cfg_a = tiny_figure3(dir_a);
  auto cfg_b = tiny_figure3(dir_b);
  cfg_b.threads = 1;  // thread count must not change any reported value
  const auto res_a = run_figure3(cfg_a);
  const auto res_b = run_figure3(cfg_b);

  for (std::size_t k = 0; k < 2; ++k) {
    const auto lines_a = lines_of(slurp(res_a.csv_paths[k]));
    const auto lines_b = lines_of(slurp(res_b.csv_paths[k]));
    REQUIRE(lines_a.size() == lines_b.size());
    for (std::size_t li = 0; li < lines_a.size(); ++li)
      CHECK(drop_last_field(lines_a[li]) == drop_last_field(lines_b[li]));
    CHECK(slurp(res_a.svg_paths[k]) == slurp(res_b.svg_paths[k]));
  }
}

TEST_CASE("experiment plot carries one curve per kernel setting") {
  const auto dir = fresh_dir("fig3_svg");
  auto cfg = tiny_figure3(dir);
  cfg.noises = {"iso"};
  cfg.reps = 1;
  cfg.dims = {2, 20};
  const auto result = run_figure3(cfg);
  REQUIRE(result.svg_paths.size() == 1);
  const auto svg = slurp(result.svg_paths[0]);

  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t polylines = 0;
  for (std::size_t pos = svg.find("<polyline"); pos != std::string::npos;
       pos = svg.find("<polyline", pos + 1))
    ++polylines;
  CHECK(polylines == 3);
  CHECK(svg.find("dimension d (log scale)") != std::string::npos);
  CHECK(svg.find("NMI") != std::string::npos);
  CHECK(svg.find("gauss alpha=1") != std::string::npos);
  CHECK(svg.find("gauss alpha=2") != std::string::npos);
  CHECK(svg.find("pairdist") != std::string::npos);
  CHECK(svg.find("isotropic noise") != std::string::npos);
}

TEST_CASE("deviation trials with zero noise never move") {
  const auto dir = fresh_dir("conc_zero");
  ConcentrationConfig cfg;
  cfg.kernel = "gauss";
  cfg.n = 10;
  cfg.d = 5;
  cfg.sigma = 0.0;
  cfg.tau = 1.0;
  cfg.t = 1.0;
  cfg.trials = 5;
  cfg.base_seed = 3;
  cfg.out_dir = dir;
  const auto result = run_concentration(cfg);

  CHECK(result.violations == 0);
  CHECK(result.rate == 0.0);
  for (const auto& rep : result.reports) {
    CHECK(rep.deviation == 0.0);
    CHECK_FALSE(rep.violated);
  }

  const auto csv = lines_of(slurp(result.csv_path));
  REQUIRE(csv.size() == 6);
  CHECK(csv[0] == "experiment,seed,n,d,sigma,tau,t,deviation,bound,violated");
  const auto f = fields_of(csv[1]);
  REQUIRE(f.size() == 10);
  CHECK(f[0] == "gauss");
  CHECK(f[1] == "3");
  CHECK(f[7] == "0");
  CHECK(f[9] == "false");

  const auto summary = nlohmann::json::parse(slurp(result.json_path));
  CHECK(summary["experiment"] == "concentration_gauss");
  REQUIRE(summary["configs"].is_array());
  CHECK(summary["configs"].size() == 1);
  CHECK(summary["configs"][0]["kernel"] == "gauss");
  CHECK(summary["configs"][0]["trials"] == 5);
  CHECK(summary["aggregate"]["violations"] == 0);
  CHECK(summary["aggregate"]["violation_rate"] == 0.0);
  CHECK(summary["seed"] == 3);
}

TEST_CASE("product threshold trials sit above the variability floor") {
  const auto dir = fresh_dir("conc_prod");
  ConcentrationConfig cfg;
  cfg.kernel = "prodthresh";
  cfg.n = 64;
  cfg.sigma = 1.0;
  cfg.trials = 20;
  cfg.base_seed = 11;
  cfg.out_dir = dir;
  const auto result = run_concentration(cfg);

  CHECK(result.violations == 20);
  CHECK(result.rate == 1.0);

  const auto csv = lines_of(slurp(result.csv_path));
  REQUIRE(csv.size() == 21);
  const auto f = fields_of(csv[1]);
  CHECK(f[0] == "prodthresh");
  CHECK(f[3] == "1");      // scalar construction
  CHECK(f[5] == "nan");    // no bandwidth
  CHECK(f[9] == "true");

  const auto summary = nlohmann::json::parse(slurp(result.json_path));
  CHECK(summary["aggregate"]["exceedances"] == 20);
  CHECK(summary["aggregate"]["exceed_rate"] == 1.0);
}

TEST_CASE("distance kernel trials run against a simulated mean matrix") {
  const auto dir_a = fresh_dir("conc_pd_a");
  const auto dir_b = fresh_dir("conc_pd_b");
  ConcentrationConfig cfg;
  cfg.kernel = "pairdist";
  cfg.n = 12;
  cfg.d = 8;
  cfg.sigma = 0.5;
  cfg.t = 1.5;
  cfg.trials = 3;
  cfg.base_seed = 5;
  cfg.out_dir = dir_a;
  cfg.threads = 2;
  const auto res_a = run_concentration(cfg);
  cfg.out_dir = dir_b;
  cfg.threads = 1;
  const auto res_b = run_concentration(cfg);

  REQUIRE(res_a.reports.size() == 3);
  for (std::size_t i = 0; i < res_a.reports.size(); ++i) {
    const auto& rep = res_a.reports[i];
    CHECK(rep.deviation > 0.0);
    CHECK(std::isfinite(rep.bound));
    CHECK(rep.t == 1.5);
    CHECK(rep.context.at("sigma") == 0.5);
    CHECK(rep.deviation == res_b.reports[i].deviation);
    CHECK(rep.bound == res_b.reports[i].bound);
  }
}

TEST_CASE("mean kernel audit covers every formula family") {
  const auto dir = fresh_dir("mk_check");
  MeanKernelCheckConfig cfg;
  cfg.pairs = 3;
  cfg.draws = 20000;
  cfg.d_iso = 10;
  cfg.d_radial = 50;
  cfg.sigma = 1.0;
  cfg.tau = 1.0;
  cfg.base_seed = 2;
  cfg.out_dir = dir;
  const auto result = run_meankernel_check(cfg);

  // 3 iso + 3 radial + 2 fallback + 10 kt + 2 exact
  REQUIRE(result.rows.size() == 20);
  CHECK(result.all_ok);
  int fallback_rows = 0;
  for (const auto& row : result.rows) {
    if (row.fallback) {
      ++fallback_rows;
      CHECK(row.check == "radial_fallback");
    } else {
      CHECK(row.ok);
    }
    CHECK(row.diff == doctest::Approx(std::abs(row.closed - row.mc)));
  }
  CHECK(fallback_rows == 2);

  const auto csv = lines_of(slurp(result.csv_path));
  REQUIRE(csv.size() == 21);
  CHECK(csv[0] == "check,index,closed,mc,std_error,diff,fallback,ok");
  CHECK(fields_of(csv[1])[0] == "iso");
}

TEST_CASE("misclassification audit reports the certificate per replicate") {
  const auto dir = fresh_dir("bound_small");
  BoundCheckConfig cfg;
  cfg.n = 40;
  cfg.d = 30;
  cfg.sigma = 1.5;
  cfg.alpha = 2.0;
  cfg.noise = "iso";
  cfg.radii = {1.0, 5.0};
  cfg.reps = 2;
  cfg.base_seed = 9;
  cfg.out_dir = dir;
  cfg.threads = 2;
  const auto result = run_bound_check(cfg);

  REQUIRE(result.records.size() == 2);
  for (const auto& rec : result.records) {
    CHECK(rec.C1 == 16.0);
    CHECK(std::isfinite(rec.F));
    CHECK(rec.F_tilde >= rec.F);
    CHECK(rec.gamma2_tilde <= rec.gamma2);
    CHECK(rec.misrate >= 0.0);
    if (rec.valid) CHECK(rec.F_tilde <= 1.0 / rec.C1);
  }
  CHECK(result.valid_runs >= result.violations);

  const auto csv = lines_of(slurp(result.csv_path));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] ==
        "rep,seed,nmi,misrate,gamma2,gamma2_tilde,vbar2,F,F_tilde,C1,valid,"
        "bound");

  const auto summary = nlohmann::json::parse(slurp(result.json_path));
  CHECK(summary["experiment"] == "bound");
  CHECK(summary["aggregate"]["reps"] == 2);
  CHECK(summary["seed"] == 9);
}

TEST_CASE("command line rejects unknown flags by name") {
  const auto dir = fresh_dir("cli_badflag");
  const auto r = run_cmd("figure3 --nope 3", dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("--nope") != std::string::npos);
}

TEST_CASE("command line requires a command") {
  const auto dir = fresh_dir("cli_nocmd");
  const auto r = run_cmd("", dir);
  CHECK(r.exit_code == 1);
}

TEST_CASE("config file sets options and flags take precedence") {
  const auto dir = fresh_dir("cli_config");
  {
    std::ofstream cfg(dir + "/run.cfg");
    cfg << "pairs=2\n";
    cfg << "draws=2000\n";
    cfg << "d-iso=5\n";
    cfg << "d-radial=20\n";
    cfg << "out=" << dir << "\n";
  }

  // config alone: 2 iso + 2 radial + 2 fallback + 10 kt + 2 exact = 18 rows
  auto r = run_cmd("meankernel --config " + dir + "/run.cfg", dir);
  CHECK(r.exit_code == 0);
  auto csv = lines_of(slurp(dir + "/meankernel_check.csv"));
  CHECK(csv.size() == 19);

  // a flag overrides the config value for the same option
  r = run_cmd("meankernel --config " + dir + "/run.cfg --pairs 1", dir);
  CHECK(r.exit_code == 0);
  csv = lines_of(slurp(dir + "/meankernel_check.csv"));
  CHECK(csv.size() == 17);
}

TEST_CASE("command line runs a whole experiment end to end") {
  const auto dir = fresh_dir("cli_e2e");
  const auto r = run_cmd(
      "concentration --kernel prodthresh --n 64 --sigma 1 --trials 5 --out " +
          dir + " --seed 4",
      dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("exceedances 5 / 5") != std::string::npos);
  CHECK(std::filesystem::exists(dir + "/concentration_prodthresh.csv"));
  CHECK(std::filesystem::exists(dir + "/concentration_prodthresh.json"));
}
