#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "supertail/serde.hpp"

using namespace supertail;
using Catch::Approx;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(SUPERTAIL_CLI_PATH) + " " + args +
                    " > cli_stdout.txt 2> cli_stderr.txt";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("example descriptors run end to end") {
  for (const std::string kind :
       {"dominance", "truncated", "collective", "portfolio", "superadd",
        "equilibrium_internal", "equilibrium_external", "equilibrium_es"}) {
    std::string desc = "ex_" + kind + ".json";
    REQUIRE(run_cli("example " + kind + " --out " + desc) == 0);
    std::string sub = kind.rfind("equilibrium", 0) == 0 ? "equilibrium" : kind;
    // keep runtimes small; the statistical content is covered elsewhere
    int rc = run_cli(sub + " " + desc + " --n-mc 20000 --out out_" + kind);
    REQUIRE(rc == 0);
    REQUIRE(slurp("out_" + kind + ".json").size() > 0);
  }
}

TEST_CASE("shipped descriptors stay in sync with the generator") {
  for (const std::string kind :
       {"dominance", "truncated", "collective", "portfolio", "superadd",
        "equilibrium_internal", "equilibrium_external", "equilibrium_es",
        "hill", "empirical_compare"}) {
    REQUIRE(run_cli("example " + kind + " --out gen_" + kind + ".json") == 0);
    std::string shipped =
        slurp(std::string(SUPERTAIL_DESCRIPTOR_DIR) + "/" + kind + ".json");
    REQUIRE(shipped == slurp("gen_" + kind + ".json"));
  }
}

TEST_CASE("quadratic market descriptor returns the closed-form price") {
  REQUIRE(run_cli("example equilibrium_external --out eq_desc.json") == 0);
  REQUIRE(run_cli("equilibrium eq_desc.json --out eq_out") == 0);
  json j = json::parse(slurp("eq_out.json"));
  REQUIRE(j["case"] == "partial_share");
  REQUIRE(j["price"][0].get<double>() == Approx(3.0).margin(1e-8));
  REQUIRE(j["u_star"].get<double>() == Approx(0.5).margin(1e-8));
  REQUIRE(j["w_star"].get<double>() == Approx(1.5).margin(1e-8));
}

TEST_CASE("descriptor validation failures exit with code 2") {
  // weights that do not sum to one
  json bad;
  bad["kind"] = "dominance";
  bad["seed"] = 1;
  bad["n_mc"] = 1000;
  bad["output"] = "bad_out";
  bad["params"] = {{"marginal", {{"type", "pareto"}, {"alpha", 1.0}}},
                   {"copula", {{"type", "independence"}}},
                   {"theta", {0.5, 0.4}},
                   {"grid", {2.0}}};
  write_file("bad_weights.json", bad.dump());
  REQUIRE(run_cli("dominance bad_weights.json") == 2);

  // missing seed
  json noseed = bad;
  noseed["params"]["theta"] = {0.5, 0.5};
  noseed.erase("seed");
  write_file("no_seed.json", noseed.dump());
  REQUIRE(run_cli("dominance no_seed.json") == 2);

  // kind mismatch against the subcommand
  write_file("mismatch.json", bad.dump());
  REQUIRE(run_cli("hill mismatch.json") == 2);

  // malformed json
  write_file("broken.json", "{\"kind\": ");
  REQUIRE(run_cli("dominance broken.json") == 2);
}

TEST_CASE("csv reports are byte-identical across runs and thread counts") {
  REQUIRE(run_cli("example dominance --out det_desc.json") == 0);
  REQUIRE(run_cli("dominance det_desc.json --n-mc 50000 --threads 1 --out det1") == 0);
  REQUIRE(run_cli("dominance det_desc.json --n-mc 50000 --threads 4 --out det4") == 0);
  REQUIRE(run_cli("dominance det_desc.json --n-mc 50000 --threads 1 --out det1b") == 0);
  std::string a = slurp("det1.csv");
  REQUIRE(a.size() > 0);
  REQUIRE(a == slurp("det4.csv"));
  REQUIRE(a == slurp("det1b.csv"));
  REQUIRE(slurp("det1.json") == slurp("det4.json"));
}

TEST_CASE("seed override changes the monte carlo draw") {
  REQUIRE(run_cli("example dominance --out seed_desc.json") == 0);
  REQUIRE(run_cli("dominance seed_desc.json --n-mc 20000 --out seed_a") == 0);
  REQUIRE(run_cli("dominance seed_desc.json --n-mc 20000 --seed 777 --out seed_b") == 0);
  REQUIRE(slurp("seed_a.csv") != slurp("seed_b.csv"));
}

TEST_CASE("hill subcommand reads csv data and writes the series") {
  RngStream s(48, 0);
  auto draws = sample(LossDistribution::pareto(0.9), 2000, s);
  std::ostringstream csv;
  csv << "loss\n";
  for (double x : draws) csv << fmt_double(x) << "\n";
  write_file("hill_data.csv", csv.str());

  json desc;
  desc["kind"] = "hill";
  desc["seed"] = 1;
  desc["output"] = "hill_out";
  desc["params"] = {{"data", {{"path", "hill_data.csv"}, {"column", "loss"}}},
                    {"k_min", 20},
                    {"k_max", 120}};
  write_file("hill_desc.json", desc.dump());
  REQUIRE(run_cli("hill hill_desc.json") == 0);
  std::string csv_out = slurp("hill_out.csv");
  REQUIRE(csv_out.rfind("k,threshold,alpha_hat,ci_low,ci_high", 0) == 0);
  // one row per k plus the header
  std::size_t lines = std::count(csv_out.begin(), csv_out.end(), '\n');
  REQUIRE(lines == 1 + (120 - 20 + 1));
}

TEST_CASE("empirical subcommand runs the paired-dataset sum pipeline") {
  RngStream s(49, 0);
  auto da = sample(LossDistribution::pareto(1.0), 800, s.substream(1));
  auto db = sample(LossDistribution::pareto(1.0), 800, s.substream(2));
  auto dump = [](const std::string& path, const std::vector<double>& v) {
    std::ostringstream csv;
    csv << "loss\n";
    for (double x : v) csv << fmt_double(x) << "\n";
    write_file(path, csv.str());
  };
  dump("emp_a.csv", da);
  dump("emp_b.csv", db);
  json desc;
  desc["kind"] = "empirical_compare";
  desc["seed"] = 3;
  desc["output"] = "emp_out";
  desc["params"] = {{"a", {{"path", "emp_a.csv"}, {"column", "loss"}}},
                    {"b", {{"path", "emp_b.csv"}, {"column", "loss"}}},
                    {"construct", "sums"},
                    {"n_out", 4000},
                    {"mode", "both"},
                    {"n_boot", 199}};
  write_file("emp_desc.json", desc.dump());
  REQUIRE(run_cli("empirical emp_desc.json") == 0);
  json out = json::parse(slurp("emp_out.json"));
  REQUIRE(out.contains("test"));
  double p = out["test"]["p_value"].get<double>();
  REQUIRE(p >= 0.0);
  REQUIRE(p <= 1.0);
  // the comonotone-vs-independent construction should not be rejected
  REQUIRE(p > 0.05);
}

TEST_CASE("superadd csv layout, including the header-only empty report") {
  REQUIRE(run_cli("example superadd --out sa_desc.json") == 0);
  REQUIRE(run_cli("superadd sa_desc.json --n-mc 20000 --out sa_out") == 0);
  std::string csv = slurp("sa_out.csv");
  REQUIRE(csv.rfind("p,var_sum,var_sum_ci,sum_var,gap", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6);  // header + 5 rows

  json desc = json::parse(slurp("sa_desc.json"));
  desc["params"]["p_grid"] = json::array();
  write_file("sa_empty.json", desc.dump());
  REQUIRE(run_cli("superadd sa_empty.json --n-mc 5000 --out sa_empty_out") ==
          0);
  REQUIRE(slurp("sa_empty_out.csv") == "p,var_sum,var_sum_ci,sum_var,gap\n");
}

TEST_CASE("truncated subcommand emits the var comparison table") {
  REQUIRE(run_cli("example truncated --out tr_desc.json") == 0);
  REQUIRE(run_cli("truncated tr_desc.json --n-mc 50000 --out tr_out") == 0);
  std::string vc = slurp("tr_out_var.csv");
  REQUIRE(vc.rfind("p,lhs,lhs_ci_lo,lhs_ci_hi,rhs,gap,in_valid_region", 0) ==
          0);
  json j = json::parse(slurp("tr_out.json"));
  for (const auto& m : j["mismatches"]) REQUIRE(m.get<int>() == 0);
}
