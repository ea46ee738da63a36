// Drives the installed command-line binary end to end: reproducibility,
// file round-trips and exit codes. The binary path arrives in LGCP_CLI.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/stat.h>
#include <sys/wait.h>

using nlohmann::json;

namespace {

std::string cli() {
  const char* path = std::getenv("LGCP_CLI");
  REQUIRE(path != nullptr);
  return path;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const std::string& path) { return json::parse(slurp(path)); }

struct Scratch {
  std::string dir;
  Scratch() {
    dir = "cli_scratch";
    (void)::mkdir(dir.c_str(), 0755);
    std::ofstream cfg(dir + "/run.cfg");
    cfg << "domain_lower = 0\ndomain_upper = 50\nh_max = 10\nl_max = 25\n"
           "quad_order = 20\nn_theta = 20\nalpha = 0.01\nburn_in = 50\n"
           "n_samples = 120\nseed = 7\ngrid_resolution = 512\n";
  }
  std::string path(const std::string& name) const { return dir + "/" + name; }
  std::string cfg() const { return " --config " + dir + "/run.cfg "; }
};

}  // namespace

TEST_CASE("simulate is reproducible byte for byte") {
  Scratch s;
  CHECK(run("simulate" + s.cfg() + "--intensity synthetic-bimodal --out " + s.path("a.csv")) == 0);
  CHECK(run("simulate" + s.cfg() + "--intensity synthetic-bimodal --out " + s.path("b.csv")) == 0);
  CHECK(slurp(s.path("a.csv")) == slurp(s.path("b.csv")));

  // Overriding the seed on the command line wins over the config file.
  CHECK(run("simulate" + s.cfg() + "--seed 8 --intensity synthetic-bimodal --out " +
            s.path("c.csv")) == 0);
  CHECK(slurp(s.path("a.csv")) != slurp(s.path("c.csv")));

  const json manifest = slurp_json(s.path("a.csv.manifest.json"));
  CHECK(manifest.at("seed") == 7);
  const double n = manifest.at("n_events").get<double>();
  CHECK(n >= 20);
  CHECK(n <= 80);
}

TEST_CASE("constant intensity manifest records the exact integral") {
  Scratch s;
  CHECK(run("simulate" + s.cfg() +
            "--domain_lower 0 --domain_upper 2 --constant_value 5 --intensity constant --out " +
            s.path("const.csv")) == 0);
  const json manifest = slurp_json(s.path("const.csv.manifest.json"));
  CHECK(manifest.at("integral").get<double>() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("pipeline round-trips through all five commands") {
  Scratch s;
  REQUIRE(run("simulate" + s.cfg() + "--intensity synthetic-bimodal --out " + s.path("ev.csv")) ==
          0);
  REQUIRE(run("select" + s.cfg() + "--events " + s.path("ev.csv") + " --out " + s.path("ind.json")) ==
          0);

  const json inducing = slurp_json(s.path("ind.json"));
  REQUIRE(inducing.at("locations").size() >= 1);
  const auto& utilities = inducing.at("utilities");
  double prev = 0.0;
  const double w_inf = inducing.at("w_inf").get<double>();
  for (const auto& u : utilities) {
    CHECK(u.get<double>() >= prev - 1e-9 * w_inf);
    CHECK(u.get<double>() <= w_inf * (1.0 + 1e-9));
    prev = u.get<double>();
  }

  REQUIRE(run("fit" + s.cfg() + "--events " + s.path("ev.csv") + " --inducing " +
              s.path("ind.json") + " --out " + s.path("samples.json")) == 0);
  // Rerun is byte-identical; timing lives only in the summary.
  REQUIRE(run("fit" + s.cfg() + "--events " + s.path("ev.csv") + " --inducing " +
              s.path("ind.json") + " --out " + s.path("samples2.json")) == 0);
  CHECK(slurp(s.path("samples.json")) == slurp(s.path("samples2.json")));
  const json summary = slurp_json(s.path("samples.json.summary.json"));
  CHECK(summary.at("wall_seconds").get<double>() > 0.0);

  REQUIRE(run("predict" + s.cfg() + "--samples " + s.path("samples.json") + " --out " +
              s.path("est.csv")) == 0);
  const std::string est = slurp(s.path("est.csv"));
  CHECK(est.rfind("x0,log_mean,log_var,intensity_mean,lo_band,hi_band\n", 0) == 0);

  REQUIRE(run("simulate" + s.cfg() + "--seed 101 --intensity synthetic-bimodal --out " +
              s.path("h1.csv")) == 0);
  REQUIRE(run("simulate" + s.cfg() + "--seed 102 --intensity synthetic-bimodal --out " +
              s.path("h2.csv")) == 0);
  REQUIRE(run("evaluate" + s.cfg() + "--estimate " + s.path("est.csv") +
              " --truth synthetic-bimodal --out " + s.path("report") + " --heldout " +
              s.path("h1.csv") + " " + s.path("h2.csv") + " --samples " + s.path("samples.json")) ==
          0);
  const json report = slurp_json(s.path("report.json"));
  CHECK(report.at("mae").get<double>() >= 0.0);
  CHECK(report.at("rmse").get<double>() >= report.at("mae").get<double>() - 1e-12);
  CHECK(std::isfinite(report.at("lp_mean").get<double>()));
  CHECK(std::isfinite(report.at("lp_per_draw_mean").get<double>()));
  CHECK(slurp(s.path("report.txt")).find("mae = ") != std::string::npos);
}

TEST_CASE("single-draw fit degenerates cleanly") {
  Scratch s;
  REQUIRE(run("simulate" + s.cfg() + "--intensity synthetic-bimodal --out " + s.path("ev1.csv")) ==
          0);
  REQUIRE(run("select" + s.cfg() + "--events " + s.path("ev1.csv") + " --out " +
              s.path("ind1.json")) == 0);
  REQUIRE(run("fit" + s.cfg() + "--n_samples 1 --events " + s.path("ev1.csv") + " --inducing " +
              s.path("ind1.json") + " --out " + s.path("one.json")) == 0);
  REQUIRE(run("predict" + s.cfg() + "--samples " + s.path("one.json") + " --out " +
              s.path("one_est.csv")) == 0);
  const json samples = slurp_json(s.path("one.json"));
  CHECK(samples.at("g_draws").size() == 1);
}

TEST_CASE("selecting on a single event places one point near it") {
  Scratch s;
  std::ofstream one(s.path("single.csv"));
  one << "30.5\n";
  one.close();
  REQUIRE(run("select" + s.cfg() + "--events " + s.path("single.csv") + " --out " +
              s.path("single_ind.json")) == 0);
  const json inducing = slurp_json(s.path("single_ind.json"));
  REQUIRE(inducing.at("locations").size() == 1);
  CHECK(inducing.at("locations")[0][0].get<double>() == doctest::Approx(30.5).epsilon(0.02));
}

TEST_CASE("exit codes distinguish usage, data and numerical failures") {
  Scratch s;
  // unknown intensity name -> usage
  CHECK(run("simulate" + s.cfg() + "--intensity renewal --out " + s.path("x.csv")) == 2);
  // missing seed -> usage
  std::ofstream cfg(s.path("noseed.cfg"));
  cfg << "domain_lower = 0\ndomain_upper = 50\n";
  cfg.close();
  CHECK(run("simulate --config " + s.path("noseed.cfg") +
            " --intensity synthetic-bimodal --out " + s.path("x.csv")) == 2);
  // malformed config line -> usage, with the line number in the message
  std::ofstream bad(s.path("bad.cfg"));
  bad << "seed = 7\nwhat is this\n";
  bad.close();
  CHECK(run("simulate --config " + s.path("bad.cfg") + " --intensity synthetic-bimodal --out " +
            s.path("x.csv")) == 2);
  // events outside the domain -> data error
  std::ofstream ev(s.path("outside.csv"));
  ev << "10.0\n99.0\n";
  ev.close();
  CHECK(run("select" + s.cfg() + "--events " + s.path("outside.csv") + " --out " +
            s.path("x.json")) == 3);
  // missing file -> data error
  CHECK(run("select" + s.cfg() + "--events " + s.path("nothere.csv") + " --out " +
            s.path("x.json")) == 3);
  // no subcommand -> usage
  CHECK(run("") == 2);
}
