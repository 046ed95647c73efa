#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string cli = FOMCERT_CLI_PATH;
const std::string tmpdir = FOMCERT_TEST_TMPDIR;

int run(const std::string& args, std::string* output = nullptr) {
  const std::string out_file = tmpdir + "/cli_stdout.txt";
  const std::string cmd = cli + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (output) {
    std::ifstream is(out_file);
    std::stringstream ss;
    ss << is.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("analyze subcommand", "[cli]") {
  SECTION("quadratic class with explicit parameters") {
    std::string out;
    const int rc = run("analyze --class Q --m 1 --L 10 --alpha 0.18 --beta 0 --eta 0", &out);
    REQUIRE(rc == 0);
    REQUIRE(out.find("\"rho\"") != std::string::npos);
    REQUIRE(out.find("\"gamma\"") != std::string::npos);
  }
  SECTION("zero step reports the sensitivity error with exit 2") {
    std::string out;
    const int rc = run("analyze --class Q --m 1 --L 10 --alpha 0 --beta 0 --eta 0", &out);
    REQUIRE(rc == 2);
    REQUIRE(out.find("\"rho\": 1.0") != std::string::npos);
    REQUIRE(out.find("gamma_error") != std::string::npos);
  }
  SECTION("sector class certifies the GD design point") {
    std::string out;
    const int rc = run("analyze --class S --m 1 --L 10 --alpha 0.1", &out);
    REQUIRE(rc == 0);
    REQUIRE(out.find("0.9000") != std::string::npos);
    REQUIRE(out.find("0.2294") != std::string::npos);
  }
  SECTION("malformed flags exit 1") {
    REQUIRE(run("analyze --class X --m 1 --L 10") == 1);
    REQUIRE(run("analyze") == 1);
  }
}

TEST_CASE("design subcommand", "[cli]") {
  SECTION("ram published tuning") {
    std::string out;
    const int rc = run("design --method ram --rho 0.9 --m 1 --L 2", &out);
    REQUIRE(rc == 0);
    REQUIRE(out.find("0.019") != std::string::npos);
    REQUIRE(out.find("0.66") != std::string::npos);
    REQUIRE(out.find("-3.6315") != std::string::npos);
  }
  SECTION("out-of-range rate exits 2 and names the interval") {
    std::string out;
    const int rc = run("design --method ram --rho 0.1 --m 1 --L 2", &out);
    REQUIRE(rc == 2);
    REQUIRE(out.find("outside [") != std::string::npos);
  }
  SECTION("table tunings") {
    std::string out;
    const int rc = run("design --method table:hb --m 1 --L 10", &out);
    REQUIRE(rc == 0);
    REQUIRE(out.find("\"alpha\"") != std::string::npos);
  }
}

TEST_CASE("sweep, pareto, and manifests", "[cli]") {
  const std::string cloud = tmpdir + "/cloud.csv";
  const std::string front = tmpdir + "/front.csv";
  REQUIRE(run("sweep --class Q --m 1 --L 10 --n-alpha 6 --n-alpha-eta 3 --n-beta 3 --out " +
              cloud) == 0);
  const std::string first = slurp(cloud);
  REQUIRE(first.rfind("alpha,beta,eta,rho,gamma,status\n", 0) == 0);
  REQUIRE(run("pareto --in " + cloud + " --out " + front) == 0);
  const std::string front_text = slurp(front);
  REQUIRE(front_text.find("ok") != std::string::npos);

  SECTION("deterministic rerun from the manifest") {
    REQUIRE(run("rerun " + cloud + ".manifest.json") == 0);
    REQUIRE(slurp(cloud) == first);
  }
}

TEST_CASE("simulate subcommand determinism", "[cli]") {
  const std::string a = tmpdir + "/traj_a.csv";
  const std::string b = tmpdir + "/traj_b.csv";
  const std::string args =
      "simulate --method rhb --rho 0.8 --m 1 --L 10 --problem nesterov --d 20 "
      "--sigma2 0.01 --T 200 --trials 3 --seed 11 --out ";
  REQUIRE(run(args + a) == 0);
  REQUIRE(run(args + b) == 0);
  const std::string ta = slurp(a);
  REQUIRE(ta == slurp(b));
  REQUIRE(ta.rfind("t,mean_err,std_err\n", 0) == 0);
  REQUIRE(slurp(a + ".manifest.json").find("problem_hash") != std::string::npos);
}
