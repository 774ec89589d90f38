// End-to-end checks of the CLI surfaces: exit codes, file headers, and
// byte-identical reruns. Assumes the ksatlab binary sits in the working
// directory (ctest runs from the build tree).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = "./ksatlab " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);
  CHECK(run("popdyn").exit_code == 2);  // missing required --out
}

TEST_CASE("randomized commands demand a seed") {
  auto r = run("popdyn --k 3 --alpha 2 --pop 100 --iters 1 --out " +
               tmp("p.snap").string());
  CHECK(r.exit_code != 0);
}

TEST_CASE("popdyn snapshot round trip and determinism") {
  auto p1 = tmp("ksat_cli_a.snap"), p2 = tmp("ksat_cli_b.snap");
  auto a = run("popdyn --k 3 --alpha 4 --pop 500 --iters 3 --seed 7 --out " +
               p1.string());
  REQUIRE(a.exit_code == 0);
  auto b = run("popdyn --k 3 --alpha 4 --pop 500 --iters 3 --seed 7 --out " +
               p2.string());
  REQUIRE(b.exit_code == 0);
  auto s1 = slurp(p1.string());
  CHECK(s1 == slurp(p2.string()));
  CHECK(s1.rfind("POPDYN v1 k=3 alpha=4 iter=3 seed=7 N=500", 0) == 0);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("moments curve output is stable and headed") {
  auto r1 = run("moments --k 6 --alpha 20 --curve psi --grid 101");
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.out.rfind("# ksatlab", 0) == 0);
  CHECK(r1.out.find("z,value,k,alpha,function") != std::string::npos);
  auto r2 = run("moments --k 6 --alpha 20 --curve psi --grid 101");
  CHECK(r1.out == r2.out);
  CHECK(run("moments --k 6 --alpha 20 --curve bogus --grid 11").exit_code != 0);
}

TEST_CASE("clusters census on a dimacs file") {
  auto path = tmp("ksat_cli.cnf");
  {
    std::ofstream out(path);
    out << "p cnf 3 1\n1 2 3 0\n";
  }
  auto r = run("clusters --dimacs " + path.string() + " --id toy");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("instance_id,n,m,k,solutions,clusters") != std::string::npos);
  CHECK(r.out.find("toy,3,1,3,7,1,1,1,1") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("phi subcommand emits a JSON line") {
  auto r = run("phi --k 3 --alpha 4 --pop 2000 --iters 3 --samples 2000 --seed 5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\"phi_mean\":") != std::string::npos);
  CHECK(r.out.find("\"seed\":5") != std::string::npos);
}

TEST_CASE("bsp removal log") {
  auto path = tmp("ksat_cli2.cnf");
  {
    std::ofstream out(path);
    out << "p cnf 3 1\n1 2 3 0\n";
  }
  auto r = run("bsp --dimacs " + path.string() +
               " --radius 1 --trigger file --trigger-file /dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("round,trigger_variable,ball_size,clauses_removed") !=
        std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("treebp marginal table from a fixture") {
  auto path = tmp("ksat_cli.tree");
  {
    std::ofstream out(path);
    out << "rootsign +\nvar 1 -\nclause 1 1 +\nvar 2 1 +\nvar 3 1 -\n"
           "boundary 2 3\ngamma 1 2 1.5 1 1 1\n";
  }
  auto r = run("treebp --tree " + path.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("clause,var,pi_r,pi_y,pi_g,pi_b,log_zbar") !=
        std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("config file supplies defaults") {
  auto cfg = tmp("ksat_cli.cfg");
  {
    std::ofstream out(cfg);
    out << "k=6\nalpha=20\ncurve=psi\ngrid=51\n";
  }
  auto r = run("moments --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find(",6,20,psi") != std::string::npos);
  std::filesystem::remove(cfg);
}
