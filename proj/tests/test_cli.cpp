#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

#include "fblock/cli.hpp"
#include "fblock/json_io.hpp"

using namespace fblock;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

// Runs the installed binary through the shell; returns exit status and stdout.
Result run_binary(const std::string& env, const std::string& args) {
  const std::string cmd = env + " '" FBLOCK_BINARY "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out, ""};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("waterfill") {
  auto r = run({"waterfill", "--noise", "1,4", "--power", "1"});
  REQUIRE(r.status == 0);
  auto j = Json::parse(r.out);
  CHECK(j["lambda"].get<double>() == doctest::Approx(2.0));
  CHECK(j["pstar"][0].get<double>() == doctest::Approx(1.0));
  CHECK(j["pstar"][1].get<double>() == 0.0);
  CHECK(j["capacity_nats"].get<double>() == doctest::Approx(0.5 * std::log(2.0)));

  r = run({"waterfill", "--noise", "1", "--power", "3"});
  REQUIRE(r.status == 0);
  j = Json::parse(r.out);
  CHECK(j["lambda"].get<double>() == doctest::Approx(4.0));
  CHECK(j["pstar"][0].get<double>() == doctest::Approx(3.0));

  r = run({"waterfill", "--noise", "1,-1", "--power", "1"});
  CHECK(r.status == 2);
  CHECK(r.err.find("noise variances must be positive") != std::string::npos);
  CHECK(r.out.empty());

  CHECK(run({"waterfill", "--noise", "1"}).status == 2);
  CHECK(run({"nonsense"}).status == 2);
  CHECK(run({}).status == 2);
}

TEST_CASE("rate sweep") {
  auto r = run({"rate", "--noise", "1,2", "--power", "4", "--eps", "0.5", "--tau", "0.05", "--n", "100,1000,100000"});
  REQUIRE(r.status == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"n", "achievable_na", "converse", "second_order"});
  const double c = 0.5 * std::log(3.5 / 1.0) + 0.5 * std::log(3.5 / 2.0);
  double prev_gap = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][1]) == doctest::Approx(c).epsilon(1e-11));
    CHECK(std::stod(rows[i][2]) > c);
    const double gap = std::stod(rows[i][2]) - c;
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }

  r = run({"rate", "--noise", "1", "--power", "1", "--bits", "--n", "1000", "--eps", "0.5"});
  REQUIRE(r.status == 0);
  CHECK(std::stod(csv_rows(r.out)[1][1]) == doctest::Approx(0.5).epsilon(1e-11));

  CHECK(run({"rate", "--noise", "1", "--power", "1", "--eps", "1.5"}).status == 2);
}

TEST_CASE("beta command") {
  const auto r = run({"beta", "--p", "[0.5,0.5]", "--q", "[0.9,0.1]", "--delta", "0.5"});
  REQUIRE(r.status == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["beta"].get<double>() == doctest::Approx(0.1));
  CHECK(j["size_bound"].get<double>() == doctest::Approx(10.0));
  CHECK(run({"beta", "--p", "[0.5,0.6]", "--q", "[0.9,0.1]"}).status == 2);
  CHECK(run({"beta", "--p", "[0.5,0.5]", "--q", "[0.9,0.1]", "--delta", "2"}).status == 2);
}

TEST_CASE("simulate is reproducible and thread-independent") {
  const std::vector<std::string> base{"simulate", "--noise", "1,2", "--power", "4", "--n", "32", "--trials", "2000",
                                      "--seed", "5"};
  auto a_args = base, b_args = base;
  a_args.insert(a_args.end(), {"--threads", "1"});
  b_args.insert(b_args.end(), {"--threads", "3"});
  const auto a = run(a_args);
  const auto b = run(b_args);
  const auto c = run(a_args);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto j = Json::parse(a.out);
  CHECK(j["trials"] == 2000);
  CHECK(j["modified"] == true);
  CHECK(j["estimate"].get<double>() > 0.0);
  CHECK(std::abs(j["estimate"].get<double>() - j["closed_form"].get<double>()) <= 4.0 * j["stderr"].get<double>());

  const auto csv_path = std::filesystem::temp_directory_path() / "fblock_test_sim.csv";
  auto d_args = a_args;
  d_args.insert(d_args.end(), {"--csv", csv_path.string()});
  REQUIRE(run(d_args).status == 0);
  std::ifstream in(csv_path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "trial,message,sum_u,sum_v,type_1,type_2");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == 2000);
  std::filesystem::remove(csv_path);

  CHECK(run({"simulate", "--noise", "1", "--power", "1", "--encoder", "bogus"}).status == 2);
  CHECK(run({"simulate", "--noise", "1", "--power", "1", "--trials", "0"}).status == 2);
}

TEST_CASE("config file merges under explicit flags") {
  const auto path = std::filesystem::temp_directory_path() / "fblock_test_config.json";
  {
    std::ofstream f(path);
    f << R"({"channel": {"noise": [1, 4], "power": 1}, "n": [100, 1000], "eps": 0.2})";
  }
  const auto from_file = run({"rate", "--config", path.string()});
  const auto explicit_flags = run({"rate", "--noise", "1,4", "--power", "1", "--n", "100,1000", "--eps", "0.2"});
  REQUIRE(from_file.status == 0);
  CHECK(from_file.out == explicit_flags.out);
  const auto overridden = run({"rate", "--config", path.string(), "--eps", "0.3"});
  const auto expect = run({"rate", "--noise", "1,4", "--power", "1", "--n", "100,1000", "--eps", "0.3"});
  CHECK(overridden.out == expect.out);
  std::filesystem::remove(path);
  CHECK(run({"rate", "--config", "/nonexistent/fblock.json"}).status == 2);
}

TEST_CASE("help documents units and defaults") {
  for (const char* cmd : {"waterfill", "rate", "beta", "simulate", "verify"}) {
    const auto r = run({cmd, "--help"});
    CHECK(r.status == 0);
    CHECK(r.out.find("nats") != std::string::npos);
  }
  CHECK(run({"rate", "--help"}).out.find("0.1") != std::string::npos);
  CHECK(run({"simulate", "--help"}).out.find("10000") != std::string::npos);
}

TEST_CASE("verify") {
  auto r = run({"verify", "--check", "gradient,kappa", "--n", "60"});
  REQUIRE(r.status == 0);
  auto j = Json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["details"]["max_gradient_at_pstar"].get<double>() < 1e-6);

  r = run({"verify", "--check", "box", "--n", "32", "--trials", "500"});
  CHECK(r.status == 0);
  CHECK(run({"verify", "--check", "nope"}).status == 2);

  // An impossible KS threshold must make the check, and the command, fail.
  r = run({"verify", "--check", "curtiss", "--curtiss-n", "16,32", "--trials", "500", "--ks-threshold", "0"});
  CHECK(r.status == 1);
  CHECK(Json::parse(r.out)["pass"] == false);
}

TEST_CASE("binary: exit codes, determinism and FBLOCK_THREADS") {
  const auto ok = run_binary("", "waterfill --noise 1,4 --power 1");
  CHECK(ok.status == 0);
  CHECK(ok.out == run({"waterfill", "--noise", "1,4", "--power", "1"}).out);
  CHECK(run_binary("", "waterfill --noise 1,-1 --power 1").status == 2);

  const std::string sim = "simulate --noise 1,2 --power 4 --n 16 --trials 3000 --seed 9";
  const auto one = run_binary("FBLOCK_THREADS=1", sim);
  const auto four = run_binary("FBLOCK_THREADS=4", sim);
  REQUIRE(one.status == 0);
  CHECK(one.out == four.out);
  CHECK(one.out == run_binary("", sim + " --threads 2").out);
}
