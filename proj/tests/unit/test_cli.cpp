#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nomajam_cli/cli.hpp>
#include <nomajam_cli/csv.hpp>
#include <nomajam_cli/sweep.hpp>

#include "test_support.hpp"

namespace cli = nomajam::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string row_string(const std::vector<std::string>& cells) {
  std::ostringstream out;
  cli::write_row(out, cells);
  std::string text = out.str();
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nomajam_cli_" + name);
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  CHECK(cli::format_number(0.1) == "0.1");
  CHECK(std::stod(cli::format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(cli::format_number(std::nan("")) == "");
  CHECK(cli::format_number(INFINITY) == "inf");
}

TEST_CASE("sweep axis parsing") {
  const auto a = cli::parse_axis("n_b=40:160:40");
  CHECK(a.values == std::vector<double>{40, 80, 120, 160});
  const auto b = cli::parse_axis("L=1,2,5");
  CHECK(b.values == std::vector<double>{1, 2, 5});
  CHECK(cli::parse_axis("P2=1:3:1").ue == 1);
  CHECK_THROWS(cli::parse_axis("bogus=1:2:1"));
  CHECK_THROWS(cli::parse_axis("n_b=5:1:1"));
}

TEST_CASE("eval prints a CSV row and succeeds") {
  const Run r = run({"eval"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("eta_bps") != std::string::npos);
  const Run bad = run({"eval", "--set", "cluster.lambda=5000"});
  CHECK(bad.code == cli::kQueueUnstable);
  CHECK(run({"eval", "--set", "transmission.n_b=0"}).code == cli::kConfigError);
  CHECK(run({"eval", "--scenario", "/nonexistent.yaml"}).code == cli::kConfigError);
  CHECK(run({"--bogus-flag"}).code == cli::kConfigError);
}

TEST_CASE("eval accepts the shipped scenario file") {
  const Run r = run({"eval", "--scenario", testing::source_path("scenarios/reference.yaml")});
  CHECK(r.code == cli::kOk);
  CHECK(r.out == run({"eval"}).out);
}

TEST_CASE("sweep writes a stable header and rows in grid order") {
  const auto path = temp("sweep.csv");
  const Run r = run({"sweep", "--var", "n_b=60:80:10", "--var", "L=1,2", "--out", path.string()});
  REQUIRE(r.code == cli::kOk);
  const auto rows = lines(read_file(path));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == row_string(cli::point_header(2)));
  // First axis outermost.
  CHECK(rows[1].rfind("0,", 0) == 0);
  const auto stdout_run = run({"sweep", "--var", "n_b=60:80:10", "--var", "L=1,2"});
  CHECK(stdout_run.out == read_file(path));
  std::filesystem::remove(path);
}

TEST_CASE("sweep rows match eval at the same point") {
  const Run sweep = run({"sweep", "--var", "n_b=100"});
  const Run eval = run({"eval", "--set", "transmission.n_b=100"});
  const auto s = lines(sweep.out);
  const auto e = lines(eval.out);
  REQUIRE(s.size() == 2);
  CHECK(e[e.size() - 1] == s[1]);
}

TEST_CASE("optimize is seed-deterministic and reports infeasibility") {
  const std::vector<std::string> small = {"--set", "ga.population_size=40", "--set", "ga.max_generations=20",
                                          "--set", "ga.islands=2"};
  std::vector<std::string> args = {"optimize", "--seed", "3"};
  args.insert(args.end(), small.begin(), small.end());
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);

  std::vector<std::string> hard = {"optimize", "--set", "jammer.mode=Barrage", "--set", "urllc.delta_r=0.999999999",
                                   "--set", "transmission.P_max=1", "--set", "transmission.P_1=0.4",
                                   "--set", "transmission.P_2=0.5"};
  hard.insert(hard.end(), small.begin(), small.end());
  CHECK(run(hard).code == cli::kInfeasible);
}

TEST_CASE("validate passes at the reference point and flags small runs") {
  const Run ok = run({"validate", "--trials", "100000", "--arrivals", "200000"});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out.find("PASS") != std::string::npos);

  const Run tiny = run({"validate", "--trials", "100", "--arrivals", "20000", "--informational"});
  CHECK(tiny.code == cli::kOk);
  CHECK((tiny.out + tiny.err).find("trials") != std::string::npos);
}
