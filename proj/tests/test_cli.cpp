#include <sstream>

#include "cli.hpp"
#include "doctest.h"

using namespace hypbdry;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hypbdry");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("model strings") {
  auto m = cli::ModelSpec::parse("free:rank=3,edge=3/2");
  CHECK(m.rank == 3);
  CHECK(m.edge == Rational(3, 2));
  CHECK(cli::ModelSpec::parse(m.canonical()).canonical() == m.canonical());
  CHECK(cli::ModelSpec::parse("plane:triangle237").preset == PlanePreset::Triangle237);
  CHECK(cli::ModelSpec::parse("free:edge=0.5").edge == Rational(1, 2));
  CHECK_THROWS_AS(cli::ModelSpec::parse("free:rank=0"), cli::ConfigError);
  CHECK_THROWS_AS(cli::ModelSpec::parse("torus"), cli::ConfigError);
  CHECK_THROWS_AS(cli::ModelSpec::parse("plane:genus3"), cli::ConfigError);
}

TEST_CASE("t lists") {
  CHECK(cli::parse_t_list("2..5") == std::vector<double>{2, 3, 4, 5});
  CHECK(cli::parse_t_list("8..9:0.5") == std::vector<double>{8, 8.5, 9});
  CHECK(cli::parse_t_list("2,4") == std::vector<double>{2, 4});
  CHECK_THROWS_AS(cli::parse_t_list("5..2"), cli::ConfigError);
  CHECK_THROWS_AS(cli::parse_t_list("x"), cli::ConfigError);
}

TEST_CASE("set grammar") {
  FreeGroup g(2);
  CHECK(cli::parse_tree_set(g, "all") == CylinderSet::whole(g));
  CHECK(cli::parse_tree_set(g, "none") == CylinderSet::empty(g));
  auto a = cli::parse_tree_set(g, "a");
  CHECK(a.measure() == ExactScalar(Rational(1, 4)));
  CHECK(cli::parse_tree_set(g, "!a").measure() == ExactScalar(Rational(3, 4)));
  CHECK(cli::parse_tree_set(g, "a,bA").measure() == ExactScalar(Rational(1, 4) + Rational(1, 12)));
  CHECK_THROWS_AS(cli::parse_tree_set(g, "ax"), cli::ConfigError);
  auto arcs = cli::parse_arc_set("0.1..0.3,0.5..0.6");
  CHECK(arcs.measure() == doctest::Approx(0.3));
  CHECK(cli::parse_arc_set("!all").is_empty());
  PlaneGroup pg = build_group(PlanePreset::Genus2Octagon);
  CHECK(cli::parse_plane_word(pg, "a1B2").size() == 2);
  CHECK(cli::parse_plane_word(pg, "e").empty());
  CHECK_THROWS_AS(cli::parse_plane_word(pg, "q"), cli::ConfigError);
}

TEST_CASE("coeff subcommand") {
  auto r = run_cli({"coeff", "--gamma", "ab", "--U", "a", "--V", "b"});
  CHECK(r.code == 0);
  CHECK(r.out.find("gamma") != std::string::npos);
  auto j = run_cli({"coeff", "--gamma", "ab", "--format", "json"});
  CHECK(j.code == 0);
  CHECK(j.out.find("\"config\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"coeff", "--model", "free:rank=x"}).code == 2);
  CHECK(run_cli({"coeff", "--gamma", "aq"}).code == 2);
  CHECK(run_cli({"growth", "--model", "plane:genus2", "--t", "8..20", "--t-max", "10"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("outputs do not depend on the thread count") {
  auto one = run_cli({"equidist", "--t", "2..7", "--U", "a", "--V", "b,B", "--threads", "1"});
  auto four = run_cli({"equidist", "--t", "2..7", "--U", "a", "--V", "b,B", "--threads", "4"});
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
  auto b1 = run_cli({"bounded", "--t", "2..5", "--threads", "1"});
  auto b3 = run_cli({"bounded", "--t", "2..5", "--threads", "3"});
  CHECK(b1.out == b3.out);
}

TEST_CASE("tree subcommands run with their defaults") {
  for (const char* cmd : {"norms", "bounded", "tt-converge", "equidist", "regularity", "sampling",
                          "tailbound", "rank", "mls", "rescale-check", "growth"}) {
    CAPTURE(std::string(cmd));
    auto r = run_cli({cmd});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
  }
}
