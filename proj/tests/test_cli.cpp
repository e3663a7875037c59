#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "wg/cli.hpp"

using namespace wg;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// strip the seconds column for determinism comparisons
std::string drop_last_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string out, line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out += line.substr(0, pos);
        out += '\n';
    }
    return out;
}

}  // namespace

TEST_CASE("parse_args accepts a full cdr configuration") {
    const RunConfig c = parse_args({"--problem", "cdr-layer", "--degree", "1", "--epsilon", "1e-8",
                                    "--levels", "5:7"});
    CHECK(c.problem == "cdr-layer");
    CHECK(c.degree == 1);
    CHECK(c.epsilon == 1e-8);
    REQUIRE(c.levels.size() == 3);
    CHECK(c.levels.front() == 5);
    CHECK(c.levels.back() == 7);
    CHECK(c.mesh == "square");
    CHECK_FALSE(c.mu_override.has_value());
}

TEST_CASE("parse_args rejects epsilon for non-cdr problems") {
    CHECK_THROWS_WITH_AS(parse_args({"--problem", "maxwell2d", "--epsilon", "1e-3"}),
                         doctest::Contains("epsilon is not a maxwell2d parameter"), CliError);
}

TEST_CASE("parse_args rejects a mu that violates the stabilization bound") {
    // transport with beta = (1,2): rho(D_n) can reach sqrt(5), so mu = 0.1 is
    // far below the required margin
    CHECK_THROWS_WITH_AS(parse_args({"--problem", "transport", "--mu", "0.1"}),
                         doctest::Contains("rho(D_n)/2"), CliError);
    // a generous mu passes
    const RunConfig c = parse_args({"--problem", "transport", "--mu", "5"});
    CHECK(c.mu_override == doctest::Approx(5.0));
}

TEST_CASE("parse_args error paths") {
    CHECK_THROWS_AS(parse_args({"--problem", "heat"}), CliError);
    CHECK_THROWS_AS(parse_args({}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--levels", "7:5"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--levels", "0:2"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--levels", "abc"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--mesh", "hexagonal"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--unknown-flag"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "cdr-smooth", "--epsilon", "2.0"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--degree", "-1"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem"}), CliError);
    CHECK_THROWS_AS(parse_args({"--problem", "transport", "--mu", "-1"}), CliError);
}

TEST_CASE("help request") {
    CHECK_THROWS_AS(parse_args({"--help"}), CliHelpRequested);
    CHECK(usage().find("--problem") != std::string::npos);
}

TEST_CASE("run produces a deterministic csv table") {
    RunConfig c = parse_args({"--problem", "cdr-smooth", "--degree", "1", "--levels", "2:3", "--out",
                              "/tmp/wg_cli_a.csv"});
    CHECK(run(c) == 0);
    c.out_path = "/tmp/wg_cli_b.csv";
    CHECK(run(c) == 0);

    const std::string a = read_file("/tmp/wg_cli_a.csv");
    const std::string b = read_file("/tmp/wg_cli_b.csv");
    REQUIRE_FALSE(a.empty());
    CHECK(a.find("level,h,dofs,err_l2,rate_l2,err_triple,rate_triple,seconds\n") == 0);
    CHECK(drop_last_column(a) == drop_last_column(b));
}

TEST_CASE("run writes the solution dump when asked") {
    RunConfig c = parse_args({"--problem", "transport", "--degree", "0", "--levels", "2:2", "--out",
                              "/tmp/wg_cli_dump.csv", "--dump-solution"});
    CHECK(run(c) == 0);
    const std::string dump = read_file("/tmp/wg_cli_dump.csv.solution.csv");
    REQUIRE_FALSE(dump.empty());
    CHECK(dump.find("x,y,comp0\n") == 0);
    // one row per cell of the 2x2 grid plus the header
    int lines = 0;
    for (char ch : dump)
        if (ch == '\n') ++lines;
    CHECK(lines == 5);
}

TEST_CASE("run on a mesh file, and the invalid-file diagnostic") {
    {
        std::ofstream out("/tmp/wg_cli_mesh.txt");
        out << "wgmesh 1\n4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n";
    }
    RunConfig c = parse_args({"--problem", "transport", "--degree", "1", "--mesh",
                              "file:/tmp/wg_cli_mesh.txt", "--out", "/tmp/wg_cli_file.csv"});
    CHECK(run(c) == 0);
    CHECK(read_file("/tmp/wg_cli_file.csv").find("level,") == 0);

    {
        std::ofstream out("/tmp/wg_cli_bad_mesh.txt");
        out << "wgmesh 1\n4 1\n0 0\n1 0\nnot-a-number 1\n4 0 1 2 3\n";
    }
    c.mesh = "file:/tmp/wg_cli_bad_mesh.txt";
    CHECK(run(c) != 0);
}
