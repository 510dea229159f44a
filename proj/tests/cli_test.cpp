// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "evqmc/cli.hpp"
#include "evqmc/config.hpp"
#include "evqmc/lattice.hpp"

using namespace evqmc;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const std::string& text) {
    std::istringstream is(text);
    try {
        parse_config(is);
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path write_tiny_config(const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path cfg = dir / "tiny.cfg";
    std::ofstream os(cfg);
    os << "family = disjoint-indicator\n"
          "s_max = 4\n"
          "h = 1/8\n"
          "s_list = 2\n"
          "N_list = 31\n"
          "R = 4\n";
    os.close();
    return cfg;
}

} // namespace

TEST_CASE("config serialization round-trips byte for byte") {
    RunConfig cfg;
    cfg.family = Family::haar_overlap;
    cfg.s_max = 7;
    cfg.theta = 2.5;
    cfg.scale = 0.8;
    cfg.p = 0.6;
    cfg.domain = DomainKind::unit_square;
    cfg.h = 1.0 / 32.0;
    cfg.seed = 12345;
    cfg.s_list = {1, 3};
    cfg.N_list = {13, 61};
    cfg.R = 8;
    cfg.functional = FunctionalKind::left_half_indicator;
    const std::string first = serialize_config(cfg);
    std::istringstream is(first);
    const RunConfig back = parse_config(is);
    CHECK(serialize_config(back) == first);
    CHECK(back.family == Family::haar_overlap);
    CHECK(back.h == cfg.h);
    CHECK(back.N_list == cfg.N_list);

    RunConfig dec; // decimal mesh size survives too
    dec.family = Family::global_trig;
    dec.h = 0.15;
    const std::string text = serialize_config(dec);
    CHECK(contains(text, "h = 0.15"));
    std::istringstream is2(text);
    CHECK(serialize_config(parse_config(is2)) == text);
}

TEST_CASE("config parsing: comments, spacing and defaults") {
    std::istringstream is(
        "# leading comment\n"
        "\n"
        "  family   =  global-trig  # inline note\n"
        "theta=3 \n"
        "   \n"
        "h = 1/16\n");
    const RunConfig cfg = parse_config(is);
    CHECK(cfg.family == Family::global_trig);
    CHECK(cfg.theta == 3.0);
    CHECK(cfg.h == 1.0 / 16.0);
    // untouched keys keep their defaults
    CHECK(cfg.s_max == 32);
    CHECK(cfg.scale == 0.5);
    CHECK(cfg.p == 0.0);
    CHECK(cfg.tol == 1e-10);
    CHECK(cfg.max_iter == 200);
    CHECK(cfg.seed == 0);
    CHECK(cfg.s_list == std::vector<int>{2, 4, 8, 16});
    CHECK(cfg.N_list == std::vector<std::uint64_t>{251, 503, 1009, 2017});
    CHECK(cfg.R == 16);
    CHECK(cfg.fd_step == 1e-3);
    CHECK(cfg.functional == FunctionalKind::mean);
}

TEST_CASE("config parsing rejects malformed input with the line number") {
    CHECK(contains(parse_error("family = global-trig\nunknown_key = 1\n"),
                   "line 2: unknown key 'unknown_key'"));
    CHECK(contains(parse_error("family = global-trig\ntheta = 2\ntheta = 3\n"),
                   "line 3: repeated key 'theta'"));
    CHECK(contains(parse_error("family = global-trig\nN_list = 31,9\n"),
                   "line 2: N_list entry 9 is not prime"));
    CHECK(contains(parse_error("theta = 2\n"), "required key 'family' is missing"));
    CHECK(contains(parse_error("family = fourier\n"), "line 1: unknown family 'fourier'"));
    CHECK(contains(parse_error("family = global-trig\nh = 2/3\n"),
                   "line 2: mesh size fractions must be 1/n"));
    CHECK(contains(parse_error("family = global-trig\nh = 5\n"),
                   "line 2: mesh size must lie in (0, 1)"));
    CHECK(contains(parse_error("family = global-trig\nscale =\n"),
                   "line 2: empty value for 'scale'"));
    CHECK(contains(parse_error("family = global-trig\njust words\n"),
                   "line 2: expected 'key = value'"));
    CHECK(contains(parse_error("family = global-trig\np = 1.5\n"),
                   "line 2: p must lie in [0, 1]"));
    CHECK(contains(parse_error("family = global-trig\ns_list = 4,2\n"), "line 2"));
}

TEST_CASE("constants subcommand writes a parseable manifest and passes") {
    const fs::path dir = fs::path("cli_out") / "constants";
    const fs::path cfg = write_tiny_config(dir);
    const int rc = run_subcommand("constants", cfg.string(), dir.string());
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "constants.csv"));
    const std::string man = slurp(dir / "constants.manifest");
    CHECK(contains(man, "subcommand constants\n"));
    CHECK(contains(man, "config family = disjoint-indicator\n"));
    CHECK(contains(man, "config h = 1/8\n"));
    CHECK(contains(man, "value eta = "));
    CHECK(contains(man, "check admissible PASS\n"));
    CHECK(contains(man, "check gap_positive PASS\n"));
    const std::string csv = slurp(dir / "constants.csv");
    CHECK(contains(csv, "name,value,kind\n"));
    CHECK(contains(csv, "alpha_min,"));
    CHECK(contains(csv, ",rigorous\n"));
    CHECK(contains(csv, ",empirical\n"));
    CHECK(contains(csv, ",derived\n"));
    CHECK(csv.back() == '\n');
}

TEST_CASE("cbc subcommand saves a loadable generating vector") {
    const fs::path dir = fs::path("cli_out") / "cbc";
    const fs::path cfg = write_tiny_config(dir);
    const int rc = run_subcommand("cbc", cfg.string(), dir.string());
    CHECK(rc == 0);
    CHECK(!fs::exists(dir / "cbc.csv")); // vector file replaces the table
    std::ifstream vec(dir / "cbc.vec");
    REQUIRE(vec.good());
    const LatticeRule rule = load_rule(vec);
    CHECK(rule.N == 31);
    CHECK(rule.z.size() == 2); // dimension max(s_list)
    const std::string man = slurp(dir / "cbc.manifest");
    CHECK(contains(man, "value s = 2\n"));
    CHECK(contains(man, "value N = 31\n"));
    CHECK(contains(man, "check wce_within_theory PASS\n"));
}

TEST_CASE("study outputs are byte-identical across reruns") {
    const fs::path dir1 = fs::path("cli_out") / "enc1";
    const fs::path dir2 = fs::path("cli_out") / "enc2";
    const fs::path cfg = write_tiny_config(dir1);
    fs::create_directories(dir2);
    CHECK(run_subcommand("enclosure", cfg.string(), dir1.string()) == 0);
    CHECK(run_subcommand("enclosure", cfg.string(), dir2.string()) == 0);
    CHECK(slurp(dir1 / "enclosure.csv") == slurp(dir2 / "enclosure.csv"));
    CHECK(slurp(dir1 / "enclosure.manifest") == slurp(dir2 / "enclosure.manifest"));
}

TEST_CASE("cli failure modes surface as exceptions") {
    const fs::path dir = fs::path("cli_out") / "err";
    const fs::path cfg = write_tiny_config(dir);
    CHECK_THROWS_AS(run_subcommand("spin", cfg.string(), dir.string()),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_subcommand("constants", (dir / "nope.cfg").string(), dir.string()),
                    std::runtime_error);
    CHECK(subcommand_names().size() == 8);
}
