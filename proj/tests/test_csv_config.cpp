#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "rough/config.hpp"
#include "rough/csv.hpp"

using namespace rough;

TEST_CASE("path csv round-trips bit-exactly") {
    Grid g(-0.25, 1.0 / 16, 20);
    Path1 x = testutil::random_path(g, 3, 91);
    std::stringstream ss;
    write_path_csv(x, ss);
    Path1 back = read_path_csv(ss);
    REQUIRE(back.dim == 3);
    REQUIRE(back.grid.n == 20);
    CHECK(back.grid.t0 == doctest::Approx(-0.25).epsilon(1e-15));
    for (size_t i = 0; i < x.values.size(); ++i) CHECK(back.values[i] == x.values[i]);
}

TEST_CASE("path csv has a header and one row per grid point") {
    Grid g(0.0, 1.0 / 256, 256);
    Path1 x(g, 2);
    std::stringstream ss;
    write_path_csv(x, ss);
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(ss, line));
    CHECK(line == "t,x1,x2");
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 257);
}

TEST_CASE("family csv headers") {
    AreaFamily a;
    a.k = 1;
    a.c_lo = 0;
    a.c_hi = 0;
    a.cells = {0.5};
    std::stringstream sa;
    write_area_family_csv(a, 1, sa);
    std::string line;
    std::getline(sa, line);
    CHECK(line == "cell,i,j,value");
    std::getline(sa, line);
    CHECK(line.substr(0, 6) == "0,1,1,");

    VolumeFamily v;
    v.c_lo = 2;
    v.c_hi = 2;
    v.cells = {0, 0, 0.25};
    std::stringstream sv;
    write_volume_family_csv(v, 1, sv);
    std::getline(sv, line);
    CHECK(line == "cell,i,j,k,value");
}

TEST_CASE("malformed path csv is rejected") {
    std::stringstream ss("t,x1\n0,1\nbroken row\n");
    CHECK_THROWS_AS(read_path_csv(ss), ConfigError);
}

TEST_CASE("config parsing") {
    std::stringstream ss(
        "# comment\n"
        "H = 0.35\n"
        "delays = 0.125, 0.25\n"
        "\n"
        "[mc]\n"
        "N = 2000\n"
        "mode = scaling\n");
    Config c = Config::parse(ss);
    CHECK(c.num("H", 0.0) == doctest::Approx(0.35));
    CHECK(c.integer("mc.N", 0) == 2000);
    CHECK(c.str("mc.mode", "") == "scaling");
    std::vector<double> del = c.list("delays");
    REQUIRE(del.size() == 2);
    CHECK(del[0] == doctest::Approx(0.125));
    CHECK(del[1] == doctest::Approx(0.25));
    SUBCASE("defaults and requirements") {
        CHECK(c.num("missing", 7.5) == 7.5);
        CHECK_THROWS_AS(c.require("missing"), ConfigError);
    }
}

TEST_CASE("config rejects malformed input") {
    std::stringstream bad("this line has no equals sign\n");
    CHECK_THROWS_AS(Config::parse(bad), ConfigError);
    std::stringstream badnum("H = not-a-number\n");
    Config c = Config::parse(badnum);
    CHECK_THROWS_AS(c.num("H", 0.0), ConfigError);
}

TEST_CASE("bracketed lists are accepted") {
    std::stringstream ss("delays = [0.1, 0.2]\n");
    Config c = Config::parse(ss);
    std::vector<double> del = c.list("delays");
    REQUIRE(del.size() == 2);
    CHECK(del[1] == doctest::Approx(0.2));
}
