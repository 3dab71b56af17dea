#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "ppf/matpower.hpp"

using namespace ppf;

namespace {

const char* kTwoBus = R"(function mpc = case2
% minimal two-bus fixture
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
    1  3  0    0  0  0  1  1.0  0  135  1  1.1  0.9;
    2  1  100  0  0  0  1  1.0  0  135  1  1.1  0.9;
];
mpc.gen = [
    1  0  0  0  0  1.0  100  1  0  0;
];
mpc.branch = [
    1  2  0  0.1  0  0  0  0  0  0  1;
];
)";

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("case14 parses with the published element counts") {
    NetworkCase c = parse_case(read_file(std::string(PPF_DATA_DIR) + "/case14.m"));
    CHECK(c.n_buses() == 14);
    CHECK(c.gens().size() == 5);
    CHECK(c.branches().size() == 20);
    CHECK(c.n_lines() == 20);
    CHECK(c.base_mva() == doctest::Approx(100.0));
    CHECK(c.pv_buses().size() == 4);
    CHECK(c.pq_buses().size() == 9);

    // demand converts MW to per unit; bus 3 carries 94.2 MW
    CHECK(c.buses()[c.bus_index(3)].p_demand == doctest::Approx(0.942));
    // transformer 4-7 keeps its off-nominal ratio
    bool found = false;
    for (const Branch& br : c.branches()) {
        if (br.from_bus == 4 && br.to_bus == 7) {
            CHECK(br.tap == doctest::Approx(0.978));
            found = true;
        }
    }
    CHECK(found);
    // ratio column 0 means nominal
    CHECK(c.branches()[0].tap == doctest::Approx(1.0));
}

TEST_CASE("two-bus case maps types and counts lines") {
    NetworkCase c = parse_case(kTwoBus);
    CHECK(c.n_buses() == 2);
    CHECK(c.buses()[0].kind == BusKind::Slack);
    CHECK(c.buses()[1].kind == BusKind::Load);
    CHECK(c.n_lines() == 1);
    CHECK(c.buses()[1].p_demand == doctest::Approx(1.0));
}

TEST_CASE("angles convert from degrees at the parse boundary") {
    const char* text = R"(mpc.baseMVA = 100;
mpc.bus = [
    1  3  0    0  0  0  1  1.0  90  135;
    2  1  100  0  0  0  1  1.0  0   135;
];
mpc.gen = [
    1  0  0  0  0  1.0  100  1;
];
mpc.branch = [
    1  2  0  0.1  0  0  0  0  0  30  1;
];
)";
    NetworkCase c = parse_case(text);
    CHECK(c.buses()[0].v_ang_init == doctest::Approx(std::numbers::pi / 2));
    CHECK(c.branches()[0].shift == doctest::Approx(std::numbers::pi / 6));
}

TEST_CASE("dangling branch endpoint is a validation error") {
    std::string text = kTwoBus;
    auto pos = text.find("1  2  0  0.1");
    text.replace(pos, 4, "1  99");
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("missing slack bus is a validation error") {
    std::string text = kTwoBus;
    auto pos = text.find("1  3  0 ");
    text.replace(pos, 4, "1  1");
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("two slack buses are rejected") {
    std::string text = kTwoBus;
    auto pos = text.find("2  1  100");
    text.replace(pos, 4, "2  3");
    CHECK_THROWS_AS(parse_case(text), ValidationError);
}

TEST_CASE("short rows report the offending line") {
    const char* bad = R"(mpc.baseMVA = 100;
mpc.bus = [
    1  3  0  0;
];
mpc.gen = [
];
mpc.branch = [
];
)";
    try {
        parse_case(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("non-numeric tokens are parse errors") {
    std::string text = kTwoBus;
    auto pos = text.find("0.1");
    text.replace(pos, 3, "abc");
    CHECK_THROWS_AS(parse_case(text), ParseError);
}

TEST_CASE("trailing columns are ignored, comments stripped") {
    std::string text = kTwoBus;
    auto pos = text.find("0  0  1;\n];\n)");
    REQUIRE(pos == std::string::npos);  // structure check only
    // append extra columns to the branch row
    pos = text.find("0  0  1;");
    text.replace(pos, 8, "0  0  1  -360  360  42;  % trailing junk");
    NetworkCase c = parse_case(text);
    CHECK(c.n_lines() == 1);
}

TEST_CASE("round trip: serialize then parse reproduces the model") {
    for (const char* name : {"case14.m", "case30.m", "case57.m", "case118.m"}) {
        NetworkCase c = parse_case(read_file(std::string(PPF_DATA_DIR) + "/" + name));
        NetworkCase c2 = parse_case(serialize_case(c));
        REQUIRE(c2.n_buses() == c.n_buses());
        REQUIRE(c2.gens().size() == c.gens().size());
        REQUIRE(c2.branches().size() == c.branches().size());
        for (int i = 0; i < c.n_buses(); ++i) {
            CHECK(c2.buses()[i].id == c.buses()[i].id);
            CHECK(c2.buses()[i].kind == c.buses()[i].kind);
            CHECK(c2.buses()[i].p_demand == c.buses()[i].p_demand);
            CHECK(c2.buses()[i].q_demand == c.buses()[i].q_demand);
            CHECK(c2.buses()[i].bs_shunt == c.buses()[i].bs_shunt);
            CHECK(c2.buses()[i].v_mag_init == c.buses()[i].v_mag_init);
            CHECK(c2.buses()[i].v_ang_init == c.buses()[i].v_ang_init);
        }
        for (std::size_t k = 0; k < c.branches().size(); ++k) {
            CHECK(c2.branches()[k].r == c.branches()[k].r);
            CHECK(c2.branches()[k].x == c.branches()[k].x);
            CHECK(c2.branches()[k].b_charge == c.branches()[k].b_charge);
            CHECK(c2.branches()[k].tap == c.branches()[k].tap);
            CHECK(c2.branches()[k].shift == c.branches()[k].shift);
        }
        for (std::size_t k = 0; k < c.gens().size(); ++k) {
            CHECK(c2.gens()[k].p_out == c.gens()[k].p_out);
            CHECK(c2.gens()[k].v_setpoint == c.gens()[k].v_setpoint);
        }
    }
}
