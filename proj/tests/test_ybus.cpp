#include <vector>

#include "doctest.h"
#include "ppf/ybus.hpp"

using namespace ppf;

namespace {

NetworkCase two_bus(double r, double x, double bc, double tap = 1.0) {
    std::vector<Bus> buses(2);
    buses[0].id = 1;
    buses[0].kind = BusKind::Slack;
    buses[1].id = 2;
    buses[1].kind = BusKind::Load;
    std::vector<Gen> gens{{1, 0.0, 0.0, 1.0, true}};
    std::vector<Branch> branches{{1, 2, r, x, bc, tap, 0.0, true}};
    return NetworkCase(100.0, buses, gens, branches);
}

NetworkCase triangle(double charging = 0.02) {
    std::vector<Bus> buses(3);
    for (int i = 0; i < 3; ++i) {
        buses[i].id = i + 1;
        buses[i].kind = BusKind::Load;
    }
    buses[0].kind = BusKind::Slack;
    std::vector<Gen> gens{{1, 0.0, 0.0, 1.0, true}};
    std::vector<Branch> branches{
        {1, 2, 0.01, 0.1, charging, 1.0, 0.0, true},
        {2, 3, 0.02, 0.2, 2 * charging, 1.0, 0.0, true},
        {1, 3, 0.03, 0.3, 3 * charging, 1.0, 0.0, true},
    };
    return NetworkCase(100.0, buses, gens, branches);
}

}  // namespace

TEST_CASE("pure reactance branch gives the textbook B matrix") {
    AdmittanceMatrix y = build_ybus(two_bus(0.0, 0.1, 0.0));
    CHECK(y.g.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(y.b(0, 0) == doctest::Approx(-10.0));
    CHECK(y.b(0, 1) == doctest::Approx(10.0));
    CHECK(y.b(1, 0) == doctest::Approx(10.0));
    CHECK(y.b(1, 1) == doctest::Approx(-10.0));
}

TEST_CASE("line charging adds half on each terminal diagonal") {
    AdmittanceMatrix y = build_ybus(two_bus(0.0, 0.1, 0.2));
    CHECK(y.b(0, 0) == doctest::Approx(-9.9));
    CHECK(y.b(1, 1) == doctest::Approx(-9.9));
    CHECK(y.b(0, 1) == doctest::Approx(10.0));
}

TEST_CASE("bus shunts land on the diagonal") {
    NetworkCase c = two_bus(0.0, 0.1, 0.0);
    std::vector<Bus> buses = c.buses();
    buses[1].gs_shunt = 0.05;
    buses[1].bs_shunt = 0.19;
    NetworkCase c2(c.base_mva(), buses, c.gens(), c.branches());
    AdmittanceMatrix y = build_ybus(c2);
    CHECK(y.g(1, 1) == doctest::Approx(0.05));
    CHECK(y.b(1, 1) == doctest::Approx(-10.0 + 0.19));
}

TEST_CASE("tap-free network is symmetric to 1e-12") {
    AdmittanceMatrix y = build_ybus(triangle());
    CHECK((y.g - y.g.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((y.b - y.b.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("tap ratio breaks symmetry in the expected two-port way") {
    const double tap = 0.978;
    AdmittanceMatrix y = build_ybus(two_bus(0.0, 0.2, 0.0, tap));
    const double ys = 1.0 / 0.2;
    CHECK(y.b(0, 0) == doctest::Approx(-ys / (tap * tap)));
    CHECK(y.b(0, 1) == doctest::Approx(ys / tap));
    CHECK(y.b(1, 0) == doctest::Approx(ys / tap));
    CHECK(y.b(1, 1) == doctest::Approx(-ys));
}

TEST_CASE("row sums vanish for a pure series network") {
    AdmittanceMatrix y = build_ybus(triangle(0.0));
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(y.g.row(i).sum()) <= 1e-12);
        CHECK(std::abs(y.b.row(i).sum()) <= 1e-12);
    }
}

TEST_CASE("removing a branch changes exactly four entries") {
    NetworkCase c = triangle();
    AdmittanceMatrix y_all = build_ybus(c);

    std::vector<Branch> branches = c.branches();
    branches[1].in_service = false;  // branch 2-3
    NetworkCase c2(c.base_mva(), c.buses(), c.gens(), branches);
    AdmittanceMatrix y_cut = build_ybus(c2);

    int changed = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (y_all.g(i, j) != y_cut.g(i, j) || y_all.b(i, j) != y_cut.b(i, j))
                ++changed;
    CHECK(changed == 4);
    CHECK(c2.n_lines() == 2);
}

TEST_CASE("in-service branch with zero impedance is singular") {
    std::vector<Bus> buses(2);
    buses[0].id = 1;
    buses[0].kind = BusKind::Slack;
    buses[1].id = 2;
    buses[1].kind = BusKind::Load;
    std::vector<Gen> gens{{1, 0.0, 0.0, 1.0, true}};
    std::vector<Branch> branches{{1, 2, 0.0, 0.0, 0.0, 1.0, 0.0, true}};
    CHECK_THROWS_AS(NetworkCase(100.0, buses, gens, branches), ValidationError);
}
