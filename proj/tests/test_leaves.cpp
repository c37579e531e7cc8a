#include <doctest.h>

#include <cmath>
#include <random>

#include "toda/leaves.hpp"

using namespace toda;

TEST_CASE("pole characteristic values") {
    const auto apex = pole_rho_char({0.0, 0.25});
    CHECK(std::abs(apex.x_plus - 1.0) < 1e-15);
    CHECK(std::abs(apex.x_minus + 1.0) < 1e-15);
    CHECK(apex.rho == 1.0);

    const auto p = pole_rho_char({0.0, 0.16});
    CHECK(std::abs(p.x_plus - 1.25) < 1e-15);
    CHECK(std::abs(p.x_minus + 1.25) < 1e-15);
    CHECK(p.rho == doctest::Approx(1.25));

    for (double b : {-0.7, -0.2, 0.3, 0.8}) {
        const double c = std::pow((1 - std::abs(b)) / 2, 2);
        CHECK(pole_rho_char({b, c}).rho == doctest::Approx(1).epsilon(1e-14));
    }
    CHECK_THROWS_WITH_AS(pole_rho_char({0.2, 0.01}), doctest::Contains("Degenerate"), Error);
}

TEST_CASE("pole discriminant vanishes at the characteristic values") {
    for (const PoleLeafPoint p : {PoleLeafPoint{0.3, 0.1}, PoleLeafPoint{cplx(-0.2, 0.4), 0.05}}) {
        const auto pc = pole_rho_char(p);
        CHECK(std::abs(pole_discriminant(p, pc.x_plus)) < 1e-12);
        CHECK(std::abs(pole_discriminant(p, pc.x_minus)) < 1e-12);
    }
}

TEST_CASE("pole germ") {
    // b = 0 is the one-mode s = 2 germ with zeta = c.
    const CVec u = pole_germ({0.0, 0.1}, 9);
    const double catalan[] = {1, 1, 2, 5, 14};
    for (int k = 0; k <= 4; ++k) {
        CHECK(std::abs(u[2 * k + 1] - catalan[k] * std::pow(0.1, k)) < 1e-15);
        CHECK(u[2 * k] == cplx(0));
    }
    // u = x (1 + c u^2 / (1 - b u)) to third order: u_3 = c.
    const CVec v = pole_germ({0.4, 0.2}, 4);
    CHECK(std::abs(v[3] - 0.2) < 1e-15);
    CHECK(std::abs(v[4] - 0.2 * 0.4) < 1e-15);
}

TEST_CASE("pole germ radius matches the closed form") {
    CHECK(pole_germ_radius({0.0, 0.16}, 400) == doctest::Approx(1.25).epsilon(1e-3));
    for (double c : {0.05, 0.2})
        CHECK(pole_germ_radius({0.0, c}, 400) == doctest::Approx(0.5 / std::sqrt(c)).epsilon(1e-3));

    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> ub(0.05, 0.9), ufrac(0.05, 0.9);
    for (int i = 0; i < 20; ++i) {
        const double b = (i % 2 ? -1 : 1) * ub(rng);
        const double c = ufrac(rng) * std::pow((1 - std::abs(b)) / 2, 2);
        const double rho = pole_rho_char({b, c}).rho;
        REQUIRE(rho > 1);
        CHECK(std::abs(pole_germ_radius({b, c}, 400) - rho) <= 1e-3 * rho);
    }
    CHECK_THROWS_AS(pole_germ_radius({0.1, 0.1}, 50), Error);
}

TEST_CASE("vanishing pole strength") {
    bool big_or_degenerate = false;
    try {
        big_or_degenerate = pole_germ_radius({0.0, 1e-300}, 200) > 1e6;
    } catch (const Error& e) {
        big_or_degenerate = e.code() == "DegenerateSeries";
    }
    CHECK(big_or_degenerate);
}

TEST_CASE("log characteristic values") {
    for (double gamma : {0.05, 0.1}) {
        for (double b = 0.02; b < 4 * gamma; b += 0.02) {
            const auto lc = log_rho_char({b, gamma});
            CHECK(lc.conjugate_pair);
            CHECK(std::abs(std::abs(lc.x_plus) - std::abs(lc.x_minus)) <= 1e-10);
        }
        for (double b = 4 * gamma + 0.02; b < 1; b += 0.05) {
            const auto lc = log_rho_char({b, gamma});
            CHECK(!lc.conjugate_pair);
            CHECK(std::abs(std::abs(lc.x_plus) - std::abs(lc.x_minus)) > 1e-6);
        }
    }
    const auto lc = log_rho_char({0.3, 0.05});
    const cplx q = 0.05 * 0.3 * lc.u_plus * lc.u_plus - 0.3 * lc.u_plus + 1.0;
    CHECK(std::abs(q) < 1e-13);
    CHECK(lc.plus_on_cut);
    CHECK(lc.minus_on_cut);
    CHECK_THROWS_AS(log_rho_char({1.0, 0.1}), Error);
    CHECK_THROWS_AS(log_rho_char({0.5, -0.1}), Error);
}

TEST_CASE("log leaf map") {
    const LogLeafPoint p{0.5, 0.2};
    const cplx u(0.3, 0.1);
    CHECK(std::abs(log_leaf_X(p, u) - u / (1.0 + 0.2 * u * std::log(1.0 - 0.5 * u))) < 1e-15);
    // Upper side of the cut: 1 - b u = -1 gives log = i pi.
    const cplx x = log_leaf_X(p, 4.0);
    CHECK(std::abs(x - 4.0 / (1.0 + 0.8 * cplx(0, M_PI))) < 1e-14);
}

TEST_CASE("log germ") {
    // u = x (1 + gamma u log(1 - b u)): u_3 = -gamma b, u_4 = -gamma b^2 / 2 - ... by hand.
    const double b = 0.4, g = 0.3;
    const CVec u = log_germ({b, g}, 4);
    CHECK(u[1] == cplx(1));
    CHECK(u[2] == cplx(0));
    CHECK(std::abs(u[3] + g * b) < 1e-15);
    CHECK(std::abs(u[4] + g * b * b / 2) < 1e-15);
}

TEST_CASE("log germ radius in the conjugate regime") {
    for (double gamma : {0.05, 0.1, 0.2})
        for (double b : {0.1, 0.15, 0.19}) {
            if (b >= 4 * gamma) continue;
            const auto lc = log_rho_char({b, gamma});
            const double r = log_germ_radius({b, gamma}, 400, true);
            CHECK(std::abs(r - lc.rho) <= 1e-2 * lc.rho);
        }
}

TEST_CASE("pole phase diagram contour") {
    PhaseGrid grid;
    grid.kind = PhaseGrid::Kind::Pole;
    grid.b_min = -0.98;
    grid.b_max = 0.98;
    grid.nb = 50;
    grid.y_min = 1e-5;
    grid.y_max = 0.3;
    grid.ny = 4;
    const auto d = phase_diagram(grid);
    REQUIRE(d.rows.size() == 200);
    REQUIRE(d.contour.size() == 50);
    for (const auto& cp : d.contour) {
        CHECK(cp.error_code.empty());
        CHECK(std::abs(cp.level - std::pow((1 - std::abs(cp.b)) / 2, 2)) < 1e-6);
    }

    PhaseGrid apex = grid;
    apex.b_min = apex.b_max = 0;
    apex.nb = 1;
    CHECK(std::abs(phase_diagram(apex).contour[0].level - 0.25) < 1e-6);
}

TEST_CASE("cell errors stay in the table") {
    PhaseGrid grid;
    grid.kind = PhaseGrid::Kind::Pole;
    grid.b_min = grid.b_max = 0.2;
    grid.nb = 1;
    grid.y_min = grid.y_max = 0.01;
    grid.ny = 1;
    const auto d = phase_diagram(grid);
    REQUIRE(d.rows.size() == 1);
    CHECK(d.rows[0].error_code == "Degenerate");
    CHECK(std::isnan(d.rows[0].rho_char));
}

TEST_CASE("log phase slice kinks at the discriminant") {
    PhaseGrid grid;
    grid.kind = PhaseGrid::Kind::Log;
    grid.b_min = 0.01;
    grid.b_max = 0.99;
    grid.nb = 99;
    grid.y_min = grid.y_max = 0.05;
    grid.ny = 1;
    const auto d = phase_diagram(grid);
    for (const auto& r : d.rows) {
        CHECK(r.error_code.empty());
        CHECK(r.conjugate_pair == (r.b < 0.2));
        if (r.b < 0.2)
            CHECK(std::abs(r.abs_x_plus - r.abs_x_minus) <= 1e-10);
        else if (r.b > 0.2 + 1e-9)
            CHECK(r.abs_x_plus > r.abs_x_minus);
    }
}

TEST_CASE("empty grid") {
    PhaseGrid grid;
    const auto d = phase_diagram(grid);
    CHECK(d.rows.empty());
    CHECK(d.contour.empty());
}

TEST_CASE("log threshold") {
    const double gc = gamma_c_solve(1e-6);
    CHECK(gc >= 0.2795);
    CHECK(gc <= 0.2805);
    CHECK(gc == doctest::Approx(0.2799676).epsilon(1e-5));

    auto min_rho = [](double gamma) {
        double best = INFINITY;
        for (int i = 1; i < 2000; ++i) best = std::min(best, log_rho_char({i / 2000.0, gamma}).rho);
        return best;
    };
    CHECK(min_rho(0.4) < 1);
    CHECK(min_rho(0.1) > 1);
    // At the threshold the level is met exactly at the b = 1 end; below it the
    // infimum over b sits at that end and stays above 1.
    CHECK(log_rho_char({1 - 1e-9, gc}).rho == doctest::Approx(1).epsilon(1e-5));
    CHECK(log_rho_char({1 - 1e-9, 0.1}).rho <= min_rho(0.1));
    CHECK_THROWS_AS(gamma_c_solve(1e-8), Error);
}
