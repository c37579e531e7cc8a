#include <doctest.h>

#include <cmath>
#include <numbers>

#include "toda/scan.hpp"

using namespace toda;

namespace {

double partial_sum_L(double eta) {
    double acc = 0, pw = 1;
    for (int m = 0; m < 20000 && pw > 1e-18; ++m) {
        acc += pw / (m + 1);
        pw *= eta;
    }
    return acc;
}

ParamPath one_mode_path() {
    return [](double delta) { return ParamPoint(Leaf::make({2}), {0.25 * (1 - delta)}); };
}

RenormConfig small_renorm() {
    RenormConfig cfg;
    cfg.J = 24;
    return cfg;
}

}  // namespace

TEST_CASE("log scale closed form") {
    CHECK(log_scale_from_eta(0.9) == doctest::Approx(2.558427881).epsilon(1e-10));
    CHECK(log_scale_from_eta(0.9) == doctest::Approx(partial_sum_L(0.9)).epsilon(1e-13));
    CHECK(log_scale_from_eta(1e-20) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(log_scale_from_eta(0.0) == 1.0);

    const auto ls = log_scale(2.0, 2);
    CHECK(ls.eta == doctest::Approx(1.0 / 81).epsilon(1e-15));
    CHECK(ls.L == doctest::Approx(partial_sum_L(1.0 / 81)).epsilon(1e-14));
    CHECK(ls.L == doctest::Approx(1.0062241199).epsilon(1e-10));
    CHECK_THROWS_AS(log_scale(1.0, 2), Error);
}

TEST_CASE("log scale tracks log(1/eps)") {
    for (int s : {2, 3})
        for (double e = 1e-6; e <= 0.1 * (1 + 1e-12); e *= std::sqrt(10.0)) {
            const double L = log_scale(1 + e, s).L;
            CHECK(std::abs(L - std::log(1 / e)) < 3);
        }
}

TEST_CASE("spike vector") {
    const auto dom = dominant_data(ParamPoint(Leaf::make({2}), {0.2499}), 400, {1});
    RenormConfig cfg = small_renorm();
    const Spike sp = spike_vector(dom, cfg, 2);
    REQUIRE(sp.d.size() == cfg.J + 1);
    CHECK(sp.gamma == doctest::Approx(sp.d.squaredNorm()).epsilon(1e-15));
    CHECK(sp.gamma > 0);
    // |d(j)| p_j^{1+beta} (alpha/|lambda|)^{p_j} is constant.
    const double lam = std::abs(dom.representative.lambda);
    const double ref = std::abs(sp.d[0]) * std::pow(1.0, 1 + cfg.beta) * std::pow(cfg.alpha / lam, 1);
    for (int j = 1; j <= cfg.J; ++j) {
        const double p = cfg.p(j, 2);
        CHECK(std::abs(sp.d[j]) * std::pow(p, 1 + cfg.beta) * std::pow(cfg.alpha / lam, p) ==
              doctest::Approx(ref).epsilon(1e-12));
    }

    DominantData flat = dom;
    flat.kappa_sheet = 0;
    const Spike z = spike_vector(flat, cfg, 2);
    CHECK(z.gamma == 0.0);
    CHECK(z.d.isZero(0));
}

TEST_CASE("changing the orbit representative only rotates the spike") {
    const ParamPoint p(Leaf::make({3, 6}), {cplx(0.1, 0.01), 0.01});
    const auto dom = dominant_data(p, 400);
    RenormConfig cfg = small_renorm();
    const Spike a = spike_vector(dom, cfg, 3);
    DominantData rot = dom;
    rot.representative.x_star *= std::polar(1.0, 2 * std::numbers::pi / 3);
    rot.phi += 2 * std::numbers::pi / 3;
    const Spike b = spike_vector(rot, cfg, 3);
    for (int j = 0; j <= cfg.J; ++j) CHECK(std::abs(std::abs(a.d[j]) - std::abs(b.d[j])) <= 1e-14 * std::abs(a.d[j]));
    CHECK(std::abs(a.gamma - b.gamma) <= 1e-12 * a.gamma);
}

TEST_CASE("sandwich and deflation on the one-mode approach") {
    const auto path = one_mode_path();
    const auto scan = scan_path(path, {1e-1, 1e-2, 1e-3}, small_renorm(), {1, 2});
    for (const auto& pt : scan) {
        REQUIRE(pt.status == "ok");
        CHECK(pt.epsilon > 0);
        for (const auto& b : pt.blocks) {
            const double lg = b.L * b.gamma;
            CHECK(b.mu[0] >= lg - b.c_norm);
            CHECK(b.mu[0] <= lg + b.c_norm);
            CHECK(std::abs(b.mu[0] - (lg + b.sandwich)) <= b.c_norm);
            CHECK(b.mu[1] <= b.c_norm * (1 + 1e-12));
            for (Eigen::Index k = 1; k < b.mu.size(); ++k) CHECK(b.mu[k] <= b.mu[k - 1]);
            CHECK(b.delta == pt.delta);
        }
    }
    // Exact epsilon for the one-mode leaf: rho_* = 1 / (2 sqrt(zeta)).
    CHECK(scan[1].epsilon == doctest::Approx(1 / std::sqrt(0.99) - 1).epsilon(1e-12));
}

TEST_CASE("constant path gives constant output") {
    ParamPath flat = [](double) { return ParamPoint(Leaf::make({2}), {0.2}); };
    const auto scan = scan_path(flat, {0.1, 0.01, 0.001}, small_renorm(), {1});
    for (const auto& pt : scan) {
        REQUIRE(pt.status == "ok");
        CHECK(pt.blocks[0].mu == scan[0].blocks[0].mu);
        CHECK(pt.blocks[0].c_norm == scan[0].blocks[0].c_norm);
    }
}

TEST_CASE("blocks do not depend on q ordering or thread count") {
    const ParamPath path = [](double delta) {
        return ParamPoint(Leaf::make({3, 6}), {0.11 * (1 - delta), 0.01});
    };
    ScanOptions one;
    ScanOptions many;
    many.threads = 3;
    const std::vector<double> grid{0.3, 0.2, 0.1, 0.05};
    const auto a = scan_path(path, grid, small_renorm(), {1, 2, 3}, one);
    const auto b = scan_path(path, grid, small_renorm(), {3, 1, 2}, many);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(a[i].status == "ok");
        CHECK(a[i].delta == b[i].delta);
        CHECK(a[i].blocks[0].mu == b[i].blocks[1].mu);
        CHECK(a[i].blocks[1].mu == b[i].blocks[2].mu);
        CHECK(a[i].blocks[2].mu == b[i].blocks[0].mu);
        CHECK(a[i].blocks[0].c_hs == b[i].blocks[1].c_hs);
    }
}

TEST_CASE("failed points are recorded, not skipped") {
    const auto scan = scan_path(one_mode_path(), {0.1, -0.1, 0.01}, small_renorm(), {1});
    REQUIRE(scan.size() == 3);
    CHECK(scan[0].status == "ok");
    CHECK(scan[1].status != "ok");
    CHECK(!scan[1].message.empty());
    CHECK(scan[1].blocks.empty());
    CHECK(scan[2].status == "ok");
}

TEST_CASE("alpha below the midpoint bound raises a warning") {
    RenormConfig cfg = small_renorm();
    cfg.alpha = 1.01;
    const auto scan = scan_path(one_mode_path(), {0.1}, cfg, {1});
    REQUIRE(scan[0].status == "ok");
    CHECK(scan[0].m0_estimate > 1.01);
    CHECK(!scan[0].warning.empty());
}

TEST_CASE("line fits") {
    std::vector<double> x, y;
    for (int i = 0; i < 8; ++i) {
        x.push_back(1 + 0.5 * i);
        y.push_back(2 * x.back());
    }
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1));
    CHECK_THROWS_AS(fit_line({1}, {1}), Error);
}

TEST_CASE("scaling fit on synthetic spectra") {
    std::vector<ScanPoint> scan;
    for (int i = 0; i <= 8; ++i) {
        ScanPoint pt;
        pt.delta = std::pow(10.0, -0.5 * i);
        BlockSpectrum b;
        b.q = 1;
        b.L = std::log(1 / pt.delta) + 0.3;
        b.mu = RVec(3);
        b.mu << 2 * b.L, 0.7, 0.1;
        b.gamma = 2;
        pt.blocks.push_back(b);
        scan.push_back(pt);
    }
    const auto rep = fit_log_scaling(scan);
    REQUIRE(rep.size() == 1);
    CHECK(rep[0].fit_L.slope == doctest::Approx(2));
    CHECK(rep[0].fit_L.r2 == doctest::Approx(1));
    CHECK(rep[0].fit_log_delta.slope == doctest::Approx(2));
    CHECK(rep[0].gamma_limit == 2);
    CHECK(rep[0].bounded[0]);
    CHECK(rep[0].higher_max[0] == 0.7);

    scan.resize(5);
    CHECK_THROWS_WITH_AS(fit_log_scaling(scan), doctest::Contains("InsufficientData"), Error);
}
