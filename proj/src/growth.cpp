#include "toda/growth.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Dense>

namespace toda {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

cplx map_value(double r, const std::vector<cplx>& a, const Leaf& leaf, cplx w) {
    cplx z = r * w;
    for (int n = 0; n < leaf.size(); ++n) z += a[n] * std::pow(w, 1 - leaf.exponents[n]);
    return z;
}

cplx map_derivative(double r, const std::vector<cplx>& a, const Leaf& leaf, cplx w) {
    cplx d = r;
    for (int n = 0; n < leaf.size(); ++n)
        d += double(1 - leaf.exponents[n]) * a[n] * std::pow(w, -leaf.exponents[n]);
    return d;
}

std::vector<cplx> moments_at(double r, const std::vector<cplx>& a, const Leaf& leaf,
                             const std::vector<int>& k_set, int n) {
    std::vector<cplx> t(k_set.size() + 1, cplx(0));
    for (int j = 0; j < n; ++j) {
        const cplx w = std::polar(1.0, kTwoPi * j / n);
        const cplx z = map_value(r, a, leaf, w);
        const cplx base = std::conj(z) * map_derivative(r, a, leaf, w) * w;
        t[0] += base;
        for (std::size_t i = 0; i < k_set.size(); ++i) t[i + 1] += std::pow(z, -k_set[i]) * base;
    }
    t[0] /= double(n);
    for (std::size_t i = 0; i < k_set.size(); ++i) t[i + 1] /= double(n) * k_set[i];
    return t;
}

}  // namespace

ParamPoint TrajectoryState::params(const Leaf& leaf) const {
    std::vector<cplx> zeta(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) zeta[n] = a[n] / r;
    return ParamPoint(leaf, zeta, r);
}

std::vector<cplx> harmonic_moments(double r, const std::vector<cplx>& a, const Leaf& leaf,
                                   const std::vector<int>& k_set, int n_quad) {
    if (static_cast<int>(a.size()) != leaf.size())
        throw Error("InvalidParam", "coefficient count does not match the leaf");
    const auto coarse = moments_at(r, a, leaf, k_set, n_quad);
    const auto fine = moments_at(r, a, leaf, k_set, 2 * n_quad);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const int k = i == 0 ? 0 : k_set[i - 1];
        const double scale = std::max(std::abs(fine[i]), std::pow(r, 2 - k));
        if (std::abs(fine[i] - coarse[i]) > 1e-10 * scale)
            throw Error("QuadratureNotConverged",
                        "moment t_" + std::to_string(k) + " changed under node doubling");
    }
    return fine;
}

double univalence_margin(double r, const std::vector<cplx>& a, const Leaf& leaf) {
    const int n = 2048;
    double best = std::numeric_limits<double>::infinity(), best_theta = 0, winding = 0;
    cplx prev = map_derivative(r, a, leaf, 1.0);
    for (int j = 1; j <= n; ++j) {
        const double th = kTwoPi * j / n;
        const cplx d = map_derivative(r, a, leaf, std::polar(1.0, th));
        if (std::abs(d) < best) {
            best = std::abs(d);
            best_theta = th;
        }
        winding += std::arg(d / prev);
        prev = d;
    }
    const double h = kTwoPi / n;
    auto f = [&](double th) { return std::abs(map_derivative(r, a, leaf, std::polar(1.0, th))); };
    const auto m = boost::math::tools::brent_find_minima(f, best_theta - h, best_theta + h, 52);
    best = std::min(best, m.second);
    // Zeros of f' in |w| > 1 reverse the winding of f' along the unit circle.
    const long zeros = std::lround(-winding / kTwoPi);
    return zeros > 0 ? -best : best;
}

TrajectoryState initial_state(double r, std::vector<cplx> a, const Leaf& leaf,
                              const GrowthOptions& opt) {
    if (!(r > 0)) throw Error("InvalidParam", "conformal radius must be positive");
    for (auto v : a)
        if (v.imag() != 0) throw Error("InvalidParam", "default solver needs real coefficients");
    TrajectoryState s;
    s.r = r;
    s.a = std::move(a);
    s.moments = harmonic_moments(r, s.a, leaf, leaf.exponents, opt.n_quad);
    s.univalence_margin = univalence_margin(r, s.a, leaf);
    s.univalence_lost = s.univalence_margin <= 0;
    return s;
}

TrajectoryState solve_state(const TrajectoryState& seed, const Leaf& leaf, double T,
                            const GrowthOptions& opt) {
    const int N = leaf.size();
    const double target0 = seed.moments[0].real() + (T - seed.T);
    auto residual = [&](const Eigen::VectorXd& x) {
        std::vector<cplx> a(N);
        for (int n = 0; n < N; ++n) a[n] = x[n + 1];
        const auto t = moments_at(x[0], a, leaf, leaf.exponents, opt.n_quad);
        Eigen::VectorXd f(N + 1);
        f[0] = t[0].real() - target0;
        for (int n = 0; n < N; ++n) f[n + 1] = t[n + 1].real() - seed.moments[n + 1].real();
        return f;
    };

    Eigen::VectorXd x(N + 1);
    x[0] = seed.r;
    for (int n = 0; n < N; ++n) x[n + 1] = seed.a[n].real();
    Eigen::VectorXd f = residual(x);
    bool done = false;
    for (int it = 0; it < 40 && !done; ++it) {
        if (f.lpNorm<Eigen::Infinity>() <= opt.newton_tol * (1 + std::abs(target0))) {
            done = true;
            break;
        }
        Eigen::MatrixXd jac(N + 1, N + 1);
        for (int i = 0; i <= N; ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            jac.col(i) = (residual(xp) - residual(xm)) / (2 * h);
        }
        const Eigen::VectorXd step = jac.fullPivLu().solve(f);
        if (!step.allFinite()) break;
        x -= step;
        if (!(x[0] > 0)) break;
        f = residual(x);
    }
    if (!done || !(x[0] > 0)) throw Error("NewtonFailed", "moment system did not converge");

    TrajectoryState s;
    s.T = T;
    s.r = x[0];
    s.a.resize(N);
    for (int n = 0; n < N; ++n) s.a[n] = x[n + 1];
    s.moments = harmonic_moments(s.r, s.a, leaf, leaf.exponents, opt.n_quad);
    for (int n = 0; n < N; ++n) {
        const double ref = seed.moments[n + 1].real();
        if (std::abs(s.moments[n + 1].real() - ref) > opt.cons_tol * (1 + std::abs(ref)))
            throw Error("NewtonFailed", "conserved moment drifted");
    }
    s.univalence_margin = univalence_margin(s.r, s.a, leaf);
    s.univalence_lost = s.univalence_margin <= 0;
    return s;
}

std::vector<TrajectoryState> evolve(const TrajectoryState& initial, const Leaf& leaf, double dT,
                                    int steps, const GrowthOptions& opt) {
    std::vector<TrajectoryState> out{initial};
    if (dT == 0) return out;
    TrajectoryState cur = initial;
    for (int k = 0; k < steps; ++k) {
        const double goal = initial.T + (k + 1) * dT;
        double h = dT;
        while ((dT > 0) ? cur.T < goal : cur.T > goal) {
            const double target = std::abs(goal - cur.T) < std::abs(h) ? goal : cur.T + h;
            try {
                cur = solve_state(cur, leaf, target, opt);
            } catch (const Error& e) {
                if (e.code() != "NewtonFailed") throw;
                h *= 0.5;
                if (std::abs(h) < opt.dT_min)
                    throw Error("TrajectoryStalled",
                                "step size fell below the floor at T = " + std::to_string(cur.T));
            }
        }
        cur.T = goal;
        out.push_back(cur);
        if (cur.univalence_lost) break;
    }
    return out;
}

namespace {

// Tracks the dominant characteristic point along the trajectory.
struct RhoTracker {
    const Leaf& leaf;
    int order;
    std::optional<CharPoint> last;

    double operator()(const TrajectoryState& s) {
        const ParamPoint p = s.params(leaf);
        if (p.is_zero()) {
            last.reset();
            return std::numeric_limits<double>::infinity();
        }
        if (last) {
            auto c = refine_char_point(p, last->x_star, last->lambda);
            if (c && std::abs(c->x_star - last->x_star) <= 0.1 * last->modulus) {
                last = *c;
                return c->modulus;
            }
        }
        last = dominant_data(p, order).representative;
        return last->modulus;
    }
};

struct Fold {
    TrajectoryState last;
    double T_end;
};

// Marches from `prev` with halving steps toward the end of the solution
// family. Near a fold the margin behaves like sqrt(T_end - T), so margin^2 is
// extrapolated linearly from the last two accepted states. The march stops
// while the margin is still resolved: the moment residual is flat at the
// fold and Newton accepts states slightly past it.
std::optional<Fold> approach_fold(const TrajectoryState& prev, const Leaf& leaf, double step,
                                  const GrowthOptions& opt) {
    TrajectoryState a = prev, b = prev;
    double h = 0.5 * step;
    const double floor = 1e-4 * prev.r;
    while (h > 1e-13 * std::max(1.0, prev.T) && b.univalence_margin > floor) {
        try {
            TrajectoryState next = solve_state(b, leaf, b.T + h, opt);
            if (next.univalence_margin <= floor && b.univalence_margin > 10 * floor) {
                h *= 0.5;  // land the last state in the resolved range
                continue;
            }
            a = b;
            b = next;
        } catch (const Error& e) {
            if (e.code() != "NewtonFailed") throw;
            h *= 0.5;
        }
    }
    if (b.T == a.T || !(b.univalence_margin < 1e-2 * b.r)) return std::nullopt;
    const double ma = a.univalence_margin * a.univalence_margin;
    const double mb = b.univalence_margin * b.univalence_margin;
    if (!(ma > mb)) return std::nullopt;
    return Fold{b, b.T + mb * (b.T - a.T) / (ma - mb)};
}

}  // namespace

Thresholds detect_thresholds(const TrajectoryState& initial, const Leaf& leaf, double dT,
                             double T_max, const GrowthOptions& opt, int char_order) {
    Thresholds th;
    RhoTracker rho{leaf, char_order, std::nullopt};
    TrajectoryState cur = initial;
    th.trajectory.push_back(cur);
    th.rho_star.push_back(rho(cur));
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-10; };

    while (cur.T < T_max - 1e-12) {
        const double step = std::min(dT, T_max - cur.T);
        const TrajectoryState prev = cur;
        const std::optional<CharPoint> prev_char = rho.last;
        try {
            cur = evolve(prev, leaf, step, 1, opt).back();
        } catch (const Error& e) {
            if (e.code() != "TrajectoryStalled") throw;
            // The moment family can end in a fold where the margin closes.
            const auto fold = approach_fold(prev, leaf, step, opt);
            if (!fold) throw;
            th.trajectory.push_back(fold->last);
            th.rho_star.push_back(rho(fold->last));
            th.T_univ = fold->T_end;
            break;
        }
        const double g_prev = th.rho_star.back() - 1;
        const double g_cur = rho(cur) - 1;
        th.trajectory.push_back(cur);
        th.rho_star.push_back(g_cur + 1);

        if (!th.T_c && g_prev > 0 && g_cur <= 0) {
            RhoTracker local{leaf, char_order, prev_char};
            auto f = [&](double T) {
                RhoTracker t = local;
                return t(solve_state(prev, leaf, T, opt)) - 1;
            };
            std::uintmax_t iters = 200;
            const auto r =
                boost::math::tools::toms748_solve(f, prev.T, cur.T, g_prev, g_cur, close, iters);
            const double Tc = 0.5 * (r.first + r.second);
            const TrajectoryState at = solve_state(prev, leaf, Tc, opt);
            RhoTracker t = local;
            th.T_c = Tc;
            th.rho_at_Tc = t(at);
            th.margin_at_Tc = at.univalence_margin;
            th.separation_ok = at.univalence_margin > 0;
        }
        if (prev.univalence_margin > 0 && cur.univalence_margin <= 0) {
            auto f = [&](double T) { return solve_state(prev, leaf, T, opt).univalence_margin; };
            std::uintmax_t iters = 200;
            const auto r = boost::math::tools::toms748_solve(
                f, prev.T, cur.T, prev.univalence_margin, cur.univalence_margin, close, iters);
            th.T_univ = 0.5 * (r.first + r.second);
            break;
        }
    }
    return th;
}

ParamPath growth_path(const TrajectoryState& initial, const Leaf& leaf, double T_c,
                      const GrowthOptions& opt) {
    return [=](double delta) {
        const double T = T_c - delta;
        const double span = T - initial.T;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / 0.25)));
        const auto traj = evolve(initial, leaf, span / steps, steps, opt);
        return traj.back().params(leaf);
    };
}

}  // namespace toda
