#include "toda/branch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/Polynomials>

namespace toda {

namespace {

constexpr double kPi = std::numbers::pi;

double arg_in_turn(cplx z) {
    double a = std::arg(z);
    if (a < 0) a += 2 * kPi;
    return a;
}

}  // namespace

CharResidual char_residual(const ParamPoint& p, cplx x, cplx y) {
    CharResidual r{y - 1.0, 1.0, 0.0, 0.0};
    for (int n = 0; n < p.leaf.size(); ++n) {
        const int s = p.leaf.exponents[n];
        const cplx zx = p.zeta[n] * std::pow(x, s - 1);
        const cplx ys2 = std::pow(y, s - 2);
        const cplx term = zx * x * ys2 * y * y;  // zeta x^s y^s
        r.F -= term;
        r.F_y -= double(s) * zx * x * ys2 * y;
        r.F_x -= double(s) * zx * ys2 * y * y;
        r.F_yy -= double(s) * (s - 1) * zx * x * ys2;
    }
    return r;
}

CharPoint make_char_point(const ParamPoint& p, cplx x, cplx lambda) {
    CharPoint c;
    c.x_star = x;
    c.lambda = lambda;
    c.modulus = std::abs(x);
    const CharResidual r = char_residual(p, x, lambda);
    c.F_x = r.F_x;
    c.F_yy = r.F_yy;

    double scale = 1.0;
    for (int n = 0; n < p.leaf.size(); ++n) {
        const int s = p.leaf.exponents[n];
        scale = std::max(scale, s * (s - 1) * std::abs(p.zeta[n]) * std::pow(c.modulus, s) *
                                    std::pow(std::abs(lambda), s - 2));
    }
    c.simple = std::abs(r.F_yy) > 1e-8 * scale;
    c.fold_ok = std::abs(r.F_x) > 1e-12 * (1 + std::abs(lambda) / c.modulus);
    if (c.simple) {
        cplx k = std::sqrt(2.0 * x * r.F_x / r.F_yy);
        if (k.real() < 0 || (k.real() == 0 && k.imag() < 0)) k = -k;
        c.kappa = k;
    }
    return c;
}

std::optional<CharPoint> refine_char_point(const ParamPoint& p, cplx x, cplx y, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const CharResidual r = char_residual(p, x, y);
        // G = F_y; G_x and G_y = F_yy
        cplx G_x = 0;
        for (int n = 0; n < p.leaf.size(); ++n) {
            const int s = p.leaf.exponents[n];
            G_x -= double(s) * s * p.zeta[n] * std::pow(x, s - 1) * std::pow(y, s - 1);
        }
        Eigen::Matrix2cd J;
        J << r.F_x, r.F_y, G_x, r.F_yy;
        const Eigen::Vector2cd rhs(r.F, r.F_y);
        const Eigen::Vector2cd step = J.partialPivLu().solve(rhs);
        if (!std::isfinite(std::abs(step[0])) || !std::isfinite(std::abs(step[1])))
            return std::nullopt;
        x -= step[0];
        y -= step[1];
        if (std::abs(step[0]) <= 1e-15 * std::abs(x) && std::abs(step[1]) <= 1e-15 * std::abs(y))
            break;
    }
    const CharResidual r = char_residual(p, x, y);
    const double tol = 1e-10 * (1 + std::abs(y));
    if (!(std::abs(r.F) <= tol && std::abs(r.F_y) <= tol) || x == cplx(0)) return std::nullopt;
    return make_char_point(p, x, y);
}

std::vector<CharPoint> solve_characteristic(const ParamPoint& p) {
    if (p.is_zero())
        throw Error("InvalidParam", "characteristic system needs zeta != 0");
    const Leaf& leaf = p.leaf;
    const int s = leaf.s;

    // With v = x lambda and t = v^s both equations reduce to
    //   1 + sum (1 - s_n) zeta_n t^{e_n} = 0,  lambda = 1 + sum zeta_n t^{e_n}.
    int degree = 0;
    for (int n = 0; n < leaf.size(); ++n)
        if (p.zeta[n] != cplx(0)) degree = std::max(degree, leaf.reduced(n));
    CVec poly = CVec::Zero(degree + 1);
    poly[0] = 1.0;
    for (int n = 0; n < leaf.size(); ++n)
        poly[leaf.reduced(n)] += double(1 - leaf.exponents[n]) * p.zeta[n];

    std::vector<cplx> roots;
    if (degree == 1) {
        roots.push_back(-poly[0] / poly[1]);
    } else {
        Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(poly);
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);
    }

    std::vector<CharPoint> out;
    for (cplx t : roots) {
        for (int it = 0; it < 8; ++it) {
            cplx f = 0, df = 0;
            for (Eigen::Index k = poly.size() - 1; k >= 0; --k) {
                df = df * t + f;
                f = f * t + poly[k];
            }
            if (df == cplx(0)) break;
            t -= f / df;
        }
        cplx lambda = 1.0;
        for (int n = 0; n < leaf.size(); ++n) lambda += p.zeta[n] * std::pow(t, leaf.reduced(n));
        if (std::abs(lambda) < 1e-300) continue;
        const cplx z = t / std::pow(lambda, s);
        const cplx x0 = std::pow(z, 1.0 / s);
        for (int k = 0; k < s; ++k) {
            const cplx x = x0 * std::polar(1.0, 2 * kPi * k / s);
            if (auto c = refine_char_point(p, x, lambda)) out.push_back(*c);
        }
    }
    const std::size_t expected = static_cast<std::size_t>(s) * degree;
    if (out.size() < expected)
        throw Error("NoConvergence", "found " + std::to_string(out.size()) + " of " +
                                         std::to_string(expected) + " characteristic points");

    std::sort(out.begin(), out.end(), [](const CharPoint& a, const CharPoint& b) {
        if (a.modulus != b.modulus) return a.modulus < b.modulus;
        return arg_in_turn(a.x_star) < arg_in_turn(b.x_star);
    });
    std::vector<CharPoint> unique;
    for (const auto& c : out) {
        bool dup = false;
        for (const auto& u : unique)
            if (std::abs(u.x_star - c.x_star) <= 1e-8 * (1 + c.modulus) &&
                std::abs(u.lambda - c.lambda) <= 1e-8 * (1 + std::abs(c.lambda)))
                dup = true;
        if (!dup) unique.push_back(c);
    }
    return unique;
}

RadiusEstimate radius_estimate(const PowerSeries& u, int s) {
    const int M = u.order();
    if (M < 50) throw Error("InvalidArgument", "radius_estimate needs order >= 50");
    for (int m = 1; m <= M; ++m) {
        const double a = std::abs(u.coeffs[m]);
        if (!(a >= std::numeric_limits<double>::min()) || !std::isfinite(a))
            throw Error("DegenerateSeries", "coefficient " + std::to_string(m) + " vanishes");
    }
    // Domb-Sykes: q_m = |u_m / u_{m+1}| ~ rho^s (1 - g/m), fitted on the top third.
    const int m0 = (2 * M) / 3;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int m = m0; m < M; ++m) {
        const double x = 1.0 / m;
        const double q = std::abs(u.coeffs[m] / u.coeffs[m + 1]);
        sx += x;
        sy += q;
        sxx += x * x;
        sxy += x * q;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    if (!(icpt > 0)) throw Error("DegenerateSeries", "non-positive ratio intercept");
    return {std::pow(icpt, 1.0 / s), -slope / icpt};
}

cplx DominantData::amplitude(int p, int s) const {
    const double c = -1.0 / (std::sqrt(double(s)) * 2.0 * std::sqrt(kPi));
    return c * double(p) * kappa_sheet * std::pow(representative.lambda, p - 1);
}

DominantData dominant_data(const ParamPoint& p, int order, const std::vector<int>& p_list,
                           const DominantOptions& opt) {
    const int s = p.leaf.s;
    const std::vector<CharPoint> chars = solve_characteristic(p);
    const double c = chars.front().modulus;

    // Rescaling x by the nearest characteristic modulus keeps coefficients O(1).
    const PowerSeries scaled = taylor_branch(p.rescaled(c), order);
    const RadiusEstimate est = radius_estimate(scaled, s);
    const double rho_hat = est.rho_hat * c;

    int first = -1;
    for (std::size_t i = 0; i < chars.size(); ++i)
        if (std::abs(chars[i].modulus / rho_hat - 1) <= opt.tol_match) {
            first = static_cast<int>(i);
            break;
        }
    if (first < 0)
        throw Error("NoDominantOrbit",
                    "radius estimate " + std::to_string(rho_hat) + " matches no characteristic modulus");
    const double mod = chars[first].modulus;

    std::vector<CharPoint> orbit;
    double next = std::numeric_limits<double>::infinity();
    for (const auto& ch : chars) {
        if (std::abs(ch.modulus - mod) <= opt.sep_min * mod)
            orbit.push_back(ch);
        else if (ch.modulus > mod)
            next = std::min(next, ch.modulus);
    }
    const cplx z_star = std::pow(orbit.front().x_star, s);
    for (const auto& ch : orbit)
        if (std::abs(std::pow(ch.x_star, s) - z_star) > 1e-8 * std::abs(z_star) ||
            std::abs(ch.lambda - orbit.front().lambda) > 1e-8 * (1 + std::abs(ch.lambda)))
            throw Error("NoDominantOrbit", "distinct orbits share the minimal modulus");
    if (static_cast<int>(orbit.size()) != s)
        throw Error("NoDominantOrbit", "orbit at the minimal modulus has " +
                                           std::to_string(orbit.size()) + " points");
    if (std::abs(est.exponent_hat + 1.5) > opt.exponent_tol)
        throw Error("NoDominantOrbit",
                    "fitted coefficient exponent " + std::to_string(est.exponent_hat) +
                        " is not of square-root type");

    DominantData d;
    d.rho_star = mod;
    d.orbit_size = s;
    d.separation = (next - mod) / mod;
    d.exponent_hat = est.exponent_hat;
    if (!(d.separation > opt.sep_min))
        throw Error("NoDominantOrbit", "separation below threshold");
    d.representative = orbit.front();
    for (const auto& ch : orbit)
        if (arg_in_turn(ch.x_star) < 2 * kPi / s - 1e-12) {
            d.representative = ch;
            break;
        }
    d.phi = std::arg(std::pow(d.representative.x_star, s));
    if (d.phi < 0) d.phi += 2 * kPi;
    if (!d.representative.simple)
        throw Error("NoDominantOrbit", "dominant characteristic point is not simple");

    // Sheet sign of kappa from the top coefficients of the rescaled series.
    d.kappa_sheet = d.representative.kappa;
    const cplx zs = z_star / std::pow(c, s);
    cplx acc = 0;
    for (int m = order - 8; m <= order; ++m) {
        const cplx model = d.amplitude(1, s) * std::pow(double(m), -1.5) * std::pow(zs, -m);
        acc += scaled.coeffs[m] / model;
    }
    if (acc.real() < 0) d.kappa_sheet = -d.kappa_sheet;

    for (int q : p_list) d.amplitudes[q] = d.amplitude(q, s);
    return d;
}

namespace {

struct Tracker {
    const ParamPath& path;
    double jump_frac;

    // Moves the tracked point from t0 to t1, bisecting on jumps.
    CharPoint advance(const CharPoint& from, double t0, double t1, int depth = 0) const {
        const auto c = refine_char_point(path(t1), from.x_star, from.lambda);
        if (c && std::abs(c->x_star - from.x_star) <= jump_frac * from.modulus) return *c;
        if (depth > 30)
            throw Error("BranchJump", "continuation lost the tracked orbit at t = " +
                                          std::to_string(t1));
        const double tm = 0.5 * (t0 + t1);
        const CharPoint mid = advance(from, t0, tm, depth + 1);
        return advance(mid, tm, t1, depth + 1);
    }
};

}  // namespace

ContinuationResult continue_critical(const ParamPath& path, const std::vector<double>& t_grid,
                                     int order, double jump_frac) {
    ContinuationResult res;
    if (t_grid.empty()) return res;
    const DominantData d = dominant_data(path(t_grid.front()), order);
    Tracker tr{path, jump_frac};
    CharPoint cur = d.representative;
    res.points.push_back({t_grid.front(), cur, cur.modulus});
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        cur = tr.advance(cur, t_grid[i - 1], t_grid[i]);
        res.points.push_back({t_grid[i], cur, cur.modulus});
    }
    for (std::size_t i = 0; i + 1 < res.points.size(); ++i)
        if ((res.points[i].rho_star - 1) * (res.points[i + 1].rho_star - 1) <= 0)
            res.critical_brackets.push_back(static_cast<int>(i));
    return res;
}

double critical_parameter(const ParamPath& path, double t_lo, double t_hi, double tol, int order) {
    std::vector<double> grid;
    const int n = 32;
    for (int i = 0; i <= n; ++i) grid.push_back(t_lo + (t_hi - t_lo) * i / n);
    const ContinuationResult cr = continue_critical(path, grid, order);
    if (cr.critical_brackets.empty())
        throw Error("NotBracketed", "rho_* - 1 keeps its sign on the interval");
    const auto& a = cr.points[cr.critical_brackets.front()];
    const auto& b = cr.points[cr.critical_brackets.front() + 1];
    if (a.rho_star == 1.0) return a.t;
    if (b.rho_star == 1.0) return b.t;

    Tracker tr{path, 0.1};
    auto f = [&](double t) { return tr.advance(a.point, a.t, t).modulus - 1.0; };
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, a.t, b.t, a.rho_star - 1, b.rho_star - 1,
                                                     close, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace toda
