#include "toda/leaves.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

namespace toda {

PoleChar pole_rho_char(const PoleLeafPoint& p) {
    const double sc = std::sqrt(p.c);
    const cplx dp = p.b + 2 * sc, dm = p.b - 2 * sc;
    if (dp == cplx(0) || dm == cplx(0))
        throw Error("Degenerate", "characteristic value at infinity (b = -+2 sqrt(c))");
    PoleChar out{0, 1.0 / dp, 1.0 / dm};
    out.rho = std::min(std::abs(out.x_plus), std::abs(out.x_minus));
    return out;
}

cplx pole_discriminant(const PoleLeafPoint& p, cplx x) {
    return 1.0 - 2.0 * p.b * x + (p.b * p.b - 4.0 * p.c) * x * x;
}

CVec pole_germ(const PoleLeafPoint& p, int order) {
    // w = u^2 / (1 - b u) satisfies w_m = (u^2)_m + b (u w)_m and u_m = c w_{m-1}.
    CVec u = CVec::Zero(order + 1), w = CVec::Zero(order + 1);
    if (order >= 1) u[1] = 1.0;
    for (int m = 2; m <= order; ++m) {
        u[m] = p.c * w[m - 1];
        cplx acc = 0;
        for (int i = 1; i < m; ++i) acc += u[i] * (u[m - i] + p.b * w[m - i]);
        w[m] = acc;
    }
    return u;
}

namespace {

// Root-test scale from a short germ, so the long germ stays near unit size.
double crude_radius(const CVec& u) {
    for (Eigen::Index k = u.size() - 1; k >= 2; --k) {
        const double a = std::abs(u[k]);
        if (a > 0 && std::isfinite(a)) return std::pow(a, -1.0 / (k - 1));
    }
    throw Error("DegenerateSeries", "germ is a polynomial to the probed order");
}

PowerSeries shifted(const CVec& u, int first, int step) {
    PowerSeries out;
    const int n = static_cast<int>((u.size() - 1 - first) / step) + 1;
    out.coeffs.resize(n);
    for (int k = 0; k < n; ++k) out.coeffs[k] = u[first + k * step];
    return out;
}

}  // namespace

double pole_germ_radius(const PoleLeafPoint& p, int order) {
    if (order < 100) throw Error("InvalidArgument", "pole_germ_radius needs order >= 100");
    if (p.b == cplx(0)) {
        // Odd germ: u = x V(x^2)
        const double h = crude_radius(pole_germ(p, 65));
        const CVec u = pole_germ({0.0, p.c * h * h}, order);
        return h * radius_estimate(shifted(u, 1, 2), 2).rho_hat;
    }
    const double h = crude_radius(pole_germ(p, 64));
    const CVec u = pole_germ({p.b * h, p.c * h * h}, order);
    // u_2 = 0 always; the ratios start at u_3.
    return h * radius_estimate(shifted(u, 3, 1), 1).rho_hat;
}

cplx log_leaf_X(const LogLeafPoint& p, cplx u) {
    cplx w = 1.0 - p.b * u;
    if (w.imag() == 0) w = cplx(w.real(), 0.0);  // upper side of the cut
    return u / (1.0 + p.gamma * u * std::log(w));
}

LogChar log_rho_char(const LogLeafPoint& p) {
    if (!(p.b > 0 && p.b < 1) || !(p.gamma > 0))
        throw Error("InvalidParam", "log leaf needs 0 < b < 1 and gamma > 0");
    const cplx disc = p.b * p.b - 4 * p.gamma * p.b;
    const cplx root = std::sqrt(disc);
    LogChar out{};
    out.u_plus = (p.b + root) / (2 * p.gamma * p.b);
    out.u_minus = (p.b - root) / (2 * p.gamma * p.b);
    out.conjugate_pair = p.b < 4 * p.gamma;
    auto check = [&](cplx u, bool& on_cut) {
        const cplx w = 1.0 - p.b * u;
        if (std::abs(w) <= 1e-12)
            throw Error("LogBranchCut", "1 - b u vanishes at a characteristic point");
        on_cut = w.real() < 0 && std::abs(w.imag()) <= 1e-12 * std::abs(w);
    };
    check(out.u_plus, out.plus_on_cut);
    check(out.u_minus, out.minus_on_cut);
    out.x_plus = log_leaf_X(p, out.u_plus);
    out.x_minus = log_leaf_X(p, out.u_minus);
    out.rho = std::min(std::abs(out.x_plus), std::abs(out.x_minus));
    return out;
}

CVec log_germ(const LogLeafPoint& p, int order) {
    // l = log(1 - b u): m l_m = m g_m - sum_{k<m} k l_k g_{m-k}, g = 1 - b u.
    CVec u = CVec::Zero(order + 1), l = CVec::Zero(order + 1);
    for (int m = 1; m <= order; ++m) {
        if (m == 1) {
            u[1] = 1.0;
        } else {
            cplx acc = 0;
            for (int i = 1; i <= m - 2; ++i) acc += u[i] * l[m - 1 - i];
            u[m] = p.gamma * acc;
        }
        cplx acc = -p.b * u[m] * double(m);
        for (int k = 1; k < m; ++k) acc -= double(k) * l[k] * (-p.b * u[m - k]);
        l[m] = acc / double(m);
    }
    return u;
}

double log_germ_radius(const LogLeafPoint& p, int order, bool conjugate_pair) {
    if (order < 100) throw Error("InvalidArgument", "log_germ_radius needs order >= 100");
    // Rescaling x by h maps (b, gamma) -> (b h, gamma h) on u/h.
    const CVec probe = log_germ(p, 64);
    double h = crude_radius(probe);
    const CVec u = log_germ({p.b * h, p.gamma * h}, order);
    if (!conjugate_pair) return h * radius_estimate(shifted(u, 3, 1), 1).rho_hat;
    const PowerSeries v = shifted(u, 1, 1);
    PowerSeries d;
    d.coeffs.resize(v.coeffs.size() - 2);
    for (Eigen::Index m = 1; m + 1 < v.coeffs.size(); ++m)
        d.coeffs[m - 1] = v.coeffs[m + 1] * v.coeffs[m - 1] - v.coeffs[m] * v.coeffs[m];
    return h * radius_estimate(d, 2).rho_hat;
}

namespace {

double grid_value(double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
}

double rho_of(PhaseGrid::Kind kind, double b, double y) {
    if (kind == PhaseGrid::Kind::Pole) return pole_rho_char({b, y}).rho;
    return log_rho_char({b, y}).rho;
}

}  // namespace

PhaseDiagram phase_diagram(const PhaseGrid& grid) {
    PhaseDiagram out;
    if (grid.nb <= 0 || grid.ny <= 0) return out;
    for (int i = 0; i < grid.nb; ++i) {
        const double b = grid_value(grid.b_min, grid.b_max, grid.nb, i);
        for (int j = 0; j < grid.ny; ++j) {
            PhaseRow row;
            row.b = b;
            row.c_or_gamma = grid_value(grid.y_min, grid.y_max, grid.ny, j);
            try {
                if (grid.kind == PhaseGrid::Kind::Pole) {
                    const PoleChar pc = pole_rho_char({b, row.c_or_gamma});
                    row.rho_char = pc.rho;
                    row.abs_x_plus = std::abs(pc.x_plus);
                    row.abs_x_minus = std::abs(pc.x_minus);
                } else {
                    const LogChar lc = log_rho_char({b, row.c_or_gamma});
                    row.rho_char = lc.rho;
                    row.abs_x_plus = std::abs(lc.x_plus);
                    row.abs_x_minus = std::abs(lc.x_minus);
                    row.conjugate_pair = lc.conjugate_pair;
                }
            } catch (const Error& e) {
                row.error_code = e.code();
                row.rho_char = row.abs_x_plus = row.abs_x_minus =
                    std::numeric_limits<double>::quiet_NaN();
            }
            out.rows.push_back(row);
        }

        // rho_char = 1 along this column by bisection in c or gamma.
        ContourPoint cp{b, std::numeric_limits<double>::quiet_NaN(), ""};
        try {
            double lo = grid.y_min, hi = grid.y_max;
            double flo = rho_of(grid.kind, b, lo) - 1, fhi = rho_of(grid.kind, b, hi) - 1;
            if (flo * fhi > 0) throw Error("NotBracketed", "no level crossing in this column");
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = rho_of(grid.kind, b, mid) - 1;
                if ((fm > 0) == (flo > 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            cp.level = 0.5 * (lo + hi);
        } catch (const Error& e) {
            cp.error_code = e.code();
        }
        out.contour.push_back(cp);
    }
    return out;
}

namespace {

// Whether the level rho_char = 1 is met at some b < 1 for this gamma.
bool interior_crossing(double gamma) {
    auto f = [gamma](double b) { return log_rho_char({b, gamma}).rho; };
    const double b_hi = 1 - 1e-6;
    const auto m = boost::math::tools::brent_find_minima(f, 1e-6, b_hi, 50);
    return std::min(m.second, f(b_hi)) <= 1.0;
}

}  // namespace

double gamma_c_solve(double tol) {
    if (!(tol >= 1e-6)) throw Error("InvalidArgument", "gamma_c_solve needs tol >= 1e-6");
    double lo = 0.1, hi = 0.5;
    const bool plo = interior_crossing(lo), phi = interior_crossing(hi);
    if (plo == phi) throw Error("NotBracketed", "no change of behavior on [0.1, 0.5]");
    while (hi - lo > tol * 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (interior_crossing(mid) == plo)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace toda
