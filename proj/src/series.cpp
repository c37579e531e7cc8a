#include "toda/series.hpp"

#include <cmath>
#include <numeric>

#include "fft_series.hpp"

namespace toda {

Leaf Leaf::make(std::vector<int> exponents) {
    if (exponents.empty()) throw Error("InvalidLeaf", "exponent list is empty");
    int g = 0;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 2)
            throw Error("InvalidLeaf", "exponent " + std::to_string(exponents[i]) + " < 2");
        if (i > 0 && exponents[i] <= exponents[i - 1])
            throw Error("InvalidLeaf", "exponents must be strictly increasing");
        g = std::gcd(g, exponents[i]);
    }
    Leaf leaf;
    leaf.exponents = std::move(exponents);
    leaf.s = g;
    return leaf;
}

ParamPoint::ParamPoint(Leaf l, std::vector<cplx> z, std::optional<double> radius)
    : leaf(std::move(l)), zeta(std::move(z)), r(radius) {
    if (zeta.size() != leaf.exponents.size())
        throw Error("InvalidParam", "zeta has " + std::to_string(zeta.size()) +
                                        " entries, leaf has " +
                                        std::to_string(leaf.exponents.size()));
    if (r && !(*r > 0)) throw Error("InvalidParam", "conformal radius must be positive");
}

bool ParamPoint::is_zero() const {
    for (auto z : zeta)
        if (z != cplx(0)) return false;
    return true;
}

ParamPoint ParamPoint::rescaled(double c) const {
    ParamPoint q = *this;
    for (int n = 0; n < leaf.size(); ++n) q.zeta[n] *= std::pow(c, leaf.exponents[n]);
    return q;
}

namespace {

// Order-by-order substitution for U = 1 + sum zeta_n t^{e_n} U^{k_n}.
// Powers U^k are advanced with the J.C.P. Miller recurrence
//   m V_m = sum_{i=1}^m ((k+1) i - m) u_i V_{m-i},  u_0 = 1.
CVec substitute(const std::vector<cplx>& zeta, const std::vector<int>& shift,
                const std::vector<int>& power, int order) {
    const int n_modes = static_cast<int>(zeta.size());
    CVec u = CVec::Zero(order + 1);
    u[0] = 1.0;
    std::vector<CVec> v(n_modes, CVec::Zero(order + 1));
    for (auto& vk : v) vk[0] = 1.0;

    for (int m = 1; m <= order; ++m) {
        cplx acc = 0;
        for (int n = 0; n < n_modes; ++n)
            if (m - shift[n] >= 0) acc += zeta[n] * v[n][m - shift[n]];
        u[m] = acc;
        for (int n = 0; n < n_modes; ++n) {
            const double k1 = power[n] + 1;
            cplx s = 0;
            for (int i = 1; i <= m; ++i) s += (k1 * i - m) * u[i] * v[n][m - i];
            v[n][m] = s / double(m);
        }
    }
    return u;
}

}  // namespace

PowerSeries taylor_branch(const ParamPoint& p, int order) {
    if (order < 0) throw Error("InvalidOrder", "order must be >= 0");
    const Leaf& leaf = p.leaf;
    std::vector<int> shift(leaf.size());
    for (int n = 0; n < leaf.size(); ++n) shift[n] = leaf.reduced(n);

    PowerSeries out;
    if (order <= kDirectOrderLimit) {
        out.coeffs = substitute(p.zeta, shift, leaf.exponents, order);
    } else {
        CVec seed = substitute(p.zeta, shift, leaf.exponents, 1023);
        out.coeffs = detail::newton_branch(p, seed, order + 1);
    }
    return out;
}

CVec taylor_branch_xgrid(const ParamPoint& p, int order) {
    if (order < 0) throw Error("InvalidOrder", "order must be >= 0");
    return substitute(p.zeta, p.leaf.exponents, p.leaf.exponents, order);
}

std::vector<PowerSeries> powers_progression(const PowerSeries& u, int first, int step,
                                            int count, double alpha) {
    if (first < 1 || step < 1 || count < 0)
        throw Error("InvalidArgument", "powers_progression needs first, step >= 1");
    if (!(alpha > 0)) throw Error("InvalidArgument", "alpha must be positive");
    const Eigen::Index n = u.coeffs.size();
    std::vector<PowerSeries> out(count);
    auto finish = [&](int k, CVec c) {
        const int p = first + k * step;
        out[k].coeffs = std::move(c);
        out[k].log_scale = p * (std::log(alpha) + u.log_scale);
    };

    if (u.order() <= kDirectOrderLimit / 4) {
        const CVec base = u.coeffs / alpha;
        auto power = [&](int e) {
            CVec r = CVec::Zero(n);
            r[0] = 1.0;
            for (int i = 0; i < e; ++i) r = series_mul<cplx>(r, base, n);
            return r;
        };
        const CVec stride = power(step);
        CVec cur = power(first);
        for (int k = 0; k < count; ++k) {
            if (k > 0) cur = series_mul<cplx>(cur, stride, n);
            finish(k, cur);
        }
        return out;
    }

    detail::GridPowers grid(u.coeffs, alpha, n);
    for (int k = 0; k < count; ++k) {
        grid.raise(k == 0 ? first : step);
        finish(k, grid.take());
    }
    return out;
}

std::vector<PowerSeries> powers_table(const PowerSeries& u, int p_max, double alpha) {
    if (p_max < 1) throw Error("InvalidArgument", "p_max must be >= 1");
    return powers_progression(u, 1, 1, p_max, alpha);
}

boost::multiprecision::cpp_rational raney_oracle(int s, int p, int m) {
    using boost::multiprecision::cpp_int;
    using boost::multiprecision::cpp_rational;
    if (s < 2 || p < 1 || m < 0) throw Error("InvalidArgument", "raney_oracle domain");
    const int top = s * m + p;
    cpp_int binom = 1;
    for (int i = 1; i <= m; ++i) binom = binom * (top - m + i) / i;
    return cpp_rational(binom * p, top);
}

CVec branch_residual(const ParamPoint& p, const PowerSeries& u) {
    const Eigen::Index n = u.coeffs.size();
    const Leaf& leaf = p.leaf;
    CVec res = u.coeffs;
    res[0] -= 1.0;
    CVec pw = CVec::Zero(n);
    pw[0] = 1.0;
    int have = 0;
    for (int i = 0; i < leaf.size(); ++i) {
        while (have < leaf.exponents[i]) {
            pw = n > kDirectOrderLimit ? detail::fft_mul(pw, u.coeffs, n)
                                       : series_mul<cplx>(pw, u.coeffs, n);
            ++have;
        }
        const int e = leaf.reduced(i);
        if (e < n) res.segment(e, n - e) -= p.zeta[i] * pw.head(n - e);
    }
    return res;
}

}  // namespace toda
