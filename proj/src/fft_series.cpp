#include "fft_series.hpp"

#include <unsupported/Eigen/FFT>

namespace toda::detail {

namespace {

std::vector<cplx> padded(const CVec& a, Eigen::Index keep, std::size_t len) {
    std::vector<cplx> out(len, cplx(0));
    const Eigen::Index k = std::min<Eigen::Index>(a.size(), keep);
    for (Eigen::Index i = 0; i < k; ++i) out[i] = a[i];
    return out;
}

}  // namespace

std::size_t fft_size_for(std::size_t n) {
    std::size_t len = 1;
    while (len < n) len <<= 1;
    return len;
}

CVec fft_mul(const CVec& a, const CVec& b, Eigen::Index n) {
    const Eigen::Index na = std::min(a.size(), n), nb = std::min(b.size(), n);
    if (std::min(na, nb) <= 64) return series_mul<cplx>(a.head(na), b.head(nb), n);

    const std::size_t len = fft_size_for(static_cast<std::size_t>(na + nb - 1));
    Eigen::FFT<double> fft;
    std::vector<cplx> fa, fb, prod;
    fft.fwd(fa, padded(a, na, len));
    fft.fwd(fb, padded(b, nb, len));
    for (std::size_t i = 0; i < len; ++i) fa[i] *= fb[i];
    fft.inv(prod, fa);

    CVec out = CVec::Zero(n);
    const Eigen::Index k = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(len));
    for (Eigen::Index i = 0; i < k; ++i) out[i] = prod[i];
    return out;
}

CVec fft_reciprocal(const CVec& a, Eigen::Index n) {
    CVec g = CVec::Constant(1, cplx(1) / a[0]);
    for (Eigen::Index len = 1; len < n;) {
        len = std::min<Eigen::Index>(2 * len, n);
        // g <- g (2 - a g)
        CVec ag = fft_mul(a.head(std::min(a.size(), len)), g, len);
        ag = -ag;
        ag[0] += 2.0;
        g = fft_mul(g, ag, len);
    }
    return g;
}

CVec newton_branch(const ParamPoint& p, const CVec& seed, Eigen::Index n) {
    const Leaf& leaf = p.leaf;
    const int top = leaf.top();
    CVec u = seed;
    for (Eigen::Index len = seed.size(); len < n;) {
        len = std::min<Eigen::Index>(2 * len, n);
        CVec ul = CVec::Zero(len);
        ul.head(u.size()) = u;

        std::vector<CVec> pw(top + 1);
        pw[0] = CVec::Zero(len);
        pw[0][0] = 1.0;
        pw[1] = ul;
        for (int k = 2; k <= top; ++k) pw[k] = fft_mul(pw[k - 1], ul, len);

        CVec g = ul;
        g[0] -= 1.0;
        CVec d = CVec::Zero(len);
        d[0] = 1.0;
        for (int i = 0; i < leaf.size(); ++i) {
            const int sn = leaf.exponents[i], e = leaf.reduced(i);
            if (e >= len) continue;
            g.segment(e, len - e) -= p.zeta[i] * pw[sn].head(len - e);
            d.segment(e, len - e) -= (p.zeta[i] * double(sn)) * pw[sn - 1].head(len - e);
        }
        u = ul - fft_mul(g, fft_reciprocal(d, len), len);
    }
    return u.head(n);
}

GridPowers::GridPowers(const CVec& u, double alpha, Eigen::Index n) : n_(n) {
    const std::size_t len = fft_size_for(static_cast<std::size_t>(4 * n));
    std::vector<cplx> in = padded(u / alpha, n, len);
    Eigen::FFT<double> fft;
    fft.fwd(base_, in);
    cur_.assign(len, cplx(1));
}

void GridPowers::raise(int k) {
    for (std::size_t i = 0; i < cur_.size(); ++i) {
        cplx f = 1.0;
        for (int j = 0; j < k; ++j) f *= base_[i];
        cur_[i] *= f;
    }
}

CVec GridPowers::take() const {
    Eigen::FFT<double> fft;
    std::vector<cplx> coeffs;
    fft.inv(coeffs, cur_);
    return Eigen::Map<const CVec>(coeffs.data(), n_);
}

}  // namespace toda::detail
