#include "toda/hessian.hpp"

#include <cmath>
#include <limits>

namespace toda {

double RenormConfig::log_weight(int j, int s) const {
    const double pj = p(j, s);
    return (1.5 + beta) * std::log(pj) + pj * std::log(alpha);
}

void RenormConfig::validate(int s) const {
    if (!(alpha > 1)) throw Error("InvalidConfig", "alpha must exceed 1");
    if (!(beta > 0)) throw Error("InvalidConfig", "beta must be positive");
    if (J < 1) throw Error("InvalidConfig", "J must be >= 1");
    if (tail_cutoff < 1) throw Error("InvalidConfig", "tail_cutoff must be >= 1");
    if (q < 1 || q > s) throw Error("InvalidConfig", "q must lie in 1..s");
    if (!(tail_tol > 0)) throw Error("InvalidConfig", "tail_tol must be positive");
    const double lmax = std::log(std::numeric_limits<double>::max());
    for (int j = 0; j <= J; ++j)
        if (!(log_weight(j, s) < lmax))
            throw Error("InvalidConfig", "weight w_" + std::to_string(j) + " overflows");
}

HermitianMatrix HermitianMatrix::from_upper(CMat upper) {
    HermitianMatrix h;
    h.a = std::move(upper);
    const Eigen::Index n = h.a.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        h.a(i, i) = h.a(i, i).real();
        for (Eigen::Index j = i + 1; j < n; ++j) h.a(j, i) = std::conj(h.a(i, j));
    }
    return h;
}

HermitianMatrix kernel_hessian_oracle(const ParamPoint& p, int m_max) {
    // K = -sum_p (1/p) (x xb')^p U(x)^p conj(U(x'))^p on the full x grid.
    const CVec u = taylor_branch_xgrid(p, m_max);
    const Eigen::Index n = m_max + 1;
    std::vector<CVec> pw(m_max + 1);
    pw[0] = CVec::Zero(n);
    pw[0][0] = 1.0;
    for (int k = 1; k <= m_max; ++k) pw[k] = series_mul<cplx>(pw[k - 1], u, n);

    CMat h = CMat::Zero(m_max, m_max);
    for (int m = 1; m <= m_max; ++m)
        for (int k = m; k <= m_max; ++k) {
            cplx coeff = 0;  // [x^m][xb'^k] K
            for (int q = 1; q <= std::min(m, k); ++q)
                coeff -= pw[q][m - q] * std::conj(pw[q][k - q]) / double(q);
            h(m - 1, k - 1) = -double(m) * k * coeff;
        }
    return HermitianMatrix::from_upper(std::move(h));
}

int tail_length(double rho_star, int s, double tail_tol) {
    const double log_eta = -2.0 * s * std::log(rho_star);
    if (!(log_eta < 0)) throw Error("TailNotConverged", "rho_* <= 1, Gram series diverges");
    const double m = std::ceil(std::log(tail_tol) / log_eta);
    if (!(m < 5e7)) throw Error("TailNotConverged", "required tail length too large");
    return std::max(64, static_cast<int>(m));
}

HermitianMatrix gram_block_from_powers(const std::vector<PowerSeries>& powers,
                                       const RenormConfig& cfg, int s, bool use_weights,
                                       int* required_tail) {
    const int J = cfg.J, M = cfg.tail_cutoff;
    if (static_cast<int>(powers.size()) < J + 1)
        throw Error("InvalidArgument", "gram assembly needs J+1 power series");
    for (const auto& pw : powers)
        if (pw.order() < M + J)
            throw Error("InvalidArgument", "power series shorter than tail_cutoff + J");

    CMat g = CMat::Zero(J + 1, J + 1);
    int need = 0;
    if (required_tail) *required_tail = 0;
    for (int j1 = 0; j1 <= J; ++j1) {
        const double p1 = cfg.p(j1, s);
        const cplx* r1 = powers[j1].coeffs.data();
        for (int j2 = j1; j2 <= J; ++j2) {
            const double p2 = cfg.p(j2, s);
            const cplx* r2 = powers[j2].coeffs.data();
            const int d = j2 - j1;
            cplx acc = 0, last = 0, before = 0;
            for (int m = 0; m <= M; ++m) {
                const double w = (p2 + s * m) * (p2 + s * m);
                before = last;
                last = w * std::conj(r1[m + d]) * r2[m];
                acc += last;
            }
            double norm = 1.0 / std::sqrt(p1 * p2);
            if (use_weights) norm /= std::pow(p1 * p2, 1.5 + cfg.beta);
            acc *= norm;
            last *= norm;
            if (std::abs(last) > cfg.tail_tol * std::abs(acc)) {
                // Extrapolate with the observed decay of the last two terms.
                const double rate = std::abs(last) / std::abs(before);
                int req = -1;
                if (rate < 1 && std::isfinite(rate)) {
                    const double k = std::log(cfg.tail_tol * std::abs(acc) / std::abs(last)) /
                                     std::log(rate);
                    if (k < 5e7) req = M + static_cast<int>(std::ceil(k)) + 1;
                }
                if (!required_tail)
                    throw Error("TailNotConverged",
                                "entry (" + std::to_string(j1) + "," + std::to_string(j2) +
                                    ") last tail term ratio " +
                                    std::to_string(std::abs(last) / std::abs(acc)) +
                                    " at M_tail = " + std::to_string(M) + ", required about " +
                                    (req > 0 ? std::to_string(req) : std::string("unknown")));
                need = req > 0 ? std::max(need, req) : std::numeric_limits<int>::max();
            }
            g(j1, j2) = acc;
        }
    }
    if (required_tail) *required_tail = need;
    return HermitianMatrix::from_upper(std::move(g));
}

HermitianMatrix gram_block(const ParamPoint& p, const RenormConfig& cfg, bool use_weights) {
    const int s = p.leaf.s;
    cfg.validate(s);
    const PowerSeries u = taylor_branch(p, cfg.tail_cutoff + cfg.J);
    const auto powers = powers_progression(u, cfg.q, s, cfg.J + 1, use_weights ? cfg.alpha : 1.0);
    return gram_block_from_powers(powers, cfg, s, use_weights);
}

CMat mode_gram_vectors(const ParamPoint& p, int q, int j_max, int p_count) {
    const int s = p.leaf.s;
    const PowerSeries u = taylor_branch(p, j_max);
    const auto powers = powers_progression(u, q, s, p_count, 1.0);
    CMat v = CMat::Zero(j_max + 1, p_count);
    for (int k = 0; k < p_count; ++k) {
        const double pk = q + k * s;
        for (int j = k; j <= j_max; ++j) v(j, k) = (q + j * s) / std::sqrt(pk) * powers[k][j - k];
    }
    return v;
}

EigenResult eigen_decomposition(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h.a);
    if (es.info() != Eigen::Success) {
        const CMat off = h.a - CMat(h.a.diagonal().asDiagonal());
        throw Error("NoConvergence",
                    "Hermitian eigensolver failed, off-diagonal norm " + std::to_string(off.norm()));
    }
    EigenResult r;
    r.values = es.eigenvalues().reverse();
    r.vectors = es.eigenvectors().rowwise().reverse();
    return r;
}

RVec eigenvalues(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(h.a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        const CMat off = h.a - CMat(h.a.diagonal().asDiagonal());
        throw Error("NoConvergence",
                    "Hermitian eigensolver failed, off-diagonal norm " + std::to_string(off.norm()));
    }
    return es.eigenvalues().reverse();
}

double hs_norm(const HermitianMatrix& h) { return h.a.norm(); }

}  // namespace toda
