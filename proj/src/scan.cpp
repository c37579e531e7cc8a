#include "toda/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace toda {

double log_scale_from_eta(double eta) {
    if (eta == 0) return 1.0;
    return -std::log1p(-eta) / eta;
}

LogScale log_scale(double rho_star, int s) {
    if (!(rho_star > 1)) throw Error("InvalidArgument", "log_scale needs rho_* > 1");
    const double rho = 0.5 * (1 + rho_star);
    const double eta = std::pow(rho * rho_star, -2.0 * s);
    return {eta, log_scale_from_eta(eta)};
}

Spike spike_vector(const DominantData& dom, const RenormConfig& cfg, int s) {
    const double c = -1.0 / (std::sqrt(double(s)) * 2.0 * std::sqrt(std::numbers::pi));
    const cplx kappa = dom.kappa_sheet;
    const cplx ratio = dom.representative.lambda / cfg.alpha;
    Spike out{CVec::Zero(cfg.J + 1), 0.0};
    for (int j = 0; j <= cfg.J; ++j) {
        const int p = cfg.p(j, s);
        // A_p / alpha^p without forming alpha^p
        const cplx a_scaled = c * double(p) * kappa * std::pow(ratio, p - 1) / cfg.alpha;
        const double poly = std::pow(double(p), 1.5 + cfg.beta);
        out.d[j] = std::polar(1.0, -j * dom.phi) * (s / std::sqrt(double(p))) *
                   std::conj(a_scaled) / poly;
    }
    out.gamma = out.d.squaredNorm();
    return out;
}

std::vector<BlockSpectrum> block_spectra(const ParamPoint& p, const RenormConfig& cfg,
                                         const std::vector<int>& q_list, const ScanOptions& opt,
                                         double* rho_out, double* m0_out) {
    const int s = p.leaf.s;
    const DominantData dom = dominant_data(p, opt.char_order, {}, opt.dominant);
    if (rho_out) *rho_out = dom.rho_star;
    const int M0 = tail_length(dom.rho_star, s, cfg.tail_tol);
    const LogScale ls = log_scale(dom.rho_star, s);
    PowerSeries u = taylor_branch(p, M0 + cfg.J);
    if (m0_out) *m0_out = midpoint_sup(u, dom.rho_star, s);

    std::vector<BlockSpectrum> out;
    for (int q : q_list) {
        RenormConfig c = cfg;
        c.q = q;
        c.tail_cutoff = M0;
        c.validate(s);
        // High powers peak late, so the geometric length can fall short.
        HermitianMatrix g;
        for (int attempt = 0;; ++attempt) {
            if (u.order() < c.tail_cutoff + c.J) u = taylor_branch(p, c.tail_cutoff + c.J);
            const auto powers = powers_progression(u, q, s, c.J + 1, c.alpha);
            int need = 0;
            g = gram_block_from_powers(powers, c, s, true, attempt < 6 ? &need : nullptr);
            if (need == 0) break;
            if (need == std::numeric_limits<int>::max() || need > 4'000'000)
                throw Error("TailNotConverged", "tail does not decay at M_tail = " +
                                                    std::to_string(c.tail_cutoff));
            // The two-term decay estimate is unreliable before the peak.
            c.tail_cutoff = std::max(need, c.tail_cutoff * 3 / 2);
        }
        const int M = c.tail_cutoff;

        BlockSpectrum b;
        b.q = q;
        b.epsilon = dom.rho_star - 1;
        b.L = ls.L;
        b.tail_cutoff = M;
        const RVec mu = eigenvalues(g);
        b.mu = mu.head(std::min<Eigen::Index>(opt.k_max, mu.size()));
        const Spike sp = spike_vector(dom, c, s);
        b.spike = sp.d;
        b.gamma = sp.gamma;

        HermitianMatrix rem;
        rem.a = g.a - ls.L * sp.d * sp.d.adjoint();
        rem = HermitianMatrix::from_upper(rem.a);
        const RVec ce = eigenvalues(rem);
        b.c_norm = std::max(std::abs(ce[0]), std::abs(ce[ce.size() - 1]));
        b.c_hs = hs_norm(rem);
        if (sp.gamma > 0) {
            const CVec dh = sp.d / std::sqrt(sp.gamma);
            b.sandwich = (dh.adjoint() * rem.a * dh)(0, 0).real();
        }
        out.push_back(std::move(b));
    }
    return out;
}

double midpoint_sup(const PowerSeries& u, double rho_star, int s, int n) {
    const double radius = std::pow(0.5 * (1 + rho_star), s);
    double best = 0;
    for (int k = 0; k < n; ++k) {
        const cplx z = std::polar(radius, 2 * std::numbers::pi * k / n);
        best = std::max(best, std::abs(series_eval(u.coeffs, z)));
    }
    return best * std::exp(u.log_scale);
}

std::vector<ScanPoint> scan_path(const ParamPath& path, const std::vector<double>& delta_grid,
                                 const RenormConfig& cfg, const std::vector<int>& q_list,
                                 const ScanOptions& opt) {
    std::vector<ScanPoint> out(delta_grid.size());
    auto work = [&](std::size_t i) {
        ScanPoint& pt = out[i];
        pt.delta = delta_grid[i];
        try {
            pt.blocks =
                block_spectra(path(pt.delta), cfg, q_list, opt, &pt.rho_star, &pt.m0_estimate);
            pt.epsilon = pt.rho_star - 1;
            if (cfg.alpha <= pt.m0_estimate)
                pt.warning = "alpha does not exceed the midpoint bound on |U|";
            for (auto& b : pt.blocks) b.delta = pt.delta;
        } catch (const Error& e) {
            pt.status = e.code();
            pt.message = e.what();
            pt.blocks.clear();
        }
    };

    const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(out.size())));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < out.size(); ++i) work(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < out.size(); i = next++) work(i);
        });
    for (auto& th : pool) th.join();
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit f;
    f.n = static_cast<int>(x.size());
    if (f.n < 2) throw Error("InsufficientData", "line fit needs two points");
    double mx = 0, my = 0;
    for (int i = 0; i < f.n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= f.n;
    my /= f.n;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < f.n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;
    for (int i = 0; i < f.n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ssr += r * r;
    }
    f.r2 = syy > 0 ? 1 - ssr / syy : 1.0;
    return f;
}

std::vector<ScalingReport> fit_log_scaling(const std::vector<ScanPoint>& scan, double bounded_tol) {
    std::vector<const ScanPoint*> ok;
    for (const auto& p : scan)
        if (p.status == "ok") ok.push_back(&p);
    if (ok.size() < 6) throw Error("InsufficientData", "need at least 6 successful points");
    std::sort(ok.begin(), ok.end(),
              [](const ScanPoint* a, const ScanPoint* b) { return a->delta > b->delta; });
    const double dmax = ok.front()->delta, dmin = ok.back()->delta;
    if (!(dmax >= 100 * dmin)) throw Error("InsufficientData", "grid spans fewer than 2 decades");

    std::vector<ScalingReport> reports;
    for (std::size_t b = 0; b < ok.front()->blocks.size(); ++b) {
        ScalingReport r;
        r.q = ok.front()->blocks[b].q;
        std::vector<double> xL, y, xd, yd;
        for (const auto* p : ok) {
            const BlockSpectrum& bs = p->blocks[b];
            xL.push_back(bs.L);
            y.push_back(bs.mu[0]);
            if (p->delta <= 10 * dmin * (1 + 1e-9)) {
                xd.push_back(std::log(1 / p->delta));
                yd.push_back(bs.mu[0]);
            }
        }
        r.fit_L = fit_line(xL, y);
        r.fit_log_delta = fit_line(xd, yd);
        const BlockSpectrum& last = ok.back()->blocks[b];
        r.gamma_limit = last.gamma;
        r.mu_over_L_last = last.mu[0] / last.L;
        for (Eigen::Index k = 1; k < last.mu.size(); ++k) {
            double mx = 0, lo = INFINITY, hi = 0;
            for (const auto* p : ok) {
                const double v = p->blocks[b].mu[k];
                mx = std::max(mx, v);
                if (p->delta <= 10 * dmin * (1 + 1e-9)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            const double var = hi > 0 ? (hi - lo) / hi : 0.0;
            r.higher_max.push_back(mx);
            r.last_decade_var.push_back(var);
            r.bounded.push_back(var < bounded_tol);
        }
        reports.push_back(std::move(r));
    }
    return reports;
}

}  // namespace toda
