#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toda/branch.hpp"
#include "toda/hessian.hpp"

namespace toda {

struct LogScale {
    double eta;
    double L;
};
LogScale log_scale(double rho_star, int s);
// -log(1 - eta) / eta, stable for small eta.
double log_scale_from_eta(double eta);

struct BlockSpectrum {
    int q = 0;
    double epsilon = 0;
    double delta = 0;
    double L = 0;
    RVec mu;
    CVec spike;
    double gamma = 0;
    double c_norm = 0;
    double c_hs = 0;
    double sandwich = 0;  // <dhat, C dhat>
    int tail_cutoff = 0;
};

struct Spike {
    CVec d;
    double gamma;
};
// d(j) = e^{-i j phi} (s / sqrt(p_j)) conj(A_{p_j}) / w_j
Spike spike_vector(const DominantData& dom, const RenormConfig& cfg, int s);

struct ScanOptions {
    int k_max = 8;
    int char_order = 400;
    int threads = 1;
    DominantOptions dominant;
};

struct ScanPoint {
    double delta = 0;
    std::string status = "ok";  // error code otherwise
    std::string message;
    double epsilon = 0;
    double rho_star = 0;
    double m0_estimate = 0;
    std::string warning;  // set when alpha <= m0_estimate
    std::vector<BlockSpectrum> blocks;  // in q_list order
};

// Renormalized blocks for one parameter point. cfg.q and cfg.tail_cutoff
// are overwritten per block.
std::vector<BlockSpectrum> block_spectra(const ParamPoint& p, const RenormConfig& cfg,
                                         const std::vector<int>& q_list, const ScanOptions& opt,
                                         double* rho_out = nullptr, double* m0_out = nullptr);

// max |U| on the midpoint circle |x| = (1 + rho_*)/2, sampled at n points.
double midpoint_sup(const PowerSeries& u, double rho_star, int s, int n = 256);

std::vector<ScanPoint> scan_path(const ParamPath& path, const std::vector<double>& delta_grid,
                                 const RenormConfig& cfg, const std::vector<int>& q_list,
                                 const ScanOptions& opt = {});

struct LineFit {
    double slope = 0, intercept = 0, r2 = 0;
    int n = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingReport {
    int q = 0;
    LineFit fit_L;         // mu_1 vs L(eps), all points
    LineFit fit_log_delta; // mu_1 vs log(1/delta), last decade of delta
    double gamma_limit = 0;  // Gamma at the smallest delta
    double mu_over_L_last = 0;
    std::vector<double> higher_max;        // max over grid of mu_k, k = 2..k_max
    std::vector<double> last_decade_var;   // relative variation over the last decade
    std::vector<bool> bounded;
};

std::vector<ScalingReport> fit_log_scaling(const std::vector<ScanPoint>& scan,
                                           double bounded_tol = 0.1);

}  // namespace toda
