#pragma once

#include <functional>
#include <map>
#include <vector>

#include "toda/series.hpp"

namespace toda {

struct CharPoint {
    cplx x_star;
    cplx lambda;
    cplx kappa;  // principal root of kappa^2, Re >= 0 (ties: Im >= 0)
    double modulus = 0;
    bool simple = false;
    bool fold_ok = false;
    cplx F_x;
    cplx F_yy;
};

// Partial derivatives of F(y, x) = y - 1 - sum zeta_n x^{s_n} y^{s_n}.
struct CharResidual {
    cplx F, F_y, F_x, F_yy;
};
CharResidual char_residual(const ParamPoint& p, cplx x, cplx y);

// Fills kappa, modulus and the flags from (x_star, lambda).
CharPoint make_char_point(const ParamPoint& p, cplx x, cplx lambda);

std::vector<CharPoint> solve_characteristic(const ParamPoint& p);

struct RadiusEstimate {
    double rho_hat;
    double exponent_hat;
};
RadiusEstimate radius_estimate(const PowerSeries& u, int s);

struct DominantOptions {
    double tol_match = 5e-3;
    double sep_min = 1e-6;
    double exponent_tol = 0.3;
};

struct DominantData {
    double rho_star = 0;
    CharPoint representative;
    int orbit_size = 0;
    double separation = 0;
    double phi = 0;  // arg z_* = arg x_*^s in [0, 2 pi), representative arg x_* in [0, 2 pi / s)
    double exponent_hat = 0;
    // Sign of kappa on the Taylor sheet: the coefficients follow
    // A_p m^{-3/2} z_*^{-m} with A_p built from kappa_sheet.
    cplx kappa_sheet;
    std::map<int, cplx> amplitudes;

    // A_p = -(s^{-1/2} / (2 sqrt(pi))) p kappa lambda^{p-1}
    cplx amplitude(int p, int s) const;
};

DominantData dominant_data(const ParamPoint& p, int order, const std::vector<int>& p_list = {1},
                           const DominantOptions& opt = {});

// Newton on the characteristic system started from (x, lambda).
std::optional<CharPoint> refine_char_point(const ParamPoint& p, cplx x, cplx lambda,
                                           int max_iter = 50);

using ParamPath = std::function<ParamPoint(double)>;

struct ContinuationPoint {
    double t;
    CharPoint point;
    double rho_star;
};

struct ContinuationResult {
    std::vector<ContinuationPoint> points;
    // Indices i with rho_star - 1 changing sign between points i and i+1.
    std::vector<int> critical_brackets;
};

ContinuationResult continue_critical(const ParamPath& path, const std::vector<double>& t_grid,
                                     int order = 400, double jump_frac = 0.1);

// Root of rho_*(path(t)) = 1 in [t_lo, t_hi] by continuation plus bracketing.
double critical_parameter(const ParamPath& path, double t_lo, double t_hi, double tol = 1e-14,
                          int order = 400);

}  // namespace toda
