#pragma once

#include <optional>
#include <vector>

#include "toda/branch.hpp"

namespace toda {

struct TrajectoryState {
    double T = 0;
    double r = 1;
    std::vector<cplx> a;
    std::vector<cplx> moments;  // t_0 followed by t_k, k in the active set
    double univalence_margin = 0;
    bool univalence_lost = false;

    ParamPoint params(const Leaf& leaf) const;
};

// t_0 = Area / pi and t_k = (1/(2 pi i k)) \oint z^{-k} zbar dz on the image of |w| = 1.
std::vector<cplx> harmonic_moments(double r, const std::vector<cplx>& a, const Leaf& leaf,
                                   const std::vector<int>& k_set, int n_quad = 512);

// min over |w| = 1 of |f'(w)|, negative once f' has zeros in |w| > 1.
double univalence_margin(double r, const std::vector<cplx>& a, const Leaf& leaf);

struct GrowthOptions {
    double cons_tol = 1e-8;
    double newton_tol = 1e-13;
    double dT_min = 1e-9;
    int n_quad = 512;
};

TrajectoryState initial_state(double r, std::vector<cplx> a, const Leaf& leaf,
                              const GrowthOptions& opt = {});

// State at time T: t_0 advanced by T - seed.T, the other moments held at
// `seed.moments`. Newton starts from the seed coefficients.
TrajectoryState solve_state(const TrajectoryState& seed, const Leaf& leaf, double T,
                            const GrowthOptions& opt = {});

std::vector<TrajectoryState> evolve(const TrajectoryState& initial, const Leaf& leaf, double dT,
                                    int steps, const GrowthOptions& opt = {});

struct Thresholds {
    std::optional<double> T_c;
    std::optional<double> T_univ;
    double margin_at_Tc = 0;
    double rho_at_Tc = 0;
    bool separation_ok = false;  // margin at T_c > 0
    std::vector<TrajectoryState> trajectory;
    std::vector<double> rho_star;  // along the trajectory, +inf for the circle
};

Thresholds detect_thresholds(const TrajectoryState& initial, const Leaf& leaf, double dT,
                             double T_max, const GrowthOptions& opt = {}, int char_order = 400);

// Parameter path delta -> zeta(T_c - delta) along the trajectory, for scans.
ParamPath growth_path(const TrajectoryState& initial, const Leaf& leaf, double T_c,
                      const GrowthOptions& opt = {});

}  // namespace toda
