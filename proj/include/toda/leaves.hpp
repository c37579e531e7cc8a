#pragma once

#include <string>
#include <vector>

#include "toda/branch.hpp"

namespace toda {

struct PoleLeafPoint {
    cplx b;
    double c;
};

struct LogLeafPoint {
    double b;
    double gamma;
};

struct PoleChar {
    double rho;
    cplx x_plus, x_minus;
};
// x_*^{+-} = 1 / (b +- 2 sqrt(c))
PoleChar pole_rho_char(const PoleLeafPoint& p);

// Discriminant 1 - 2 b x + (b^2 - 4c) x^2 of the pole leaf.
cplx pole_discriminant(const PoleLeafPoint& p, cplx x);

// Coefficients u_1..u_order of the germ u = x (1 + c u^2 / (1 - b u)), index m = power of x.
CVec pole_germ(const PoleLeafPoint& p, int order);
double pole_germ_radius(const PoleLeafPoint& p, int order);

struct LogChar {
    double rho;
    cplx u_plus, u_minus, x_plus, x_minus;
    bool conjugate_pair;
    // 1 - b u_{+-} on the negative real axis; moduli are side independent there.
    bool plus_on_cut, minus_on_cut;
};
LogChar log_rho_char(const LogLeafPoint& p);

// X(u) = u / (1 + gamma u log(1 - b u)), principal logarithm.
cplx log_leaf_X(const LogLeafPoint& p, cplx u);

// Germ of u = x (1 + gamma u log(1 - b u)), indices as in pole_germ.
CVec log_germ(const LogLeafPoint& p, int order);
// Radius from the germ. When the dominant pair is complex conjugate, the
// ratio test runs on the Hankel determinants u_{m+1} u_{m-1} - u_m^2.
double log_germ_radius(const LogLeafPoint& p, int order, bool conjugate_pair);

struct PhaseRow {
    double b = 0;
    double c_or_gamma = 0;
    double rho_char = 0;
    double abs_x_plus = 0;
    double abs_x_minus = 0;
    bool conjugate_pair = false;
    std::string error_code;
};

struct ContourPoint {
    double b;
    double level;  // c (pole) or gamma (log) where rho_char = 1
    std::string error_code;
};

struct PhaseGrid {
    enum class Kind { Pole, Log } kind = Kind::Pole;
    double b_min = -0.9, b_max = 0.9;
    int nb = 0;
    double y_min = 0.01, y_max = 0.5;  // c or gamma
    int ny = 0;
};

struct PhaseDiagram {
    std::vector<PhaseRow> rows;
    std::vector<ContourPoint> contour;
};

PhaseDiagram phase_diagram(const PhaseGrid& grid);

double gamma_c_solve(double tol = 1e-6);

}  // namespace toda
