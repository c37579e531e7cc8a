#pragma once

#include <Eigen/Dense>

#include "toda/series.hpp"

namespace toda {

using CMat = Eigen::MatrixXcd;

struct RenormConfig {
    double beta = 1.0;
    double alpha = 2.0;
    int J = 70;
    int tail_cutoff = 64;
    int q = 1;
    double tail_tol = 1e-12;

    int p(int j, int s) const { return q + j * s; }
    // log w_j = (3/2 + beta) log p_j + p_j log alpha
    double log_weight(int j, int s) const;
    // Throws InvalidConfig unless the invariants hold for symmetry index s.
    void validate(int s) const;
};

// Dense Hermitian matrix; the strict lower triangle mirrors the upper one.
struct HermitianMatrix {
    CMat a;

    Eigen::Index dim() const { return a.rows(); }
    static HermitianMatrix from_upper(CMat upper);
};

// H_{mn}, m, n = 1..m_max, stored at (m-1, n-1).
HermitianMatrix kernel_hessian_oracle(const ParamPoint& p, int m_max);

HermitianMatrix gram_block(const ParamPoint& p, const RenormConfig& cfg, bool use_weights);

// Same assembly from precomputed scaled powers (U/alpha)^{p_j}, j = 0..J,
// each of order >= tail_cutoff + J. With required_tail set, an unconverged
// tail stores the estimated M_tail there instead of throwing.
HermitianMatrix gram_block_from_powers(const std::vector<PowerSeries>& powers,
                                       const RenormConfig& cfg, int s, bool use_weights,
                                       int* required_tail = nullptr);

// M_tail = max(64, ceil(log(tail_tol) / log(rho_*^{-2s}))).
int tail_length(double rho_star, int s, double tail_tol = 1e-12);

// Column k holds v^{(p)}_j for p = q + k s, rows j = 0..j_max.
CMat mode_gram_vectors(const ParamPoint& p, int q, int j_max, int p_count);

struct EigenResult {
    RVec values;   // descending
    CMat vectors;  // matching columns
};

RVec eigenvalues(const HermitianMatrix& h);
EigenResult eigen_decomposition(const HermitianMatrix& h);

double hs_norm(const HermitianMatrix& h);

}  // namespace toda
