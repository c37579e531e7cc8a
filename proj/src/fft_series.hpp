#pragma once

// FFT-backed truncated series arithmetic for large orders.

#include <vector>

#include "toda/series.hpp"

namespace toda::detail {

std::size_t fft_size_for(std::size_t n);

// Truncated product keeping n coefficients.
CVec fft_mul(const CVec& a, const CVec& b, Eigen::Index n);

// Reciprocal series to n coefficients; requires a[0] != 0.
CVec fft_reciprocal(const CVec& a, Eigen::Index n);

// Taylor branch to n coefficients by Newton iteration, starting from an
// exact prefix `seed`.
CVec newton_branch(const ParamPoint& p, const CVec& seed, Eigen::Index n);

// Values of (u/alpha)^p on a grid of roots of unity, advanced by repeated
// pointwise multiplication; `take` returns the first n coefficients.
class GridPowers {
public:
    GridPowers(const CVec& u, double alpha, Eigen::Index n);
    void raise(int k);  // multiply current values by (u/alpha)^k
    CVec take() const;

private:
    Eigen::Index n_;
    std::vector<cplx> base_;
    std::vector<cplx> cur_;
};

}  // namespace toda::detail
