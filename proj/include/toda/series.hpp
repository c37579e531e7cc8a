#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace toda {

using cplx = std::complex<double>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using CVec = Vec<cplx>;
using RVec = Vec<double>;

// Base class for the library's reportable failures. `code()` is the short
// identifier written into CSV status columns.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct Leaf {
    std::vector<int> exponents;
    int s = 0;

    // Validates and fills in s = gcd(exponents).
    static Leaf make(std::vector<int> exponents);

    int size() const { return static_cast<int>(exponents.size()); }
    // Exponent of z = x^s carried by mode n.
    int reduced(int n) const { return exponents[n] / s; }
    int top() const { return exponents.back(); }
};

struct ParamPoint {
    Leaf leaf;
    std::vector<cplx> zeta;
    std::optional<double> r;

    ParamPoint() = default;
    ParamPoint(Leaf l, std::vector<cplx> z, std::optional<double> radius = std::nullopt);

    bool is_zero() const;
    // Parameters of U(c x): zeta_n -> zeta_n * c^{s_n}. Used to keep
    // coefficients near unit size at large orders.
    ParamPoint rescaled(double c) const;
};

// Coefficients of powers of z = x^s. The represented value of coefficient m
// is coeffs[m] * exp(log_scale).
struct PowerSeries {
    CVec coeffs;
    double log_scale = 0.0;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx operator[](int m) const { return coeffs[m]; }
};

// Truncated product of a and b, keeping n coefficients.
template <typename Scalar>
Vec<Scalar> series_mul(const Vec<Scalar>& a, const Vec<Scalar>& b, Eigen::Index n) {
    Vec<Scalar> out = Vec<Scalar>::Zero(n);
    const Eigen::Index na = std::min<Eigen::Index>(a.size(), n);
    for (Eigen::Index i = 0; i < na; ++i) {
        if (a[i] == Scalar(0)) continue;
        const Eigen::Index nb = std::min<Eigen::Index>(b.size(), n - i);
        out.segment(i, nb) += a[i] * b.head(nb);
    }
    return out;
}

// Horner evaluation of a coefficient vector at z.
template <typename Scalar, typename Arg>
auto series_eval(const Vec<Scalar>& c, Arg z) {
    using R = decltype(Scalar() * Arg());
    R acc(0);
    for (Eigen::Index m = c.size() - 1; m >= 0; --m) acc = acc * z + c[m];
    return acc;
}

PowerSeries taylor_branch(const ParamPoint& p, int order);

// Uncollapsed coefficients of U in powers of x, indices 0..order. Only the
// symmetry test and the kernel oracle use this form.
CVec taylor_branch_xgrid(const ParamPoint& p, int order);

std::vector<PowerSeries> powers_table(const PowerSeries& u, int p_max, double alpha);

// (U/alpha)^p for p = first, first+step, ..., count entries; each truncated
// to `order`. Large orders go through the FFT path.
std::vector<PowerSeries> powers_progression(const PowerSeries& u, int first, int step,
                                            int count, double alpha);

boost::multiprecision::cpp_rational raney_oracle(int s, int p, int m);

// Residual coefficients of U - 1 - sum zeta_n z^{e_n} U^{s_n}, through u.order().
CVec branch_residual(const ParamPoint& p, const PowerSeries& u);

// Orders above this use Newton iteration with FFT products.
inline constexpr int kDirectOrderLimit = 2048;

}  // namespace toda
