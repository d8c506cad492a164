#pragma once

// Analytic side: Gamma, the entire functions I and T, the exponential
// integral J, Taylor coefficient tables, the delay function omega_z,
// Euler products and the numerical constants.

#include <complex>
#include <string>
#include <vector>

#include "densediv/arith.hpp"

namespace densediv {

inline constexpr double kEulerGamma = 0.57721566490153286061;

cplx complex_gamma(cplx s);
/// 1/Gamma(s), entire; exact zeros at non-positive integers.
cplx complex_rgamma(cplx s);

/// I(s) = int_0^s (e^t - 1)/t dt, |s| <= 50.
cplx eval_I(cplx s);
/// T(s) = int_0^s (1 - e^{-t})/t dt = -I(-s), |s| <= 50.
cplx eval_T(cplx s);
/// J(u) = int_u^inf e^{-t}/t dt, u > 0.
double eval_J(double u);

/// Taylor coefficients: e^{-z I(-s)} = sum b_k s^k, a_k = sum_j (-1)^j/j! b_{k-j},
/// c_k = e^{-gamma z} b_k.
struct CoeffTable {
    cplx z;
    int K;
    std::vector<cplx> b, a, c;
};

CoeffTable coeff_table(cplx z, int K);

/// Uniform grid of complex samples with piecewise cubic interpolation.
/// Interpolation stencils never straddle a breakpoint, so kinks at
/// breakpoints are preserved (a breakpoint node holds one value, so the
/// function itself must be continuous there). Below `support` the
/// function is identically 0.
class SampledFunction {
public:
    SampledFunction() = default;
    SampledFunction(double start, double step, std::vector<cplx> values, std::vector<double> breakpoints,
                    double support);

    cplx operator()(double u) const;
    /// Derivative of the local interpolant at a grid node from a 5-point
    /// stencil inside the piece containing it (right-hand piece at breakpoints).
    cplx node_derivative(std::size_t i) const;

    double start() const noexcept { return start_; }
    double step() const noexcept { return step_; }
    double end() const noexcept { return start_ + step_ * static_cast<double>(values_.size() - 1); }
    std::size_t size() const noexcept { return values_.size(); }
    double node(std::size_t i) const noexcept { return start_ + step_ * static_cast<double>(i); }
    const cplx& value(std::size_t i) const { return values_[i]; }
    const std::vector<cplx>& values() const noexcept { return values_; }

private:
    // node range [lo, hi] of the piece containing node position x
    std::pair<std::size_t, std::size_t> piece(double x) const;

    double start_ = 0, step_ = 1, support_ = 0;
    std::vector<cplx> values_;
    std::vector<std::size_t> break_nodes_;
};

constexpr double kOmegaMaxU = 200;
constexpr double kDefaultStep = 0.005;

/// omega_z on [0, u_max]. The step is shrunk to 1/ceil(1/h) so integers are nodes.
SampledFunction solve_omega(cplx z, double u_max, double h = kDefaultStep);

/// |u w'(u) + w(u) - z w(u-1)| at node i, derivative from the grid.
double omega_dde_residual(const SampledFunction& omega, cplx z, std::size_t i);

/// e^{-gamma z} sum_{k<=K} b_k u^{z-1-k}/Gamma(z-k), or with a_k and (u+1) when shifted.
cplx omega_asymptotic(cplx z, double u, int K, bool shifted = false);

struct ConstantsReport {
    double gamma, exp_minus_gamma, A, W, B, C, K, V;
    double W_tail_bound;
};

ConstantsReport constants();

/// h_nu(y, z) = H_nu(1, z) G_nu(1, y, z)/Gamma(z).
cplx euler_h(double y, cplx z, NuMode mode);
/// J_nu(y, z) = H'/H + G'/G + gamma z - 1, derivatives in s at s = 1.
cplx euler_Jnu(double y, cplx z, NuMode mode);
/// lambda_{nu,0}(z) = h_nu(1, z) (empty G product).
cplx lambda0(cplx z, NuMode mode);
/// Euler products run over p <= kEulerPrimeCap with analytic tails beyond.
constexpr u64 kEulerPrimeCap = 10000000;

/// sum_{p <= y} log p/(p - 1)
double mertens_log_sum(double y);

/// Euler's constant from -Gamma'(1) by central differences.
double gamma_cross_check();

std::string constants_json(const ConstantsReport& report);
std::string coeff_table_json(const CoeffTable& table);

}  // namespace densediv
