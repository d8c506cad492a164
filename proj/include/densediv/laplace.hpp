#pragma once

// Meromorphic layer: Q_z(s), f_z(s), the root s_0(z), the residue C_z and
// the Volterra solution d_z(v).

#include <string>
#include <vector>

#include "densediv/special.hpp"

namespace densediv {

constexpr int kDefaultQTerms = 60;
constexpr double kWorkingDisk = 0.2;  // |z - 1| for root finding

/// Continuation of Q_z(s) = int_0^inf u^s (e^{zJ(u)} - 1) du.
cplx eval_Q(cplx z, cplx s, int K_terms = kDefaultQTerms);
/// f_z(s) = (s + 1) Q_z(s)/z.
cplx eval_f(cplx z, cplx s);

/// Direct quadratures, valid for Re s > Re z - 1 only.
cplx eval_Q_direct(cplx z, cplx s);
cplx eval_f_direct(cplx z, cplx s);

/// M^_z(s) = int_0^inf omega_z(v) (v+1)^{-s-1} dv from a solved omega_z grid,
/// with the tail past the grid integrated from the shifted asymptotic series.
/// Requires Re s > Re z - 1.
cplx eval_Mhat(const SampledFunction& omega, cplx z, cplx s);

/// Zero of f_z near -1. Newton runs on g(s) = (s + 2 - z)(s + 1) Q_z(s), which
/// has the same zero but no pole there when z -> 1.
struct RootResult {
    cplx z;
    cplx s0;
    int newton_iters;
    double residual;   // |g(s0)|
    double deriv_abs;  // |g'(s0)|
};

RootResult find_s0(cplx z);

/// -1 + C (z - 1) + K (z - 1)^2
cplx s0_quadratic_model(cplx z);

cplx residue_Cz(cplx z);
cplx residue_Cz(cplx z, const RootResult& root);

struct DzSolution {
    cplx z;
    cplx s0;
    cplx Cz;
    SampledFunction grid;   // d_z on [0, v_max]; only v > 1 is read from it
    SampledFunction omega;  // omega_z used by the solve

    cplx operator()(double v) const;
    double v_max() const { return grid.end(); }
};

/// Marches d_z on a grid of step h (shrunk to 1/ceil(1/h)).
DzSolution solve_dz(cplx z, double v_max, double h = kDefaultStep);

/// |d(v) - v^{z-1} + int_0^{(v-1)/2} ...| with d read from the solution everywhere.
double dz_residual(const DzSolution& d, double v);

struct RootRow {
    double phi;
    RootResult root;
    cplx Cz;
};

std::vector<RootRow> root_table(const std::vector<double>& phis);
std::string root_table_csv(const std::vector<RootRow>& rows);

}  // namespace densediv
