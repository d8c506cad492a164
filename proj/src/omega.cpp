#include <algorithm>
#include <cmath>

#include "densediv/error.hpp"
#include "densediv/special.hpp"

namespace densediv {

namespace {

// Lagrange weights for the value (deriv = false) or first derivative at x
// of the interpolant through integer offsets o[0..n-1].
void lagrange_weights(const double* o, int n, double x, bool deriv, double* w) {
    for (int j = 0; j < n; ++j) {
        if (!deriv) {
            double p = 1;
            for (int m = 0; m < n; ++m)
                if (m != j) p *= (x - o[m]) / (o[j] - o[m]);
            w[j] = p;
            continue;
        }
        double s = 0;
        for (int m = 0; m < n; ++m) {
            if (m == j) continue;
            double p = 1 / (o[j] - o[m]);
            for (int l = 0; l < n; ++l)
                if (l != j && l != m) p *= (x - o[l]) / (o[j] - o[l]);
            s += p;
        }
        w[j] = s;
    }
}

}  // namespace

SampledFunction::SampledFunction(double start, double step, std::vector<cplx> values,
                                 std::vector<double> breakpoints, double support)
    : start_(start), step_(step), support_(support), values_(std::move(values)) {
    require(step_ > 0 && std::isfinite(step_), "SampledFunction: step must be positive");
    require(values_.size() >= 2, "SampledFunction: need at least two samples");
    const std::size_t last = values_.size() - 1;
    break_nodes_.push_back(0);
    for (double b : breakpoints) {
        const double pos = (b - start_) / step_;
        const double r = std::round(pos);
        require(std::abs(pos - r) < 1e-6, "SampledFunction: breakpoints must sit on grid nodes");
        if (r <= 0 || r >= static_cast<double>(last)) continue;
        break_nodes_.push_back(static_cast<std::size_t>(r));
    }
    break_nodes_.push_back(last);
    std::sort(break_nodes_.begin(), break_nodes_.end());
    break_nodes_.erase(std::unique(break_nodes_.begin(), break_nodes_.end()), break_nodes_.end());
}

std::pair<std::size_t, std::size_t> SampledFunction::piece(double x) const {
    // first boundary strictly greater than x, so a breakpoint belongs to the piece on its right
    auto it = std::upper_bound(break_nodes_.begin(), break_nodes_.end(), x);
    if (it == break_nodes_.end()) --it;
    if (it == break_nodes_.begin()) ++it;
    return {*(it - 1), *it};
}

cplx SampledFunction::operator()(double u) const {
    if (u < support_) return 0.0;
    const double tol = 1e-9 * step_;
    if (u < start_ - tol || u > end() + tol) fail(ErrorCode::Domain, "SampledFunction: argument outside the grid");
    const double x = std::clamp((u - start_) / step_, 0.0, static_cast<double>(values_.size() - 1));
    const double xr = std::round(x);
    if (std::abs(x - xr) < 1e-12) return values_[static_cast<std::size_t>(xr)];
    const auto [lo, hi] = piece(x);
    const int n = static_cast<int>(std::min<std::size_t>(4, hi - lo + 1));
    long i0 = static_cast<long>(std::floor(x)) - 1;
    i0 = std::clamp<long>(i0, static_cast<long>(lo), static_cast<long>(hi) - n + 1);
    double o[4] = {}, w[4];
    for (int j = 0; j < n; ++j) o[j] = static_cast<double>(i0 + j);
    lagrange_weights(o, n, x, false, w);
    cplx acc = 0;
    for (int j = 0; j < n; ++j) acc += w[j] * values_[i0 + j];
    return acc;
}

cplx SampledFunction::node_derivative(std::size_t i) const {
    require(i < values_.size(), "SampledFunction: node index out of range");
    const auto [lo, hi] = piece(static_cast<double>(i));
    const int n = static_cast<int>(std::min<std::size_t>(5, hi - lo + 1));
    long i0 = static_cast<long>(i) - 2;
    i0 = std::clamp<long>(i0, static_cast<long>(lo), static_cast<long>(hi) - n + 1);
    double o[5] = {}, w[5];
    for (int j = 0; j < n; ++j) o[j] = static_cast<double>(i0 + j);
    lagrange_weights(o, n, static_cast<double>(i), true, w);
    cplx acc = 0;
    for (int j = 0; j < n; ++j) acc += w[j] * values_[i0 + j];
    return acc / step_;
}

// ---------------------------------------------------------------------------

SampledFunction solve_omega(cplx z, double u_max, double h) {
    const double mz = std::abs(z);
    if (!(mz >= 0.5 - 1e-12 && mz <= 2 + 1e-12)) fail(ErrorCode::Domain, "solve_omega: need 1/2 <= |z| <= 2");
    if (!(u_max >= 1 && u_max <= kOmegaMaxU)) fail(ErrorCode::InvalidArgument, "solve_omega: u_max must lie in [1, 200]");
    if (!(h > 0 && h <= 0.01)) fail(ErrorCode::InvalidArgument, "solve_omega: step must lie in (0, 0.01]");

    const long M = static_cast<long>(std::ceil(1 / h - 1e-9));  // nodes per unit
    const double step = 1.0 / static_cast<double>(M);
    const long N = static_cast<long>(std::ceil(u_max * M - 1e-9));
    std::vector<cplx> v(N + 1, 0.0);
    auto u_at = [&](long i) { return static_cast<double>(i) / static_cast<double>(M); };

    for (long i = M; i <= std::min(2 * M, N); ++i) v[i] = z / u_at(i);

    // one-sided derivatives at node j (the only jump is at u = 2)
    auto deriv = [&](long j, bool right) -> cplx {
        const double u = u_at(j);
        if (j < 2 * M || (j == 2 * M && !right)) return -z / (u * u);
        return (z * v[j - M] - v[j]) / u;
    };

    // (u w)' = z w(u - 1): Simpson in u, delayed values at midpoints by cubic Hermite
    cplx F = 2.0 * v[std::min(2 * M, N)];
    for (long i = 2 * M; i < N; ++i) {
        const long a = i - M, b = a + 1;
        const cplx mid = 0.5 * (v[a] + v[b]) + step * (deriv(a, true) - deriv(b, false)) / 8.0;
        F += step / 6.0 * (z * v[a] + 4.0 * z * mid + z * v[b]);
        v[i + 1] = F / u_at(i + 1);
    }

    std::vector<double> breaks;
    for (long k = 1; k * M < N; ++k) breaks.push_back(static_cast<double>(k));
    return SampledFunction(0.0, step, std::move(v), std::move(breaks), 1.0);
}

double omega_dde_residual(const SampledFunction& omega, cplx z, std::size_t i) {
    const double u = omega.node(i);
    const long M = std::lround(1 / omega.step());
    require(u > 2 && static_cast<long>(i) >= M, "omega_dde_residual: node must lie beyond u = 2");
    return std::abs(u * omega.node_derivative(i) + omega.value(i) - z * omega.value(i - M));
}

cplx omega_asymptotic(cplx z, double u, int K, bool shifted) {
    require(K >= 0 && K <= 10, "omega_asymptotic: K must lie in [0, 10]");
    require(shifted ? u >= 0 : u >= 1, "omega_asymptotic: u out of range");
    const CoeffTable t = coeff_table(z, K);
    const double base = shifted ? u + 1 : u;
    const double lb = std::log(base);
    cplx acc = 0;
    for (int k = 0; k <= K; ++k) {
        const cplx coef = shifted ? t.a[k] : t.b[k];
        acc += coef * std::exp((z - 1.0 - static_cast<double>(k)) * lb) * complex_rgamma(z - static_cast<double>(k));
    }
    return std::exp(-kEulerGamma * z) * acc;
}

}  // namespace densediv
