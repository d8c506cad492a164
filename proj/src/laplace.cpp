#include "densediv/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "densediv/error.hpp"
#include "densediv/quadrature.hpp"

namespace densediv {

namespace {

constexpr double kTailEnd = 40;    // int_1^inf truncated here
constexpr double kMaxReS = 5;      // keeps the truncated tail below 1e-11
constexpr double kPoleGap = 1e-6;

// Quadrature nodes of int_1^40 u^s (e^{zJ(u)} - 1) du for a fixed z.
struct TailKernel {
    cplx z{};
    std::vector<double> logu;
    std::vector<cplx> weight;  // GL weight times (e^{zJ} - 1)
};

const TailKernel& tail_kernel(cplx z) {
    thread_local TailKernel k;
    if (!k.logu.empty() && k.z == z) return k;
    k.z = z;
    k.logu.clear();
    k.weight.clear();
    const auto& rule = gauss20();
    for (int p = 1; p < kTailEnd; ++p) {
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = p + 0.5 + 0.5 * rule.nodes[i];
            k.logu.push_back(std::log(u));
            k.weight.push_back(0.5 * rule.weights[i] * (std::exp(z * eval_J(u)) - 1.0));
        }
    }
    return k;
}

cplx tail_W(cplx z, cplx s) {
    const auto& k = tail_kernel(z);
    cplx acc = 0;
    for (std::size_t i = 0; i < k.logu.size(); ++i) acc += k.weight[i] * std::exp(s * k.logu[i]);
    return acc;
}

void check_z(cplx z) {
    if (!(std::abs(z) >= 0.5 - 1e-12 && std::abs(z) <= 2 + 1e-12))
        fail(ErrorCode::Domain, "z must satisfy 1/2 <= |z| <= 2");
}

void check_s(cplx s) {
    if (!(s.real() <= kMaxReS)) fail(ErrorCode::Domain, "Re s too large for the truncated tail integral");
}

// W(s) + sum_{k != 1} c_k/(k + 1 + s - z); the k = 1 term is handled by callers
cplx regular_part(cplx z, cplx s, const std::vector<cplx>& c) {
    cplx series = tail_W(z, s);
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (k == 1) continue;
        const cplx den = static_cast<double>(k) + 1.0 + s - z;
        if (std::abs(den) < kPoleGap) fail(ErrorCode::Domain, "s too close to a pole z - k - 1");
        series += c[k] / den;
    }
    return series;
}

// g(s) = (s + 2 - z)(s + 1) Q_z(s), with the k = 1 pole folded in
cplx eval_g(cplx z, cplx s, const std::vector<cplx>& c) {
    return (s + 2.0 - z) * (-1.0 + (s + 1.0) * regular_part(z, s, c)) + c[1] * (s + 1.0);
}

template <class F>
cplx derivative(F&& f, cplx s) {
    auto d = [&](double h) { return (f(s + h) - f(s - h)) / (2 * h); };
    return (4.0 * d(5e-4) - d(1e-3)) / 3.0;
}

const ConstantsReport& cached_constants() {
    static const ConstantsReport r = constants();
    return r;
}

}  // namespace

cplx eval_Q(cplx z, cplx s, int K_terms) {
    require(K_terms >= 1 && K_terms <= 60, "eval_Q: K_terms must lie in [1, 60]");
    check_z(z);
    check_s(s);
    if (std::abs(s + 1.0) < kPoleGap) fail(ErrorCode::Domain, "eval_Q: s too close to the pole at -1");
    const auto c = coeff_table(z, K_terms).c;
    cplx acc = -1.0 / (s + 1.0) + tail_W(z, s);
    for (int k = 0; k <= K_terms; ++k) {
        const cplx den = static_cast<double>(k) + 1.0 + s - z;
        if (std::abs(den) < kPoleGap) fail(ErrorCode::Domain, "eval_Q: s too close to a pole z - k - 1");
        acc += c[k] / den;
    }
    return acc;
}

cplx eval_f(cplx z, cplx s) {
    check_z(z);
    check_s(s);
    const auto c = coeff_table(z, kDefaultQTerms).c;
    // (s + 1) Q_z(s) = -1 + (s + 1) R(s) + c_1 (s + 1)/(s + 2 - z); at z = 1 the ratio is 1
    cplx ratio = 1.0;
    if (z != 1.0) {
        const cplx den = s + 2.0 - z;
        if (std::abs(den) < kPoleGap) fail(ErrorCode::Domain, "eval_f: s too close to the pole z - 2");
        ratio = (s + 1.0) / den;
    }
    return (-1.0 + (s + 1.0) * regular_part(z, s, c) + c[1] * ratio) / z;
}

// ---------------------------------------------------------------------------
// direct quadratures on (0, 1] with u = e^{-t}, then [1, 60]

namespace {

template <class F>
cplx integrate_t(F&& f, double decay) {
    if (!(decay > 0.05)) fail(ErrorCode::Domain, "direct quadrature needs Re s > Re z - 1");
    const double top = std::min(700.0, 45.0 / decay);
    return integrate<cplx>(f, 0, top, static_cast<int>(std::ceil(top)));
}

}  // namespace

cplx eval_f_direct(cplx z, cplx s) {
    check_z(z);
    check_s(s);
    const cplx head = integrate_t(
        [&](double t) {
            const double u = std::exp(-t);
            return std::exp(-t * (s + 1.0 - z) - kEulerGamma * z + z * eval_T(u) - u);
        },
        (s + 1.0 - z).real());
    const cplx body = integrate<cplx>(
        [&](double u) { return std::exp(s * std::log(u) - u + z * eval_J(u)); }, 1, 60, 59);
    return head + body;
}

cplx eval_Q_direct(cplx z, cplx s) {
    check_z(z);
    check_s(s);
    const cplx head = integrate_t(
        [&](double t) {
            const double u = std::exp(-t);
            return std::exp(-t * (s + 1.0 - z) - kEulerGamma * z + z * eval_T(u)) - std::exp(-t * (s + 1.0));
        },
        std::min((s + 1.0 - z).real(), (s + 1.0).real()));
    const cplx body = integrate<cplx>(
        [&](double u) { return std::exp(s * std::log(u)) * (std::exp(z * eval_J(u)) - 1.0); }, 1, 60, 59);
    return head + body;
}

cplx eval_Mhat(const SampledFunction& omega, cplx z, cplx s) {
    if (!((s - z).real() > -0.95)) fail(ErrorCode::Domain, "eval_Mhat needs Re s > Re z - 1");
    const double V = std::floor(omega.end());
    require(V >= 2, "eval_Mhat: omega grid too short");
    // integer-aligned panels keep the kinks of omega on panel edges
    cplx acc = integrate<cplx>([&](double v) { return omega(v) * std::exp(-(s + 1.0) * std::log(v + 1)); }, 1, V,
                               static_cast<int>(V - 1));
    const auto t = coeff_table(z, 8);
    const double lv = std::log(V + 1);
    cplx tail = 0;
    for (int k = 0; k <= 8; ++k) {
        const cplx e = z - 1.0 - static_cast<double>(k) - s;
        tail += t.a[k] * complex_rgamma(z - static_cast<double>(k)) * std::exp(e * lv) / -e;
    }
    return acc + std::exp(-kEulerGamma * z) * tail;
}

// ---------------------------------------------------------------------------

cplx s0_quadratic_model(cplx z) {
    const auto& k = cached_constants();
    const cplx w = z - 1.0;
    return -1.0 + k.C * w + k.K * w * w;
}

RootResult find_s0(cplx z) {
    if (!(std::abs(z - 1.0) <= kWorkingDisk + 1e-12))
        fail(ErrorCode::Domain, "find_s0: z outside the working disk |z - 1| <= 0.2");
    const auto c = coeff_table(z, kDefaultQTerms).c;
    auto g = [&](cplx s) { return eval_g(z, s, c); };

    RootResult r{z, s0_quadratic_model(z), 0, 0, 0};
    bool done = false;
    for (int it = 1; it <= 50 && !done; ++it) {
        const cplx gv = g(r.s0);
        r.newton_iters = it;
        if (gv == 0.0) break;
        const cplx step = gv / derivative(g, r.s0);
        r.s0 -= step;
        done = std::abs(step) <= 1e-14 * std::max(1.0, std::abs(r.s0));
    }
    r.residual = std::abs(g(r.s0));
    r.deriv_abs = std::abs(derivative(g, r.s0));
    if (!(r.residual <= 1e-10) || !(std::abs(r.s0 + 1.0) <= 0.5))
        fail(ErrorCode::NoConvergence, "find_s0: Newton iteration did not converge");
    return r;
}

cplx residue_Cz(cplx z, const RootResult& root) {
    const auto c = coeff_table(z, kDefaultQTerms).c;
    const cplx s = root.s0;
    const cplx gp = derivative([&](cplx x) { return eval_g(z, x, c); }, s);
    const cplx den = (s + 1.0 - z) * gp;
    if (std::abs(den) < 1e-12) fail(ErrorCode::Domain, "residue_Cz: vanishing denominator");
    return z * complex_gamma(z) * complex_gamma(s + 3.0 - z) / den;
}

cplx residue_Cz(cplx z) { return residue_Cz(z, find_s0(z)); }

// ---------------------------------------------------------------------------
// d_z

namespace {

const GaussRule& gauss8() {
    static const GaussRule rule = make_gauss_legendre(8);
    return rule;
}

constexpr double kDKinks[] = {1, 3, 7, 15, 31, 63, 127};

// int_0^{(v-1)/2} d(u)/(u+1) omega((v-u)/(u+1)) du, d given for u > 1 by `dfun`
template <class D>
cplx volterra_integral(cplx z, const SampledFunction& omega, double v, D&& dfun) {
    const double L = 0.5 * (v - 1);
    if (L <= 0) return 0.0;
    std::vector<double> pts{0.0, L};
    for (int j = 1; j <= 50; ++j) {
        const double p = std::ldexp(1.0, -j);
        if (p < std::min(1.0, L)) pts.push_back(p);
    }
    if (L > 1) pts.push_back(1.0);
    for (double k : kDKinks)
        if (k < L) pts.push_back(k);
    for (int k = 2;; ++k) {  // where the omega argument crosses an integer
        const double p = (v - k) / (k + 1);
        if (p <= 0) break;
        if (p < L) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](double a, double b) { return b - a < 1e-13; }), pts.end());

    auto d_at = [&](double u) -> cplx { return u <= 1 ? std::exp((z - 1.0) * std::log(u)) : dfun(u); };
    auto integrand = [&](double u) { return d_at(u) / (u + 1) * omega((v - u) / (u + 1)); };

    // first panel [0, 2^-50]: d ~ u^{z-1}, the rest is constant to 1e-15
    cplx acc = std::exp(z * std::log(pts[1])) / z * omega(v);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double a = pts[i], b = pts[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / 0.5)));
        acc += integrate<cplx>(integrand, a, b, n, gauss8());
    }
    return acc;
}

}  // namespace

cplx DzSolution::operator()(double v) const {
    if (v <= 0) return 0.0;
    if (v <= 1) return std::exp((z - 1.0) * std::log(v));
    return grid(v);
}

DzSolution solve_dz(cplx z, double v_max, double h) {
    if (!(std::abs(z - 1.0) <= kWorkingDisk + 1e-12)) fail(ErrorCode::Domain, "solve_dz: need |z - 1| <= 0.2");
    if (!(v_max >= 1 && v_max <= kOmegaMaxU)) fail(ErrorCode::InvalidArgument, "solve_dz: v_max must lie in [1, 200]");
    if (!(h > 0 && h <= 0.01)) fail(ErrorCode::InvalidArgument, "solve_dz: step must lie in (0, 0.01]");

    DzSolution out;
    out.z = z;
    const RootResult root = find_s0(z);
    out.s0 = root.s0;
    out.Cz = residue_Cz(z, root);
    out.omega = solve_omega(z, std::max(v_max, 2.0), h);

    const long M = static_cast<long>(std::ceil(1 / h - 1e-9));
    const double step = 1.0 / static_cast<double>(M);
    const long N = static_cast<long>(std::ceil(v_max * M - 1e-9));
    std::vector<cplx> vals(N + 1, 0.0);
    for (long i = 1; i <= std::min(M, N); ++i) vals[i] = std::exp((z - 1.0) * std::log(i * step));

    std::vector<long> breaks{M};
    for (double k : kDKinks)
        if (k > 1 && k * M < N) breaks.push_back(static_cast<long>(k) * M);

    // cubic interpolation of the nodes computed so far, never across a kink
    auto dfun = [&](double u) -> cplx {
        const double x = u * M;
        auto it = std::upper_bound(breaks.begin(), breaks.end(), static_cast<long>(std::floor(x)));
        const long lo = *(it - 1);
        const long hi = it == breaks.end() ? N : *it;
        long i0 = static_cast<long>(std::floor(x)) - 1;
        i0 = std::clamp(i0, lo, hi - 3);
        cplx acc = 0;
        for (int j = 0; j < 4; ++j) {
            double w = 1;
            for (int m = 0; m < 4; ++m)
                if (m != j) w *= (x - (i0 + m)) / static_cast<double>(j - m);
            acc += w * vals[i0 + j];
        }
        return acc;
    };

    for (long i = M + 1; i <= N; ++i) {
        const double v = i * step;
        vals[i] = std::exp((z - 1.0) * std::log(v)) - volterra_integral(z, out.omega, v, dfun);
    }

    std::vector<double> bp;
    for (long b : breaks) bp.push_back(static_cast<double>(b) * step);
    out.grid = SampledFunction(0.0, step, std::move(vals), std::move(bp), 0.0);
    return out;
}

double dz_residual(const DzSolution& d, double v) {
    require(v > 1 && v <= d.v_max(), "dz_residual: v must lie in (1, v_max]");
    const cplx rhs = std::exp((d.z - 1.0) * std::log(v)) -
                     volterra_integral(d.z, d.omega, v, [&](double u) { return d.grid(u); });
    return std::abs(d(v) - rhs);
}

// ---------------------------------------------------------------------------

std::vector<RootRow> root_table(const std::vector<double>& phis) {
    std::vector<RootRow> rows;
    for (double phi : phis) {
        const cplx z = std::polar(1.0, phi);
        const auto r = find_s0(z);
        rows.push_back({phi, r, residue_Cz(z, r)});
    }
    return rows;
}

std::string root_table_csv(const std::vector<RootRow>& rows) {
    std::string out = "phi,re_s0,im_s0,re_Cz,im_Cz,residual\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6g,%.15g,%.15g,%.15g,%.15g,%.3e\n", r.phi, r.root.s0.real(),
                      r.root.s0.imag(), r.Cz.real(), r.Cz.imag(), r.root.residual);
        out += buf;
    }
    return out;
}

}  // namespace densediv
