// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "densediv/arith.hpp"
#include "densediv/ekac.hpp"
#include "densediv/laplace.hpp"
#include "densediv/special.hpp"

using namespace densediv;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void run(int id, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s) {
        o.pass = false;
        o.detail += fmt(" [over budget %.0fs]", budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
}

cplx on_circle(double phi) { return std::polar(1.0, phi); }

Outcome constants_regression() {
    const auto c = constants();
    const bool ok = std::abs(c.C - 2.280291) <= 1e-6 && std::abs(c.K + 0.933003) <= 1e-5 &&
                    std::abs(c.V - 0.414284) <= 1e-5;
    return {ok, fmt("C=%.9f K=%.9f V=%.9f", c.C, c.K, c.V)};
}

Outcome oracle_equivalence() {
    constexpr u64 N = 100000;
    const double ts[] = {2, 2.5, 3, 10};
    u64 mismatches = 0, members = 0;
    for (u64 n = 1; n <= N; ++n) {
        const auto f = factorize(n);
        for (double t : ts) {
            const bool m = is_member(f, ThetaRule::dense(t));
            members += m;
            mismatches += m != is_t_dense_oracle(f, t);
        }
        const bool p = is_member(f, ThetaRule::practical());
        members += p;
        mismatches += p != is_practical_oracle(n);
    }
    // the enumerator must produce exactly the members
    u64 enum_mismatch = 0;
    for (double t : ts) enum_mismatch += enumerate_B(ThetaRule::dense(t), N).size() != count_D(N, t);
    u64 practical = 0;
    for (u64 n = 1; n <= N; ++n) practical += is_practical_oracle(n);
    enum_mismatch += enumerate_B(ThetaRule::practical(), N).size() != practical;
    return {mismatches == 0 && enum_mismatch == 0,
            fmt("n<=1e5, %llu members found, %llu oracle mismatches, %llu enumeration mismatches",
                static_cast<unsigned long long>(members), static_cast<unsigned long long>(mismatches),
                static_cast<unsigned long long>(enum_mismatch))};
}

Outcome funceq_identity() {
    const std::vector<cplx> zs = {1.0, on_circle(0.3)};
    double worst = 0;
    for (const auto& rule : {ThetaRule::dense(2), ThetaRule::practical()})
        for (NuMode mode : {NuMode::SmallOmega, NuMode::BigOmega})
            for (const auto& s : funceq_sides(rule, 100000, zs, mode))
                worst = std::max(worst, std::abs(s.lhs - s.rhs) / std::abs(s.lhs));
    return {worst <= 1e-9, fmt("x=1e5, worst relative gap %.3e", worst)};
}

Outcome dde_residual() {
    double worst = 0;
    for (cplx z : {cplx(1.0), on_circle(0.1), on_circle(-0.1)}) {
        const auto w = solve_omega(z, 50);
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = w.node(i);
            if (u < 2.1 - 1e-12 || u > 50 + 1e-12) continue;
            worst = std::max(worst, omega_dde_residual(w, z, i));
        }
    }
    const auto w1 = solve_omega(1.0, 50);
    const double buchstab = std::abs(w1(50) - std::exp(-kEulerGamma));
    return {worst <= 1e-8 && buchstab <= 1e-6,
            fmt("max residual %.3e on [2.1,50], |w_1(50)-e^-gamma|=%.3e", worst, buchstab)};
}

Outcome root_expansion() {
    const auto c = constants();
    std::vector<double> ratios;
    bool left = true;
    std::string detail;
    for (double phi : {0.02, 0.05, 0.1}) {
        const cplx z = on_circle(phi);
        const auto r = find_s0(z);
        const cplx model = -1.0 + c.C * (z - 1.0) + c.K * (z - 1.0) * (z - 1.0);
        ratios.push_back(std::abs(r.s0 - model) / std::pow(std::abs(z - 1.0), 3));
        left = left && r.s0.real() < -1;
        detail += fmt("phi=%.2f ratio=%.4f Re s0=%.9f; ", phi, ratios.back(), r.s0.real());
    }
    const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                          *std::min_element(ratios.begin(), ratios.end());
    return {spread < 3 && left, detail + fmt("spread %.3f", spread)};
}

Outcome dz_asymptotics() {
    const auto c = constants();
    const auto d1 = solve_dz(1.0, 30);
    double worst = 0;
    for (double v = 5; v <= 30 + 1e-9; v += 0.25)
        worst = std::max(worst, std::abs(d1(v) * (v + 1) / c.C - 1.0) * v * v);
    const cplx z = on_circle(0.05);
    const auto dz = solve_dz(z, 20);
    const double rel = std::abs(dz(20) / (dz.Cz * std::pow(cplx(21.0), dz.s0)) - 1.0);
    return {worst <= 5 && rel <= 0.02, fmt("c=%.4f over v in [5,30]; complex ratio error %.4f at v=20", worst, rel)};
}

Outcome sifted_accuracy() {
    std::string detail;
    bool ok = true;
    for (double x : {1e6, 1e8})
        for (double phi : {0.0, 0.1}) {
            const auto r = sifted_compare(x, 100, phi, NuMode::SmallOmega);
            detail += fmt("x=%.0e phi=%.1f rel=%.4f; ", x, phi, r.rel_err);
            if (x == 1e8) ok = ok && r.rel_err <= (phi == 0 ? 0.02 : 0.05);
        }
    return {ok, detail + "y=100, nu=omega"};
}

Outcome ek_trend() {
    std::string detail;
    bool ok = true;
    const u64 xs[] = {10000, 1000000, 100000000};
    for (const auto& rule : {ThetaRule::dense(2), ThetaRule::practical()}) {
        std::vector<NuHistogram> hists;
        for (u64 x : xs) hists.push_back(nu_histogram(rule, x, 1));
        for (NuMode mode : {NuMode::SmallOmega, NuMode::BigOmega}) {
            double ks[3], drift[3];
            for (int i = 0; i < 3; ++i) {
                const EmpiricalDistribution dist(hists[i].marginal(mode));
                const auto p = reference_params(rule, static_cast<double>(xs[i]));
                ks[i] = ks_distance(dist, p);
                drift[i] = std::abs(dist.mean() - p.mu);
            }
            const bool dec = ks[0] > ks[1] && ks[1] > ks[2];
            const bool stable = std::abs(drift[2] - drift[1]) <= 1;
            ok = ok && dec && stable;
            detail += fmt("%s/%s ks %.4f>%.4f>%.4f %s, drift %.3f->%.3f; ", rule.describe().c_str(), to_string(mode),
                          ks[0], ks[1], ks[2], dec ? "ok" : "NOT decreasing", drift[1], drift[2]);
        }
    }
    return {ok, detail};
}

Outcome char_ratio_scaling() {
    const double phi = 0.1;
    const double target = 1 + find_s0(on_circle(phi)).s0.real();
    const std::vector<double> xs = {1e5, 1e6, 1e7, 1e8};
    std::string detail;
    bool ok = true;
    for (NuMode mode : {NuMode::SmallOmega, NuMode::BigOmega}) {
        std::vector<double> mags;
        for (double x : xs) mags.push_back(std::abs(char_ratio_D(static_cast<u64>(x), 2, phi, mode).exact));
        const double slope = loglog_slope(xs, mags);
        ok = ok && std::abs(slope - target) <= 0.1;
        detail += fmt("%s slope %.4f; ", to_string(mode), slope);
    }
    return {ok, detail + fmt("target 1+Re s0 = %.4f", target)};
}

}  // namespace

int main() {
    run(1, 1, constants_regression);
    run(2, 120, oracle_equivalence);
    run(3, 60, funceq_identity);
    run(4, 10, dde_residual);
    run(5, 10, root_expansion);
    run(6, 30, dz_asymptotics);
    run(7, 300, sifted_accuracy);
    run(8, 1200, ek_trend);
    run(9, 1200, char_ratio_scaling);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
