#include <cmath>
#include <numbers>

#include "doctest.h"
#include "densediv/error.hpp"
#include "densediv/quadrature.hpp"
#include "densediv/special.hpp"

using namespace densediv;
using doctest::Approx;

namespace {
const double kEg = std::exp(-kEulerGamma);
}

TEST_CASE("gauss legendre integrates polynomials") {
    const double v = integrate<double>([](double x) { return x * x * x * x; }, 0, 2, 1);
    CHECK(v == Approx(32.0 / 5).epsilon(1e-14));
    CHECK(integrate<double>([](double x) { return std::exp(x); }, 0, 1, 3) == Approx(std::expm1(1.0)).epsilon(1e-14));
}

TEST_CASE("complex gamma") {
    CHECK(std::abs(complex_gamma(1.0) - 1.0) < 1e-14);
    CHECK(std::abs(complex_gamma(0.5) - std::sqrt(std::numbers::pi)) < 1e-14);
    CHECK(std::abs(complex_gamma(5.0) - 24.0) < 1e-12);
    for (cplx s : {cplx(0.3, 0.7), cplx(-2.4, 1.1), cplx(3.5, -2.0), cplx(-0.9, 0.05)}) {
        CHECK(std::abs(complex_gamma(s + 1.0) - s * complex_gamma(s)) <= 1e-13 * std::abs(complex_gamma(s + 1.0)));
        CHECK(std::abs(complex_rgamma(s) * complex_gamma(s) - 1.0) < 1e-13);
    }
    CHECK(complex_rgamma(0.0) == 0.0);
    CHECK(complex_rgamma(-3.0) == 0.0);
    CHECK_THROWS_AS(complex_gamma(-2.0), Error);
    CHECK(gamma_cross_check() == Approx(kEulerGamma).epsilon(1e-9));
}

TEST_CASE("I and T") {
    CHECK(eval_I(0.0) == 0.0);
    CHECK(eval_T(0.0) == 0.0);
    CHECK(eval_I(1.0).real() == Approx(1.3179021514544039).epsilon(1e-14));
    CHECK(eval_T(1.0).real() == Approx(0.79659959929705313).epsilon(1e-14));
    for (double s : {0.5, 1.0, 2.0}) CHECK(std::abs(eval_I(-s) + eval_T(s)) < 1e-15);
    CHECK(eval_T(7.3).imag() == 0.0);
    CHECK(eval_T(-7.3).imag() == 0.0);
    // series and continued fraction agree where both are usable
    for (cplx s : {cplx(2.5, 0.3), cplx(-1.0, 2.2), cplx(0.2, -3.0)}) {
        cplx series = 0, p = 1;
        for (int n = 1; n < 80; ++n) {
            p *= -s / double(n);
            series -= p / double(n);
        }
        CHECK(std::abs(eval_T(s) - series) < 1e-13 * std::abs(series));
    }
    // T(u) = ln u + gamma + E1(u) so T(30) = ln 30 + gamma to 1e-14
    CHECK(eval_T(30.0).real() == Approx(std::log(30.0) + kEulerGamma).epsilon(1e-14));
    CHECK_THROWS_AS(eval_T(51.0), Error);
}

TEST_CASE("J") {
    CHECK(eval_J(1.0) == Approx(0.21938393439552027).epsilon(1e-13));
    CHECK(eval_J(30.0) <= 1e-13);
    CHECK(eval_J(30.0) == Approx(std::exp(-30.0) / 30 * (1 - 1.0 / 30 + 2.0 / 900 - 6.0 / 27000)).epsilon(1e-5));
    for (double u : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0})
        CHECK(u * std::exp(eval_J(u)) == Approx(std::exp(-kEulerGamma - eval_I(-u).real())).epsilon(1e-12));
    CHECK_THROWS_AS(eval_J(0.0), Error);
}

TEST_CASE("coefficient tables") {
    const cplx z(0.8, 0.3);
    const auto t = coeff_table(z, 20);
    CHECK(t.b[0] == 1.0);
    CHECK(std::abs(t.b[1] - z) < 1e-16);
    CHECK(std::abs(t.b[2] - z * (2.0 * z - 1.0) / 4.0) < 1e-15);
    CHECK(std::abs(t.a[1] - (z - 1.0)) < 1e-15);
    CHECK(std::abs(t.a[2] - (z - 2.0) * (2.0 * z - 1.0) / 4.0) < 1e-15);
    CHECK(coeff_table(1.0, 3).c[1].real() == Approx(kEg).epsilon(1e-15));
    CHECK_THROWS_AS(coeff_table(z, 61), Error);

    const cplx w = std::polar(1.0, 0.2);
    const auto tw = coeff_table(w, 20);
    cplx sum = 0;
    for (int k = 20; k >= 0; --k) sum = sum * 0.1 + tw.b[k];
    CHECK(std::abs(sum - std::exp(-w * eval_I(-0.1))) < 1e-18 + 1e-15);
}

TEST_CASE("sampled function interpolation") {
    std::vector<cplx> v;
    for (int i = 0; i <= 40; ++i) {
        const double u = 0.1 * i;
        v.push_back(u < 2 ? cplx(u * u * u) : cplx(6 + u));
    }
    SampledFunction f(0.0, 0.1, v, {2.0}, 0.0);
    CHECK(f(1.234).real() == Approx(std::pow(1.234, 3)).epsilon(1e-12));
    CHECK(f(2.0).real() == Approx(8.0));
    CHECK(f(2.75).real() == Approx(8.75).epsilon(1e-13));
    CHECK(f(1.95).real() == Approx(std::pow(1.95, 3)).epsilon(1e-12));
    CHECK(f.node_derivative(15).real() == Approx(3 * 1.5 * 1.5).epsilon(1e-10));
    CHECK(f.node_derivative(20).real() == Approx(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(f(4.5), Error);
}

TEST_CASE("omega_z solver examples") {
    const auto w = solve_omega(1.0, 60);
    CHECK(w(0.5) == 0.0);
    CHECK(w(1.0).real() == Approx(1.0));
    CHECK(w(1.5).real() == Approx(2.0 / 3).epsilon(1e-14));
    CHECK(w(2.5).real() == Approx((1 + std::log(1.5)) / 2.5).epsilon(1e-10));
    for (double u : {2.1, 2.37, 2.999})
        CHECK(w(u).real() == Approx((1 + std::log(u - 1)) / u).epsilon(1e-10));
    CHECK(std::abs(w(20.0) - kEg) < 1e-6);
    CHECK(std::abs(w(50.0) - kEg) < 1e-6);
    const cplx z = std::polar(1.3, 0.4);
    const auto wz = solve_omega(z, 3);
    for (double u : {2.2, 2.6})
        CHECK(std::abs(wz(u) - (z + z * z * std::log(u - 1)) / u) < 1e-10);
    CHECK_THROWS_AS(solve_omega(3.0, 10), Error);
    CHECK_THROWS_AS(solve_omega(1.0, 10, 0.02), Error);
    CHECK_THROWS_AS(solve_omega(1.0, 250), Error);
}

TEST_CASE("omega_z residual and growth bound") {
    for (cplx z : {cplx(1.0), std::polar(1.0, 0.1), std::polar(1.0, -0.2)}) {
        const auto w = solve_omega(z, 50);
        const long M = std::lround(1 / w.step());
        double worst = 0;
        for (std::size_t i = static_cast<std::size_t>(2.1 * M); i < w.size(); ++i)
            worst = std::max(worst, omega_dde_residual(w, z, i));
        CHECK(worst <= 1e-8);
        for (double u = 1; u <= 50; u += 0.37) CHECK(std::abs(w(u)) <= std::abs(z) * std::pow(u, std::abs(z) - 1) + 1e-12);
    }
}

TEST_CASE("omega_z asymptotic expansion") {
    CHECK(std::abs(omega_asymptotic(1.0, 7.0, 0) - kEg) < 1e-15);
    const cplx z = std::polar(1.0, 0.1);
    const auto w = solve_omega(z, 100);
    for (int K : {0, 1, 2}) {
        // log-log slope of the error over [10, 100]
        const double e1 = std::abs(w(10.0) - omega_asymptotic(z, 10, K));
        const double e2 = std::abs(w(100.0) - omega_asymptotic(z, 100, K));
        const double slope = std::log(e2 / e1) / std::log(10.0);
        CHECK(std::abs(slope + (K + 2 - z.real())) < 0.3);
    }
    // shifted and plain forms describe the same function
    CHECK(std::abs(omega_asymptotic(z, 60, 6) - omega_asymptotic(z, 60, 6, true)) < 1e-9);
}

TEST_CASE("constants") {
    const auto c = constants();
    CHECK(c.C == Approx(2.2802910165143604).epsilon(1e-14));
    CHECK(std::abs(c.A - -0.42980136182101965) < 1e-12);
    CHECK(std::abs(c.W - 0.10424301051087345) < 1e-12);
    CHECK(std::abs(c.K - -0.93300345834219076) < 1e-11);
    CHECK(std::abs(c.V - 0.41428409982997891) < 1e-11);
    CHECK(c.B == c.A + c.W);
    CHECK(c.V == c.C + 2 * c.K);
    CHECK(c.W_tail_bound < 1e-18);
    // A from the coefficient series
    const auto t = coeff_table(1.0, 40);
    double s = -1;
    for (int k = 2; k <= 40; ++k) s += t.b[k].real() / (k - 1);
    CHECK(std::abs(kEg * s - c.A) < 1e-13);
}

TEST_CASE("euler products") {
    for (auto mode : {NuMode::BigOmega, NuMode::SmallOmega}) {
        double mertens = 1;
        for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29}) mertens *= 1 - 1.0 / p;
        CHECK(std::abs(euler_h(30, 1.0, mode) - mertens) < 1e-13);
        CHECK(std::abs(lambda0(1.0, mode) - 1.0) < 1e-14);

        const cplx z = std::polar(1.0, 0.1);
        const double y = 1e4, ly = std::log(y);
        const cplx happ = std::exp(-kEulerGamma * z - z * std::log(ly)) * complex_rgamma(z);
        CHECK(std::abs(euler_h(y, z, mode) / happ - 1.0) < 3 * std::exp(-std::sqrt(ly)));
        CHECK(std::abs(euler_Jnu(y, z, mode) - (z * ly - 1.0)) < 3 * std::exp(-std::sqrt(ly)) * ly);
        CHECK(std::abs(euler_Jnu(y, 1.0, mode).real() - (mertens_log_sum(y) + kEulerGamma - 1)) < 1e-9);
        CHECK(std::abs(std::conj(euler_h(y, z, mode)) - euler_h(y, std::conj(z), mode)) < 1e-14);
    }
    CHECK(mertens_log_sum(1e5) == Approx(std::log(1e5) - kEulerGamma).epsilon(3e-3));
    CHECK_THROWS_AS(euler_h(1.0, 1.0, NuMode::BigOmega), Error);
    CHECK_THROWS_AS(euler_h(10, 1.8, NuMode::BigOmega), Error);
}

TEST_CASE("mode difference of J stays bounded") {
    const cplx z = std::polar(1.0, 0.1);
    double lo = 1e9, hi = -1e9;
    for (double y : {1e2, 1e3, 1e4, 1e5}) {
        const double d = std::abs(euler_Jnu(y, z, NuMode::BigOmega) - euler_Jnu(y, z, NuMode::SmallOmega));
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    CHECK(hi - lo < 0.05);
}

TEST_CASE("json export") {
    const auto js = constants_json(constants());
    CHECK(js.find("\"gamma\"") < js.find("\"A\""));
    CHECK(js.find("\"V\"") != std::string::npos);
    CHECK(coeff_table_json(coeff_table(1.0, 2)).find("\"c\"") != std::string::npos);
}
