#include "densediv/special.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "densediv/error.hpp"
#include "densediv/primes.hpp"
#include "densediv/quadrature.hpp"

namespace densediv {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos g = 7, 9 terms
constexpr double kLanczos[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

cplx gamma_lanczos(cplx s) {  // Re s >= 1/2
    s -= 1.0;
    cplx x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (s + static_cast<double>(i));
    const cplx t = s + 7.5;
    return std::sqrt(2 * kPi) * std::exp((s + 0.5) * std::log(t) - t) * x;
}

// sin(pi s) with exact zeros at integers
cplx sinpi(cplx s) {
    const double n = std::round(s.real());
    const cplx r = std::sin(kPi * (s - n));
    return std::fmod(n, 2.0) == 0 ? r : -r;
}

// log(1 + w) without losing the low bits when w is tiny
cplx log1p_c(cplx w) {
    if (std::abs(w) > 1e-3) return std::log(1.0 + w);
    cplx acc = 0, pw = w;
    for (int m = 1; m < 40; ++m) {
        acc += (m % 2 ? 1.0 : -1.0) * pw / static_cast<double>(m);
        if (std::abs(pw) < 1e-19) break;
        pw *= w;
    }
    return acc;
}

// sum (-1)^{n+1} s^n/(n n!)
cplx T_series(cplx s) {
    cplx acc = 0, p = 1;
    const double mag = std::abs(s);
    for (int n = 1; n < 400; ++n) {
        p *= -s / static_cast<double>(n);
        const cplx term = p / static_cast<double>(n);
        acc -= term;
        if (n > mag && std::abs(term) <= 1e-17 * std::abs(acc)) break;
    }
    return acc;
}

// E1(w) by Lentz continued fraction, |arg w| < pi
cplx E1_cf(cplx w) {
    constexpr double tiny = 1e-300;
    cplx b = w + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-w);
    }
    fail(ErrorCode::NoConvergence, "exponential integral continued fraction did not converge");
}

}  // namespace

cplx complex_gamma(cplx s) {
    if (s.real() < 0.5) {
        const cplx sp = sinpi(s);
        if (sp == 0.0) fail(ErrorCode::Domain, "gamma: pole at a non-positive integer");
        return kPi / (sp * gamma_lanczos(1.0 - s));
    }
    return gamma_lanczos(s);
}

cplx complex_rgamma(cplx s) {
    if (s.real() < 0.5) return sinpi(s) * gamma_lanczos(1.0 - s) / kPi;
    return 1.0 / gamma_lanczos(s);
}

double gamma_cross_check() {
    auto d = [](double h) { return (complex_gamma(1.0 + h) - complex_gamma(1.0 - h)).real() / (2 * h); };
    const double d1 = d(2e-3), d2 = d(1e-3);
    return -(4 * d2 - d1) / 3;
}

// ---------------------------------------------------------------------------

cplx eval_T(cplx s) {
    const double mag = std::abs(s);
    if (!(mag <= 50 * (1 + 1e-12))) fail(ErrorCode::Domain, "eval_T: |s| exceeds 50");
    // the series is cancellation free near the negative axis, the fraction elsewhere
    if (mag <= 2 || (s.real() < 0 && std::abs(s.imag()) < -s.real())) return T_series(s);
    return E1_cf(s) + std::log(s) + kEulerGamma;
}

cplx eval_I(cplx s) { return -eval_T(-s); }

double eval_J(double u) {
    if (!(u > 0)) fail(ErrorCode::Domain, "eval_J: u must be positive");
    if (u <= 1) return -kEulerGamma - std::log(u) + T_series(u).real();
    if (u > 700) return 0;  // below the smallest double
    return E1_cf(u).real();
}

CoeffTable coeff_table(cplx z, int K) {
    require(K >= 0 && K <= 60, "coeff_table: K must lie in [0, 60]");
    CoeffTable t{z, K, {}, {}, {}};
    // z T(s) = sum_{n>=1} g_n s^n
    std::vector<cplx> g(K + 1);
    double fact = 1;
    for (int n = 1; n <= K; ++n) {
        fact *= n;
        g[n] = z * ((n % 2 ? 1.0 : -1.0) / (n * fact));
    }
    t.b.assign(K + 1, 0.0);
    t.b[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
        cplx acc = 0;
        for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * g[j] * t.b[k - j];
        t.b[k] = acc / static_cast<double>(k);
    }
    t.a.assign(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        double w = 1;  // (-1)^j / j!
        for (int j = 0; j <= k; ++j) {
            t.a[k] += w * t.b[k - j];
            w *= -1.0 / (j + 1);
        }
    }
    const cplx e = std::exp(-kEulerGamma * z);
    for (const auto& bk : t.b) t.c.push_back(e * bk);
    return t;
}

// ---------------------------------------------------------------------------

ConstantsReport constants() {
    ConstantsReport r{};
    r.gamma = kEulerGamma;
    r.exp_minus_gamma = std::exp(-kEulerGamma);

    // (e^{T(u)} - 1 - u)/u^2, by its Taylor series near 0
    const CoeffTable tab = coeff_table(1.0, 40);
    auto integrand = [&](double u) {
        if (u < 0.25) {
            double acc = 0;
            for (int k = 40; k >= 2; --k) acc = acc * u + tab.b[k].real();
            return acc;
        }
        return (std::exp(eval_T(u).real()) - 1 - u) / (u * u);
    };
    r.A = r.exp_minus_gamma * (integrate<double>(integrand, 0, 1, 8) - 1);
    r.W = integrate<double>([](double u) { return std::expm1(eval_J(u)) / u; }, 1, 40, 39);
    r.W_tail_bound = 2 * eval_J(40);
    r.B = r.A + r.W;
    r.C = 1 / (1 - r.exp_minus_gamma);
    r.K = r.exp_minus_gamma * r.C * r.C * (1 - r.gamma + r.B * r.C);
    r.V = r.C + 2 * r.K;
    return r;
}

// ---------------------------------------------------------------------------
// Euler products

namespace {

void check_euler_domain(double y, cplx z) {
    if (!(y >= 1.5)) fail(ErrorCode::Domain, "Euler products need y >= 1.5");
    if (y > 1e9) fail(ErrorCode::Budget, "Euler products: y beyond prime table budget");
    if (!(std::abs(z) <= 2 + 1e-12 && std::abs(z - 1.0) <= 0.5 + 1e-12))
        fail(ErrorCode::Domain, "Euler products need |z| <= 2 and |z - 1| <= 1/2");
}

struct LogProduct {
    cplx value;  // log of the product
    cplx deriv;  // logarithmic derivative in s at s = 1
};

LogProduct log_H(cplx z, NuMode mode) {
    const auto table = prime_table(kEulerPrimeCap);
    LogProduct out{0.0, 0.0};
    table->for_each_prime(0, kEulerPrimeCap, [&](u64 pr) {
        const double p = static_cast<double>(pr);
        const double lp = std::log(p);
        const double l1 = std::log1p(-1 / p);
        if (mode == NuMode::BigOmega) {
            out.value += -log1p_c(-z / p) + z * l1;
            out.deriv += z * (1.0 - z) * lp / ((p - 1) * (p - z));
        } else {
            out.value += log1p_c(z / (p - 1)) + z * l1;
            out.deriv += z * (z - 1.0) * lp / ((p - 1) * (p - 1 + z));
        }
    });
    // sum_{p>P} p^{-k} ~ E1((k-1) log P), sum_{p>P} log p/p^2 ~ 1/P
    const double P = static_cast<double>(kEulerPrimeCap);
    const double S2 = eval_J(std::log(P)), S3 = eval_J(2 * std::log(P));
    if (mode == NuMode::BigOmega) {
        out.value += (z * z - z) / 2.0 * S2 + (z * z * z - z) / 3.0 * S3;
        out.deriv += z * (1.0 - z) / P;
    } else {
        out.value += (z - z * z) / 2.0 * S2;
        out.deriv += z * (z - 1.0) / P;
    }
    return out;
}

LogProduct log_G(double y, cplx z, NuMode mode) {
    LogProduct out{0.0, 0.0};
    if (y < 2) return out;
    const u64 top = static_cast<u64>(std::floor(y));
    const auto table = prime_table(std::max<u64>(top, kEulerPrimeCap));
    table->for_each_prime(0, top, [&](u64 pr) {
        const double p = static_cast<double>(pr);
        const double lp = std::log(p);
        if (mode == NuMode::BigOmega) {
            out.value += log1p_c(-z / p);
            out.deriv += z * lp / (p - z);
        } else {
            out.value -= log1p_c(z / (p - 1));
            out.deriv += z * p * lp / ((p - 1) * (p - 1 + z));
        }
    });
    return out;
}

}  // namespace

cplx euler_h(double y, cplx z, NuMode mode) {
    check_euler_domain(y, z);
    return std::exp(log_H(z, mode).value + log_G(y, z, mode).value) * complex_rgamma(z);
}

cplx euler_Jnu(double y, cplx z, NuMode mode) {
    check_euler_domain(y, z);
    return log_H(z, mode).deriv + log_G(y, z, mode).deriv + kEulerGamma * z - 1.0;
}

cplx lambda0(cplx z, NuMode mode) { return euler_h(1.5, z, mode); }

double mertens_log_sum(double y) {
    if (y < 2) return 0;
    const u64 top = static_cast<u64>(std::floor(y));
    double acc = 0;
    prime_table(top)->for_each_prime(0, top, [&](u64 p) { acc += std::log(double(p)) / (double(p) - 1); });
    return acc;
}

// ---------------------------------------------------------------------------

std::string constants_json(const ConstantsReport& r) {
    nlohmann::ordered_json j;
    j["gamma"] = r.gamma;
    j["A"] = r.A;
    j["W"] = r.W;
    j["B"] = r.B;
    j["C"] = r.C;
    j["K"] = r.K;
    j["V"] = r.V;
    return j.dump(2);
}

std::string coeff_table_json(const CoeffTable& t) {
    auto pairs = [](const std::vector<cplx>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : v) a.push_back({c.real(), c.imag()});
        return a;
    };
    nlohmann::ordered_json j;
    j["z"] = {t.z.real(), t.z.imag()};
    j["K"] = t.K;
    j["b"] = pairs(t.b);
    j["a"] = pairs(t.a);
    j["c"] = pairs(t.c);
    return j.dump(2);
}

}  // namespace densediv
