#include "densediv/ekac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "densediv/error.hpp"
#include "densediv/laplace.hpp"
#include "densediv/special.hpp"

namespace densediv {

namespace {

const ConstantsReport& consts() {
    static const ConstantsReport r = constants();
    return r;
}

}  // namespace

double normal_cdf(double y) { return 0.5 * std::erfc(-y / std::sqrt(2.0)); }

double log2x(double x) {
    require(x > std::exp(1.0), "log log x needs x > e");
    return std::log(std::log(x));
}

// ---------------------------------------------------------------------------

EmpiricalDistribution::EmpiricalDistribution(std::vector<u64> counts) : counts_(std::move(counts)) {
    while (!counts_.empty() && counts_.back() == 0) counts_.pop_back();
    double s1 = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        n_ += counts_[k];
        s1 += static_cast<double>(k) * static_cast<double>(counts_[k]);
    }
    require(n_ >= 1, "EmpiricalDistribution: empty sample");
    mean_ = s1 / static_cast<double>(n_);
    // second pass around the mean keeps the variance accurate
    double s2 = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        const double d = static_cast<double>(k) - mean_;
        s2 += d * d * static_cast<double>(counts_[k]);
    }
    variance_ = s2 / static_cast<double>(n_);
}

EmpiricalDistribution EmpiricalDistribution::from_values(const std::vector<u32>& values) {
    std::vector<u64> counts;
    for (u32 v : values) {
        if (v >= counts.size()) counts.resize(v + 1, 0);
        ++counts[v];
    }
    return EmpiricalDistribution(std::move(counts));
}

double EmpiricalDistribution::cdf(double y) const {
    if (y < 0) return 0;
    u64 below = 0;
    for (std::size_t k = 0; k < counts_.size() && static_cast<double>(k) <= y; ++k) below += counts_[k];
    return static_cast<double>(below) / static_cast<double>(n_);
}

std::vector<u32> EmpiricalDistribution::sorted_sample() const {
    std::vector<u32> out;
    out.reserve(n_);
    for (std::size_t k = 0; k < counts_.size(); ++k) out.insert(out.end(), counts_[k], static_cast<u32>(k));
    return out;
}

// ---------------------------------------------------------------------------

EKParams EKParams::dense(double x, double t) {
    require(x >= 6 && t >= 2 && t <= x, "EKParams: need x >= 6 and 2 <= t <= x");
    const double lx = log2x(x);
    const double lt = std::log(std::log(t));
    const auto& c = consts();
    EKParams p{x, t, c.C * lx + (1 - c.C) * lt, c.V * lx + (1 - c.V) * lt};
    require(p.sigma2 > 0, "EKParams: sigma^2 must be positive");
    return p;
}

EKParams EKParams::chained(double x) {
    require(x >= 6, "EKParams: need x >= 6");
    const double lx = log2x(x);
    const auto& c = consts();
    return {x, 0, c.C * lx, c.V * lx};
}

EKParams EKParams::fixed(double mu, double sigma2) {
    require(sigma2 > 0, "EKParams: sigma^2 must be positive");
    return {0, 0, mu, sigma2};
}

EKParams reference_params(const ThetaRule& rule, double x) {
    if (rule.kind() == ThetaRule::Kind::DenseT) return EKParams::dense(x, std::min(rule.t(), x));
    return EKParams::chained(x);
}

EmpiricalDistribution collect_nu(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads) {
    return EmpiricalDistribution(nu_histogram(rule, x, threads).marginal(mode));
}

double ks_distance(const EmpiricalDistribution& dist, const EKParams& params) {
    const double sigma = std::sqrt(params.sigma2);
    const auto& counts = dist.counts();
    const double n = static_cast<double>(dist.n());
    double best = 0;
    u64 below = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) continue;
        const double phi = normal_cdf((static_cast<double>(k) - params.mu) / sigma);
        const double before = static_cast<double>(below) / n;
        below += counts[k];
        const double after = static_cast<double>(below) / n;
        best = std::max({best, std::abs(phi - before), std::abs(phi - after)});
    }
    return best;
}

// ---------------------------------------------------------------------------

CharRatio char_ratio_from(const NuHistogram& hist, const ThetaRule& rule, double x, double phi, NuMode mode) {
    require(std::abs(phi) <= 0.2 + 1e-12, "characteristic ratio needs |phi| <= 0.2");
    require(x >= 3, "characteristic ratio needs x >= 3");
    const cplx z = std::polar(1.0, phi);
    CharRatio r{};
    r.exact = hist.sum_z(z, mode) / static_cast<double>(hist.total());
    const cplx s0 = find_s0(z).s0;
    r.predicted = std::exp((1.0 + s0) * std::log(std::log(x)));
    if (rule.kind() == ThetaRule::Kind::DenseT) {
        const double t = std::min(rule.t(), x);
        r.predicted *= std::exp((z - 2.0 - s0) * std::log(std::log(t)));
    }
    r.lambda = r.exact / r.predicted;
    return r;
}

CharRatio char_ratio_D(u64 x, double t, double phi, NuMode mode, unsigned threads) {
    const auto rule = ThetaRule::dense(t);
    return char_ratio_from(nu_histogram(rule, x, threads), rule, static_cast<double>(x), phi, mode);
}

CharRatio char_ratio_B(const ThetaRule& rule, u64 x, double phi, NuMode mode, unsigned threads) {
    return char_ratio_from(nu_histogram(rule, x, threads), rule, static_cast<double>(x), phi, mode);
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& abs_ratios) {
    require(xs.size() == abs_ratios.size() && xs.size() >= 2, "loglog_slope: need two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = std::log(std::log(xs[i]));
        const double b = std::log(abs_ratios[i]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------

MomentsReport moments_from(const EmpiricalDistribution& dist, const ThetaRule& rule, double x) {
    MomentsReport m{};
    m.n = dist.n();
    m.mean = dist.mean();
    m.variance = dist.variance();
    const auto p = reference_params(rule, x);
    m.mu_ref = p.mu;
    m.sigma2_ref = p.sigma2;
    m.drift = m.mean - m.mu_ref;
    m.variance_ratio = m.variance / m.sigma2_ref;
    m.var_per_log2x = m.variance / log2x(x);
    const double sd = std::sqrt(m.variance);
    const auto& counts = dist.counts();
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (std::abs(static_cast<double>(k) - m.mean) >= 3 * sd) m.tail_count += counts[k];
    m.chebyshev_bound = static_cast<double>(m.n) / 9;
    return m;
}

MomentsReport moments_report(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads) {
    return moments_from(collect_nu(rule, x, mode, threads), rule, static_cast<double>(x));
}

// ---------------------------------------------------------------------------

cplx sifted_main_terms(double x, double y, cplx z) {
    require(y >= 2 && y <= x, "sifted main terms need 2 <= y <= x");
    const double ly = std::log(y);
    const double u = std::log(x) / ly;
    require(u <= 6 + 1e-12, "sifted main terms need u <= 6");
    const auto omega = solve_omega(z, std::max(2.0, std::ceil(u)));
    return (x * omega(u) - z * y) / ly -
           x * std::exp(-kEulerGamma * z + (z - 2.0) * std::log(u)) * complex_rgamma(z - 1.0) / (ly * ly);
}

SiftedCompare sifted_compare(double x, double y, double phi, NuMode mode) {
    require(std::abs(phi) <= 0.2 + 1e-12, "sifted_compare needs |phi| <= 0.2");
    const cplx z = std::polar(1.0, phi);
    SiftedCompare r{};
    r.exact = direct_sifted_sum(x, y, z, mode);
    r.main_terms = sifted_main_terms(x, y, z);
    r.rel_err = std::abs(r.exact - r.main_terms) / std::abs(r.exact);
    return r;
}

std::vector<FuncEqSides> funceq_sides(const ThetaRule& rule, u64 x, const std::vector<cplx>& zs, NuMode mode) {
    std::vector<FuncEqSides> out(zs.size(), FuncEqSides{0.0, 0.0});
    const auto all = sifted_histogram(static_cast<double>(x), 1);
    for (std::size_t i = 0; i < zs.size(); ++i) out[i].lhs = all.sum_z(zs[i], mode);
    for_each_member(rule, x, [&](const FactoredInteger& n) {
        const u64 cap = x / n.value();
        const double theta = rule.eval(n);
        std::vector<cplx> phi(zs.size(), 1.0);  // only r = 1 survives once theta >= x/n
        if (theta < static_cast<double>(cap)) {
            const auto h = sifted_histogram(static_cast<double>(cap), theta);
            for (std::size_t i = 0; i < zs.size(); ++i) phi[i] = h.sum_z(zs[i], mode);
        }
        for (std::size_t i = 0; i < zs.size(); ++i)
            out[i].rhs += std::pow(zs[i], static_cast<int>(n.nu(mode))) * phi[i];
    });
    return out;
}

// ---------------------------------------------------------------------------

EKRow ek_row(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads) {
    const auto dist = collect_nu(rule, x, mode, threads);
    const auto p = reference_params(rule, static_cast<double>(x));
    return {static_cast<double>(x), rule.kind() == ThetaRule::Kind::DenseT ? std::min(rule.t(), double(x)) : 0.0,
            mode, dist.n(), dist.mean(), p.mu, dist.variance(), p.sigma2, ks_distance(dist, p)};
}

std::string ek_csv_header() { return "x,t,mode,n_samples,mean,mu_ref,variance,sigma2_ref,ks"; }

std::string ek_csv_line(const EKRow& r) {
    char buf[384];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%llu,%.12g,%.12g,%.12g,%.12g,%.12g", r.x, r.t, to_string(r.mode),
                  static_cast<unsigned long long>(r.n_samples), r.mean, r.mu_ref, r.variance, r.sigma2_ref, r.ks);
    return buf;
}

std::string git_blob_hash(const std::string& text) {
    const std::string blob = "blob " + std::to_string(text.size()) + '\0' + text;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
        fail(ErrorCode::Internal, "SHA-1 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string run_manifest(const std::string& config_json, const std::vector<EKRow>& rows) {
    nlohmann::ordered_json cfg;
    try {
        cfg = nlohmann::ordered_json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidArgument, std::string("run_manifest: bad config JSON: ") + e.what());
    }
    nlohmann::ordered_json j;
    j["config"] = cfg;
    j["config_hash"] = git_blob_hash(cfg.dump());
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["x"] = r.x;
        row["t"] = r.t;
        row["mode"] = to_string(r.mode);
        row["n_samples"] = r.n_samples;
        row["mean"] = r.mean;
        row["mu_ref"] = r.mu_ref;
        row["variance"] = r.variance;
        row["sigma2_ref"] = r.sigma2_ref;
        row["ks"] = r.ks;
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

}  // namespace densediv
