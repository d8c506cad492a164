#pragma once

// Statistics of nu(n) over enumerated sets against the Gaussian laws,
// characteristic ratios and sifted-sum main terms.

#include <string>
#include <vector>

#include "densediv/arith.hpp"

namespace densediv {

double normal_cdf(double y);

/// Distribution of small non-negative integers kept as counts per value.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<u64> counts);
    static EmpiricalDistribution from_values(const std::vector<u32>& values);

    u64 n() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    /// fraction of the sample with nu <= y
    double cdf(double y) const;
    const std::vector<u64>& counts() const noexcept { return counts_; }
    std::vector<u32> sorted_sample() const;

private:
    std::vector<u64> counts_;
    u64 n_ = 0;
    double mean_ = 0, variance_ = 0;
};

/// Centering and scaling of nu. `dense` uses mu_{x,t}, sigma^2_{x,t};
/// `chained` uses C log2 x, V log2 x (theta-chained sets).
struct EKParams {
    double x, t;
    double mu, sigma2;

    static EKParams dense(double x, double t);
    static EKParams chained(double x);
    static EKParams fixed(double mu, double sigma2);
};

/// log log x
double log2x(double x);

EmpiricalDistribution collect_nu(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads = 1);

/// sup_y |F(y) - Phi(y)| with F(y) = #{nu <= mu + y sigma}/n, exact over the jump points.
double ks_distance(const EmpiricalDistribution& dist, const EKParams& params);

/// Reference parameters for a rule: dense(x, t) for DenseT, chained(x) otherwise.
EKParams reference_params(const ThetaRule& rule, double x);

struct CharRatio {
    cplx exact;      // sum z^nu / count
    cplx predicted;  // model without the unknown constant factor
    cplx lambda;     // exact / predicted
};

/// D(x,t,z)/D(x,t) against (log x)^{1+s0} (log t)^{z-2-s0}.
CharRatio char_ratio_D(u64 x, double t, double phi, NuMode mode, unsigned threads = 1);
/// B(x,z)/B(x) against lambda_z (log x)^{1+s0}; lambda is the fitted factor.
CharRatio char_ratio_B(const ThetaRule& rule, u64 x, double phi, NuMode mode, unsigned threads = 1);
/// Same ratios from an already collected histogram.
CharRatio char_ratio_from(const NuHistogram& hist, const ThetaRule& rule, double x, double phi, NuMode mode);

/// Least-squares slope of log|r| against log log x.
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& abs_ratios);

struct MomentsReport {
    u64 n;
    double mean, variance;
    double mu_ref, sigma2_ref;
    double drift;            // mean - mu_ref
    double variance_ratio;   // variance / sigma2_ref
    double var_per_log2x;    // variance / log log x
    u64 tail_count;          // #{|nu - mean| >= 3 sd}
    double chebyshev_bound;  // n / 9
};

MomentsReport moments_report(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads = 1);
MomentsReport moments_from(const EmpiricalDistribution& dist, const ThetaRule& rule, double x);

struct SiftedCompare {
    cplx exact;
    cplx main_terms;
    double rel_err;
};

/// Direct Phi_nu(x, y, z) against (x w_z(u) - z y)/log y - x e^{-gamma z} u^{z-2}/(Gamma(z-1) log^2 y).
SiftedCompare sifted_compare(double x, double y, double phi, NuMode mode);
/// Main terms alone.
cplx sifted_main_terms(double x, double y, cplx z);

/// Both sides of sum_{m<=x} z^nu(m) = sum_{n in B(x)} z^nu(n) Phi_nu(x/n, theta(n), z).
struct FuncEqSides {
    cplx lhs, rhs;
};
std::vector<FuncEqSides> funceq_sides(const ThetaRule& rule, u64 x, const std::vector<cplx>& zs, NuMode mode);

// ---------------------------------------------------------------------------
// Reports

struct EKRow {
    double x, t;
    NuMode mode;
    u64 n_samples;
    double mean, mu_ref, variance, sigma2_ref, ks;
};

EKRow ek_row(const ThetaRule& rule, u64 x, NuMode mode, unsigned threads = 1);
std::string ek_csv_header();
std::string ek_csv_line(const EKRow& row);

/// SHA-1 of "blob <len>\0<text>", as git prints it.
std::string git_blob_hash(const std::string& text);

/// {"config": ..., "config_hash": ..., "rows": [...]} with the hash over the
/// compact config text.
std::string run_manifest(const std::string& config_json, const std::vector<EKRow>& rows);

}  // namespace densediv
