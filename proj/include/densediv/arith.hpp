#pragma once

// Integer side: factorizations, divisor chains, membership oracles,
// enumeration of chained sets B_theta(x) and exact sifted sums.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace densediv {

using u64 = std::uint64_t;
using u32 = std::uint32_t;
using cplx = std::complex<double>;

enum class NuMode { BigOmega, SmallOmega };

const char* to_string(NuMode mode);
std::optional<NuMode> parse_nu_mode(const std::string& text);

struct PrimePower {
    u64 prime;
    u32 exponent;
    bool operator==(const PrimePower&) const = default;
};

class FactoredInteger {
public:
    FactoredInteger() = default;  // the integer 1
    /// Validates the factor list (ascending primes, exponents >= 1, product == value).
    FactoredInteger(u64 value, std::vector<PrimePower> factors);

    u64 value() const noexcept { return value_; }
    const std::vector<PrimePower>& factors() const noexcept { return factors_; }
    u32 big_omega() const noexcept { return big_omega_; }
    u32 small_omega() const noexcept { return small_omega_; }
    u32 nu(NuMode mode) const noexcept { return mode == NuMode::BigOmega ? big_omega_ : small_omega_; }
    /// Largest prime factor, 1 for n = 1.
    u64 largest_prime() const noexcept { return factors_.empty() ? 1 : factors_.back().prime; }
    /// Smallest prime factor, 0 standing in for +infinity when n = 1.
    u64 smallest_prime() const noexcept { return factors_.empty() ? 0 : factors_.front().prime; }

    bool operator==(const FactoredInteger&) const = default;

private:
    u64 value_ = 1;
    std::vector<PrimePower> factors_;
    u32 big_omega_ = 0;
    u32 small_omega_ = 0;
};

constexpr u64 kMaxFactorizable = u64{1} << 63;

/// Total on [1, 2^63].
FactoredInteger factorize(u64 n);

constexpr u64 kDefaultDivisorCap = 100000;
constexpr u64 kDefaultPracticalOracleCap = 1000000;

/// Throws ErrorCode::Budget if tau(n) exceeds `cap`.
std::vector<u64> divisors_sorted(const FactoredInteger& n, u64 cap = kDefaultDivisorCap);

/// max d_{j+1}/d_j over consecutive divisors; Domain error for n = 1.
double max_divisor_ratio(const FactoredInteger& n);

/// floor(t * n) computed exactly from the binary value of t, saturating at 2^64-1.
u64 floor_mul(double t, u64 n);

/// View of a factorization prefix p_1^a_1 ... p_k^a_k during chain walks.
struct Prefix {
    u64 value;
    u64 sigma;  // sum of divisors, saturating
    std::span<const PrimePower> factors;
};

/// The chain-bound function theta selecting B_theta.
class ThetaRule {
public:
    enum class Kind { DenseT, Practical, Custom };
    using CustomFn = std::function<double(const FactoredInteger&)>;

    /// theta(n) = n t; requires finite t >= 2.
    static ThetaRule dense(double t);
    /// theta(n) = 1 + sigma(n).
    static ThetaRule practical();
    /// Arbitrary theta; +infinity means "no bound". theta(1) >= 2 and
    /// theta(n) >= P+(n) are checked as prefixes are visited.
    static ThetaRule custom(std::string tag, CustomFn theta);

    Kind kind() const noexcept { return kind_; }
    double t() const noexcept { return t_; }
    const std::string& tag() const noexcept { return tag_; }
    std::string describe() const;

    /// theta(n) as an extended real.
    double eval(const FactoredInteger& n) const;
    /// floor(theta(prefix)), saturating; throws InvalidArgument when the
    /// rule violates theta(1) >= 2 or theta(n) >= P+(n).
    u64 bound(const Prefix& prefix) const;

private:
    ThetaRule(Kind kind, double t, std::string tag, CustomFn fn)
        : kind_(kind), t_(t), tag_(std::move(tag)), fn_(std::move(fn)) {}

    Kind kind_;
    double t_;
    std::string tag_;
    CustomFn fn_;
};

/// Chain condition p_i <= theta(p_1^a_1 ... p_{i-1}^a_{i-1}) for every i.
bool is_member(const FactoredInteger& n, const ThetaRule& rule);

/// max_divisor_ratio(n) <= t, computed from the sorted divisor list.
bool is_t_dense_oracle(const FactoredInteger& n, double t);

/// Every m <= n is a sum of distinct divisors of n (subset-sum DP).
bool is_practical_oracle(u64 n, u64 cap = kDefaultPracticalOracleCap);

// ---------------------------------------------------------------------------
// Enumeration

constexpr u64 kEnumerationCeiling = 1000000000;

/// Joint histogram of (Omega, omega) over a set of integers.
class NuHistogram {
public:
    static constexpr int kMaxBig = 64;
    static constexpr int kMaxSmall = 16;

    void add(u32 big, u32 small, u64 count = 1) { counts_[big][small] += count; }
    void merge(const NuHistogram& other);

    u64 at(u32 big, u32 small) const { return counts_[big][small]; }
    u64 total() const;
    /// counts indexed by nu value, trailing zeros trimmed
    std::vector<u64> marginal(NuMode mode) const;
    /// sum over the set of z^{nu(n)}
    cplx sum_z(cplx z, NuMode mode) const;

    bool operator==(const NuHistogram&) const = default;

private:
    std::array<std::array<u64, kMaxSmall>, kMaxBig> counts_{};
};

/// Sorted B_theta(x).
std::vector<FactoredInteger> enumerate_B(const ThetaRule& rule, u64 x);

/// Sorted members of B_theta inside [lo, hi].
std::vector<FactoredInteger> enumerate_B_range(const ThetaRule& rule, u64 lo, u64 hi);

/// Unsorted traversal with a callback per member (no buffering).
void for_each_member(const ThetaRule& rule, u64 x, const std::function<void(const FactoredInteger&)>& fn);

/// Ascending stream over B_theta(x) produced segment by segment.
class MemberStream {
public:
    MemberStream(ThetaRule rule, u64 x, u64 start = 1, u64 segment_width = 0);
    std::optional<FactoredInteger> next();

private:
    void refill();

    ThetaRule rule_;
    u64 x_;
    u64 cursor_;  // next value not yet covered by a segment
    u64 width_;
    std::vector<FactoredInteger> buffer_;
    std::size_t pos_ = 0;
};

/// (Omega, omega) histogram of B_theta(x); leaves are counted in bulk.
/// Subtrees below the first prime power are distributed over `threads` workers.
NuHistogram nu_histogram(const ThetaRule& rule, u64 x, unsigned threads = 1);

u64 count_B(const ThetaRule& rule, u64 x, unsigned threads = 1);

/// D(x, t) = |D(x, t)|.
u64 count_D(u64 x, double t, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Sifted sums

constexpr u64 kSieveBudget = 10000000000ULL;

/// (Omega, omega) histogram of {n <= x : P-(n) > y}, n = 1 included.
NuHistogram sifted_histogram(double x, double y);

/// Phi_nu(x, y, z) = sum_{n <= x, P-(n) > y} z^{nu(n)}.
cplx direct_sifted_sum(double x, double y, cplx z, NuMode mode);

// ---------------------------------------------------------------------------
// Checkpoint lines: "<value> <p:e,...> <Omega> <omega>", '-' for n = 1.

std::string format_checkpoint_line(const FactoredInteger& n);
FactoredInteger parse_checkpoint_line(const std::string& line);
struct CheckpointTail {
    u64 value;            // value on the last intact line
    std::int64_t bytes;   // file length up to and including that line
};
/// Last intact line of a checkpoint file; a partially written final line is
/// ignored so the caller can truncate to `bytes` and resume after `value`.
std::optional<CheckpointTail> last_checkpoint(const std::string& path);

}  // namespace densediv
