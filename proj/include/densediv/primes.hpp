#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace densediv {

/// Odd-only prime bitset over [1, limit] with a per-word prefix count, so
/// pi(n) and interval counts are O(1).
class PrimeTable {
public:
    explicit PrimeTable(std::uint64_t limit);

    std::uint64_t limit() const noexcept { return limit_; }
    bool is_prime(std::uint64_t n) const;
    /// Number of primes <= n; n must not exceed limit().
    std::uint64_t pi(std::uint64_t n) const;
    /// Number of primes in (lo, hi].
    std::uint64_t count(std::uint64_t lo, std::uint64_t hi) const { return hi <= lo ? 0 : pi(hi) - pi(lo); }
    /// Smallest prime > n, or 0 if none <= limit().
    std::uint64_t next_prime(std::uint64_t n) const;

    template <class F>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const;  // primes in (lo, hi]

    std::vector<std::uint32_t> primes_up_to(std::uint64_t n) const;

private:
    std::uint64_t limit_;
    std::vector<std::uint64_t> bits_;   // bit i <-> 2i+1
    std::vector<std::uint32_t> prefix_; // primes among bits of words [0, w)
};

/// Shared table covering at least [1, limit]; grows (never shrinks) on demand.
std::shared_ptr<const PrimeTable> prime_table(std::uint64_t limit);

/// Deterministic Miller-Rabin for all 64-bit n.
bool is_prime_u64(std::uint64_t n);

/// Prime factors with multiplicity, ascending.
std::vector<std::uint64_t> prime_factors_u64(std::uint64_t n);

template <class F>
void PrimeTable::for_each_prime(std::uint64_t lo, std::uint64_t hi, F&& f) const {
    if (hi > limit_) hi = limit_;
    if (hi <= lo) return;
    if (lo < 2 && hi >= 2) f(std::uint64_t{2});
    // odd candidates 2i+1 in (lo, hi]
    std::uint64_t first = lo < 2 ? 1 : (lo % 2 == 0 ? lo / 2 : lo / 2 + 1);
    std::uint64_t last = (hi - 1) / 2;
    if (first > last) return;
    std::uint64_t w = first >> 6;
    std::uint64_t word = bits_[w] & (~0ULL << (first & 63));
    const std::uint64_t wlast = last >> 6;
    for (;;) {
        if (w == wlast) word &= (last & 63) == 63 ? ~0ULL : ((2ULL << (last & 63)) - 1);
        while (word) {
            const int b = __builtin_ctzll(word);
            f(((w << 6) + static_cast<std::uint64_t>(b)) * 2 + 1);
            word &= word - 1;
        }
        if (w == wlast) break;
        word = bits_[++w];
    }
}

}  // namespace densediv
