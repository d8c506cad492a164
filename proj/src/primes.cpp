#include "densediv/primes.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "densediv/error.hpp"

namespace densediv {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

PrimeTable::PrimeTable(u64 limit) : limit_(std::max<u64>(limit, 2)) {
    const u64 nbits = (limit_ - 1) / 2 + 1;  // indices 0..(limit-1)/2
    const u64 nwords = (nbits + 63) / 64;
    bits_.assign(nwords, ~0ULL);
    if (nbits % 64) bits_.back() &= (1ULL << (nbits % 64)) - 1;
    bits_[0] &= ~1ULL;  // 1 is not prime

    // small odd primes up to sqrt(limit) by a plain sieve
    const u64 root = isqrt(limit_);
    std::vector<char> small(root + 1, 1);
    std::vector<u64> base;
    for (u64 i = 3; i <= root; i += 2) {
        if (!small[i]) continue;
        base.push_back(i);
        for (u64 j = i * i; j <= root; j += 2 * i) small[j] = 0;
    }

    // segmented clearing, 2^18 bits per segment
    constexpr u64 kSeg = u64{1} << 18;
    std::vector<u64> next(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) next[k] = (base[k] * base[k] - 1) / 2;
    for (u64 seg = 0; seg < nbits; seg += kSeg) {
        const u64 end = std::min(nbits, seg + kSeg);
        for (std::size_t k = 0; k < base.size(); ++k) {
            u64 i = next[k];
            const u64 p = base[k];
            for (; i < end; i += p) bits_[i >> 6] &= ~(1ULL << (i & 63));
            next[k] = i;
        }
    }

    prefix_.resize(nwords + 1);
    prefix_[0] = 0;
    for (u64 w = 0; w < nwords; ++w)
        prefix_[w + 1] = prefix_[w] + static_cast<std::uint32_t>(__builtin_popcountll(bits_[w]));
}

bool PrimeTable::is_prime(u64 n) const {
    if (n > limit_) return is_prime_u64(n);
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    const u64 i = n / 2;
    return (bits_[i >> 6] >> (i & 63)) & 1;
}

u64 PrimeTable::pi(u64 n) const {
    if (n > limit_) fail(ErrorCode::Internal, "PrimeTable::pi beyond table limit");
    if (n < 2) return 0;
    const u64 last = (n - 1) / 2;  // highest odd index <= n
    const u64 w = last >> 6;
    const u64 mask = (last & 63) == 63 ? ~0ULL : ((2ULL << (last & 63)) - 1);
    return 1 + prefix_[w] + static_cast<u64>(__builtin_popcountll(bits_[w] & mask));
}

u64 PrimeTable::next_prime(u64 n) const {
    u64 found = 0;
    if (n < 2) return limit_ >= 2 ? 2 : 0;
    // scan a word at a time
    u64 i = n / 2 + 1;  // first odd index with 2i+1 > n
    const u64 nbits = (limit_ - 1) / 2 + 1;
    while (i < nbits) {
        const u64 w = i >> 6;
        const u64 word = bits_[w] & (~0ULL << (i & 63));
        if (word) {
            found = ((w << 6) + static_cast<u64>(__builtin_ctzll(word))) * 2 + 1;
            break;
        }
        i = (w + 1) << 6;
    }
    return found <= limit_ ? found : 0;
}

std::vector<std::uint32_t> PrimeTable::primes_up_to(u64 n) const {
    std::vector<std::uint32_t> out;
    if (n >= 2) out.reserve(static_cast<std::size_t>(pi(std::min(n, limit_))));
    for_each_prime(0, n, [&](u64 p) { out.push_back(static_cast<std::uint32_t>(p)); });
    return out;
}

std::shared_ptr<const PrimeTable> prime_table(u64 limit) {
    static std::mutex mu;
    static std::shared_ptr<const PrimeTable> cached;
    std::lock_guard<std::mutex> lock(mu);
    if (!cached || cached->limit() < limit) {
        // round up so that slowly increasing requests do not rebuild every time
        const u64 grown = cached ? std::max(limit, cached->limit() * 2) : std::max<u64>(limit, 1u << 16);
        cached = std::make_shared<const PrimeTable>(grown);
    }
    return cached;
}

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

u64 pollard_rho(u64 n) {
    if (n % 2 == 0) return 2;
    // Brent's variant with a fixed sequence of constants
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        constexpr u64 m = 128;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime_u64(n)) {
        out.push_back(n);
        return;
    }
    const u64 d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<u64> prime_factors_u64(u64 n) {
    std::vector<u64> out;
    if (n <= 1) return out;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL, 41ULL, 43ULL, 47ULL}) {
        while (n % p == 0) {
            out.push_back(p);
            n /= p;
        }
    }
    // cheap trial division by odd numbers catches most desk-scale inputs
    for (u64 d = 53; d <= 10000 && d * d <= n; d += 2) {
        while (n % d == 0) {
            out.push_back(d);
            n /= d;
        }
    }
    factor_into(n, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace densediv
