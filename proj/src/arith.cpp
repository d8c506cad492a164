#include "densediv/arith.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "densediv/error.hpp"
#include "densediv/primes.hpp"

namespace densediv {

namespace {

using u128 = unsigned __int128;
constexpr u64 kSat = std::numeric_limits<u64>::max();

u64 sat_mul(u64 a, u64 b) {
    const u128 p = static_cast<u128>(a) * b;
    return p > kSat ? kSat : static_cast<u64>(p);
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

const char* to_string(NuMode mode) { return mode == NuMode::BigOmega ? "Omega" : "omega"; }

std::optional<NuMode> parse_nu_mode(const std::string& text) {
    if (text == "Omega" || text == "big" || text == "bigomega" || text == "BigOmega") return NuMode::BigOmega;
    if (text == "omega" || text == "small" || text == "smallomega" || text == "SmallOmega") return NuMode::SmallOmega;
    return std::nullopt;
}

// ---------------------------------------------------------------------------

FactoredInteger::FactoredInteger(u64 value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)) {
    require(value_ >= 1, "FactoredInteger: value must be >= 1");
    u128 product = 1;
    u64 prev = 1;
    for (const auto& [p, e] : factors_) {
        require(p > prev, "FactoredInteger: primes must be strictly increasing");
        require(e >= 1, "FactoredInteger: exponents must be >= 1");
        for (u32 i = 0; i < e; ++i) {
            product *= p;
            require(product <= value_, "FactoredInteger: product of factors exceeds value");
        }
        big_omega_ += e;
        prev = p;
    }
    require(product == value_, "FactoredInteger: product of factors differs from value");
    small_omega_ = static_cast<u32>(factors_.size());
}

FactoredInteger factorize(u64 n) {
    require(n >= 1 && n <= kMaxFactorizable, "factorize: n must lie in [1, 2^63]");
    std::vector<PrimePower> out;
    for (u64 p : prime_factors_u64(n)) {
        if (!out.empty() && out.back().prime == p)
            ++out.back().exponent;
        else
            out.push_back({p, 1});
    }
    return FactoredInteger(n, std::move(out));
}

std::vector<u64> divisors_sorted(const FactoredInteger& n, u64 cap) {
    u64 tau = 1;
    for (const auto& pe : n.factors()) {
        tau = sat_mul(tau, pe.exponent + 1);
        if (tau > cap) fail(ErrorCode::Budget, "divisors_sorted: tau(n) exceeds divisor cap");
    }
    std::vector<u64> divs{1};
    divs.reserve(tau);
    for (const auto& [p, e] : n.factors()) {
        const std::size_t base = divs.size();
        u64 pk = 1;
        for (u32 k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

double max_divisor_ratio(const FactoredInteger& n) {
    if (n.value() < 2) fail(ErrorCode::Domain, "max_divisor_ratio: undefined for n = 1");
    const auto divs = divisors_sorted(n);
    u64 num = divs[1], den = divs[0];
    for (std::size_t j = 1; j + 1 < divs.size(); ++j) {
        // divs[j+1]/divs[j] > num/den ?
        if (static_cast<u128>(divs[j + 1]) * den > static_cast<u128>(num) * divs[j]) {
            num = divs[j + 1];
            den = divs[j];
        }
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

u64 floor_mul(double t, u64 n) {
    require(std::isfinite(t) && t >= 0, "floor_mul: t must be finite and non-negative");
    if (t == 0 || n == 0) return 0;
    int e = 0;
    const double m = std::frexp(t, &e);  // t = m 2^e, m in [0.5, 1)
    const u64 mant = static_cast<u64>(std::ldexp(m, 53));
    const u128 prod = static_cast<u128>(mant) * n;  // < 2^117
    const int shift = e - 53;
    if (shift >= 0) {
        if (shift >= 64) return kSat;
        if (prod > (static_cast<u128>(kSat) >> shift)) return kSat;
        return static_cast<u64>(prod << shift);
    }
    if (-shift >= 128) return 0;
    const u128 q = prod >> (-shift);
    return q > kSat ? kSat : static_cast<u64>(q);
}

// ---------------------------------------------------------------------------

ThetaRule ThetaRule::dense(double t) {
    require(std::isfinite(t) && t >= 2.0, "dense rule requires finite t >= 2");
    return ThetaRule(Kind::DenseT, t, "dense", {});
}

ThetaRule ThetaRule::practical() { return ThetaRule(Kind::Practical, 0.0, "practical", {}); }

ThetaRule ThetaRule::custom(std::string tag, CustomFn theta) {
    require(static_cast<bool>(theta), "custom rule requires a callable");
    return ThetaRule(Kind::Custom, 0.0, std::move(tag), std::move(theta));
}

std::string ThetaRule::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::DenseT: os.precision(17); os << "dense(t=" << t_ << ")"; break;
        case Kind::Practical: os << "practical"; break;
        case Kind::Custom: os << "custom(" << tag_ << ")"; break;
    }
    return os.str();
}

double ThetaRule::eval(const FactoredInteger& n) const {
    switch (kind_) {
        case Kind::DenseT: return t_ * static_cast<double>(n.value());
        case Kind::Practical: {
            double sigma = 1.0;
            for (const auto& [p, e] : n.factors()) {
                double term = 1.0, pk = 1.0;
                for (u32 i = 0; i < e; ++i) {
                    pk *= static_cast<double>(p);
                    term += pk;
                }
                sigma *= term;
            }
            return 1.0 + sigma;
        }
        case Kind::Custom: return fn_(n);
    }
    return 0.0;
}

u64 ThetaRule::bound(const Prefix& prefix) const {
    switch (kind_) {
        case Kind::DenseT: return floor_mul(t_, prefix.value);
        case Kind::Practical: return prefix.sigma == kSat ? kSat : prefix.sigma + 1;
        case Kind::Custom: break;
    }
    const FactoredInteger n(prefix.value, std::vector<PrimePower>(prefix.factors.begin(), prefix.factors.end()));
    const double v = fn_(n);
    if (std::isnan(v)) fail(ErrorCode::InvalidArgument, "custom theta returned NaN");
    const u64 b = v >= 18446744073709551615.0 ? kSat : (v <= 0 ? 0 : static_cast<u64>(std::floor(v)));
    if (prefix.value == 1 && b < 2)
        fail(ErrorCode::InvalidArgument, "theta rule violates theta(1) >= 2 (" + tag_ + ")");
    if (prefix.value > 1 && b < n.largest_prime())
        fail(ErrorCode::InvalidArgument,
             "theta rule violates theta(n) >= P+(n) at n = " + std::to_string(prefix.value) + " (" + tag_ + ")");
    return b;
}

bool is_member(const FactoredInteger& n, const ThetaRule& rule) {
    u64 value = 1, sigma = 1;
    const auto& f = n.factors();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Prefix prefix{value, sigma, std::span<const PrimePower>(f.data(), i)};
        if (f[i].prime > rule.bound(prefix)) return false;
        u64 pk = 1, s = 1;
        for (u32 k = 0; k < f[i].exponent; ++k) {
            pk = sat_mul(pk, f[i].prime);
            s = s == kSat || pk == kSat ? kSat : s + pk;
        }
        value *= pk;
        sigma = sat_mul(sigma, s);
    }
    return true;
}

bool is_t_dense_oracle(const FactoredInteger& n, double t) {
    require(t >= 2.0, "is_t_dense_oracle requires t >= 2");
    if (n.value() == 1) return true;
    const auto divs = divisors_sorted(n);
    for (std::size_t j = 0; j + 1 < divs.size(); ++j)
        if (divs[j + 1] > floor_mul(t, divs[j])) return false;
    return true;
}

bool is_practical_oracle(u64 n, u64 cap) {
    require(n >= 1, "is_practical_oracle requires n >= 1");
    if (n > cap) fail(ErrorCode::Budget, "is_practical_oracle: n exceeds oracle cap");
    const auto divs = divisors_sorted(factorize(n));
    // reach[m] set iff m is a sum of distinct divisors seen so far
    const std::size_t words = static_cast<std::size_t>(n / 64 + 1);
    std::vector<u64> reach(words, 0), shifted(words);
    reach[0] = 1;
    for (u64 d : divs) {
        const std::size_t ws = static_cast<std::size_t>(d / 64);
        const unsigned bs = static_cast<unsigned>(d % 64);
        std::fill(shifted.begin(), shifted.end(), 0);
        for (std::size_t i = words; i-- > ws;) {
            u64 v = reach[i - ws] << bs;
            if (bs && i > ws) v |= reach[i - ws - 1] >> (64 - bs);
            shifted[i] = v;
        }
        for (std::size_t i = 0; i < words; ++i) reach[i] |= shifted[i];
    }
    for (u64 m = 1; m <= n; ++m)
        if (!((reach[m / 64] >> (m % 64)) & 1)) return false;
    return true;
}

// ---------------------------------------------------------------------------

void NuHistogram::merge(const NuHistogram& other) {
    for (int b = 0; b < kMaxBig; ++b)
        for (int s = 0; s < kMaxSmall; ++s) counts_[b][s] += other.counts_[b][s];
}

u64 NuHistogram::total() const {
    u64 t = 0;
    for (const auto& row : counts_)
        for (u64 c : row) t += c;
    return t;
}

std::vector<u64> NuHistogram::marginal(NuMode mode) const {
    std::vector<u64> out(mode == NuMode::BigOmega ? kMaxBig : kMaxSmall, 0);
    for (int b = 0; b < kMaxBig; ++b)
        for (int s = 0; s < kMaxSmall; ++s) out[mode == NuMode::BigOmega ? b : s] += counts_[b][s];
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}

cplx NuHistogram::sum_z(cplx z, NuMode mode) const {
    const auto m = marginal(mode);
    cplx acc = 0, zk = 1;
    for (u64 c : m) {
        acc += static_cast<double>(c) * zk;
        zk *= z;
    }
    return acc;
}

namespace {

/// Depth-first walk over factorization prefixes. Members are nodes of the
/// tree; children append a prime p > P+(n) with p <= theta(n). Primes
/// p > sqrt(x/n) end the chain and are handed to the visitor as ranges.
template <class Visitor>
class ChainWalker {
public:
    ChainWalker(const ThetaRule& rule, u64 lo, u64 hi, const PrimeTable& table, Visitor& visitor)
        : rule_(rule), lo_(lo), hi_(hi), table_(table), visitor_(visitor) {}

    void run() {
        if (lo_ <= 1) visitor_.member(1, 0, 0, {});
        walk(1, 1, 0, 0, 1);
    }

    /// Root-level internal primes; used to build parallel tasks.
    template <class F>
    void root_internal_primes(F&& f) const {
        const u64 lim = std::min(root_bound(), hi_);
        table_.for_each_prime(1, std::min(lim, isqrt(hi_)), f);
    }

    void root_leaves() {
        const u64 lim = std::min(root_bound(), hi_);
        leaves(1, 0, 0, std::max<u64>(1, isqrt(hi_)), lim);
    }

    /// Subtree rooted at p^e.
    void run_power(u64 p, u32 e) {
        u64 m = 1, sigma = 1, pk = 1;
        for (u32 i = 0; i < e; ++i) {
            pk *= p;
            m *= p;
            sigma += pk;
        }
        stack_.push_back({p, e});
        if (m >= lo_) visitor_.member(m, e, 1, stack_);
        walk(m, sigma, e, 1, p);
        stack_.pop_back();
    }

private:
    u64 root_bound() const { return rule_.bound(Prefix{1, 1, {}}); }

    void leaves(u64 n, u32 big, u32 small, u64 from, u64 lim) {
        // members n*p for primes p in (from, lim] with n*p >= lo
        if (n < lo_) from = std::max(from, (lo_ - 1) / n);  // p >= ceil(lo/n)
        if (lim <= from) return;
        const u64 cnt = table_.count(from, lim);
        if (cnt) visitor_.leaves(n, big + 1, small + 1, std::span<const PrimePower>(stack_), from, lim, cnt);
    }

    void walk(u64 n, u64 sigma, u32 big, u32 small, u64 last_p) {
        const u64 theta = rule_.bound(Prefix{n, sigma, stack_});
        const u64 xn = hi_ / n;
        const u64 lim = std::min(theta, xn);
        if (lim <= last_p) return;
        const u64 root = isqrt(xn);
        const u64 internal_hi = std::min(lim, root);
        if (internal_hi > last_p) {
            table_.for_each_prime(last_p, internal_hi, [&](u64 p) {
                u64 m = n, pk = 1, sp = 1;
                u32 e = 0;
                while (m <= hi_ / p) {
                    m *= p;
                    pk *= p;
                    sp += pk;
                    ++e;
                    stack_.push_back({p, e});
                    if (m >= lo_) visitor_.member(m, big + e, small + 1, stack_);
                    walk(m, sat_mul(sigma, sp), big + e, small + 1, p);
                    stack_.pop_back();
                }
            });
        }
        leaves(n, big, small, std::max(last_p, root), lim);
    }

    const ThetaRule& rule_;
    u64 lo_, hi_;
    const PrimeTable& table_;
    Visitor& visitor_;
    std::vector<PrimePower> stack_;
};

struct HistogramVisitor {
    NuHistogram hist;
    void member(u64, u32 big, u32 small, std::span<const PrimePower>) { hist.add(big, small); }
    void leaves(u64, u32 big, u32 small, std::span<const PrimePower>, u64, u64, u64 count) {
        hist.add(big, small, count);
    }
};

struct CallbackVisitor {
    const PrimeTable& table;
    const std::function<void(const FactoredInteger&)>& fn;
    std::vector<PrimePower> scratch;

    void member(u64 value, u32, u32, std::span<const PrimePower> factors) {
        fn(FactoredInteger(value, std::vector<PrimePower>(factors.begin(), factors.end())));
    }
    void leaves(u64 n, u32, u32, std::span<const PrimePower> prefix, u64 from, u64 lim, u64) {
        scratch.assign(prefix.begin(), prefix.end());
        scratch.push_back({0, 1});
        table.for_each_prime(from, lim, [&](u64 p) {
            scratch.back().prime = p;
            fn(FactoredInteger(n * p, scratch));
        });
    }
};

void check_range(u64 x) {
    require(x >= 1, "enumeration requires x >= 1");
    if (x > kEnumerationCeiling)
        fail(ErrorCode::Budget, "enumeration bound x exceeds the 1e9 ceiling");
}

}  // namespace

void for_each_member(const ThetaRule& rule, u64 x, const std::function<void(const FactoredInteger&)>& fn) {
    check_range(x);
    const auto table = prime_table(x);
    CallbackVisitor visitor{*table, fn, {}};
    ChainWalker<CallbackVisitor> walker(rule, 1, x, *table, visitor);
    walker.run();
}

std::vector<FactoredInteger> enumerate_B_range(const ThetaRule& rule, u64 lo, u64 hi) {
    check_range(hi);
    std::vector<FactoredInteger> out;
    if (lo > hi) return out;
    const auto table = prime_table(hi);
    const std::function<void(const FactoredInteger&)> push = [&](const FactoredInteger& n) { out.push_back(n); };
    CallbackVisitor visitor{*table, push, {}};
    ChainWalker<CallbackVisitor> walker(rule, std::max<u64>(lo, 1), hi, *table, visitor);
    walker.run();
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value() < b.value(); });
    return out;
}

std::vector<FactoredInteger> enumerate_B(const ThetaRule& rule, u64 x) { return enumerate_B_range(rule, 1, x); }

MemberStream::MemberStream(ThetaRule rule, u64 x, u64 start, u64 segment_width)
    : rule_(std::move(rule)), x_(x), cursor_(std::max<u64>(start, 1)), width_(segment_width) {
    check_range(x);
    if (width_ == 0) width_ = std::max<u64>(u64{1} << 20, x / 64);
}

void MemberStream::refill() {
    buffer_.clear();
    pos_ = 0;
    while (buffer_.empty() && cursor_ <= x_) {
        const u64 hi = std::min(x_, cursor_ + width_ - 1);
        buffer_ = enumerate_B_range(rule_, cursor_, hi);
        cursor_ = hi + 1;
    }
}

std::optional<FactoredInteger> MemberStream::next() {
    if (pos_ >= buffer_.size()) refill();
    if (pos_ >= buffer_.size()) return std::nullopt;
    return std::move(buffer_[pos_++]);
}

NuHistogram nu_histogram(const ThetaRule& rule, u64 x, unsigned threads) {
    check_range(x);
    const auto table = prime_table(x);
    HistogramVisitor main_visitor;
    ChainWalker<HistogramVisitor> main_walker(rule, 1, x, *table, main_visitor);
    if (threads <= 1) {
        main_walker.run();
        return main_visitor.hist;
    }
    // split by the first prime power p^e
    std::vector<std::pair<u64, u32>> tasks;
    main_walker.root_internal_primes([&](u64 p) {
        u64 m = 1;
        u32 e = 0;
        while (m <= x / p) {
            m *= p;
            tasks.push_back({p, ++e});
        }
    });
    main_visitor.member(1, 0, 0, {});
    main_walker.root_leaves();

    std::atomic<std::size_t> next{0};
    std::vector<NuHistogram> partial(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                HistogramVisitor v;
                ChainWalker<HistogramVisitor> walker(rule, 1, x, *table, v);
                for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) walker.run_power(tasks[i].first, tasks[i].second);
                partial[w] = v.hist;
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& h : partial) main_visitor.hist.merge(h);
    return main_visitor.hist;
}

u64 count_B(const ThetaRule& rule, u64 x, unsigned threads) { return nu_histogram(rule, x, threads).total(); }

u64 count_D(u64 x, double t, unsigned threads) { return count_B(ThetaRule::dense(t), x, threads); }

// ---------------------------------------------------------------------------

NuHistogram sifted_histogram(double x, double y) {
    require(x >= 1 && y >= 1, "sifted sum requires x >= 1 and y >= 1");
    if (x >= static_cast<double>(kSieveBudget) + 1)
        fail(ErrorCode::Budget, "sifted sum: x exceeds the sieve budget");
    const u64 X = static_cast<u64>(std::floor(x));
    const u64 Y = y >= static_cast<double>(X) ? X : static_cast<u64>(std::floor(y));
    NuHistogram hist;
    hist.add(0, 0);  // n = 1
    if (Y >= X) return hist;

    const u64 root = isqrt(X);
    const auto base = prime_table(std::max<u64>(root, 2))->primes_up_to(root);

    constexpr u64 kSeg = u64{1} << 16;
    std::vector<u64> rem(kSeg);
    std::vector<std::uint8_t> big(kSeg), small(kSeg), alive(kSeg);
    for (u64 lo = 2; lo <= X; lo += kSeg) {
        const u64 hi = std::min(X, lo + kSeg - 1);
        const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
        for (std::size_t i = 0; i < len; ++i) {
            rem[i] = lo + i;
            big[i] = small[i] = 0;
            alive[i] = 1;
        }
        for (u64 p : base) {
            u64 start = (lo + p - 1) / p * p;
            if (p <= Y) {
                for (u64 m = start; m <= hi; m += p) alive[m - lo] = 0;
            } else {
                for (u64 m = start; m <= hi; m += p) {
                    const std::size_t i = static_cast<std::size_t>(m - lo);
                    if (!alive[i]) continue;
                    u64 q = rem[i] / p;
                    unsigned e = 1;
                    while (q % p == 0) {
                        q /= p;
                        ++e;
                    }
                    rem[i] = q;
                    big[i] = static_cast<std::uint8_t>(big[i] + e);
                    small[i] = static_cast<std::uint8_t>(small[i] + 1);
                }
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            if (!alive[i]) continue;
            if (rem[i] > 1) {
                // remaining cofactor is a prime > sqrt(X)
                if (rem[i] <= Y) continue;
                ++big[i];
                ++small[i];
            }
            hist.add(big[i], small[i]);
        }
    }
    return hist;
}

cplx direct_sifted_sum(double x, double y, cplx z, NuMode mode) {
    require(std::abs(z) <= 2.0, "direct_sifted_sum requires |z| <= 2");
    return sifted_histogram(x, y).sum_z(z, mode);
}

// ---------------------------------------------------------------------------

std::string format_checkpoint_line(const FactoredInteger& n) {
    std::string line = std::to_string(n.value()) + ' ';
    if (n.factors().empty()) {
        line += '-';
    } else {
        bool first = true;
        for (const auto& [p, e] : n.factors()) {
            if (!first) line += ',';
            first = false;
            line += std::to_string(p) + ':' + std::to_string(e);
        }
    }
    line += ' ' + std::to_string(n.big_omega()) + ' ' + std::to_string(n.small_omega());
    return line;
}

FactoredInteger parse_checkpoint_line(const std::string& line) {
    std::istringstream is(line);
    u64 value = 0;
    std::string factors;
    u32 big = 0, small = 0;
    if (!(is >> value >> factors >> big >> small)) fail(ErrorCode::Io, "malformed checkpoint line: " + line);
    std::vector<PrimePower> pf;
    if (factors != "-") {
        std::istringstream fs(factors);
        std::string item;
        while (std::getline(fs, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) fail(ErrorCode::Io, "malformed factor '" + item + "'");
            pf.push_back({std::stoull(item.substr(0, colon)), static_cast<u32>(std::stoul(item.substr(colon + 1)))});
        }
    }
    FactoredInteger n;
    try {
        n = FactoredInteger(value, std::move(pf));
    } catch (const Error& e) {
        fail(ErrorCode::Io, std::string("inconsistent checkpoint line: ") + e.what());
    }
    if (n.big_omega() != big || n.small_omega() != small)
        fail(ErrorCode::Io, "checkpoint line has wrong Omega/omega: " + line);
    return n;
}

std::optional<CheckpointTail> last_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::optional<CheckpointTail> tail;
    std::string line;
    std::streamoff offset = 0;
    while (std::getline(in, line)) {
        const bool terminated = !in.eof();
        const std::streamoff end = offset + static_cast<std::streamoff>(line.size()) + (terminated ? 1 : 0);
        if (!line.empty()) {
            try {
                tail = CheckpointTail{parse_checkpoint_line(line).value(), end};
            } catch (const Error&) {
                // an unterminated final line is a partial write; anything else is corruption
                if (terminated) throw;
            }
        }
        offset = end;
    }
    return tail;
}

}  // namespace densediv
