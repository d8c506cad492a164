#include "densediv/densediv.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "densediv/arith.hpp"
#include "densediv/ekac.hpp"
#include "densediv/error.hpp"
#include "densediv/laplace.hpp"
#include "densediv/special.hpp"

struct dd_rule {
    densediv::ThetaRule rule;
};

struct dd_stream {
    densediv::MemberStream stream;
};

struct dd_hist {
    densediv::ThetaRule rule;
    double x;
    densediv::NuHistogram hist;
};

struct dd_omega {
    densediv::SampledFunction fn;
};

struct dd_dz {
    densediv::DzSolution sol;
};

namespace {

using densediv::cplx;
using densediv::ErrorCode;

thread_local std::string last_error;

dd_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return DD_ERR_INVALID_ARGUMENT;
        case ErrorCode::Domain: return DD_ERR_DOMAIN;
        case ErrorCode::Budget: return DD_ERR_BUDGET;
        case ErrorCode::NoConvergence: return DD_ERR_NO_CONVERGENCE;
        case ErrorCode::Io: return DD_ERR_IO;
        case ErrorCode::Internal: return DD_ERR_INTERNAL;
    }
    return DD_ERR_INTERNAL;
}

// runs f, turning exceptions into status codes
template <class F>
dd_status guard(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const densediv::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return DD_ERR_BUDGET;
    } catch (const std::exception& e) {
        last_error = e.what();
        return DD_ERR_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return DD_ERR_INTERNAL;
    }
}

dd_status need(const void* p, const char* what) {
    if (p) return DD_OK;
    last_error = std::string("null pointer: ") + what;
    return DD_ERR_INVALID_ARGUMENT;
}

#define DD_NEED(p)                                    \
    do {                                              \
        if (dd_status s_ = need((p), #p); s_ != DD_OK) \
            return s_;                                \
    } while (0)

cplx from(dd_complex c) { return {c.re, c.im}; }
dd_complex to(cplx c) { return {c.real(), c.imag()}; }

densediv::NuMode mode_of(dd_nu_mode m) {
    if (m != DD_BIG_OMEGA && m != DD_SMALL_OMEGA) densediv::fail(ErrorCode::InvalidArgument, "unknown nu mode");
    return m == DD_BIG_OMEGA ? densediv::NuMode::BigOmega : densediv::NuMode::SmallOmega;
}

dd_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf || cap < text.size() + 1) {
        last_error = "output buffer too small";
        return DD_ERR_BUFFER_TOO_SMALL;
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
    return DD_OK;
}

dd_ek_row to_row(const densediv::EKRow& r) {
    return {r.x, r.t, r.mode == densediv::NuMode::BigOmega ? DD_BIG_OMEGA : DD_SMALL_OMEGA,
            r.n_samples, r.mean, r.mu_ref, r.variance, r.sigma2_ref, r.ks};
}

densediv::EKRow from_row(const dd_ek_row& r) {
    return {r.x, r.t, mode_of(r.mode), r.n_samples, r.mean, r.mu_ref, r.variance, r.sigma2_ref, r.ks};
}

}  // namespace

extern "C" {

const char* dd_last_error(void) { return last_error.c_str(); }
const char* dd_version(void) { return "1.0.0"; }

const char* dd_status_name(dd_status status) {
    switch (status) {
        case DD_OK: return "ok";
        case DD_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case DD_ERR_DOMAIN: return "domain";
        case DD_ERR_BUDGET: return "budget";
        case DD_ERR_NO_CONVERGENCE: return "no_convergence";
        case DD_ERR_IO: return "io";
        case DD_ERR_INTERNAL: return "internal";
        case DD_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    }
    return "unknown";
}

// ---- rules and integers ----

dd_status dd_rule_dense(double t, dd_rule** out) {
    DD_NEED(out);
    return guard([&] {
        *out = new dd_rule{densediv::ThetaRule::dense(t)};
        return DD_OK;
    });
}

dd_status dd_rule_practical(dd_rule** out) {
    DD_NEED(out);
    return guard([&] {
        *out = new dd_rule{densediv::ThetaRule::practical()};
        return DD_OK;
    });
}

void dd_rule_free(dd_rule* rule) { delete rule; }

dd_status dd_rule_describe(const dd_rule* rule, char* buf, size_t cap, size_t* needed) {
    DD_NEED(rule);
    return guard([&] { return copy_out(rule->rule.describe(), buf, cap, needed); });
}

dd_status dd_factorize(uint64_t n, dd_prime_power* factors, size_t cap, size_t* count) {
    DD_NEED(count);
    return guard([&] {
        const auto f = densediv::factorize(n);
        *count = f.factors().size();
        if (!factors || cap < f.factors().size()) {
            last_error = "factor buffer too small";
            return DD_ERR_BUFFER_TOO_SMALL;
        }
        for (size_t i = 0; i < f.factors().size(); ++i)
            factors[i] = {f.factors()[i].prime, f.factors()[i].exponent};
        return DD_OK;
    });
}

dd_status dd_is_member(const dd_rule* rule, uint64_t n, int* out) {
    DD_NEED(rule);
    DD_NEED(out);
    return guard([&] {
        *out = densediv::is_member(densediv::factorize(n), rule->rule) ? 1 : 0;
        return DD_OK;
    });
}

dd_status dd_is_t_dense_oracle(uint64_t n, double t, int* out) {
    DD_NEED(out);
    return guard([&] {
        *out = densediv::is_t_dense_oracle(densediv::factorize(n), t) ? 1 : 0;
        return DD_OK;
    });
}

dd_status dd_is_practical_oracle(uint64_t n, int* out) {
    DD_NEED(out);
    return guard([&] {
        *out = densediv::is_practical_oracle(n) ? 1 : 0;
        return DD_OK;
    });
}

dd_status dd_max_divisor_ratio(uint64_t n, double* out) {
    DD_NEED(out);
    return guard([&] {
        *out = densediv::max_divisor_ratio(densediv::factorize(n));
        return DD_OK;
    });
}

dd_status dd_count(const dd_rule* rule, uint64_t x, unsigned threads, uint64_t* out) {
    DD_NEED(rule);
    DD_NEED(out);
    return guard([&] {
        *out = densediv::count_B(rule->rule, x, threads);
        return DD_OK;
    });
}

dd_status dd_sifted_sum(double x, double y, dd_complex z, dd_nu_mode mode, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::direct_sifted_sum(x, y, from(z), mode_of(mode)));
        return DD_OK;
    });
}

dd_status dd_stream_open(const dd_rule* rule, uint64_t x, uint64_t start, dd_stream** out) {
    DD_NEED(rule);
    DD_NEED(out);
    return guard([&] {
        *out = new dd_stream{densediv::MemberStream(rule->rule, x, start)};
        return DD_OK;
    });
}

dd_status dd_stream_next(dd_stream* stream, char* buf, size_t cap, uint64_t* value, int* has) {
    DD_NEED(stream);
    DD_NEED(has);
    return guard([&] {
        auto next = stream->stream.next();
        *has = next ? 1 : 0;
        if (!next) return DD_OK;
        if (value) *value = next->value();
        return copy_out(densediv::format_checkpoint_line(*next), buf, cap, nullptr);
    });
}

void dd_stream_free(dd_stream* stream) { delete stream; }

dd_status dd_checkpoint_tail(const char* path, uint64_t* value, int64_t* bytes, int* found) {
    DD_NEED(path);
    DD_NEED(found);
    return guard([&] {
        const auto tail = densediv::last_checkpoint(path);
        *found = tail ? 1 : 0;
        if (tail) {
            if (value) *value = tail->value;
            if (bytes) *bytes = tail->bytes;
        }
        return DD_OK;
    });
}

// ---- special functions ----

dd_status dd_get_constants(dd_constants* out) {
    DD_NEED(out);
    return guard([&] {
        const auto c = densediv::constants();
        *out = {c.gamma, c.A, c.W, c.B, c.C, c.K, c.V};
        return DD_OK;
    });
}

dd_status dd_constants_json(char* buf, size_t cap, size_t* needed) {
    return guard([&] { return copy_out(densediv::constants_json(densediv::constants()), buf, cap, needed); });
}

dd_status dd_coeff_json(dd_complex z, int K, char* buf, size_t cap, size_t* needed) {
    return guard([&] { return copy_out(densediv::coeff_table_json(densediv::coeff_table(from(z), K)), buf, cap, needed); });
}

dd_status dd_eval_I(dd_complex s, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::eval_I(from(s)));
        return DD_OK;
    });
}

dd_status dd_eval_T(dd_complex s, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::eval_T(from(s)));
        return DD_OK;
    });
}

dd_status dd_eval_J(double u, double* out) {
    DD_NEED(out);
    return guard([&] {
        *out = densediv::eval_J(u);
        return DD_OK;
    });
}

dd_status dd_euler_h(double y, dd_complex z, dd_nu_mode mode, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::euler_h(y, from(z), mode_of(mode)));
        return DD_OK;
    });
}

dd_status dd_euler_J(double y, dd_complex z, dd_nu_mode mode, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::euler_Jnu(y, from(z), mode_of(mode)));
        return DD_OK;
    });
}

dd_status dd_omega_solve(dd_complex z, double u_max, double h, dd_omega** out) {
    DD_NEED(out);
    return guard([&] {
        *out = new dd_omega{densediv::solve_omega(from(z), u_max, h)};
        return DD_OK;
    });
}

dd_status dd_omega_eval(const dd_omega* omega, double u, dd_complex* out) {
    DD_NEED(omega);
    DD_NEED(out);
    return guard([&] {
        *out = to(omega->fn(u));
        return DD_OK;
    });
}

dd_status dd_omega_asymptotic(dd_complex z, double u, int K, int shifted, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::omega_asymptotic(from(z), u, K, shifted != 0));
        return DD_OK;
    });
}

void dd_omega_free(dd_omega* omega) { delete omega; }

// ---- Laplace layer ----

dd_status dd_eval_Q(dd_complex z, dd_complex s, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::eval_Q(from(z), from(s)));
        return DD_OK;
    });
}

dd_status dd_eval_f(dd_complex z, dd_complex s, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::eval_f(from(z), from(s)));
        return DD_OK;
    });
}

dd_status dd_find_s0(dd_complex z, dd_root* out) {
    DD_NEED(out);
    return guard([&] {
        const auto r = densediv::find_s0(from(z));
        *out = {z, to(r.s0), r.newton_iters, r.residual};
        return DD_OK;
    });
}

dd_status dd_residue_Cz(dd_complex z, dd_complex* out) {
    DD_NEED(out);
    return guard([&] {
        *out = to(densediv::residue_Cz(from(z)));
        return DD_OK;
    });
}

dd_status dd_root_csv(const double* phis, size_t n, char* buf, size_t cap, size_t* needed) {
    if (n) DD_NEED(phis);
    return guard([&] {
        return copy_out(densediv::root_table_csv(densediv::root_table(std::vector<double>(phis, phis + n))), buf, cap,
                        needed);
    });
}

dd_status dd_dz_solve(dd_complex z, double v_max, double h, dd_dz** out) {
    DD_NEED(out);
    return guard([&] {
        *out = new dd_dz{densediv::solve_dz(from(z), v_max, h)};
        return DD_OK;
    });
}

dd_status dd_dz_eval(const dd_dz* dz, double v, dd_complex* out) {
    DD_NEED(dz);
    DD_NEED(out);
    return guard([&] {
        *out = to(dz->sol(v));
        return DD_OK;
    });
}

dd_status dd_dz_info(const dd_dz* dz, dd_complex* s0, dd_complex* Cz, double* v_max) {
    DD_NEED(dz);
    if (s0) *s0 = to(dz->sol.s0);
    if (Cz) *Cz = to(dz->sol.Cz);
    if (v_max) *v_max = dz->sol.v_max();
    return DD_OK;
}

void dd_dz_free(dd_dz* dz) { delete dz; }

// ---- harness ----

dd_status dd_hist_collect(const dd_rule* rule, uint64_t x, unsigned threads, dd_hist** out) {
    DD_NEED(rule);
    DD_NEED(out);
    return guard([&] {
        *out = new dd_hist{rule->rule, static_cast<double>(x), densediv::nu_histogram(rule->rule, x, threads)};
        return DD_OK;
    });
}

dd_status dd_hist_total(const dd_hist* hist, uint64_t* out) {
    DD_NEED(hist);
    DD_NEED(out);
    *out = hist->hist.total();
    return DD_OK;
}

dd_status dd_hist_ek_row(const dd_hist* hist, dd_nu_mode mode, dd_ek_row* out) {
    DD_NEED(hist);
    DD_NEED(out);
    return guard([&] {
        const auto m = mode_of(mode);
        const densediv::EmpiricalDistribution dist(hist->hist.marginal(m));
        const auto p = densediv::reference_params(hist->rule, hist->x);
        const double t = hist->rule.kind() == densediv::ThetaRule::Kind::DenseT ? std::min(hist->rule.t(), hist->x) : 0.0;
        *out = to_row({hist->x, t, m, dist.n(), dist.mean(), p.mu, dist.variance(), p.sigma2,
                       densediv::ks_distance(dist, p)});
        return DD_OK;
    });
}

dd_status dd_hist_char_ratio(const dd_hist* hist, double phi, dd_nu_mode mode, dd_complex* exact,
                             dd_complex* predicted) {
    DD_NEED(hist);
    return guard([&] {
        const auto r = densediv::char_ratio_from(hist->hist, hist->rule, hist->x, phi, mode_of(mode));
        if (exact) *exact = to(r.exact);
        if (predicted) *predicted = to(r.predicted);
        return DD_OK;
    });
}

void dd_hist_free(dd_hist* hist) { delete hist; }

const char* dd_ek_csv_header(void) {
    static const std::string header = densediv::ek_csv_header();
    return header.c_str();
}

dd_status dd_ek_csv_line(const dd_ek_row* row, char* buf, size_t cap, size_t* needed) {
    DD_NEED(row);
    return guard([&] { return copy_out(densediv::ek_csv_line(from_row(*row)), buf, cap, needed); });
}

dd_status dd_run_manifest(const char* config_json, const dd_ek_row* rows, size_t n, char* buf, size_t cap,
                          size_t* needed) {
    DD_NEED(config_json);
    if (n) DD_NEED(rows);
    return guard([&] {
        std::vector<densediv::EKRow> v;
        for (size_t i = 0; i < n; ++i) v.push_back(from_row(rows[i]));
        return copy_out(densediv::run_manifest(config_json, v), buf, cap, needed);
    });
}

dd_status dd_sifted_compare(double x, double y, double phi, dd_nu_mode mode, dd_complex* exact,
                            dd_complex* main_terms, double* rel_err) {
    return guard([&] {
        const auto r = densediv::sifted_compare(x, y, phi, mode_of(mode));
        if (exact) *exact = to(r.exact);
        if (main_terms) *main_terms = to(r.main_terms);
        if (rel_err) *rel_err = r.rel_err;
        return DD_OK;
    });
}

}  // extern "C"
