/* C interface to the densediv library. Every call returns a dd_status;
 * on failure dd_last_error() describes the problem (per thread). Handles are
 * opaque and released with the matching *_free function. */
#ifndef DENSEDIV_H
#define DENSEDIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DD_API __declspec(dllexport)
#else
#define DD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    DD_OK = 0,
    DD_ERR_INVALID_ARGUMENT = 1,
    DD_ERR_DOMAIN = 2,
    DD_ERR_BUDGET = 3,
    DD_ERR_NO_CONVERGENCE = 4,
    DD_ERR_IO = 5,
    DD_ERR_INTERNAL = 6,
    DD_ERR_BUFFER_TOO_SMALL = 7
} dd_status;

typedef enum { DD_BIG_OMEGA = 0, DD_SMALL_OMEGA = 1 } dd_nu_mode;

typedef struct {
    double re, im;
} dd_complex;

typedef struct {
    uint64_t prime;
    uint32_t exponent;
} dd_prime_power;

typedef struct {
    double gamma, A, W, B, C, K, V;
} dd_constants;

typedef struct {
    dd_complex z;
    dd_complex s0;
    int newton_iters;
    double residual;
} dd_root;

typedef struct {
    double x, t;
    dd_nu_mode mode;
    uint64_t n_samples;
    double mean, mu_ref, variance, sigma2_ref, ks;
} dd_ek_row;

typedef struct dd_rule dd_rule;
typedef struct dd_stream dd_stream;
typedef struct dd_hist dd_hist;
typedef struct dd_omega dd_omega;
typedef struct dd_dz dd_dz;

DD_API const char* dd_last_error(void);
DD_API const char* dd_version(void);
DD_API const char* dd_status_name(dd_status status);

/* Strings are copied into buf (NUL terminated). *needed receives the full
 * length including the terminator; DD_ERR_BUFFER_TOO_SMALL if cap is short. */

/* ---- rules and integers ---- */
DD_API dd_status dd_rule_dense(double t, dd_rule** out);
DD_API dd_status dd_rule_practical(dd_rule** out);
DD_API void dd_rule_free(dd_rule* rule);
DD_API dd_status dd_rule_describe(const dd_rule* rule, char* buf, size_t cap, size_t* needed);

DD_API dd_status dd_factorize(uint64_t n, dd_prime_power* factors, size_t cap, size_t* count);
DD_API dd_status dd_is_member(const dd_rule* rule, uint64_t n, int* out);
DD_API dd_status dd_is_t_dense_oracle(uint64_t n, double t, int* out);
DD_API dd_status dd_is_practical_oracle(uint64_t n, int* out);
DD_API dd_status dd_max_divisor_ratio(uint64_t n, double* out);
DD_API dd_status dd_count(const dd_rule* rule, uint64_t x, unsigned threads, uint64_t* out);
DD_API dd_status dd_sifted_sum(double x, double y, dd_complex z, dd_nu_mode mode, dd_complex* out);

/* Ascending members of B(x) starting at `start`, one checkpoint line each. */
DD_API dd_status dd_stream_open(const dd_rule* rule, uint64_t x, uint64_t start, dd_stream** out);
/* *has = 0 at the end; otherwise the line (no newline) is in buf and *value holds n. */
DD_API dd_status dd_stream_next(dd_stream* stream, char* buf, size_t cap, uint64_t* value, int* has);
DD_API void dd_stream_free(dd_stream* stream);
/* Last intact checkpoint line: *found = 0 if the file is missing or has none. */
DD_API dd_status dd_checkpoint_tail(const char* path, uint64_t* value, int64_t* bytes, int* found);

/* ---- special functions ---- */
DD_API dd_status dd_get_constants(dd_constants* out);
DD_API dd_status dd_constants_json(char* buf, size_t cap, size_t* needed);
DD_API dd_status dd_coeff_json(dd_complex z, int K, char* buf, size_t cap, size_t* needed);
DD_API dd_status dd_eval_I(dd_complex s, dd_complex* out);
DD_API dd_status dd_eval_T(dd_complex s, dd_complex* out);
DD_API dd_status dd_eval_J(double u, double* out);
DD_API dd_status dd_euler_h(double y, dd_complex z, dd_nu_mode mode, dd_complex* out);
DD_API dd_status dd_euler_J(double y, dd_complex z, dd_nu_mode mode, dd_complex* out);

DD_API dd_status dd_omega_solve(dd_complex z, double u_max, double h, dd_omega** out);
DD_API dd_status dd_omega_eval(const dd_omega* omega, double u, dd_complex* out);
DD_API dd_status dd_omega_asymptotic(dd_complex z, double u, int K, int shifted, dd_complex* out);
DD_API void dd_omega_free(dd_omega* omega);

/* ---- Laplace layer ---- */
DD_API dd_status dd_eval_Q(dd_complex z, dd_complex s, dd_complex* out);
DD_API dd_status dd_eval_f(dd_complex z, dd_complex s, dd_complex* out);
DD_API dd_status dd_find_s0(dd_complex z, dd_root* out);
DD_API dd_status dd_residue_Cz(dd_complex z, dd_complex* out);
DD_API dd_status dd_root_csv(const double* phis, size_t n, char* buf, size_t cap, size_t* needed);

DD_API dd_status dd_dz_solve(dd_complex z, double v_max, double h, dd_dz** out);
DD_API dd_status dd_dz_eval(const dd_dz* dz, double v, dd_complex* out);
DD_API dd_status dd_dz_info(const dd_dz* dz, dd_complex* s0, dd_complex* Cz, double* v_max);
DD_API void dd_dz_free(dd_dz* dz);

/* ---- Erdos-Kac harness ---- */
/* Joint (Omega, omega) histogram of B(x); reused across modes and phi. */
DD_API dd_status dd_hist_collect(const dd_rule* rule, uint64_t x, unsigned threads, dd_hist** out);
DD_API dd_status dd_hist_total(const dd_hist* hist, uint64_t* out);
DD_API dd_status dd_hist_ek_row(const dd_hist* hist, dd_nu_mode mode, dd_ek_row* out);
DD_API dd_status dd_hist_char_ratio(const dd_hist* hist, double phi, dd_nu_mode mode, dd_complex* exact,
                                    dd_complex* predicted);
DD_API void dd_hist_free(dd_hist* hist);

DD_API const char* dd_ek_csv_header(void);
DD_API dd_status dd_ek_csv_line(const dd_ek_row* row, char* buf, size_t cap, size_t* needed);
DD_API dd_status dd_run_manifest(const char* config_json, const dd_ek_row* rows, size_t n, char* buf, size_t cap,
                                 size_t* needed);
DD_API dd_status dd_sifted_compare(double x, double y, double phi, dd_nu_mode mode, dd_complex* exact,
                                   dd_complex* main_terms, double* rel_err);

#ifdef __cplusplus
}
#endif

#endif
