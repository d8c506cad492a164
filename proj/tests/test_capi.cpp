#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "densediv/densediv.h"
#include "doctest.h"

namespace {

dd_rule* dense(double t) {
    dd_rule* r = nullptr;
    REQUIRE(dd_rule_dense(t, &r) == DD_OK);
    return r;
}

}  // namespace

TEST_CASE("status codes and last error") {
    dd_rule* r = nullptr;
    CHECK(dd_rule_dense(1.5, &r) == DD_ERR_INVALID_ARGUMENT);
    CHECK(r == nullptr);
    CHECK(std::string(dd_last_error()).find("t >= 2") != std::string::npos);
    CHECK(dd_rule_dense(2, nullptr) == DD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(dd_status_name(DD_ERR_BUDGET)) == "budget");

    r = dense(2);
    CHECK(std::string(dd_last_error()).empty());
    uint64_t n = 0;
    CHECK(dd_count(r, 2000000000ULL, 1, &n) == DD_ERR_BUDGET);
    dd_rule_free(r);
    dd_rule_free(nullptr);
}

TEST_CASE("factorize and membership") {
    dd_prime_power f[16];
    size_t count = 0;
    REQUIRE(dd_factorize(360, f, 16, &count) == DD_OK);
    REQUIRE(count == 3);
    CHECK(f[0].prime == 2);
    CHECK(f[0].exponent == 3);
    CHECK(f[2].prime == 5);
    CHECK(dd_factorize(360, f, 2, &count) == DD_ERR_BUFFER_TOO_SMALL);
    CHECK(count == 3);

    dd_rule* r = dense(2);
    int m = -1;
    CHECK(dd_is_member(r, 12, &m) == DD_OK);
    CHECK(m == 1);
    CHECK(dd_is_member(r, 10, &m) == DD_OK);
    CHECK(m == 0);
    uint64_t n = 0;
    CHECK(dd_count(r, 30, 1, &n) == DD_OK);
    CHECK(n == 12);
    dd_rule_free(r);

    CHECK(dd_is_practical_oracle(18, &m) == DD_OK);
    CHECK(m == 1);
    double ratio = 0;
    CHECK(dd_max_divisor_ratio(10, &ratio) == DD_OK);
    CHECK(ratio == doctest::Approx(2.5));
}

TEST_CASE("stream lines and checkpoint tail") {
    dd_rule* r = nullptr;
    REQUIRE(dd_rule_practical(&r) == DD_OK);
    dd_stream* s = nullptr;
    REQUIRE(dd_stream_open(r, 20, 1, &s) == DD_OK);
    std::vector<std::string> lines;
    char buf[128];
    uint64_t v = 0;
    int has = 0;
    while (dd_stream_next(s, buf, sizeof buf, &v, &has) == DD_OK && has) lines.push_back(buf);
    dd_stream_free(s);
    dd_rule_free(r);
    REQUIRE(lines.size() == 9);  // 1 2 4 6 8 12 16 18 20
    CHECK(lines[0] == "1 - 0 0");
    CHECK(lines[3] == "6 2:1,3:1 2 2");

    const std::string path = "capi_tail.txt";
    std::FILE* fp = std::fopen(path.c_str(), "w");
    std::fputs("1 - 0 0\n2 2:1 1 1\n4 2:", fp);
    std::fclose(fp);
    int64_t bytes = 0;
    int found = 0;
    CHECK(dd_checkpoint_tail(path.c_str(), &v, &bytes, &found) == DD_OK);
    CHECK(found == 1);
    CHECK(v == 2);
    CHECK(bytes == 18);
    std::remove(path.c_str());
    CHECK(dd_checkpoint_tail("no_such_file.txt", &v, &bytes, &found) == DD_OK);
    CHECK(found == 0);
}

TEST_CASE("constants and string buffers") {
    dd_constants c{};
    REQUIRE(dd_get_constants(&c) == DD_OK);
    CHECK(c.C == doctest::Approx(2.280291).epsilon(1e-6));
    CHECK(c.V == doctest::Approx(c.C + 2 * c.K).epsilon(1e-15));

    size_t needed = 0;
    char tiny[4];
    CHECK(dd_constants_json(tiny, sizeof tiny, &needed) == DD_ERR_BUFFER_TOO_SMALL);
    std::string json(needed, '\0');
    REQUIRE(dd_constants_json(json.data(), json.size(), &needed) == DD_OK);
    CHECK(json.find("\"C\"") != std::string::npos);
}

TEST_CASE("analysis handles") {
    dd_root root{};
    REQUIRE(dd_find_s0({std::cos(0.05), std::sin(0.05)}, &root) == DD_OK);
    CHECK(root.s0.re == doctest::Approx(-1.000517673783510).epsilon(1e-12));
    CHECK(root.s0.re < -1);
    CHECK(dd_find_s0({2, 0}, &root) == DD_ERR_DOMAIN);

    dd_omega* w = nullptr;
    REQUIRE(dd_omega_solve({1, 0}, 10, 0.005, &w) == DD_OK);
    dd_complex v{};
    CHECK(dd_omega_eval(w, 2.5, &v) == DD_OK);
    CHECK(v.re == doctest::Approx((1 + std::log(1.5)) / 2.5).epsilon(1e-10));
    CHECK(dd_omega_eval(w, 11, &v) == DD_ERR_DOMAIN);
    dd_omega_free(w);

    dd_dz* d = nullptr;
    REQUIRE(dd_dz_solve({1, 0}, 12, 0.005, &d) == DD_OK);
    dd_complex cz{};
    double vmax = 0;
    CHECK(dd_dz_info(d, nullptr, &cz, &vmax) == DD_OK);
    CHECK(vmax == doctest::Approx(12));
    CHECK(dd_dz_eval(d, 10, &v) == DD_OK);
    CHECK(v.re == doctest::Approx(cz.re / 11).epsilon(0.01));
    dd_dz_free(d);
}

TEST_CASE("harness rows and manifest") {
    dd_rule* r = dense(2);
    dd_hist* h = nullptr;
    REQUIRE(dd_hist_collect(r, 100000, 2, &h) == DD_OK);
    uint64_t total = 0;
    CHECK(dd_hist_total(h, &total) == DD_OK);
    dd_ek_row row{};
    REQUIRE(dd_hist_ek_row(h, DD_SMALL_OMEGA, &row) == DD_OK);
    CHECK(row.n_samples == total);
    CHECK(row.t == 2);
    CHECK(row.ks > 0);
    CHECK(row.ks < 1);
    dd_complex exact{}, pred{};
    CHECK(dd_hist_char_ratio(h, 0.1, DD_SMALL_OMEGA, &exact, &pred) == DD_OK);
    CHECK(std::hypot(exact.re, exact.im) < 1);
    CHECK(dd_hist_char_ratio(h, 0.5, DD_SMALL_OMEGA, &exact, &pred) != DD_OK);
    dd_hist_free(h);
    dd_rule_free(r);

    CHECK(std::string(dd_ek_csv_header()) == "x,t,mode,n_samples,mean,mu_ref,variance,sigma2_ref,ks");
    char line[512];
    size_t needed = 0;
    REQUIRE(dd_ek_csv_line(&row, line, sizeof line, &needed) == DD_OK);
    CHECK(std::string(line).rfind("100000,2,omega,", 0) == 0);

    std::string out(8192, '\0');
    REQUIRE(dd_run_manifest("{\"x\": 100000}", &row, 1, out.data(), out.size(), &needed) == DD_OK);
    out.resize(needed - 1);
    CHECK(out.find("config_hash") != std::string::npos);
    CHECK(dd_run_manifest("{not json", &row, 1, out.data(), out.size(), &needed) == DD_ERR_INVALID_ARGUMENT);

    double rel = 0;
    CHECK(dd_sifted_compare(1e6, 100, 0, DD_SMALL_OMEGA, nullptr, nullptr, &rel) == DD_OK);
    CHECK(rel < 0.02);
}
