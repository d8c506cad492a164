#include <cmath>

#include "doctest.h"
#include "densediv/ekac.hpp"
#include "densediv/error.hpp"
#include "densediv/special.hpp"

using namespace densediv;
using doctest::Approx;

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0) == 0.5);
    for (double y : {0.5, 1.0, 3.0}) CHECK(normal_cdf(y) + normal_cdf(-y) == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(normal_cdf(1.96) - 0.97500210485177956) < 1e-10);
}

TEST_CASE("collect nu on D(30, 2)") {
    // 2, 4, 8, 16 have one distinct prime; 30 has three
    const auto d = collect_nu(ThetaRule::dense(2), 30, NuMode::SmallOmega);
    CHECK(d.sorted_sample() == std::vector<u32>{0, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 3});
    CHECK(d.mean() == Approx(19.0 / 12));
    const auto one = collect_nu(ThetaRule::dense(2), 1, NuMode::BigOmega);
    CHECK(one.sorted_sample() == std::vector<u32>{0});
    for (u64 x : {1000, 100000}) {
        const auto big = collect_nu(ThetaRule::practical(), x, NuMode::BigOmega);
        const auto small = collect_nu(ThetaRule::practical(), x, NuMode::SmallOmega);
        CHECK(big.mean() >= small.mean());
    }
    CHECK(d.cdf(1.5) == Approx(5.0 / 12));
    CHECK(d.cdf(-0.1) == 0);
    CHECK(d.cdf(99) == 1);
}

TEST_CASE("ks distance") {
    const auto single = EmpiricalDistribution::from_values({4});
    CHECK(ks_distance(single, EKParams::fixed(4, 1)) == Approx(0.5));
    // two-point sample symmetric around mu
    const auto two = EmpiricalDistribution::from_values({0, 2});
    CHECK(ks_distance(two, EKParams::fixed(1, 1)) == Approx(std::max(normal_cdf(-1), 0.5 - normal_cdf(-1))));
    CHECK_THROWS_AS(EKParams::dense(5, 2), Error);
    CHECK_THROWS_AS(EKParams::dense(100, 200), Error);
}

TEST_CASE("full integer set matches a direct loop") {
    const u64 x = 100000;
    const auto rule = ThetaRule::dense(static_cast<double>(x));
    const auto d = collect_nu(rule, x, NuMode::BigOmega);
    std::vector<u32> direct;
    for (u64 n = 1; n <= x; ++n) direct.push_back(factorize(n).big_omega());
    std::sort(direct.begin(), direct.end());
    CHECK(d.sorted_sample() == direct);
}

TEST_CASE("characteristic ratios") {
    const auto r0 = char_ratio_D(10000, 2, 0.0, NuMode::SmallOmega);
    CHECK(std::abs(r0.exact - 1.0) < 1e-15);
    for (auto mode : {NuMode::BigOmega, NuMode::SmallOmega}) {
        const auto a = char_ratio_D(100000, 2, 0.1, mode);
        const auto b = char_ratio_D(100000, 2, -0.1, mode);
        CHECK(std::abs(a.exact - std::conj(b.exact)) < 1e-14);
        const auto p = char_ratio_B(ThetaRule::practical(), 100000, 0.1, mode);
        CHECK(std::abs(p.lambda - 1.0) < 0.5);
    }
    CHECK(loglog_slope({1e4, 1e8}, {std::exp(1.0), std::exp(1.0 + 2 * std::log(2.0))}) == Approx(2.0));
}

TEST_CASE("moments report") {
    const auto m = moments_report(ThetaRule::dense(2), 30, NuMode::SmallOmega);
    CHECK(m.mean == Approx(19.0 / 12));
    CHECK(m.n == 12);
    const auto big = moments_report(ThetaRule::dense(2), 1000000, NuMode::BigOmega);
    CHECK(static_cast<double>(big.tail_count) <= big.chebyshev_bound);
    CHECK(std::abs(big.drift) < 2.5);
}

TEST_CASE("functional equation identity") {
    const std::vector<cplx> zs{1.0, std::polar(1.0, 0.3)};
    for (const auto& rule : {ThetaRule::dense(2), ThetaRule::practical(), ThetaRule::dense(3.5)})
        for (auto mode : {NuMode::BigOmega, NuMode::SmallOmega})
            for (const auto& s : funceq_sides(rule, 20000, zs, mode))
                CHECK(std::abs(s.lhs - s.rhs) <= 1e-9 * std::abs(s.lhs));
}

TEST_CASE("sifted main terms") {
    const auto r = sifted_compare(1e6, 100, 0.0, NuMode::BigOmega);
    CHECK(r.rel_err < 0.05);
    CHECK(sifted_compare(1e5, 1e5, 0.1, NuMode::SmallOmega).exact == cplx(1, 0));
    CHECK_THROWS_AS(sifted_compare(1e6, 100, 0.5, NuMode::BigOmega), Error);
}

TEST_CASE("report rows and manifest") {
    const auto row = ek_row(ThetaRule::dense(2), 1000, NuMode::SmallOmega);
    CHECK(ek_csv_header() == "x,t,mode,n_samples,mean,mu_ref,variance,sigma2_ref,ks");
    CHECK(ek_csv_line(row).rfind("1000,2,omega,", 0) == 0);
    // git hash-object of the empty blob and of "hello\n"
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    const auto m1 = run_manifest("{\"x\": 1000, \"rule\": \"dense\"}", {row});
    const auto m2 = run_manifest("{\"x\":1000,\"rule\":\"dense\"}", {row});
    CHECK(m1 == m2);
    CHECK(m1.find("config_hash") != std::string::npos);
    CHECK_THROWS_AS(run_manifest("{bad", {}), Error);
}
