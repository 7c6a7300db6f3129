#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "truncvar/variation.hpp"

using namespace truncvar;

namespace {

DiscreteTriple make_triple(const StepFunction& f, double alpha, double beta) {
    return interleave(f, StepFunction(f.knots(), std::vector<double>(f.knot_count(), alpha),
                                      std::vector<double>(f.knot_count() - 1, alpha)),
                      StepFunction(f.knots(), std::vector<double>(f.knot_count(), beta),
                                   std::vector<double>(f.knot_count() - 1, beta)));
}

} // namespace

TEST_CASE("total variation of a sampled zigzag") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    VariationProfile p = total_variation(f, TimeInterval(0, 3));
    CHECK(p.final_tv() == 5.0);
    CHECK(p.final_utv() == 4.0);
    CHECK(p.final_dtv() == 1.0);

    StepFunction c = StepFunction::constant(0, 1, 9.0);
    CHECK(total_variation(c).final_tv() == 0.0);

    StepFunction mono = from_samples({0, 1, 2}, {0, 1, 4});
    VariationProfile pm = total_variation(mono);
    CHECK(pm.final_tv() == 4.0);
    CHECK(pm.final_utv() == 4.0);
    CHECK(pm.final_dtv() == 0.0);
}

TEST_CASE("variation profile invariants") {
    RandomStream rs(7101);
    for (int rep = 0; rep < 300; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 8));
        VariationProfile p = total_variation(f);
        CHECK(p.tv[0] == 0.0);
        CHECK(p.utv[0] == 0.0);
        CHECK(p.dtv[0] == 0.0);
        for (std::size_t i = 1; i < p.tv.size(); ++i) {
            CHECK(p.tv[i] >= p.tv[i - 1]);
            CHECK(p.utv[i] >= p.utv[i - 1]);
            CHECK(p.dtv[i] >= p.dtv[i - 1]);
            CHECK(p.tv[i] == p.utv[i] + p.dtv[i]); // Jordan, bit-exact
        }
    }
}

TEST_CASE("p-variation by dynamic programming") {
    StepFunction osc = from_samples({0, 1, 2, 3}, {0, 1, 0, 1});
    CHECK(p_variation(osc, 2.0) == 3.0); // all four points beat any coarsening

    StepFunction mono = from_samples({0, 1, 2}, {0, 1, 4});
    CHECK(p_variation(mono, 2.0) == 16.0); // coarsest wins for same-sign increments

    CHECK_THROWS_AS(p_variation(mono, 0.5), InvalidExponent);
}

TEST_CASE("p-variation at p = 1 equals total variation") {
    RandomStream rs(7102);
    for (int rep = 0; rep < 100; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        CHECK(p_variation(f, 1.0) == doctest::Approx(total_variation(f).final_tv()).epsilon(1e-12));
    }
}

TEST_CASE("p-variation DP matches exhaustive enumeration") {
    RandomStream rs(7103);
    for (int rep = 0; rep < 50; ++rep) {
        auto f = testutil::random_step(rs, 3 + static_cast<std::size_t>(rs.next_uniform() * 2));
        const auto x = f.interleaved();
        const double p = 1.0 + 2.0 * rs.next_uniform();
        // brute force over all index subsets
        double best = 0.0;
        const std::size_t n = x.size();
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            double sum = 0.0;
            bool have = false;
            std::size_t prev = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!(mask & (std::uint64_t{1} << i))) continue;
                if (have) sum += std::pow(std::abs(x[i] - x[prev]), p);
                prev = i;
                have = true;
            }
            best = std::max(best, sum);
        }
        CHECK(p_variation(f, p) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("truncated-variation oracle on the running example") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    TimeInterval iv(0, 3);
    CHECK(tv_trunc_oracle(f, 1.0, iv, VarMode::TV) == 2.0);
    CHECK(tv_trunc_oracle(f, 0.5, iv, VarMode::TV) == 3.5);
    CHECK(tv_trunc_oracle(f, 0.5, iv, VarMode::UTV) == 3.0);
    CHECK(tv_trunc_oracle(f, 0.5, iv, VarMode::DTV) == 0.5);
    // c = 0 degenerates to plain variation
    CHECK(tv_trunc_oracle(f, 0.0, iv, VarMode::TV) == total_variation(f).final_tv());
}

TEST_CASE("oracle DP agrees with exhaustive enumeration") {
    RandomStream rs(7104);
    for (int rep = 0; rep < 300; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 5));
        TimeInterval iv(f.start_time(), f.end_time());
        const double c = testutil::grid_value(rs, 0.0, 2.0);
        for (VarMode m : {VarMode::TV, VarMode::UTV, VarMode::DTV})
            CHECK(tv_trunc_oracle(f, c, iv, m) == tv_trunc_exhaustive(f, c, iv, m));

        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        for (VarMode m : {VarMode::TV, VarMode::UTV, VarMode::DTV})
            CHECK(ab_trunc_oracle(tri, 0, tri.size() - 1, m) ==
                  ab_trunc_exhaustive(tri, 0, tri.size() - 1, m));
    }
}

TEST_CASE("constant band specialises the ab oracle to the c oracle") {
    RandomStream rs(7105);
    for (int rep = 0; rep < 500; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        const double c = 0.25 + testutil::grid_value(rs, 0.0, 1.5);
        DiscreteTriple tri = make_triple(f, -c / 2, c / 2);
        TimeInterval iv(f.start_time(), f.end_time());
        for (VarMode m : {VarMode::TV, VarMode::UTV, VarMode::DTV})
            CHECK(ab_trunc_oracle(tri, 0, tri.size() - 1, m) ==
                  doctest::Approx(tv_trunc_oracle(f, c, iv, m)).epsilon(1e-12));
    }
}

TEST_CASE("band wider than the oscillation clips everything to zero") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    DiscreteTriple tri = make_triple(f, -4.0, 4.0); // gamma = 8 > oscillation
    CHECK(ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::TV) == 0.0);
}

TEST_CASE("interleaved zigzag with the unit constant band") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    DiscreteTriple tri = make_triple(f, -0.5, 0.5);
    CHECK(ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::TV) == 2.0);
    CHECK(ab_trunc_exhaustive(tri, 0, tri.size() - 1, VarMode::TV) == 2.0);
}

TEST_CASE("truncated Jordan identity on small random instances") {
    RandomStream rs(7106);
    for (int rep = 0; rep < 300; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 5));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        const double tv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::TV);
        const double utv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::UTV);
        const double dtv = ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::DTV);
        CHECK(tv == doctest::Approx(utv + dtv).epsilon(1e-10));
    }
}

TEST_CASE("monotonicity in c") {
    RandomStream rs(7107);
    for (int rep = 0; rep < 200; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        TimeInterval iv(f.start_time(), f.end_time());
        const double c1 = testutil::grid_value(rs, 0.0, 1.0);
        const double c2 = c1 + testutil::grid_value(rs, 0.0, 1.0);
        CHECK(tv_trunc_oracle(f, c1, iv, VarMode::TV) >= tv_trunc_oracle(f, c2, iv, VarMode::TV));
    }
}

TEST_CASE("concatenation inequality for the ab oracle") {
    RandomStream rs(7108);
    for (int rep = 0; rep < 200; ++rep) {
        auto f = testutil::random_step(rs, 4 + static_cast<std::size_t>(rs.next_uniform() * 4));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        const std::size_t n = tri.size();
        const std::size_t mid = 1 + static_cast<std::size_t>(rs.next_uniform() * (n - 2));
        for (VarMode m : {VarMode::TV, VarMode::UTV, VarMode::DTV}) {
            const double left = ab_trunc_oracle(tri, 0, mid, m);
            const double right = ab_trunc_oracle(tri, mid, n - 1, m);
            const double whole = ab_trunc_oracle(tri, 0, n - 1, m);
            CHECK(left + right <= whole + 1e-12);
        }
    }
}

TEST_CASE("oracle lower-bounds the variation of any feasible path") {
    RandomStream rs(7109);
    for (int rep = 0; rep < 500; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        // feasible xi: psi - mix of the band edges
        std::vector<double> xi(tri.size());
        for (std::size_t i = 0; i < xi.size(); ++i) {
            const double w = rs.next_uniform();
            xi[i] = tri.psi()[i] - (w * tri.alpha()[i] + (1 - w) * tri.beta()[i]);
        }
        StepFunction xif = step_from_interleaved(tri.knots(), xi);
        VariationProfile pv = total_variation(xif);
        CHECK(pv.final_tv() >= ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::TV) - 1e-12);
        CHECK(pv.final_utv() >= ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::UTV) - 1e-12);
        CHECK(pv.final_dtv() >= ab_trunc_oracle(tri, 0, tri.size() - 1, VarMode::DTV) - 1e-12);
    }
}

TEST_CASE("oracle size caps") {
    std::vector<double> times(1100), vals(1100);
    for (std::size_t i = 0; i < times.size(); ++i) {
        times[i] = static_cast<double>(i);
        vals[i] = static_cast<double>(i % 2);
    }
    StepFunction f = from_samples(times, vals);
    TimeInterval iv(f.start_time(), f.end_time());
    CHECK_THROWS_AS(tv_trunc_oracle(f, 0.5, iv, VarMode::TV), OracleTooLarge);
    StepFunction g = from_samples({0, 1, 2, 3, 4, 5, 6, 7}, {0, 1, 0, 1, 0, 1, 0, 1});
    CHECK_THROWS_AS(tv_trunc_exhaustive(g, 0.5, TimeInterval(0, 7), VarMode::TV), OracleTooLarge);
}
