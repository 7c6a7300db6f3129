#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "truncvar/envelope.hpp"
#include "truncvar/variation.hpp"

using namespace truncvar;

namespace {

DiscreteTriple constant_band(const StepFunction& f, double alpha, double beta) {
    return interleave(f, StepFunction(f.knots(), std::vector<double>(f.knot_count(), alpha),
                                      std::vector<double>(f.knot_count() - 1, alpha)),
                      StepFunction(f.knots(), std::vector<double>(f.knot_count(), beta),
                                   std::vector<double>(f.knot_count() - 1, beta)));
}

void check_profile_matches_oracle(const DiscreteTriple& tri) {
    EnvelopeResult env = minimal_envelope(tri);
    const auto tvp = ab_trunc_oracle_prefixes(tri, 0, tri.size() - 1, VarMode::TV);
    const auto utvp = ab_trunc_oracle_prefixes(tri, 0, tri.size() - 1, VarMode::UTV);
    const auto dtvp = ab_trunc_oracle_prefixes(tri, 0, tri.size() - 1, VarMode::DTV);
    for (std::size_t i = 0; i < tri.size(); ++i) {
        CHECK(env.profile.tv[i] == doctest::Approx(tvp[i]).epsilon(1e-12));
        CHECK(env.profile.utv[i] == doctest::Approx(utvp[i]).epsilon(1e-12));
        CHECK(env.profile.dtv[i] == doctest::Approx(dtvp[i]).epsilon(1e-12));
    }
}

} // namespace

TEST_CASE("switching indices on the running example") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    auto [iu0, id0] = switching_indices(constant_band(f, -0.5, 0.5));
    REQUIRE(iu0.has_value());
    CHECK(*iu0 == 2); // first interleaved index holding the value 2
    CHECK(!id0.has_value());

    StepFunction g = from_samples({0, 1}, {0, -2});
    auto [iu1, id1] = switching_indices(constant_band(g, -0.5, 0.5));
    CHECK(!iu1.has_value());
    REQUIRE(id1.has_value());
    CHECK(*id1 == 2); // index holding -2

    StepFunction c = StepFunction::constant(0, 1, 1.0);
    auto [iu2, id2] = switching_indices(constant_band(c, -0.5, 0.5));
    CHECK(!iu2.has_value());
    CHECK(!id2.has_value());
}

TEST_CASE("minimal envelope of the running example") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    DiscreteTriple tri = constant_band(f, -0.5, 0.5);
    EnvelopeResult env = minimal_envelope(tri);

    CHECK(env.start_value == 0.5);
    CHECK(env.branch == StartBranch::Up);
    const auto& pv = env.envelope.point_values();
    CHECK(pv == std::vector<double>{0.5, 1.5, 1.5, 2.5});
    CHECK(env.profile.final_tv() == 2.0);
    REQUIRE(env.switches.size() == 1);
    CHECK(env.switches[0].index == 2);
    CHECK(env.switches[0].direction == Direction::Up);
    check_profile_matches_oracle(tri);
}

TEST_CASE("band absorbing the path gives a flat envelope") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 0.25, -0.25, 0.25});
    DiscreteTriple tri = constant_band(f, -1.0, 1.0); // gamma = 2 > oscillation
    EnvelopeResult env = minimal_envelope(tri);
    CHECK(env.branch == StartBranch::Flat);
    CHECK(env.profile.final_tv() == 0.0);
    CHECK(env.switches.empty());
    // flat value is the minimum of psi - alpha over the horizon
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tri.size(); ++i)
        m = std::min(m, tri.psi()[i] - tri.alpha()[i]);
    CHECK(env.start_value == m);
    for (double v : env.envelope.point_values()) CHECK(v == m);
}

TEST_CASE("zero-width band forces the envelope onto the input") {
    RandomStream rs(7201);
    for (int rep = 0; rep < 100; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        DiscreteTriple tri = constant_band(f, 0.0, 0.0);
        EnvelopeResult env = minimal_envelope(tri);
        CHECK(env.envelope == f);
        CHECK(env.profile.final_tv() == total_variation(f).final_tv());
    }
}

TEST_CASE("optimal start on the running example and its mirror") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    OptimalStart s = optimal_start(constant_band(f, -0.5, 0.5));
    CHECK(s.value == 0.5);
    CHECK(s.branch == StartBranch::Up);

    StepFunction g = from_samples({0, 1, 2, 3}, {0, -2, -1, -3});
    OptimalStart sm = optimal_start(constant_band(g, -0.5, 0.5));
    CHECK(sm.value == -0.5);
    CHECK(sm.branch == StartBranch::Down);

    StepFunction c = StepFunction::constant(0, 1, 3.0);
    CHECK(optimal_start(constant_band(c, -0.5, 0.5)).branch == StartBranch::Flat);
}

TEST_CASE("optimal start agrees with the envelope's start value") {
    RandomStream rs(7202);
    for (int rep = 0; rep < 500; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 8));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        EnvelopeResult env = minimal_envelope(tri);
        OptimalStart s = optimal_start(tri);
        CHECK(s.value == env.start_value);
        CHECK(s.branch == env.branch);

        // the first realised switch is the earlier of the two break indices
        auto [iu0, id0] = switching_indices(tri);
        if (env.switches.empty()) {
            CHECK(!iu0.has_value());
            CHECK(!id0.has_value());
        } else {
            const std::size_t first =
                std::min(iu0.value_or(tri.size()), id0.value_or(tri.size()));
            CHECK(env.switches.front().index == first);
            CHECK(env.switches.front().direction ==
                  (iu0.value_or(tri.size()) <= id0.value_or(tri.size()) ? Direction::Up
                                                                        : Direction::Down));
        }
    }
}

TEST_CASE("envelope equals the oracle exactly on integer-scaled sequences") {
    // values on {0, +-1, +-2}, bands from three fixed choices; exhaustive up
    // to length 7, randomly sampled at lengths 9 and 11
    const std::vector<std::pair<double, double>> bands = {{-0.5, 0.5}, {-1, 1}, {0, 2}};
    auto check_exact = [&](const std::vector<double>& psi) {
        std::vector<double> knots((psi.size() + 1) / 2);
        for (std::size_t k = 0; k < knots.size(); ++k) knots[k] = static_cast<double>(k);
        for (const auto& [a, b] : bands) {
            DiscreteTriple tri(knots, psi, std::vector<double>(psi.size(), a),
                               std::vector<double>(psi.size(), b));
            EnvelopeResult env = minimal_envelope(tri);
            const auto tv = ab_trunc_oracle_prefixes(tri, 0, psi.size() - 1, VarMode::TV);
            const auto utv = ab_trunc_oracle_prefixes(tri, 0, psi.size() - 1, VarMode::UTV);
            const auto dtv = ab_trunc_oracle_prefixes(tri, 0, psi.size() - 1, VarMode::DTV);
            for (std::size_t i = 0; i < psi.size(); ++i) {
                REQUIRE(env.profile.tv[i] == tv[i]);
                REQUIRE(env.profile.utv[i] == utv[i]);
                REQUIRE(env.profile.dtv[i] == dtv[i]);
            }
        }
    };

    for (std::size_t len : {1, 3, 5, 7}) {
        std::vector<double> psi(len);
        std::size_t total = 1;
        for (std::size_t i = 0; i < len; ++i) total *= 5;
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (std::size_t i = 0; i < len; ++i) {
                psi[i] = static_cast<double>(static_cast<long>(c % 5) - 2);
                c /= 5;
            }
            check_exact(psi);
        }
    }
    RandomStream rs(7210);
    for (int rep = 0; rep < 20000; ++rep) {
        const std::size_t len = rs.next_uniform() < 0.5 ? 9 : 11;
        std::vector<double> psi(len);
        for (auto& v : psi)
            v = static_cast<double>(static_cast<long>(rs.next_uniform() * 5) - 2);
        check_exact(psi);
    }
}

TEST_CASE("envelope prefix profiles equal the oracle on random instances") {
    RandomStream rs(7203);
    for (int rep = 0; rep < 300; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        auto [a, b] = testutil::random_band(rs, f);
        check_profile_matches_oracle(interleave(f, a, b));
    }
}

TEST_CASE("envelope feasibility and switch structure") {
    RandomStream rs(7204);
    for (int rep = 0; rep < 500; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 8));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        EnvelopeResult env = minimal_envelope(tri);
        const auto e = env.envelope.interleaved();

        double gamma0 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tri.size(); ++i)
            gamma0 = std::min(gamma0, tri.beta()[i] - tri.alpha()[i]);

        for (std::size_t i = 0; i < tri.size(); ++i) {
            CHECK(tri.psi()[i] - e[i] >= tri.alpha()[i] - 1e-12);
            CHECK(tri.psi()[i] - e[i] <= tri.beta()[i] + 1e-12);
        }
        // alternating directions
        for (std::size_t s = 1; s < env.switches.size(); ++s)
            CHECK(env.switches[s].direction != env.switches[s - 1].direction);
        // every switch is witnessed by an oscillation of the relevant track
        // of magnitude at least gamma_0
        for (std::size_t s = 0; s < env.switches.size(); ++s) {
            const std::size_t j = env.switches[s].index;
            const std::size_t seg_begin = s == 0 ? 0 : env.switches[s - 1].index;
            double osc = -std::numeric_limits<double>::infinity();
            for (std::size_t k = seg_begin; k < j; ++k) {
                if (env.switches[s].direction == Direction::Up) {
                    const double bj = tri.psi()[j] - tri.beta()[j];
                    const double bk = tri.psi()[k] - tri.beta()[k];
                    osc = std::max(osc, bj - bk);
                } else {
                    const double aj = tri.psi()[j] - tri.alpha()[j];
                    const double ak = tri.psi()[k] - tri.alpha()[k];
                    osc = std::max(osc, ak - aj);
                }
            }
            CHECK(osc >= gamma0 - 1e-12);
        }
        // profile consistency with the envelope's own variation
        VariationProfile direct = total_variation(env.envelope);
        CHECK(env.profile.final_tv() == direct.final_tv());
    }
}

TEST_CASE("envelope achieves the lower bound among feasible paths") {
    RandomStream rs(7205);
    for (int rep = 0; rep < 500; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        EnvelopeResult env = minimal_envelope(tri);
        std::vector<double> xi(tri.size());
        for (std::size_t i = 0; i < xi.size(); ++i) {
            const double w = rs.next_uniform();
            xi[i] = tri.psi()[i] - (w * tri.alpha()[i] + (1 - w) * tri.beta()[i]);
        }
        const double tv_xi = total_variation(step_from_interleaved(tri.knots(), xi)).final_tv();
        CHECK(tv_xi >= env.profile.final_tv() - 1e-12);
    }
}

TEST_CASE("perturbing the envelope breaks feasibility or raises variation") {
    RandomStream rs(7206);
    int checked = 0;
    for (int rep = 0; rep < 500 || checked < 100; ++rep) {
        auto f = testutil::random_step(rs, 3 + static_cast<std::size_t>(rs.next_uniform() * 6));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        EnvelopeResult env = minimal_envelope(tri);
        std::vector<double> e = env.envelope.interleaved();

        const std::size_t i = 1 + static_cast<std::size_t>(rs.next_uniform() * (e.size() - 1));
        const double delta = (rs.next_uniform() < 0.5 ? -0.25 : 0.25);
        e[i] += delta;

        const bool feasible = (tri.psi()[i] - e[i] >= tri.alpha()[i]) &&
                              (tri.psi()[i] - e[i] <= tri.beta()[i]);
        if (!feasible) continue; // perturbation left the band: nothing to compare
        ++checked;
        VariationProfile pp = total_variation(step_from_interleaved(tri.knots(), e));
        bool strictly_worse_somewhere = false;
        for (std::size_t k = 0; k < pp.tv.size(); ++k)
            if (pp.tv[k] > env.profile.tv[k] + 1e-12) strictly_worse_somewhere = true;
        CHECK(strictly_worse_somewhere);
        if (rep > 5000) break;
    }
}

TEST_CASE("jordan form of the envelope values") {
    RandomStream rs(7207);
    for (int rep = 0; rep < 300; ++rep) {
        auto f = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        auto [a, b] = testutil::random_band(rs, f);
        DiscreteTriple tri = interleave(f, a, b);
        EnvelopeResult env = minimal_envelope(tri);
        const auto e = env.envelope.interleaved();
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double rhs = env.start_value + env.profile.utv[i] - env.profile.dtv[i];
            CHECK(e[i] == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-knot functions have zero variation everywhere") {
    StepFunction p({1.0}, {5.0}, {});
    CHECK(total_variation(p).final_tv() == 0.0);
    CHECK(tv_truncated(p, 0.5).final_tv() == 0.0);
    CHECK(p_variation(p, 2.0) == 0.0);
}

TEST_CASE("tv_truncated matches the oracle and handles wide bands") {
    StepFunction f = from_samples({0, 1, 2, 3}, {0, 2, 1, 3});
    TimeInterval iv(0, 3);
    VariationProfile p1 = tv_truncated(f, 1.0, iv);
    CHECK(p1.final_tv() == 2.0);
    CHECK(p1.final_utv() == 2.0);
    CHECK(p1.final_dtv() == 0.0);

    VariationProfile p05 = tv_truncated(f, 0.5, iv);
    CHECK(p05.final_tv() == 3.5);
    CHECK(p05.final_utv() == 3.0);
    CHECK(p05.final_dtv() == 0.5);

    CHECK(tv_truncated(f, 10.0, iv).final_tv() == 0.0);

    RandomStream rs(7208);
    for (int rep = 0; rep < 300; ++rep) {
        auto g = testutil::random_step(rs, 2 + static_cast<std::size_t>(rs.next_uniform() * 6));
        const double c = 0.25 + testutil::grid_value(rs, 0.0, 1.5);
        TimeInterval giv(g.start_time(), g.end_time());
        CHECK(tv_truncated(g, c, giv).final_tv() ==
              doctest::Approx(tv_trunc_oracle(g, c, giv, VarMode::TV)).epsilon(1e-12));
    }
}
