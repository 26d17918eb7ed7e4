#include "oracles.hpp"
#include "rdu/battery.hpp"
#include "rdu/ellsberg.hpp"
#include "rdu/evaluator.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <random>

using namespace rdu;

namespace {

Prior P(std::vector<double> w) { return Prior(std::move(w)); }

Preference pref_of(UtilityFn phi, Distortion psi, AmbiguityIndex c) {
    const auto n = c.dimension();
    return {std::move(phi), std::move(psi), std::move(c), default_state_ids(n)};
}

} // namespace

TEST(InnerRdu, Examples) {
    TwoStageVariable v({"w"}, {{0.7, 0.3}}, {{0, 100}});
    EXPECT_NEAR(inner_rdu(v, UtilityFn::identity(), Distortion::power(2))[0], 9.0, 1e-12);
    const auto c = v.constant_like(2.0);
    const auto phi = UtilityFn::exponential(0.4);
    EXPECT_EQ(inner_rdu(c, phi, Distortion::tk(0.6))[0], phi(2.0));
    TwoStageVariable w({"a", "b"}, {{0.5, 0.5}, {0.2, 0.8}}, {{-1, 4}, {3, 0}});
    const auto base = inner_rdu(w, UtilityFn::identity(), Distortion::power(0.7));
    const auto aff = inner_rdu(w, UtilityFn::affine(3, -2), Distortion::power(0.7));
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_NEAR(aff[i], 3 * base[i] - 2, 1e-12);
}

TEST(InnerRdu, OutOfDomainNamesLocation) {
    TwoStageVariable v({"a", "bad"}, {{0.5, 0.5}, {0.5, 0.5}}, {{1, 1}, {2, -3}});
    try {
        inner_rdu(v, UtilityFn::power(0.5), Distortion::identity());
        FAIL();
    } catch (const RangeError& e) {
        EXPECT_NE(std::string(e.what()).find("'bad'"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("outcome 1"), std::string::npos);
    }
}

TEST(Evaluate, Examples) {
    TwoStageVariable single({"s0"}, {{0.7, 0.3}}, {{0, 100}});
    const auto psi = Distortion::power(2);
    for (const auto& c : {AmbiguityIndex::full_simplex(1), AmbiguityIndex::entropic(2.0, P({1.0}))}) {
        const auto e = evaluate(single, pref_of(UtilityFn::identity(), psi, c));
        EXPECT_NEAR(e.value_utils, 9.0, 1e-12);
    }

    TwoStageVariable two({"s0", "s1"}, {{1.0}, {1.0}}, {{0}, {1}});
    const auto e = evaluate(two, pref_of(UtilityFn::identity(), Distortion::identity(),
                                         AmbiguityIndex::entropic(1.0, P({0.5, 0.5}))));
    EXPECT_NEAR(e.value_utils, 0.379885, 1e-6);

    const auto phi = UtilityFn::exponential(0.5);
    const auto pref = pref_of(phi, Distortion::power(2), AmbiguityIndex::gini(1.0, P({0.3, 0.7})));
    const auto c = evaluate(two.constant_like(1.5), pref);
    EXPECT_NEAR(c.value_utils, phi(1.5), 1e-12);
    ASSERT_TRUE(c.certainty_equivalent);
    EXPECT_NEAR(*c.certainty_equivalent, 1.5, 1e-12);
}

TEST(Evaluate, StateMismatch) {
    TwoStageVariable v({"x", "y"}, {{1.0}, {1.0}}, {{0}, {1}});
    const auto pref = pref_of(UtilityFn::identity(), Distortion::identity(), AmbiguityIndex::full_simplex(2));
    EXPECT_THROW(evaluate(v, pref), ShapeError);
    EXPECT_THROW(Preference(UtilityFn::identity(), Distortion::identity(), AmbiguityIndex::full_simplex(2),
                            {"only"}),
                 ShapeError);
}

TEST(Evaluate, ValueBounds) {
    std::mt19937_64 rng(71);
    const auto pref = pref_of(UtilityFn::exponential(0.2), Distortion::prelec(0.65, 1.0),
                              AmbiguityIndex::entropic(0.8, P({0.2, 0.3, 0.5})));
    BatterySpec spec;
    for (const auto& v : generate_battery(spec, pref)) {
        const auto e = evaluate(v, pref);
        const double lo = *std::min_element(e.per_state_utils.begin(), e.per_state_utils.end());
        EXPECT_GE(e.value_utils, lo - 1e-12);
        EXPECT_LE(e.value_utils, P({0.2, 0.3, 0.5}).expectation(e.per_state_utils) + 1e-12);
    }
}

TEST(Evaluate, MinimizerOptimality) {
    std::mt19937_64 rng(73);
    std::normal_distribution<double> g;
    for (const auto& c : {AmbiguityIndex::entropic(0.8, P({0.2, 0.3, 0.5})),
                          AmbiguityIndex::gini(0.4, P({0.2, 0.3, 0.5}))}) {
        const auto pref = pref_of(UtilityFn::identity(), Distortion::power(1.5), c);
        for (const auto& v : generate_battery(BatterySpec{20}, pref)) {
            const auto e = evaluate(v, pref);
            const auto& q = e.minimizer.weights();
            for (int k = 0; k < 100; ++k) {
                std::vector<double> d(3);
                for (double& x : d)
                    x = g(rng);
                const double mean = (d[0] + d[1] + d[2]) / 3;
                for (double& x : d)
                    x -= mean;
                double t = 1e-3;
                for (std::size_t i = 0; i < 3; ++i)
                    if (d[i] < 0)
                        t = std::min(t, -q[i] / d[i]);
                std::vector<double> qq(3);
                for (std::size_t i = 0; i < 3; ++i)
                    qq[i] = std::max(0.0, q[i] + t * d[i]);
                qq[2] = 1.0 - qq[0] - qq[1];
                if (qq[2] < 0)
                    continue;
                const Prior alt(qq);
                const double obj = alt.expectation(e.per_state_utils) + c.penalty(alt);
                EXPECT_GE(obj, e.value_utils - 1e-9);
            }
        }
    }
}

TEST(Prefer, Examples) {
    TwoStageVariable v({"s0"}, {{0.5, 0.5}}, {{0, 10}});
    TwoStageVariable u({"s0"}, {{0.6, 0.4}}, {{0, 10}});
    const auto pref = pref_of(UtilityFn::identity(), Distortion::power(2), AmbiguityIndex::full_simplex(1));
    EXPECT_EQ(prefer(v, u, pref), Ordering::better);
    EXPECT_EQ(prefer(u, v, pref), Ordering::worse);
    EXPECT_EQ(prefer(v, v, pref), Ordering::indifferent);
    EXPECT_STREQ(to_string(Ordering::indifferent), "indifferent");
}

TEST(Prefer, FsdMonotone) {
    std::mt19937_64 rng(79);
    const auto pref = pref_of(UtilityFn::exponential(0.3), Distortion::tk(0.61), AmbiguityIndex::full_simplex(1));
    for (int k = 0; k < 300; ++k) {
        const auto a = oracle::random_dist(rng);
        const auto b = oracle::random_dist(rng);
        if (dominance(a, b, DominanceOrder::FSD).relation != DominanceRelation::dominates)
            continue;
        const auto va = TwoStageVariable({"s0"}, {a.probs()}, {a.values()});
        const auto vb = TwoStageVariable({"s0"}, {b.probs()}, {b.values()});
        EXPECT_NE(prefer(va, vb, pref), Ordering::worse);
    }
}

TEST(Ellsberg, Demo) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = ellsberg_demo();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_EQ(r.value_u, 0.0);
    EXPECT_EQ(r.value_v, 20.0);
    EXPECT_EQ(r.value_u_plus_r, 100.0);
    EXPECT_EQ(r.value_v_plus_r, 20.0);
    EXPECT_TRUE(r.reversal);
    EXPECT_LT(secs, 1.0);
}

TEST(Ellsberg, WorstCaseStates) {
    const auto e = ellsberg_variables();
    const Preference pref(UtilityFn::identity(), Distortion::identity(), AmbiguityIndex::full_simplex(546),
                          e.v.state_ids());
    const auto ev = evaluate(lift_add(e.v, e.r, UtilityFn::identity()), pref);
    const auto k = std::max_element(ev.minimizer.weights().begin(), ev.minimizer.weights().end()) -
                   ev.minimizer.weights().begin();
    EXPECT_EQ(e.v.state_ids()[std::size_t(k)], ellsberg_state_id(25, 5));
    EXPECT_EQ(prefer(e.v, e.u, pref), Ordering::better);
}

TEST(AmbiguityNeutral, Examples) {
    TwoStageVariable two({"s0", "s1"}, {{1.0}, {1.0}}, {{0}, {1}});
    EXPECT_EQ(ambiguity_neutral_value(two, UtilityFn::identity(), Distortion::identity(), P({0.5, 0.5})), 0.5);
    TwoStageVariable w({"s0", "s1"}, {{0.4, 0.6}, {0.5, 0.5}}, {{-1, 3}, {2, 0}});
    const auto phi = UtilityFn::exponential(0.2);
    const auto psi = Distortion::power(1.3);
    const auto p0 = P({0.35, 0.65});
    const auto degenerate = pref_of(phi, psi, AmbiguityIndex::tabulated({{p0, 0.0}}));
    EXPECT_NEAR(ambiguity_neutral_value(w, phi, psi, p0), evaluate(w, degenerate).value_utils, 1e-15);
}
