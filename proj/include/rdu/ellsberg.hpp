#pragma once

// Two-urn Ellsberg construction: urns A and B share 25 red balls, urns C
// and D share 30. A state of the world fixes the red counts r_A in urn A
// (0..25) and r_C in urn C (5..25); urn B then holds 25 - r_A red balls.
// A single draw U, uniform on {1..25}, drives every bet:
//   v pays 100 if U <= r_C, u pays 100 if U <= r_A, r pays 100 if U <= r_B.

#include "rdu/ambiguity.hpp"
#include "rdu/evaluator.hpp"
#include "rdu/utility.hpp"

#include <string>
#include <vector>

namespace rdu {

struct EllsbergVariables {
    TwoStageVariable v;
    TwoStageVariable u;
    TwoStageVariable r;
};

inline std::string ellsberg_state_id(int red_a, int red_c) {
    return "A" + std::to_string(red_a) + "-C" + std::to_string(red_c);
}

/// 21 x 26 = 546 composition states, 25 equally likely draws each.
inline EllsbergVariables ellsberg_variables() {
    constexpr int balls = 25;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> probs, pv, pu, pr;
    for (int red_c = 5; red_c <= balls; ++red_c) {
        for (int red_a = 0; red_a <= balls; ++red_a) {
            ids.push_back(ellsberg_state_id(red_a, red_c));
            probs.emplace_back(balls, 1.0 / balls);
            std::vector<double> v(balls), u(balls), r(balls);
            for (int draw = 1; draw <= balls; ++draw) {
                v[draw - 1] = draw <= red_c ? 100.0 : 0.0;
                u[draw - 1] = draw <= red_a ? 100.0 : 0.0;
                r[draw - 1] = draw <= balls - red_a ? 100.0 : 0.0;
            }
            pv.push_back(std::move(v));
            pu.push_back(std::move(u));
            pr.push_back(std::move(r));
        }
    }
    return {TwoStageVariable(ids, probs, std::move(pv)), TwoStageVariable(ids, probs, std::move(pu)),
            TwoStageVariable(ids, probs, std::move(pr))};
}

struct EllsbergReport {
    double value_u;
    double value_v;
    double value_u_plus_r;
    double value_v_plus_r;
    /// v > u while u (+) r > v (+) r.
    bool reversal;
};

/// Maxmin over all compositions with linear utility and no distortion.
inline EllsbergReport ellsberg_demo() {
    const auto vars = ellsberg_variables();
    const auto phi = UtilityFn::identity();
    const Preference pref(phi, Distortion::identity(), AmbiguityIndex::full_simplex(vars.v.num_states()),
                          vars.v.state_ids());
    EllsbergReport rep{};
    rep.value_u = evaluate(vars.u, pref).value_utils;
    rep.value_v = evaluate(vars.v, pref).value_utils;
    rep.value_u_plus_r = evaluate(lift_add(vars.u, vars.r, phi), pref).value_utils;
    rep.value_v_plus_r = evaluate(lift_add(vars.v, vars.r, phi), pref).value_utils;
    rep.reversal = compare_values(rep.value_v, rep.value_u) == Ordering::better &&
                   compare_values(rep.value_u_plus_r, rep.value_v_plus_r) == Ordering::better;
    return rep;
}

} // namespace rdu
