#pragma once

#include "rdu/ambiguity.hpp"
#include "rdu/distortion.hpp"
#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"
#include "rdu/utility.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rdu {

/// Indifference band for preference comparisons, in utility units.
inline constexpr double kIndifferenceTol = 1e-9;

/// Preference triple (phi, psi, c) over a labelled set of states.
struct Preference {
    UtilityFn phi;
    Distortion psi;
    AmbiguityIndex c;
    std::vector<std::string> state_ids;

    Preference(UtilityFn phi_, Distortion psi_, AmbiguityIndex c_, std::vector<std::string> ids)
        : phi(std::move(phi_)), psi(std::move(psi_)), c(std::move(c_)), state_ids(std::move(ids)) {
        if (state_ids.size() != c.dimension())
            throw ShapeError("preference: " + std::to_string(state_ids.size()) +
                             " state ids but the penalty has dimension " +
                             std::to_string(c.dimension()));
    }
};

/// Default labels s0, s1, ...
inline std::vector<std::string> default_state_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i)
        ids.push_back("s" + std::to_string(i));
    return ids;
}

struct Evaluation {
    /// min_Q { E_Q[per_state_utils] + c(Q) }
    double value_utils;
    std::vector<double> per_state_utils;
    Prior minimizer;
    /// phi^{-1}(value_utils); empty when the value falls outside the image of phi.
    std::optional<double> certainty_equivalent;
    double penalty_at_minimizer;
};

/// Rank-dependent utility of a single lottery: Choquet integral of phi(X).
inline double rdu_value(const DiscreteDistribution& d, const UtilityFn& phi, const Distortion& psi) {
    return choquet(d.push_forward([&](double x) { return phi(x); }), psi);
}

/**
 * Per-state rank-dependent utilities int phi(v^w) d nu_psi.
 * Payoffs outside the utility domain are reported with their location.
 */
inline std::vector<double> inner_rdu(const TwoStageVariable& v, const UtilityFn& phi,
                                     const Distortion& psi) {
    std::vector<double> out(v.num_states());
    for (std::size_t w = 0; w < v.num_states(); ++w) {
        const auto& pay = v.payoffs()[w];
        for (std::size_t s = 0; s < pay.size(); ++s)
            if (!phi.domain().contains(pay[s]))
                throw RangeError("payoff " + detail::fmt_num(pay[s]) + " at state '" +
                                 v.state_ids()[w] + "', outcome " + std::to_string(s) +
                                 " is outside the utility domain");
        out[w] = rdu_value(v.marginal(w), phi, psi);
    }
    return out;
}

inline void check_states(const TwoStageVariable& v, const Preference& pref) {
    if (v.state_ids() != pref.state_ids)
        throw ShapeError("variable states do not match the preference states");
}

inline Evaluation evaluate(const TwoStageVariable& v, const Preference& pref) {
    check_states(v, pref);
    auto utils = inner_rdu(v, pref.phi, pref.psi);
    auto rm = pref.c.robust_min(utils);
    std::optional<double> ce;
    if (pref.phi.image().contains_approx(rm.value))
        ce = pref.phi.inverse(rm.value);
    const double pen = pref.c.penalty(rm.minimizer);
    return {rm.value, std::move(utils), std::move(rm.minimizer), ce, pen};
}

enum class Ordering { better, worse, indifferent };

inline const char* to_string(Ordering o) {
    switch (o) {
    case Ordering::better: return "preferred";
    case Ordering::worse: return "dispreferred";
    case Ordering::indifferent: return "indifferent";
    }
    return "?";
}

inline Ordering compare_values(double a, double b) {
    if (a > b + kIndifferenceTol)
        return Ordering::better;
    if (b > a + kIndifferenceTol)
        return Ordering::worse;
    return Ordering::indifferent;
}

/// Ordering of v1 relative to v2 under the preference.
inline Ordering prefer(const TwoStageVariable& v1, const TwoStageVariable& v2, const Preference& pref) {
    return compare_values(evaluate(v1, pref).value_utils, evaluate(v2, pref).value_utils);
}

/// E_{p0}[ int phi(v^w) d nu_psi ], the ambiguity-neutral benchmark.
inline double ambiguity_neutral_value(const TwoStageVariable& v, const UtilityFn& phi,
                                      const Distortion& psi, const Prior& p0) {
    const auto utils = inner_rdu(v, phi, psi);
    if (p0.size() != utils.size())
        throw ShapeError("ambiguity neutral value: prior dimension mismatch");
    return p0.expectation(utils);
}

} // namespace rdu
