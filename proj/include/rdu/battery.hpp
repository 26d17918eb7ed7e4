#pragma once

// Seeded random batteries and the behavioural checks run over them:
// comparative ambiguity aversion, ambiguity aversion against the neutral
// benchmark, model reductions, and the invariants of the representation.

#include "rdu/ambiguity.hpp"
#include "rdu/distortion.hpp"
#include "rdu/distribution.hpp"
#include "rdu/evaluator.hpp"
#include "rdu/utility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace rdu {

/// Default seed of every battery.
inline constexpr std::uint64_t kDefaultBatterySeed = 20240611;

struct BatterySpec {
    std::size_t size = 200;
    std::size_t max_outcomes = 8;
    std::uint64_t seed = kDefaultBatterySeed;
    double payoff_lo = -10.0;
    double payoff_hi = 10.0;
};

namespace detail {

inline std::vector<double> random_probs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    std::vector<double> p(n);
    for (double& x : p)
        x = unif(rng);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p)
        x /= total;
    return p;
}

inline double random_payoff(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> unif(lo, hi);
    double x = unif(rng);
    // a quarter of the draws land on a coarse grid so that ties occur
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0)
        x = std::clamp(std::round(x), lo, hi);
    return x;
}

/// Payoff range of the spec clipped to the utility domain.
inline std::pair<double, double> payoff_range(const BatterySpec& spec, const UtilityFn& phi) {
    const double lo = std::max(spec.payoff_lo, phi.domain().lo);
    const double hi = std::min(spec.payoff_hi, phi.domain().hi);
    return {lo, hi};
}

} // namespace detail

/// Random variable with the given states and up to max_outcomes outcomes.
inline TwoStageVariable random_variable(std::mt19937_64& rng, const std::vector<std::string>& ids,
                                        std::size_t max_outcomes, double lo, double hi,
                                        bool uniform_probs = false) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_outcomes)(rng);
    std::vector<std::vector<double>> probs, pay;
    for (std::size_t w = 0; w < ids.size(); ++w) {
        probs.push_back(uniform_probs ? std::vector<double>(k, 1.0 / double(k))
                                      : detail::random_probs(rng, k));
        std::vector<double> row(k);
        for (double& x : row)
            x = detail::random_payoff(rng, lo, hi);
        pay.push_back(std::move(row));
    }
    return {ids, std::move(probs), std::move(pay)};
}

/// Same lottery in every state.
inline TwoStageVariable random_unambiguous(std::mt19937_64& rng, const std::vector<std::string>& ids,
                                           std::size_t max_outcomes, double lo, double hi) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, max_outcomes)(rng);
    const auto p = detail::random_probs(rng, k);
    std::vector<double> row(k);
    for (double& x : row)
        x = detail::random_payoff(rng, lo, hi);
    return {ids, std::vector<std::vector<double>>(ids.size(), p),
            std::vector<std::vector<double>>(ids.size(), row)};
}

/// Seeded battery of variables over the preference's states.
inline std::vector<TwoStageVariable> generate_battery(const BatterySpec& spec, const Preference& pref) {
    std::mt19937_64 rng(spec.seed);
    const auto [lo, hi] = detail::payoff_range(spec, pref.phi);
    std::vector<TwoStageVariable> out;
    out.reserve(spec.size);
    for (std::size_t i = 0; i < spec.size; ++i)
        out.push_back(random_variable(rng, pref.state_ids, spec.max_outcomes, lo, hi));
    return out;
}

// ---------------------------------------------------------------------------
// Comparative ambiguity aversion
// ---------------------------------------------------------------------------

struct AversionCounterexample {
    std::size_t case_index;
    double sure_amount;  // m with v ~_A m
    double value_a;      // U_A(v)
    double value_b;      // U_B(v)
    double sure_util_b;  // phi_B(m)
};

struct ComparativeAversionReport {
    bool phi_equivalent = false;
    double phi_scale = 0.0;   // phi_B ~ scale * phi_A + shift
    double phi_shift = 0.0;
    double phi_residual = 0.0;
    bool psi_equal = false;
    double psi_max_diff = 0.0;
    bool penalty_dominates = false;
    std::size_t penalty_points = 0;
    bool structural = false;
    std::size_t cases = 0;
    std::vector<AversionCounterexample> counterexamples;
    bool behavioral() const { return counterexamples.empty(); }
};

namespace detail {

/// Largest simplex-grid resolution keeping the grid near max_points.
inline std::size_t grid_resolution(std::size_t n, std::size_t max_points = 3000) {
    std::size_t res = 1;
    for (std::size_t r = 2; r <= 40; ++r) {
        double count = 1.0; // C(r + n - 1, n - 1)
        for (std::size_t k = 1; k < n; ++k)
            count = count * double(r + k) / double(k);
        if (count > double(max_points))
            break;
        res = r;
    }
    return res;
}

/// Simplex grid plus the distinguished priors of the given penalties.
inline std::vector<Prior> comparison_priors(const AmbiguityIndex& a, const AmbiguityIndex& b) {
    auto grid = simplex_grid(a.dimension(), grid_resolution(a.dimension()));
    for (const auto* c : {&a, &b}) {
        grid.push_back(c->zero_penalty_prior());
        if (auto* mm = std::get_if<AmbiguityIndex::MaxminSet>(&c->repr()))
            grid.insert(grid.end(), mm->priors.begin(), mm->priors.end());
        if (auto* tb = std::get_if<AmbiguityIndex::Tabulated>(&c->repr()))
            for (const auto& entry : tb->grid)
                grid.push_back(entry.first);
    }
    return grid;
}

inline double safe_penalty(const AmbiguityIndex& c, const Prior& q) {
    try {
        return c.penalty(q);
    } catch (const UnknownPriorError&) {
        return kInf;
    }
}

} // namespace detail

/**
 * Does A behave as more ambiguity averse than B? Structurally: phi_B is a
 * positive affine map of phi_A, psi agrees, and c_B (in A's utility
 * units) dominates c_A on a simplex grid. Behaviourally: whenever A
 * weakly prefers v to a sure amount m, so does B.
 */
inline ComparativeAversionReport is_more_ambiguity_averse(const Preference& a, const Preference& b,
                                                          const BatterySpec& spec = {}) {
    if (a.state_ids.size() != b.state_ids.size())
        throw ShapeError("comparative aversion: preferences live on different state sets");
    ComparativeAversionReport rep;

    // phi_B = scale * phi_A + shift by least squares on 64 points
    const double lo = std::max({a.phi.domain().lo, b.phi.domain().lo, -10.0});
    const double hi = std::min({a.phi.domain().hi, b.phi.domain().hi, 10.0});
    if (lo < hi) {
        constexpr int n = 64;
        std::vector<double> xa(n), yb(n);
        for (int i = 0; i < n; ++i) {
            const double t = lo + (hi - lo) * i / (n - 1);
            xa[i] = a.phi(t);
            yb[i] = b.phi(t);
        }
        const double mx = std::accumulate(xa.begin(), xa.end(), 0.0) / n;
        const double my = std::accumulate(yb.begin(), yb.end(), 0.0) / n;
        double sxy = 0.0, sxx = 0.0, scale_y = 1.0;
        for (int i = 0; i < n; ++i) {
            sxy += (xa[i] - mx) * (yb[i] - my);
            sxx += (xa[i] - mx) * (xa[i] - mx);
            scale_y = std::max(scale_y, std::abs(yb[i]));
        }
        rep.phi_scale = sxy / sxx;
        rep.phi_shift = my - rep.phi_scale * mx;
        for (int i = 0; i < n; ++i)
            rep.phi_residual = std::max(rep.phi_residual,
                                        std::abs(yb[i] - rep.phi_scale * xa[i] - rep.phi_shift));
        rep.phi_equivalent = rep.phi_scale > 0.0 && rep.phi_residual <= 1e-8 * scale_y;
    }

    for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        rep.psi_max_diff = std::max(rep.psi_max_diff, std::abs(a.psi(p) - b.psi(p)));
    }
    rep.psi_equal = rep.psi_max_diff <= 1e-9;

    rep.penalty_dominates = true;
    const double scale = rep.phi_scale > 0.0 ? rep.phi_scale : 1.0;
    for (const auto& q : detail::comparison_priors(a.c, b.c)) {
        ++rep.penalty_points;
        const double ca = detail::safe_penalty(a.c, q);
        const double cb = detail::safe_penalty(b.c, q) / scale;
        if (std::isinf(cb))
            continue;
        if (std::isinf(ca) || cb < ca - 1e-9) {
            rep.penalty_dominates = false;
            break;
        }
    }
    rep.structural = rep.phi_equivalent && rep.psi_equal && rep.penalty_dominates;

    BatterySpec common = spec;
    common.payoff_lo = std::max(spec.payoff_lo, b.phi.domain().lo);
    common.payoff_hi = std::min(spec.payoff_hi, b.phi.domain().hi);
    auto same_labels = [&] {
        auto x = a.state_ids, y = b.state_ids;
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        return x == y;
    }();
    const auto battery = generate_battery(common, a);
    for (std::size_t i = 0; i < battery.size(); ++i) {
        const auto ea = evaluate(battery[i], a);
        if (!ea.certainty_equivalent)
            continue;
        const double m = *ea.certainty_equivalent;
        if (!b.phi.domain().contains(m))
            continue;
        ++rep.cases;
        // v ~_A m, so the antecedent v >=_A m holds
        const auto vb = same_labels ? battery[i].reordered(b.state_ids)
                                    : TwoStageVariable(b.state_ids, battery[i].outcome_probs(),
                                                       battery[i].payoffs());
        const double ub = evaluate(vb, b).value_utils;
        const double target = b.phi(m);
        if (ub < target - kIndifferenceTol * (1.0 + std::abs(target)))
            rep.counterexamples.push_back({i, m, ea.value_utils, ub, target});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Ambiguity aversion against the neutral benchmark
// ---------------------------------------------------------------------------

struct AversionViolation {
    std::size_t case_index;
    double value;
    double neutral_value;
};

struct AmbiguityAversionReport {
    Prior reference;
    std::size_t cases = 0;
    double max_gap = 0.0; // largest neutral - value seen
    std::vector<AversionViolation> violations;
    bool passed() const { return violations.empty(); }
};

/// U(v) <= E_{P0}[inner utilities] at the zero-penalty prior P0, over a battery.
inline AmbiguityAversionReport ambiguity_aversion_check(const Preference& pref, const BatterySpec& spec = {}) {
    AmbiguityAversionReport rep{pref.c.zero_penalty_prior(), 0, 0.0, {}};
    const auto battery = generate_battery(spec, pref);
    for (std::size_t i = 0; i < battery.size(); ++i) {
        const double value = evaluate(battery[i], pref).value_utils;
        const double neutral = ambiguity_neutral_value(battery[i], pref.phi, pref.psi, rep.reference);
        ++rep.cases;
        rep.max_gap = std::max(rep.max_gap, neutral - value);
        if (value > neutral + kIndifferenceTol)
            rep.violations.push_back({i, value, neutral});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Reductions and invariants
// ---------------------------------------------------------------------------

struct PropertyCheck {
    std::string name;
    std::size_t cases = 0;
    std::size_t violations = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed() const { return violations == 0; }
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
    }
};

namespace detail {

inline void record(PropertyCheck& chk, double error, double scale = 1.0) {
    ++chk.cases;
    chk.max_error = std::max(chk.max_error, error);
    if (error > chk.tolerance * std::max(1.0, scale))
        ++chk.violations;
}

/// Quiggin's decumulative form: sum_i phi(x_i) [psi(S_{i-1}) - psi(S_i)].
inline double decumulative_rdu(const DiscreteDistribution& d, const UtilityFn& phi, const Distortion& psi) {
    double acc = 0.0, prev = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double cur = i + 1 == d.size() ? 0.0 : psi(std::clamp(d.survival(i), 0.0, 1.0));
        acc += phi(d.values()[i]) * (prev - cur);
        prev = cur;
    }
    return acc;
}

inline double expected_utility(std::span<const double> probs, std::span<const double> pay,
                               const UtilityFn& phi) {
    double acc = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s)
        acc += probs[s] * phi(pay[s]);
    return acc;
}

} // namespace detail

/**
 * Checks that the representation collapses to its special cases:
 * expected utility inside states when psi is the identity, affine
 * equivariance when phi is affine, the explicit min over priors for a
 * maxmin set, and stand-alone RDU on a single state.
 */
inline PropertyReport reduction_suite(const Preference& pref, const BatterySpec& spec = {}) {
    PropertyReport rep;
    const auto battery = generate_battery(spec, pref);
    const auto id = Distortion::identity();
    const auto lin = UtilityFn::identity();

    PropertyCheck vp{"identity distortion gives variational preferences", 0, 0, 0.0, 1e-9};
    const Preference pref_vp(pref.phi, id, pref.c, pref.state_ids);
    for (const auto& v : battery) {
        std::vector<double> eu(v.num_states());
        for (std::size_t w = 0; w < v.num_states(); ++w)
            eu[w] = detail::expected_utility(v.outcome_probs()[w], v.payoffs()[w], pref.phi);
        const double expected = pref.c.robust_min(eu).value;
        detail::record(vp, std::abs(evaluate(v, pref_vp).value_utils - expected), std::abs(expected));
    }
    rep.checks.push_back(vp);

    PropertyCheck hom{"affine utility: positive homogeneity on unambiguous variables", 0, 0, 0.0, 1e-9};
    PropertyCheck tra{"affine utility: translation invariance", 0, 0, 0.0, 1e-9};
    {
        const Preference pref_lin(lin, pref.psi, pref.c, pref.state_ids);
        std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
        const double a = 2.0, b = 3.0;
        for (std::size_t i = 0; i < battery.size(); ++i) {
            const auto u = random_unambiguous(rng, pref.state_ids, spec.max_outcomes, spec.payoff_lo,
                                              spec.payoff_hi);
            const double base = evaluate(u, pref_lin).value_utils;
            const double scaled = evaluate(u.map_payoffs([&](auto, auto, double x) { return a * x + b; }),
                                           pref_lin).value_utils;
            detail::record(hom, std::abs(scaled - (a * base + b)), std::abs(scaled));

            const auto& v = battery[i];
            const double vb = evaluate(v, pref_lin).value_utils;
            const double shifted =
                evaluate(v.map_payoffs([&](auto, auto, double x) { return x + b; }), pref_lin).value_utils;
            detail::record(tra, std::abs(shifted - (vb + b)), std::abs(shifted));
        }
    }
    rep.checks.push_back(hom);
    rep.checks.push_back(tra);

    PropertyCheck mm{"maxmin set gives the explicit min over priors", 0, 0, 0.0, 1e-9};
    {
        const auto* set = std::get_if<AmbiguityIndex::MaxminSet>(&pref.c.repr());
        const auto c = set ? pref.c : AmbiguityIndex::full_simplex(pref.state_ids.size());
        const auto& priors = std::get<AmbiguityIndex::MaxminSet>(c.repr()).priors;
        const Preference pref_mm(pref.phi, pref.psi, c, pref.state_ids);
        for (const auto& v : battery) {
            const auto utils = inner_rdu(v, pref.phi, pref.psi);
            double explicit_min = kInf;
            for (const auto& q : priors) {
                double s = 0.0;
                for (std::size_t w = 0; w < utils.size(); ++w)
                    s += q[w] * utils[w];
                explicit_min = std::min(explicit_min, s);
            }
            detail::record(mm, std::abs(evaluate(v, pref_mm).value_utils - explicit_min),
                           std::abs(explicit_min));
        }
    }
    rep.checks.push_back(mm);

    PropertyCheck single{"single state gives rank-dependent utility", 0, 0, 0.0, 1e-9};
    PropertyCheck mean{"affine utility, identity distortion, single state gives the mean", 0, 0, 0.0, 1e-9};
    {
        const Preference one(pref.phi, pref.psi, AmbiguityIndex::maxmin({Prior({1.0})}), {pref.state_ids[0]});
        const Preference one_lin(lin, id, AmbiguityIndex::maxmin({Prior({1.0})}), {pref.state_ids[0]});
        for (const auto& v : battery) {
            const auto r = v.restrict_to(0);
            const double expected = detail::decumulative_rdu(r.marginal(std::size_t{0}), pref.phi, pref.psi);
            detail::record(single, std::abs(evaluate(r, one).value_utils - expected), std::abs(expected));
            const double m = r.marginal(std::size_t{0}).mean();
            detail::record(mean, std::abs(*evaluate(r, one_lin).certainty_equivalent - m), std::abs(m));
        }
    }
    rep.checks.push_back(single);
    rep.checks.push_back(mean);
    return rep;
}

/**
 * Invariants of the representation over a seeded battery: certainty
 * comonotonic additivity, translation invariance, ambiguity concavity,
 * monotonicity, and neutrality to relabelling and splitting outcomes.
 * Cases whose subjective sums leave the utility image are skipped.
 */
inline PropertyReport property_battery(const Preference& pref, const BatterySpec& spec = {},
                                       double tol = 1e-8) {
    PropertyReport rep;
    std::mt19937_64 rng(spec.seed);
    const auto [lo, hi] = detail::payoff_range(spec, pref.phi);
    const auto& ids = pref.state_ids;
    const auto& phi = pref.phi;
    const bool has_zero = phi.domain().contains(0.0);
    auto hat = [&](double t) { return phi(t) - phi(0.0); };
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    PropertyCheck como{"certainty comonotonic additivity", 0, 0, 0.0, tol};
    PropertyCheck tra{"translation invariance", 0, 0, 0.0, tol};
    PropertyCheck conc{"ambiguity concavity", 0, 0, 0.0, tol};
    PropertyCheck mono{"monotonicity", 0, 0, 0.0, tol};
    PropertyCheck neut{"neutrality", 0, 0, 0.0, tol};

    for (std::size_t i = 0; i < spec.size; ++i) {
        // (v) comonotonic unambiguous addition
        if (has_zero) {
            auto v = random_variable(rng, ids, spec.max_outcomes, lo, hi, true);
            std::vector<double> levels(v.num_outcomes());
            for (double& x : levels)
                x = detail::random_payoff(rng, lo, hi);
            std::sort(levels.begin(), levels.end());
            std::vector<std::vector<double>> rpay;
            for (std::size_t w = 0; w < v.num_states(); ++w) {
                const auto& row = v.payoffs()[w];
                std::vector<std::size_t> rank(row.size());
                std::iota(rank.begin(), rank.end(), std::size_t{0});
                std::stable_sort(rank.begin(), rank.end(), [&](auto x, auto y) { return row[x] < row[y]; });
                std::vector<double> rr(row.size());
                for (std::size_t k = 0; k < rank.size(); ++k)
                    rr[rank[k]] = levels[k];
                rpay.push_back(std::move(rr));
            }
            const TwoStageVariable r(ids, v.outcome_probs(), std::move(rpay));
            try {
                const auto sum = lift_add(v, r, phi);
                bool in_domain = true;
                for (const auto& row : sum.payoffs())
                    for (double x : row)
                        in_domain = in_domain && phi.domain().contains(x);
                const auto es = evaluate(sum, pref), ev = evaluate(v, pref), er = evaluate(r, pref);
                if (in_domain && es.certainty_equivalent && ev.certainty_equivalent && er.certainty_equivalent) {
                    const double lhs = hat(*es.certainty_equivalent);
                    const double rhs = hat(*ev.certainty_equivalent) + hat(*er.certainty_equivalent);
                    detail::record(como, std::abs(lhs - rhs), std::abs(lhs));
                }
            } catch (const ImageOverflowError&) {
            } catch (const RangeError&) {
            }
        }

        const auto v = random_variable(rng, ids, spec.max_outcomes, lo, hi);
        const auto ev = evaluate(v, pref);

        // (vii) v (+) m adds phi_hat(m)
        if (has_zero) {
            const double m = detail::random_payoff(rng, lo, hi);
            try {
                const auto shifted = lift_add(v, v.constant_like(m), phi);
                const double got = evaluate(shifted, pref).value_utils;
                const double want = ev.value_utils + hat(m);
                detail::record(tra, std::abs(got - want), std::abs(want));
            } catch (const ImageOverflowError&) {
            } catch (const RangeError&) {
            }
        }

        // (viii) concavity of the outer functional on risk-free variables
        {
            auto risk_free = [&] {
                std::vector<std::vector<double>> pay;
                for (std::size_t w = 0; w < ids.size(); ++w)
                    pay.emplace_back(1, detail::random_payoff(rng, lo, hi));
                return TwoStageVariable(ids, std::vector<std::vector<double>>(ids.size(), {1.0}), std::move(pay));
            };
            const auto a = risk_free(), b = risk_free();
            const double alpha = unit(rng);
            const auto mix = lift_mix(a, b, alpha, phi);
            const double lhs = evaluate(mix, pref).value_utils;
            const double rhs = alpha * evaluate(a, pref).value_utils + (1.0 - alpha) * evaluate(b, pref).value_utils;
            detail::record(conc, std::max(0.0, rhs - lhs), std::abs(rhs));
        }

        // (iv) raising one payoff never lowers the value
        {
            const std::size_t w = std::uniform_int_distribution<std::size_t>(0, v.num_states() - 1)(rng);
            const std::size_t s = std::uniform_int_distribution<std::size_t>(0, v.num_outcomes() - 1)(rng);
            const double bump = unit(rng) * (hi - v.payoffs()[w][s]);
            const auto up = v.map_payoffs([&](std::size_t ww, std::size_t ss, double x) {
                return ww == w && ss == s ? x + bump : x;
            });
            const double got = evaluate(up, pref).value_utils;
            detail::record(mono, std::max(0.0, ev.value_utils - got), std::abs(got));
        }

        // (A2) permuting outcome labels and splitting an outcome
        {
            std::vector<std::size_t> perm(v.num_outcomes());
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<std::vector<double>> pp, py;
            for (std::size_t w = 0; w < v.num_states(); ++w) {
                std::vector<double> prow, yrow;
                for (auto k : perm) {
                    prow.push_back(v.outcome_probs()[w][k]);
                    yrow.push_back(v.payoffs()[w][k]);
                }
                pp.push_back(std::move(prow));
                py.push_back(std::move(yrow));
            }
            const TwoStageVariable permuted(ids, pp, py);
            detail::record(neut, std::abs(evaluate(permuted, pref).value_utils - ev.value_utils),
                           std::abs(ev.value_utils));

            const double frac = unit(rng);
            for (std::size_t w = 0; w < pp.size(); ++w) {
                const double p0 = pp[w][0];
                pp[w][0] = frac * p0;
                pp[w].push_back(p0 - pp[w][0]);
                py[w].push_back(py[w][0]);
            }
            const TwoStageVariable split(ids, std::move(pp), std::move(py));
            detail::record(neut, std::abs(evaluate(split, pref).value_utils - ev.value_utils),
                           std::abs(ev.value_utils));
        }
    }
    rep.checks = {como, tra, conc, mono, neut};
    return rep;
}

} // namespace rdu
