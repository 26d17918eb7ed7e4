#pragma once

#include "rdu/ambiguity.hpp"
#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"
#include "rdu/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace rdu {

/// Per (state, outcome, asset) returns sharing the two-stage conventions.
struct ScenarioPanel {
    std::vector<std::string> assets;
    std::vector<std::string> state_ids;
    std::vector<std::vector<double>> outcome_probs;          // [state][outcome]
    std::vector<std::vector<std::vector<double>>> returns;   // [state][outcome][asset]

    ScenarioPanel(std::vector<std::string> assets_, std::vector<std::string> ids,
                  std::vector<std::vector<double>> probs,
                  std::vector<std::vector<std::vector<double>>> rets)
        : assets(std::move(assets_)), state_ids(std::move(ids)), outcome_probs(std::move(probs)),
          returns(std::move(rets)) {
        if (assets.empty())
            throw ValidationError("panel: no assets");
        if (outcome_probs.size() != state_ids.size() || returns.size() != state_ids.size())
            throw ValidationError("panel: inconsistent number of states");
        for (std::size_t w = 0; w < state_ids.size(); ++w) {
            if (returns[w].size() != outcome_probs[w].size())
                throw ValidationError("panel: state '" + state_ids[w] + "' has mismatched outcome counts");
            for (const auto& row : returns[w]) {
                if (row.size() != assets.size())
                    throw ValidationError("panel: state '" + state_ids[w] + "' has a row with " +
                                          std::to_string(row.size()) + " returns, expected " +
                                          std::to_string(assets.size()));
                for (double x : row)
                    if (!std::isfinite(x))
                        throw ValidationError("panel: non-finite return in state '" + state_ids[w] + "'");
            }
        }
        // the two-stage invariants (shared outcome count, probability sums)
        (void)variable_for([&](const std::vector<double>&) { return 0.0; });
    }

    std::size_t num_assets() const noexcept { return assets.size(); }

    template <class F>
    TwoStageVariable variable_for(F&& payoff_of_row) const {
        std::vector<std::vector<double>> pay;
        for (const auto& state : returns) {
            std::vector<double> row;
            for (const auto& r : state)
                row.push_back(payoff_of_row(r));
            pay.push_back(std::move(row));
        }
        return {state_ids, outcome_probs, std::move(pay)};
    }
};

/// Portfolio weights summing to one.
class Weights {
public:
    explicit Weights(std::vector<double> w, bool long_only = false) : w_(std::move(w)) {
        if (w_.empty())
            throw ValidationError("weights: empty");
        double total = 0.0;
        for (double x : w_) {
            if (!std::isfinite(x) || (long_only && x < 0.0))
                throw ValidationError("weights: entries must be finite (and >= 0 when long-only)");
            total += x;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ValidationError("weights: must sum to 1");
    }

    const std::vector<double>& values() const noexcept { return w_; }
    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }

    friend bool operator==(const Weights&, const Weights&) = default;
    friend auto operator<=>(const Weights& a, const Weights& b) { return a.w_ <=> b.w_; }

private:
    std::vector<double> w_;
};

/// Payoff of the weighted portfolio in every (state, outcome).
inline TwoStageVariable portfolio_variable(const ScenarioPanel& panel, const Weights& w) {
    if (w.size() != panel.num_assets())
        throw ShapeError("portfolio: " + std::to_string(w.size()) + " weights for " +
                         std::to_string(panel.num_assets()) + " assets");
    return panel.variable_for([&](const std::vector<double>& r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k)
            acc += w[k] * r[k];
        return acc;
    });
}

struct MeanRisk {
    double mean;      // E_P[v] under the mean prior
    double risk;      // rho(v) = -U(v) in money units
    double objective; // mean - risk
};

/**
 * Mean-risk criterion E_P[v] - rho(v), where rho is the negated robust
 * rank-dependent value in money units. phi must be affine.
 */
inline MeanRisk mean_risk_objective(const ScenarioPanel& panel, const Weights& w, const Prior& p_mean,
                                    const Preference& pref) {
    if (!pref.phi.is_affine())
        throw ConfigurationError("mean-risk objective needs an affine utility");
    if (p_mean.size() != panel.state_ids.size())
        throw ShapeError("mean-risk objective: mean prior has the wrong dimension");
    const auto v = portfolio_variable(panel, w);
    double mean = 0.0;
    for (std::size_t s = 0; s < v.num_states(); ++s) {
        double state_mean = 0.0;
        for (std::size_t o = 0; o < v.num_outcomes(); ++o)
            state_mean += v.outcome_probs()[s][o] * v.payoffs()[s][o];
        mean += p_mean[s] * state_mean;
    }
    const auto [a, b] = pref.phi.affine_coefficients();
    const double money = (evaluate(v, pref).value_utils - b) / a;
    return {mean, 0.0 - money, mean + money};
}

struct PortfolioConstraints {
    bool long_only = true;
    /// Largest short position per asset when short sales are allowed.
    double max_short = 1.0;
    /// Coarse grid spacing is 1 / resolution.
    std::size_t resolution = 10;
};

struct TraceEntry {
    std::vector<double> weights;
    double objective;
};

struct OptimizeResult {
    Weights weights;
    MeanRisk breakdown;
    std::vector<TraceEntry> trace;
};

namespace detail {

inline void weight_grid(std::size_t n, long total, long lo, long hi, std::vector<long>& cur,
                        std::vector<std::vector<long>>& out) {
    if (cur.size() + 1 == n) {
        if (total >= lo && total <= hi) {
            cur.push_back(total);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (long c = lo; c <= hi; ++c) {
        cur.push_back(c);
        weight_grid(n, total - c, lo, hi, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/**
 * Deterministic coarse grid over the feasible weights followed by a
 * pairwise-transfer polish with step halving down to 1e-6. Ties are
 * broken towards the lexicographically smaller weight vector.
 */
inline OptimizeResult optimize(const ScenarioPanel& panel, const Prior& p_mean, const Preference& pref,
                               const PortfolioConstraints& cons, std::size_t budget) {
    const std::size_t n = panel.num_assets();
    if (cons.resolution == 0)
        throw ValidationError("optimize: grid resolution must be positive");
    const long res = static_cast<long>(cons.resolution);
    const long lo = cons.long_only ? 0 : -static_cast<long>(std::floor(cons.max_short * double(res)));
    const long hi = res - lo;

    std::vector<std::vector<long>> grid;
    std::vector<long> cur;
    detail::weight_grid(n, res, lo, hi, cur, grid);
    if (budget < grid.size())
        throw BudgetError("optimize: budget " + std::to_string(budget) + " is below the " +
                          std::to_string(grid.size()) + " coarse grid points");

    const double wmin = cons.long_only ? 0.0 : -cons.max_short;
    const double wmax = 1.0 - wmin;
    std::vector<TraceEntry> trace;
    auto score = [&](const std::vector<double>& w) {
        const double obj = mean_risk_objective(panel, Weights(w), p_mean, pref).objective;
        trace.push_back({w, obj});
        return obj;
    };
    auto better = [](double obj, const std::vector<double>& w, double best, const std::vector<double>& bw) {
        return obj > best || (obj == best && w < bw);
    };

    std::vector<double> best_w;
    double best = -kInf;
    for (const auto& g : grid) {
        std::vector<double> w(n);
        for (std::size_t k = 0; k < n; ++k)
            w[k] = double(g[k]) / double(res);
        const double obj = score(w);
        if (best_w.empty() || better(obj, w, best, best_w)) {
            best = obj;
            best_w = w;
        }
    }

    double step = 0.5 / double(res);
    while (step >= 1e-6 && trace.size() < budget && n > 1) {
        bool improved = false;
        for (std::size_t i = 0; i < n && trace.size() < budget; ++i) {
            for (std::size_t j = 0; j < n && trace.size() < budget; ++j) {
                if (i == j)
                    continue;
                auto w = best_w;
                w[i] += step;
                w[j] -= step;
                if (w[i] > wmax || w[j] < wmin)
                    continue;
                const double obj = score(w);
                if (obj > best) {
                    best = obj;
                    best_w = std::move(w);
                    improved = true;
                }
            }
        }
        if (!improved)
            step *= 0.5;
    }

    Weights wts(best_w, cons.long_only);
    auto breakdown = mean_risk_objective(panel, wts, p_mean, pref);
    return {std::move(wts), breakdown, std::move(trace)};
}

} // namespace rdu
