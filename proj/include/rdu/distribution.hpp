#pragma once

#include "rdu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rdu {

/// Values closer than this are treated as one support point.
inline constexpr double kSupportMergeTol = 1e-12;
/// Slack allowed on probability sums and on comparisons against a level.
inline constexpr double kProbTol = 1e-12;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void check_probabilities(std::span<const double> probs, const std::string& what) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (!std::isfinite(p) || p < 0.0)
            throw ValidationError(what + ": probability #" + std::to_string(i) +
                                  " is negative or not finite");
        total += p;
    }
    if (std::abs(total - 1.0) > kProbTol)
        throw ValidationError(what + ": probabilities sum to " + std::to_string(total) +
                              ", expected 1");
}

} // namespace detail

/**
 * Finite-support probability law of a one-stage payoff.
 *
 * Support points are kept strictly increasing; points within
 * kSupportMergeTol of each other are merged by summing their mass and
 * zero-mass points are dropped.
 */
class DiscreteDistribution {
public:
    DiscreteDistribution(std::vector<double> values, std::vector<double> probs) {
        if (values.size() != probs.size())
            throw ValidationError("distribution: values and probs differ in length");
        if (values.empty())
            throw ValidationError("distribution: empty support");
        for (double x : values)
            if (!std::isfinite(x))
                throw ValidationError("distribution: support value is not finite");
        detail::check_probabilities(probs, "distribution");

        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

        std::vector<long double> mass;
        for (std::size_t idx : order) {
            if (probs[idx] == 0.0)
                continue;
            if (!values_.empty() && values[idx] - values_.back() <= kSupportMergeTol) {
                mass.back() += probs[idx];
            } else {
                values_.push_back(values[idx]);
                mass.push_back(probs[idx]);
            }
        }

        const std::size_t n = values_.size();
        probs_.assign(mass.begin(), mass.end());
        cum_.resize(n);
        tail_.resize(n);
        long double acc = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            acc += mass[i];
            cum_[i] = static_cast<double>(acc);
        }
        acc = 0.0L;
        for (std::size_t i = n; i-- > 0;) {
            tail_[i] = static_cast<double>(acc);
            acc += mass[i];
        }
    }

    /// One-point distribution.
    static DiscreteDistribution point(double x) { return {{x}, {1.0}}; }

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    std::size_t size() const noexcept { return values_.size(); }
    double min() const noexcept { return values_.front(); }
    double max() const noexcept { return values_.back(); }

    /// P[X <= x_i] at the i-th support point.
    double cumulative(std::size_t i) const { return i + 1 == size() ? 1.0 : cum_[i]; }
    /// P[X > x_i] at the i-th support point, summed from the top.
    double survival(std::size_t i) const { return tail_[i]; }

    /// Right-continuous distribution function.
    double cdf(double t) const {
        if (t < values_.front())
            return 0.0;
        if (t >= values_.back())
            return 1.0;
        auto it = std::upper_bound(values_.begin(), values_.end(), t);
        return cum_[static_cast<std::size_t>(it - values_.begin()) - 1];
    }

    /// Left-continuous inverse: inf{t : F(t) >= lambda}.
    double quantile(double lambda) const {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw DomainError("quantile: level must lie in (0,1), got " + std::to_string(lambda));
        for (std::size_t i = 0; i < size(); ++i)
            if (cumulative(i) >= lambda - kProbTol)
                return values_[i];
        return values_.back();
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            m += probs_[i] * values_[i];
        return m;
    }

    /// E[(t - X)^+], the integrated distribution function at t.
    double integrated_cdf(double t) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < size() && values_[i] <= t; ++i)
            acc += probs_[i] * (t - values_[i]);
        return acc;
    }

    /// Distribution of f(X); f need not preserve order.
    template <class F>
    DiscreteDistribution push_forward(F&& f) const {
        std::vector<double> mapped(values_.size());
        std::transform(values_.begin(), values_.end(), mapped.begin(), std::forward<F>(f));
        return {std::move(mapped), probs_};
    }

    /// Distribution of a*X + b.
    DiscreteDistribution affine(double a, double b) const {
        return push_forward([=](double x) { return a * x + b; });
    }

    friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

private:
    std::vector<double> values_;
    std::vector<double> probs_;
    std::vector<double> cum_;
    std::vector<double> tail_;
};

/// Mixture sum_k w_k * d_k; weights must form a probability vector.
inline DiscreteDistribution mixture(std::span<const DiscreteDistribution> dists,
                                    std::span<const double> weights) {
    if (dists.size() != weights.size() || dists.empty())
        throw ShapeError("mixture: need one weight per component");
    detail::check_probabilities(weights, "mixture weights");
    std::vector<double> values, probs;
    for (std::size_t k = 0; k < dists.size(); ++k) {
        for (std::size_t i = 0; i < dists[k].size(); ++i) {
            values.push_back(dists[k].values()[i]);
            probs.push_back(weights[k] * dists[k].probs()[i]);
        }
    }
    return {std::move(values), std::move(probs)};
}

/**
 * Payoff matrix over (state w, outcome s) together with the per-state
 * outcome probabilities. All states share the same outcome index set.
 */
class TwoStageVariable {
public:
    TwoStageVariable(std::vector<std::string> state_ids,
                     std::vector<std::vector<double>> outcome_probs,
                     std::vector<std::vector<double>> payoffs)
        : state_ids_(std::move(state_ids)), probs_(std::move(outcome_probs)),
          payoffs_(std::move(payoffs)) {
        if (state_ids_.empty())
            throw ValidationError("two-stage variable: no states");
        if (probs_.size() != state_ids_.size() || payoffs_.size() != state_ids_.size())
            throw ValidationError("two-stage variable: need probs and payoffs for every state");
        for (std::size_t i = 0; i < state_ids_.size(); ++i)
            for (std::size_t j = i + 1; j < state_ids_.size(); ++j)
                if (state_ids_[i] == state_ids_[j])
                    throw ValidationError("two-stage variable: duplicate state id '" +
                                          state_ids_[i] + "'");
        const std::size_t n_out = probs_.front().size();
        if (n_out == 0)
            throw ValidationError("two-stage variable: no outcomes");
        for (std::size_t w = 0; w < state_ids_.size(); ++w) {
            const std::string where = "state '" + state_ids_[w] + "'";
            if (probs_[w].size() != n_out || payoffs_[w].size() != n_out)
                throw ValidationError(where + ": expected " + std::to_string(n_out) +
                                      " outcomes");
            detail::check_probabilities(probs_[w], where);
            for (double x : payoffs_[w])
                if (!std::isfinite(x))
                    throw ValidationError(where + ": payoff is not finite");
        }
    }

    /// Variable paying m in every (state, outcome) of the given space.
    static TwoStageVariable constant(std::vector<std::string> state_ids,
                                     std::vector<std::vector<double>> outcome_probs, double m) {
        std::vector<std::vector<double>> pay;
        pay.reserve(outcome_probs.size());
        for (const auto& row : outcome_probs)
            pay.emplace_back(row.size(), m);
        return {std::move(state_ids), std::move(outcome_probs), std::move(pay)};
    }

    /// Constant m on the same space as this variable.
    TwoStageVariable constant_like(double m) const { return constant(state_ids_, probs_, m); }

    const std::vector<std::string>& state_ids() const noexcept { return state_ids_; }
    const std::vector<std::vector<double>>& outcome_probs() const noexcept { return probs_; }
    const std::vector<std::vector<double>>& payoffs() const noexcept { return payoffs_; }
    std::size_t num_states() const noexcept { return state_ids_.size(); }
    std::size_t num_outcomes() const noexcept { return probs_.front().size(); }

    std::size_t state_index(const std::string& label) const {
        auto it = std::find(state_ids_.begin(), state_ids_.end(), label);
        if (it == state_ids_.end())
            throw LookupError("unknown state '" + label + "'");
        return static_cast<std::size_t>(it - state_ids_.begin());
    }

    DiscreteDistribution marginal(std::size_t w) const {
        if (w >= num_states())
            throw LookupError("state index " + std::to_string(w) + " out of range");
        return {payoffs_[w], probs_[w]};
    }
    DiscreteDistribution marginal(const std::string& label) const {
        return marginal(state_index(label));
    }

    /// Same state labels (in order), outcome count, and outcome probabilities.
    bool same_space(const TwoStageVariable& other) const {
        if (state_ids_ != other.state_ids_ || num_outcomes() != other.num_outcomes())
            return false;
        for (std::size_t w = 0; w < num_states(); ++w)
            for (std::size_t s = 0; s < num_outcomes(); ++s)
                if (std::abs(probs_[w][s] - other.probs_[w][s]) > kProbTol)
                    return false;
        return true;
    }

    /// True when every state carries the same payoff distribution.
    bool is_unambiguous() const {
        const auto first = marginal(std::size_t{0});
        for (std::size_t w = 1; w < num_states(); ++w) {
            const auto m = marginal(w);
            if (m.size() != first.size())
                return false;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (std::abs(m.values()[i] - first.values()[i]) > kSupportMergeTol ||
                    std::abs(m.probs()[i] - first.probs()[i]) > kProbTol)
                    return false;
        }
        return true;
    }

    /// Payoff constant across outcomes within every state.
    bool is_risk_free() const {
        for (const auto& row : payoffs_)
            for (double x : row)
                if (x != row.front())
                    return false;
        return true;
    }

    /// Apply f(state, outcome, payoff) to every entry.
    template <class F>
    TwoStageVariable map_payoffs(F&& f) const {
        auto pay = payoffs_;
        for (std::size_t w = 0; w < pay.size(); ++w)
            for (std::size_t s = 0; s < pay[w].size(); ++s)
                pay[w][s] = f(w, s, pay[w][s]);
        return {state_ids_, probs_, std::move(pay)};
    }

    /// Copy with states rearranged into the given label order.
    TwoStageVariable reordered(const std::vector<std::string>& ids) const {
        if (ids.size() != num_states())
            throw ShapeError("reorder: expected " + std::to_string(num_states()) + " state ids");
        std::vector<std::vector<double>> probs, pay;
        for (const auto& id : ids) {
            const std::size_t w = state_index(id);
            probs.push_back(probs_[w]);
            pay.push_back(payoffs_[w]);
        }
        return {ids, std::move(probs), std::move(pay)};
    }

    /// Restriction to a single state.
    TwoStageVariable restrict_to(std::size_t w) const {
        if (w >= num_states())
            throw LookupError("state index " + std::to_string(w) + " out of range");
        return {{state_ids_[w]}, {probs_[w]}, {payoffs_[w]}};
    }

    friend bool operator==(const TwoStageVariable&, const TwoStageVariable&) = default;

private:
    std::vector<std::string> state_ids_;
    std::vector<std::vector<double>> probs_;
    std::vector<std::vector<double>> payoffs_;
};

/**
 * Pairwise comonotonicity: in every state, for every pair of outcomes,
 * (v(s') - v(s)) * (u(s') - u(s)) >= 0.
 */
inline bool comonotonic(const TwoStageVariable& v, const TwoStageVariable& u) {
    if (v.state_ids() != u.state_ids() || v.num_outcomes() != u.num_outcomes())
        throw ShapeError("comonotonic: variables live on different spaces");
    for (std::size_t w = 0; w < v.num_states(); ++w) {
        const auto& a = v.payoffs()[w];
        const auto& b = u.payoffs()[w];
        for (std::size_t s = 0; s < a.size(); ++s)
            for (std::size_t t = s + 1; t < a.size(); ++t)
                if ((a[t] - a[s]) * (b[t] - b[s]) < 0.0)
                    return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Stochastic dominance
// ---------------------------------------------------------------------------

enum class DominanceOrder { FSD, SSD, PHI_SSD };
enum class DominanceRelation { dominates, dominated, incomparable, equal };

struct DominanceReport {
    DominanceRelation relation;
    DominanceOrder order;
    /// Point where d1 >= d2 fails; set only for incomparable pairs.
    std::optional<double> witness_t;
};

inline const char* to_string(DominanceOrder o) {
    switch (o) {
    case DominanceOrder::FSD: return "fsd";
    case DominanceOrder::SSD: return "ssd";
    case DominanceOrder::PHI_SSD: return "phissd";
    }
    return "?";
}

inline const char* to_string(DominanceRelation r) {
    switch (r) {
    case DominanceRelation::dominates: return "dominates";
    case DominanceRelation::dominated: return "dominated";
    case DominanceRelation::incomparable: return "incomparable";
    case DominanceRelation::equal: return "equal";
    }
    return "?";
}

namespace detail {

/// Merged support of both distributions plus midpoints between neighbours.
inline std::vector<double> dominance_grid(const DiscreteDistribution& a,
                                          const DiscreteDistribution& b) {
    std::vector<double> pts(a.values());
    pts.insert(pts.end(), b.values().begin(), b.values().end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> grid;
    grid.reserve(2 * pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0)
            grid.push_back(0.5 * (pts[i - 1] + pts[i]));
        grid.push_back(pts[i]);
    }
    return grid;
}

} // namespace detail

/**
 * Compare d1 against d2 under FSD (pointwise CDFs), SSD (integrated CDFs,
 * exact because they are piecewise linear between support points) or
 * phi-SSD (SSD of the push-forwards under phi).
 */
inline DominanceReport dominance(const DiscreteDistribution& d1, const DiscreteDistribution& d2,
                                 DominanceOrder order,
                                 const std::function<double(double)>& phi = {}) {
    if (order == DominanceOrder::PHI_SSD) {
        if (!phi)
            throw ConfigurationError("phi-SSD comparison needs a utility function");
        auto r = dominance(d1.push_forward(phi), d2.push_forward(phi), DominanceOrder::SSD);
        // witness, if any, is in utility units
        r.order = DominanceOrder::PHI_SSD;
        return r;
    }

    const auto grid = detail::dominance_grid(d1, d2);
    double scale = 1.0;
    for (double t : grid)
        scale = std::max(scale, std::abs(t));
    const double tol = order == DominanceOrder::FSD ? kProbTol : kProbTol * scale;

    bool first_ok = true, second_ok = true;
    std::optional<double> witness;
    for (double t : grid) {
        const double f1 = order == DominanceOrder::FSD ? d1.cdf(t) : d1.integrated_cdf(t);
        const double f2 = order == DominanceOrder::FSD ? d2.cdf(t) : d2.integrated_cdf(t);
        if (f1 > f2 + tol) {
            if (first_ok)
                witness = t;
            first_ok = false;
        }
        if (f2 > f1 + tol)
            second_ok = false;
    }

    DominanceReport r{DominanceRelation::incomparable, order, std::nullopt};
    if (first_ok && second_ok)
        r.relation = DominanceRelation::equal;
    else if (first_ok)
        r.relation = DominanceRelation::dominates;
    else if (second_ok)
        r.relation = DominanceRelation::dominated;
    else
        r.witness_t = witness;
    return r;
}

} // namespace rdu
