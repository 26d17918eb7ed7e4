#pragma once

#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace rdu {

namespace detail {

inline std::string fmt_num(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

} // namespace detail

/// Anything callable as a probability weighting p -> psi(p).
template <class Psi>
concept WeightingFunction = requires(const Psi& psi, double p) {
    { psi(p) } -> std::convertible_to<double>;
};

/**
 * Probability weighting (distortion) function psi on [0,1] with
 * psi(0) = 0, psi(1) = 1, non-decreasing. Applied to survival
 * probabilities inside the Choquet integral, so a convex psi is
 * pessimistic.
 */
class Distortion {
public:
    enum class Kind { identity, power, prelec, tk, es_tail, var_step, dual_power, piecewise_linear };

    using Knot = std::pair<double, double>;

    static Distortion identity() { return Distortion(Kind::identity).validated(); }

    /// psi(p) = p^a
    static Distortion power(double a) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw ValidationError("power distortion: exponent must be > 0");
        Distortion d(Kind::power);
        d.a_ = a;
        return std::move(d).validated();
    }

    /// psi(p) = exp(-beta * (-ln p)^alpha)
    static Distortion prelec(double alpha, double beta) {
        if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
            throw ValidationError("prelec distortion: alpha and beta must be > 0");
        Distortion d(Kind::prelec);
        d.a_ = alpha;
        d.b_ = beta;
        return std::move(d).validated();
    }

    /// psi(p) = p^g / (p^g + (1-p)^g)^(1/g); monotone only for g above ~0.279.
    static Distortion tk(double gamma) {
        if (!(gamma > 0.28 && gamma <= 1.0))
            throw ValidationError("tk distortion: gamma must lie in (0.28, 1]");
        Distortion d(Kind::tk);
        d.a_ = gamma;
        return std::move(d).validated();
    }

    /// psi(p) = max(p - (1 - lambda), 0) / lambda; gives -ES_lambda.
    static Distortion es_tail(double lambda) {
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw ValidationError("es distortion: lambda must lie in (0, 1]");
        Distortion d(Kind::es_tail);
        d.a_ = lambda;
        return std::move(d).validated();
    }

    /// psi(p) = 1{p >= 1 - lambda}; gives -VaR_lambda. Discontinuous.
    static Distortion var_step(double lambda) {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw ValidationError("var distortion: lambda must lie in (0, 1)");
        Distortion d(Kind::var_step);
        d.a_ = lambda;
        return std::move(d).validated();
    }

    /// psi(p) = 1 - (1 - p)^k
    static Distortion dual_power(double k) {
        if (!(k >= 1.0) || !std::isfinite(k))
            throw ValidationError("dual power distortion: k must be >= 1");
        Distortion d(Kind::dual_power);
        d.a_ = k;
        return std::move(d).validated();
    }

    /// Linear interpolation through knots from (0,0) to (1,1).
    static Distortion piecewise_linear(std::vector<Knot> knots) {
        if (knots.size() < 2)
            throw ValidationError("pwl distortion: need at least two knots");
        if (knots.front() != Knot{0.0, 0.0} || knots.back() != Knot{1.0, 1.0})
            throw ValidationError("pwl distortion: knots must start at (0,0) and end at (1,1)");
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i].first > knots[i - 1].first))
                throw ValidationError("pwl distortion: knot abscissae must be strictly increasing");
            if (knots[i].second < knots[i - 1].second)
                throw ValidationError("pwl distortion: knot values must be non-decreasing");
        }
        Distortion d(Kind::piecewise_linear);
        d.knots_ = std::move(knots);
        return std::move(d).validated();
    }

    Kind kind() const noexcept { return kind_; }
    const std::vector<Knot>& knots() const noexcept { return knots_; }

    bool is_continuous() const noexcept { return kind_ != Kind::var_step; }

    bool is_convex() const noexcept {
        switch (kind_) {
        case Kind::identity:
        case Kind::es_tail: return true;
        case Kind::power: return a_ >= 1.0;
        case Kind::prelec: return a_ == 1.0 && b_ >= 1.0;
        case Kind::tk: return a_ == 1.0;
        case Kind::var_step: return false;
        case Kind::dual_power: return a_ == 1.0;
        case Kind::piecewise_linear: {
            double prev = -1.0;
            for (std::size_t i = 1; i < knots_.size(); ++i) {
                const double slope = (knots_[i].second - knots_[i - 1].second) /
                                     (knots_[i].first - knots_[i - 1].first);
                if (slope < prev - 1e-12)
                    return false;
                prev = slope;
            }
            return true;
        }
        }
        return false;
    }

    /// psi(p); p must lie in [0,1].
    double operator()(double p) const {
        if (!(p >= 0.0 && p <= 1.0))
            throw DomainError("distortion: argument must lie in [0,1], got " + std::to_string(p));
        return eval(p);
    }

    /// Round-trippable spec string (see parse_distortion).
    std::string to_spec() const {
        using detail::fmt_num;
        switch (kind_) {
        case Kind::identity: return "identity";
        case Kind::power: return "power:" + fmt_num(a_);
        case Kind::prelec: return "prelec:" + fmt_num(a_) + "," + fmt_num(b_);
        case Kind::tk: return "tk:" + fmt_num(a_);
        case Kind::es_tail: return "es:" + fmt_num(a_);
        case Kind::var_step: return "var:" + fmt_num(a_);
        case Kind::dual_power: return "dualpower:" + fmt_num(a_);
        case Kind::piecewise_linear: {
            std::string s = "pwl:";
            for (std::size_t i = 0; i < knots_.size(); ++i) {
                if (i)
                    s += ';';
                s += fmt_num(knots_[i].first) + "," + fmt_num(knots_[i].second);
            }
            return s;
        }
        }
        return {};
    }

    friend bool operator==(const Distortion&, const Distortion&) = default;

private:
    explicit Distortion(Kind k) : kind_(k) {}

    Distortion validated() && {
        validate();
        return std::move(*this);
    }

    double eval(double p) const {
        switch (kind_) {
        case Kind::identity: return p;
        case Kind::power: return std::pow(p, a_);
        case Kind::prelec:
            if (p == 0.0)
                return 0.0;
            return std::exp(-b_ * std::pow(-std::log(p), a_));
        case Kind::tk: {
            if (p == 0.0 || p == 1.0)
                return p;
            const double num = std::pow(p, a_);
            return num / std::pow(num + std::pow(1.0 - p, a_), 1.0 / a_);
        }
        case Kind::es_tail: return p == 1.0 ? 1.0 : std::max(p - (1.0 - a_), 0.0) / a_;
        case Kind::var_step: return p >= (1.0 - a_) - kProbTol ? 1.0 : 0.0;
        case Kind::dual_power: return p == 1.0 ? 1.0 : 1.0 - std::pow(1.0 - p, a_);
        case Kind::piecewise_linear: {
            for (std::size_t i = 1; i < knots_.size(); ++i) {
                if (p <= knots_[i].first) {
                    const auto [x0, y0] = knots_[i - 1];
                    const auto [x1, y1] = knots_[i];
                    return y0 + (y1 - y0) * (p - x0) / (x1 - x0);
                }
            }
            return 1.0;
        }
        }
        return p;
    }

    // Dense-grid check of the distortion axioms; parametric families satisfy
    // them analytically, user knots are checked here.
    void validate() const {
        constexpr int n = 1000;
        if (eval(0.0) != 0.0 || eval(1.0) != 1.0)
            throw ValidationError("distortion: psi(0) must be 0 and psi(1) must be 1");
        double prev = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double cur = eval(static_cast<double>(i) / n);
            if (cur < prev - 1e-9)
                throw ValidationError("distortion: psi is not non-decreasing");
            prev = cur;
        }
    }

    Kind kind_;
    double a_ = 1.0;
    double b_ = 1.0;
    std::vector<Knot> knots_;
};

/**
 * Distorted (Choquet) expectation
 *   int_{-inf}^0 (psi(S(t)) - 1) dt + int_0^inf psi(S(t)) dt,  S(t) = P[X > t],
 * evaluated exactly on the sorted support as
 *   x_1 + sum_{i<n} (x_{i+1} - x_i) * psi(S_i).
 */
template <WeightingFunction Psi>
double choquet(const DiscreteDistribution& d, const Psi& psi) {
    const auto& x = d.values();
    long double acc = x.front();
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        acc += static_cast<long double>(x[i + 1] - x[i]) * psi(std::clamp(d.survival(i), 0.0, 1.0));
    return static_cast<double>(acc);
}

/// VaR_lambda = inf{t : P[-X <= t] >= 1 - lambda}.
inline double value_at_risk(const DiscreteDistribution& d, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw DomainError("value at risk: lambda must lie in (0,1), got " + std::to_string(lambda));
    // Losses in increasing order are -x_n < ... < -x_1; P[-X <= -x_i] = P[X >= x_i].
    const auto& x = d.values();
    const auto& p = d.probs();
    double acc = 0.0;
    for (std::size_t i = x.size(); i-- > 0;) {
        acc += p[i];
        if (acc >= (1.0 - lambda) - kProbTol)
            return -x[i];
    }
    return -x.front();
}

namespace detail {

/// Calls f(loss, gamma_lo, gamma_hi) for each interval on which VaR_gamma is constant.
template <class F>
void for_each_var_interval(const DiscreteDistribution& d, F&& f) {
    const auto& x = d.values();
    const auto& p = d.probs();
    double lo = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double hi = i + 1 == x.size() ? 1.0 : std::min(1.0, lo + p[i]);
        f(-x[i], lo, hi);
        lo = hi;
    }
}

} // namespace detail

/// ES_lambda = (1/lambda) int_0^lambda VaR_gamma d gamma, integrated exactly.
inline double expected_shortfall(const DiscreteDistribution& d, double lambda) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw DomainError("expected shortfall: lambda must lie in (0,1], got " +
                          std::to_string(lambda));
    double acc = 0.0;
    detail::for_each_var_interval(d, [&](double loss, double lo, double hi) {
        const double len = std::max(0.0, std::min(hi, lambda) - lo);
        acc += loss * len;
    });
    return acc / lambda;
}

/**
 * Weighted VaR: int_0^1 VaR_gamma d psi(1 - gamma), summed over the
 * intervals where the VaR curve is constant. Needs a continuous psi
 * because the VaR curve of a discrete law jumps.
 */
inline double weighted_var(const DiscreteDistribution& d, const Distortion& psi) {
    if (!psi.is_continuous() && d.size() > 1)
        throw UnsupportedCombinationError(
            "weighted VaR: discontinuous distortion with a discontinuous VaR curve");
    if (!psi.is_continuous())
        return d.min();
    double acc = 0.0;
    detail::for_each_var_interval(d, [&](double loss, double lo, double hi) {
        acc += loss * (psi(std::clamp(1.0 - hi, 0.0, 1.0)) - psi(std::clamp(1.0 - lo, 0.0, 1.0)));
    });
    return acc;
}

} // namespace rdu
