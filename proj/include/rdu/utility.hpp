#pragma once

#include "rdu/distortion.hpp"
#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace rdu {

/// Real interval. Infinite endpoints are always open; a finite endpoint is
/// closed unless flagged open (a supremum that is not attained).
struct Interval {
    double lo = -kInf;
    double hi = kInf;
    bool lo_open = false;
    bool hi_open = false;

    bool contains(double x) const noexcept {
        if (!std::isfinite(x))
            return false;
        return (lo_open ? x > lo : x >= lo) && (hi_open ? x < hi : x <= hi);
    }

    /// Membership with a relative slack at closed finite endpoints.
    bool contains_approx(double x, double rel = 1e-12) const noexcept {
        if (!std::isfinite(x))
            return false;
        const double lo_slack = std::isfinite(lo) && !lo_open ? rel * (1.0 + std::abs(lo)) : 0.0;
        const double hi_slack = std::isfinite(hi) && !hi_open ? rel * (1.0 + std::abs(hi)) : 0.0;
        const bool above = lo_open ? x > lo : x >= lo - lo_slack;
        const bool below = hi_open ? x < hi : x <= hi + hi_slack;
        return above && below;
    }

    double clamp(double x) const noexcept { return std::min(std::max(x, lo), hi); }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/**
 * Strictly increasing, continuous utility phi on an interval domain,
 * with its exact image and a closed-form inverse.
 *
 * An exponential utility with a > 0 has image (-inf, 1/a): the upper
 * bound is a supremum that is never attained.
 */
class UtilityFn {
public:
    enum class Kind { affine, exponential, power, piecewise_linear };
    using Knot = std::pair<double, double>;

    /// phi(t) = a t + b, a > 0
    static UtilityFn affine(double a, double b) {
        if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw ValidationError("affine utility: need a > 0 and finite b");
        UtilityFn u(Kind::affine, {});
        u.a_ = a;
        u.b_ = b;
        return u.finish();
    }

    static UtilityFn identity() { return affine(1.0, 0.0); }

    /// phi(t) = (1 - exp(-a t)) / a, a != 0
    static UtilityFn exponential(double a) {
        if (a == 0.0 || !std::isfinite(a))
            throw ValidationError("exponential utility: need finite a != 0");
        UtilityFn u(Kind::exponential, {});
        u.a_ = a;
        return u.finish();
    }

    /// phi(t) = sign(t) |t|^r on the given domain (t^r on the default [0, inf)).
    static UtilityFn power(double r, Interval domain = {0.0, kInf}) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw ValidationError("power utility: exponent must be > 0");
        if (!(domain.lo < domain.hi))
            throw ValidationError("power utility: empty domain");
        UtilityFn u(Kind::power, domain);
        u.a_ = r;
        return u.finish();
    }

    /// Linear interpolation through strictly increasing knots.
    static UtilityFn piecewise_linear(std::vector<Knot> knots) {
        if (knots.size() < 2)
            throw ValidationError("pwl utility: need at least two knots");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second))
                throw ValidationError("pwl utility: knots must be finite");
            if (i > 0 && !(knots[i].first > knots[i - 1].first && knots[i].second > knots[i - 1].second))
                throw ValidationError("pwl utility: knots must be strictly increasing in both coordinates");
        }
        UtilityFn u(Kind::piecewise_linear, {knots.front().first, knots.back().first});
        u.knots_ = std::move(knots);
        return u.finish();
    }

    Kind kind() const noexcept { return kind_; }
    const Interval& domain() const noexcept { return domain_; }
    const Interval& image() const noexcept { return image_; }
    bool is_affine() const noexcept { return kind_ == Kind::affine; }
    /// Slope and intercept; meaningful for affine utilities only.
    std::pair<double, double> affine_coefficients() const noexcept { return {a_, b_}; }

    double operator()(double t) const {
        if (!domain_.contains(t))
            throw RangeError("utility: argument " + detail::fmt_num(t) + " outside domain");
        return eval(t);
    }

    double inverse(double y) const {
        if (!image_.contains_approx(y))
            throw RangeError("utility: value " + detail::fmt_num(y) + " outside image");
        return domain_.clamp(inv(image_.clamp(y)));
    }

    /// Inverse by bisection on the domain; the closed forms are checked against it.
    double inverse_by_bisection(double y) const {
        if (!image_.contains_approx(y))
            throw RangeError("utility: value " + detail::fmt_num(y) + " outside image");
        // target kept inside the image shrunk by a relative margin of 1e-15
        const double margin = 1e-15 * (1.0 + std::abs(y));
        if (std::isfinite(image_.lo))
            y = std::max(y, image_.lo + margin);
        if (std::isfinite(image_.hi))
            y = std::min(y, image_.hi - margin);
        double lo = std::isfinite(domain_.lo) ? domain_.lo : -1.0;
        double hi = std::isfinite(domain_.hi) ? domain_.hi : 1.0;
        while (eval(lo) > y)
            lo = 2.0 * lo - 1.0;
        while (eval(hi) < y)
            hi = 2.0 * hi + 1.0;
        while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (eval(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::string to_spec() const {
        using detail::fmt_num;
        switch (kind_) {
        case Kind::affine: return "affine:" + fmt_num(a_) + "," + fmt_num(b_);
        case Kind::exponential: return "exp:" + fmt_num(a_);
        case Kind::power: {
            std::string s = "power:" + fmt_num(a_);
            if (domain_ != Interval{0.0, kInf})
                s += "@" + fmt_num(domain_.lo) + "," + fmt_num(domain_.hi);
            return s;
        }
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

    friend bool operator==(const UtilityFn&, const UtilityFn&) = default;

private:
    UtilityFn(Kind k, Interval domain) : kind_(k), domain_(domain) {}

    UtilityFn finish() {
        image_ = {limit(domain_.lo), limit(domain_.hi), !std::isfinite(domain_.lo),
                  !std::isfinite(domain_.hi)};
        // grid check of monotonicity over a finite window of the domain
        const double lo = std::isfinite(domain_.lo) ? domain_.lo : std::min(-10.0, domain_.hi - 20.0);
        const double hi = std::isfinite(domain_.hi) ? domain_.hi : std::max(10.0, domain_.lo + 20.0);
        constexpr int n = 256;
        double prev = eval(lo);
        for (int i = 1; i <= n; ++i) {
            const double cur = eval(lo + (hi - lo) * i / n);
            if (!(cur >= prev))
                throw ValidationError("utility: phi is not increasing on its domain");
            prev = cur;
        }
        if (!(eval(hi) > eval(lo)))
            throw ValidationError("utility: phi is constant on its domain");
        return *this;
    }

    // phi at a domain endpoint, taking limits at infinity
    double limit(double t) const {
        if (std::isfinite(t))
            return eval(t);
        switch (kind_) {
        case Kind::exponential:
            if (t > 0)
                return a_ > 0 ? 1.0 / a_ : kInf;
            return a_ > 0 ? -kInf : 1.0 / a_;
        default: return t;
        }
    }

    double eval(double t) const {
        switch (kind_) {
        case Kind::affine: return a_ * t + b_;
        case Kind::exponential: return -std::expm1(-a_ * t) / a_;
        case Kind::power: return std::copysign(std::pow(std::abs(t), a_), t);
        case Kind::piecewise_linear: return interpolate(knots_, t, false);
        }
        return t;
    }

    double inv(double y) const {
        switch (kind_) {
        case Kind::affine: return (y - b_) / a_;
        case Kind::exponential: return -std::log1p(-a_ * y) / a_;
        case Kind::power: return std::copysign(std::pow(std::abs(y), 1.0 / a_), y);
        case Kind::piecewise_linear: return interpolate(knots_, y, true);
        }
        return y;
    }

    static double interpolate(const std::vector<Knot>& knots, double t, bool inverse) {
        auto x = [&](std::size_t i) { return inverse ? knots[i].second : knots[i].first; };
        auto y = [&](std::size_t i) { return inverse ? knots[i].first : knots[i].second; };
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (t <= x(i))
                return y(i - 1) + (y(i) - y(i - 1)) * (t - x(i - 1)) / (x(i) - x(i - 1));
        return y(knots.size() - 1);
    }

    Kind kind_;
    Interval domain_;
    Interval image_{};
    double a_ = 1.0;
    double b_ = 0.0;
    std::vector<Knot> knots_;
};

// ---------------------------------------------------------------------------
// Subjective mixtures and additions
// ---------------------------------------------------------------------------

/// phi^{-1}(alpha phi(x) + (1 - alpha) phi(y)); stays between x and y.
inline double subjective_mix(double x, double y, double alpha, const UtilityFn& phi) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("subjective mix: alpha must lie in [0,1]");
    if (x == y)
        return x;
    const double fx = phi(x), fy = phi(y);
    const double target = std::clamp(alpha * fx + (1.0 - alpha) * fy, std::min(fx, fy), std::max(fx, fy));
    return std::clamp(phi.inverse(target), std::min(x, y), std::max(x, y));
}

/// The y with phi(y) = (phi(t) + phi(x)) / 2.
inline double preference_average(double t, double x, const UtilityFn& phi) {
    return subjective_mix(t, x, 0.5, phi);
}

/// The z with (phi(z) + phi(0)) / 2 = phi(x).
inline double preference_double(double x, const UtilityFn& phi) {
    if (!phi.domain().contains(0.0))
        throw RangeError("preference doubling: 0 is outside the utility domain");
    const double target = 2.0 * phi(x) - phi(0.0);
    if (!phi.image().contains_approx(target))
        throw ImageOverflowError("preference doubling of " + detail::fmt_num(x) +
                                 " leaves the image of phi");
    return phi.inverse(target);
}

/**
 * Subjective addition x (+) y, i.e. phi_hat^{-1}(phi_hat(x) + phi_hat(y))
 * with phi_hat = phi - phi(0), built as the preference doubling of the
 * preference average.
 */
inline double subjective_add(double x, double y, const UtilityFn& phi) {
    return preference_double(preference_average(x, y, phi), phi);
}

/// phi_hat(t) = phi(t) - phi(0).
inline double normalized_utility(double t, const UtilityFn& phi) {
    return phi(t) - phi(0.0);
}

/**
 * Entry-wise application of a binary payoff operation to two variables on
 * the same space; image overflows are re-raised with their location.
 */
template <class BinaryOp>
TwoStageVariable lift(const TwoStageVariable& v, const TwoStageVariable& u, BinaryOp op) {
    if (!v.same_space(u))
        throw ShapeError("lift: variables live on different state/outcome spaces");
    return v.map_payoffs([&](std::size_t w, std::size_t s, double x) {
        try {
            return op(x, u.payoffs()[w][s]);
        } catch (const ImageOverflowError& e) {
            throw ImageOverflowError(std::string(e.what()) + " at state '" + v.state_ids()[w] +
                                     "', outcome " + std::to_string(s));
        }
    });
}

inline TwoStageVariable lift_mix(const TwoStageVariable& v, const TwoStageVariable& u,
                                 double alpha, const UtilityFn& phi) {
    return lift(v, u, [&](double x, double y) { return subjective_mix(x, y, alpha, phi); });
}

inline TwoStageVariable lift_add(const TwoStageVariable& v, const TwoStageVariable& u,
                                 const UtilityFn& phi) {
    return lift(v, u, [&](double x, double y) { return subjective_add(x, y, phi); });
}

} // namespace rdu
