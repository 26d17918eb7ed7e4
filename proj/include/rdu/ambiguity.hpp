#pragma once

#include "rdu/detail/phase_one.hpp"
#include "rdu/distortion.hpp"
#include "rdu/distribution.hpp"
#include "rdu/errors.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rdu {

/// Probability vector over the finite set of states of the world.
class Prior {
public:
    explicit Prior(std::vector<double> weights) : w_(std::move(weights)) {
        if (w_.empty())
            throw ValidationError("prior: no states");
        detail::check_probabilities(w_, "prior");
    }

    static Prior uniform(std::size_t n) { return Prior(std::vector<double>(n, 1.0 / double(n))); }

    static Prior point(std::size_t n, std::size_t k) {
        std::vector<double> w(n, 0.0);
        w.at(k) = 1.0;
        return Prior(std::move(w));
    }

    const std::vector<double>& weights() const noexcept { return w_; }
    std::size_t size() const noexcept { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }

    double expectation(std::span<const double> u) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < w_.size(); ++i)
            acc += w_[i] * u[i];
        return acc;
    }

    bool approx_equal(const Prior& o, double tol = kProbTol) const {
        if (o.size() != size())
            return false;
        for (std::size_t i = 0; i < size(); ++i)
            if (std::abs(w_[i] - o.w_[i]) > tol)
                return false;
        return true;
    }

    friend bool operator==(const Prior&, const Prior&) = default;

private:
    std::vector<double> w_;
};

/// Result of min_Q { E_Q[u] + c(Q) }.
struct RobustResult {
    double value;
    Prior minimizer;
};

/**
 * Grounded convex penalty c on priors over the states of the world:
 * the indicator of a finite convex hull (maxmin), theta times relative
 * entropy, theta times the relative Gini index, or a tabulated function.
 */
class AmbiguityIndex {
public:
    struct MaxminSet {
        std::vector<Prior> priors;
    };
    struct Entropic {
        double theta;
        Prior reference;
    };
    struct Gini {
        double theta;
        Prior reference;
    };
    struct Tabulated {
        std::vector<std::pair<Prior, double>> grid;
    };
    using Repr = std::variant<MaxminSet, Entropic, Gini, Tabulated>;

    static AmbiguityIndex maxmin(std::vector<Prior> priors) {
        if (priors.empty())
            throw ValidationError("maxmin penalty: need at least one prior");
        check_same_size(priors);
        return AmbiguityIndex(MaxminSet{std::move(priors)});
    }

    /// Maxmin over every prior, i.e. the hull of the point masses.
    static AmbiguityIndex full_simplex(std::size_t n) {
        std::vector<Prior> ps;
        ps.reserve(n);
        for (std::size_t k = 0; k < n; ++k)
            ps.push_back(Prior::point(n, k));
        return maxmin(std::move(ps));
    }

    static AmbiguityIndex entropic(double theta, Prior reference) {
        check_reference(theta, reference, "entropic");
        return AmbiguityIndex(Entropic{theta, std::move(reference)});
    }

    static AmbiguityIndex gini(double theta, Prior reference) {
        check_reference(theta, reference, "gini");
        return AmbiguityIndex(Gini{theta, std::move(reference)});
    }

    /// Tabulated penalty; values are re-grounded so the minimum is zero.
    static AmbiguityIndex tabulated(std::vector<std::pair<Prior, double>> grid) {
        if (grid.empty())
            throw ValidationError("tabulated penalty: empty table");
        double lowest = kInf;
        for (const auto& [q, c] : grid) {
            if (!std::isfinite(c) || c < 0.0)
                throw ValidationError("tabulated penalty: values must be finite and >= 0");
            if (q.size() != grid.front().first.size())
                throw ValidationError("tabulated penalty: priors differ in dimension");
            lowest = std::min(lowest, c);
        }
        for (auto& entry : grid)
            entry.second -= lowest;
        return AmbiguityIndex(Tabulated{std::move(grid)});
    }

    const Repr& repr() const noexcept { return repr_; }

    std::string kind_name() const {
        return std::visit(
            [](const auto& r) -> std::string {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, MaxminSet>)
                    return "maxmin";
                else if constexpr (std::is_same_v<T, Entropic>)
                    return "entropic";
                else if constexpr (std::is_same_v<T, Gini>)
                    return "gini";
                else
                    return "table";
            },
            repr_);
    }

    std::size_t dimension() const {
        return std::visit(
            [](const auto& r) -> std::size_t {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, MaxminSet>)
                    return r.priors.front().size();
                else if constexpr (std::is_same_v<T, Tabulated>)
                    return r.grid.front().first.size();
                else
                    return r.reference.size();
            },
            repr_);
    }

    /// A prior with zero penalty.
    Prior zero_penalty_prior() const {
        return std::visit(
            [](const auto& r) -> Prior {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, MaxminSet>)
                    return r.priors.front();
                else if constexpr (std::is_same_v<T, Tabulated>) {
                    auto it = std::min_element(r.grid.begin(), r.grid.end(), [](const auto& a, const auto& b) {
                        return a.second < b.second;
                    });
                    return it->first;
                } else
                    return r.reference;
            },
            repr_);
    }

    /// c(q); +inf outside the effective domain.
    double penalty(const Prior& q) const {
        if (q.size() != dimension())
            throw ShapeError("penalty: prior has " + std::to_string(q.size()) + " states, expected " +
                             std::to_string(dimension()));
        return std::visit([&](const auto& r) { return penalty_impl(r, q); }, repr_);
    }

    /// min over priors of E_Q[u] + c(Q) together with a minimizing prior.
    RobustResult robust_min(std::span<const double> u) const {
        if (u.size() != dimension())
            throw ShapeError("robust_min: utility vector has " + std::to_string(u.size()) +
                             " states, expected " + std::to_string(dimension()));
        for (double x : u)
            if (!std::isfinite(x))
                throw ValidationError("robust_min: utilities must be finite");
        return std::visit([&](const auto& r) { return robust_min_impl(r, u); }, repr_);
    }

private:
    explicit AmbiguityIndex(Repr r) : repr_(std::move(r)) {}

    static void check_same_size(const std::vector<Prior>& ps) {
        for (const auto& p : ps)
            if (p.size() != ps.front().size())
                throw ValidationError("maxmin penalty: priors differ in dimension");
    }

    static void check_reference(double theta, const Prior& ref, const char* what) {
        if (!(theta > 0.0) || !std::isfinite(theta))
            throw ValidationError(std::string(what) + " penalty: theta must be > 0");
        for (double p : ref.weights())
            if (!(p > 0.0))
                throw ValidationError(std::string(what) + " penalty: reference prior needs full support");
    }

    // ---- penalties ----

    static double penalty_impl(const MaxminSet& r, const Prior& q) {
        for (const auto& p : r.priors)
            if (p.approx_equal(q, 1e-12))
                return 0.0;
        // hull membership: lambda >= 0, sum_k lambda_k p_k = q, sum_k lambda_k = 1
        const std::size_t n = q.size(), k = r.priors.size();
        std::vector<std::vector<double>> a(n + 1, std::vector<double>(k, 1.0));
        std::vector<double> b(n + 1, 1.0);
        for (std::size_t w = 0; w < n; ++w) {
            for (std::size_t j = 0; j < k; ++j)
                a[w][j] = r.priors[j][w];
            b[w] = q[w];
        }
        return detail::phase_one(a, b, 1e-9) ? 0.0 : kInf;
    }

    static double penalty_impl(const Entropic& r, const Prior& q) {
        double acc = 0.0;
        for (std::size_t w = 0; w < q.size(); ++w)
            if (q[w] > 0.0)
                acc += q[w] * std::log(q[w] / r.reference[w]);
        return r.theta * std::max(acc, 0.0);
    }

    static double penalty_impl(const Gini& r, const Prior& q) {
        double acc = 0.0;
        for (std::size_t w = 0; w < q.size(); ++w) {
            const double d = q[w] - r.reference[w];
            acc += d * d / r.reference[w];
        }
        return r.theta * acc;
    }

    static double penalty_impl(const Tabulated& r, const Prior& q) {
        for (const auto& [p, c] : r.grid)
            if (p.approx_equal(q))
                return c;
        throw UnknownPriorError("tabulated penalty: prior is not on the table");
    }

    // ---- robust minimization ----

    static RobustResult robust_min_impl(const MaxminSet& r, std::span<const double> u) {
        std::size_t best = 0;
        double best_val = r.priors[0].expectation(u);
        for (std::size_t k = 1; k < r.priors.size(); ++k) {
            const double v = r.priors[k].expectation(u);
            if (v < best_val) {
                best_val = v;
                best = k;
            }
        }
        return {best_val, r.priors[best]};
    }

    // -theta log E'[exp(-u/theta)], minimizer q ~ p' exp(-u/theta)
    static RobustResult robust_min_impl(const Entropic& r, std::span<const double> u) {
        const double shift = *std::min_element(u.begin(), u.end());
        std::vector<double> q(u.size());
        double z = 0.0, mass = 0.0;
        for (std::size_t w = 0; w < u.size(); ++w) {
            q[w] = r.reference[w] * std::exp(-(u[w] - shift) / r.theta);
            z += q[w];
            mass += r.reference[w];
        }
        for (double& x : q)
            x /= z;
        return {shift - r.theta * std::log(z / mass), Prior(std::move(q))};
    }

    // KKT: q_w = p_w max(0, 1 + (mu - u_w) / (2 theta)), mu by bisection on sum q = 1
    static RobustResult robust_min_impl(const Gini& r, std::span<const double> u) {
        const auto& p = r.reference.weights();
        const double two_theta = 2.0 * r.theta;
        auto mass = [&](double mu) {
            double s = 0.0;
            for (std::size_t w = 0; w < u.size(); ++w)
                s += p[w] * std::max(0.0, 1.0 + (mu - u[w]) / two_theta);
            return s;
        };
        double lo = *std::min_element(u.begin(), u.end()) - two_theta;
        double hi = *std::max_element(u.begin(), u.end());
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (mass(mid) < 1.0 ? lo : hi) = mid;
        }
        double mu = 0.5 * (lo + hi);
        // exact multiplier on the identified active set
        double pa = 0.0, pu = 0.0;
        for (std::size_t w = 0; w < u.size(); ++w)
            if (1.0 + (mu - u[w]) / two_theta > 0.0) {
                pa += p[w];
                pu += p[w] * u[w];
            }
        if (pa > 0.0) {
            const double exact = (two_theta * (1.0 - pa) + pu) / pa;
            if (std::abs(mass(exact) - 1.0) <= std::abs(mass(mu) - 1.0))
                mu = exact;
        }
        std::vector<double> q(u.size());
        double total = 0.0;
        for (std::size_t w = 0; w < u.size(); ++w) {
            q[w] = p[w] * std::max(0.0, 1.0 + (mu - u[w]) / two_theta);
            total += q[w];
        }
        for (double& x : q)
            x /= total;
        Prior qs(std::move(q));
        return {qs.expectation(u) + penalty_impl(r, qs), std::move(qs)};
    }

    static RobustResult robust_min_impl(const Tabulated& r, std::span<const double> u) {
        std::size_t best = 0;
        double best_val = kInf;
        for (std::size_t k = 0; k < r.grid.size(); ++k) {
            const double v = r.grid[k].first.expectation(u) + r.grid[k].second;
            if (v < best_val) {
                best_val = v;
                best = k;
            }
        }
        return {best_val, r.grid[best].first};
    }

    Repr repr_;
};

/// All priors whose weights are multiples of 1/resolution.
inline std::vector<Prior> simplex_grid(std::size_t n, std::size_t resolution) {
    if (n == 0 || resolution == 0)
        throw ValidationError("simplex grid: need n >= 1 and resolution >= 1");
    std::vector<Prior> out;
    std::vector<std::size_t> counts(n, 0);
    auto recurse = [&](auto&& self, std::size_t i, std::size_t left) -> void {
        if (i + 1 == n) {
            counts[i] = left;
            std::vector<double> w(n);
            for (std::size_t k = 0; k < n; ++k)
                w[k] = double(counts[k]) / double(resolution);
            out.emplace_back(std::move(w));
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            counts[i] = c;
            self(self, i + 1, left - c);
        }
    };
    recurse(recurse, 0, resolution);
    return out;
}

/// Lattice of utility vectors for the brute-force dual.
struct LatticeSpec {
    double lo = -5.0;
    double hi = 5.0;
    double step = 0.01;
    /// Only the constant vectors m * (1, ..., 1).
    bool constants_only = false;

    std::vector<double> axis() const {
        if (!(step > 0.0) || !(hi >= lo))
            throw ValidationError("lattice: need step > 0 and hi >= lo");
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        std::vector<double> xs(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double x = lo + double(i) * step;
            xs[i] = std::abs(x) < 1e-9 * step ? 0.0 : x;
        }
        return xs;
    }
};

/**
 * Brute-force minimal penalty
 *   c_min(q) = sup_{v'} { U(v') - E_q[v'] }
 * over a finite lattice of utility vectors, where U is supplied by the
 * caller. Refining the lattice can only increase the result.
 */
template <class Eval>
    requires std::invocable<const Eval&, std::span<const double>>
double c_min_bruteforce(const Eval& eval_ce, const Prior& q, const LatticeSpec& lattice) {
    const auto axis = lattice.axis();
    if (axis.empty())
        throw ValidationError("c_min: empty lattice");
    const std::size_t n = q.size();
    std::vector<double> v(n);
    double best = -std::numeric_limits<double>::infinity();
    if (lattice.constants_only) {
        for (double m : axis) {
            std::fill(v.begin(), v.end(), m);
            best = std::max(best, double(eval_ce(std::span<const double>(v))) - m);
        }
        return best;
    }
    std::vector<std::size_t> idx(n, 0);
    for (;;) {
        for (std::size_t w = 0; w < n; ++w)
            v[w] = axis[idx[w]];
        best = std::max(best, double(eval_ce(std::span<const double>(v))) - q.expectation(v));
        std::size_t w = 0;
        while (w < n && ++idx[w] == axis.size())
            idx[w++] = 0;
        if (w == n)
            break;
    }
    return best;
}

} // namespace rdu
