#pragma once

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. None of them call into the library's solvers.

#include "rdu/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline rdu::DiscreteDistribution random_dist(std::mt19937_64& rng, std::size_t max_n = 8, double lo = -10,
                                             double hi = 10) {
    std::uniform_int_distribution<std::size_t> size(1, max_n);
    std::uniform_real_distribution<double> val(lo, hi), mass(0.05, 1.0);
    const std::size_t n = size(rng);
    std::vector<double> xs(n), ps(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = val(rng);
        if (rng() % 4 == 0)
            xs[i] = std::round(xs[i]);
        ps[i] = mass(rng);
        total += ps[i];
    }
    for (double& p : ps)
        p /= total;
    return {xs, ps};
}

/// Midpoint Riemann sum of the split Choquet integral.
template <class Psi>
double choquet_riemann(const rdu::DiscreteDistribution& d, const Psi& psi, int n = 400000) {
    const double lo = std::min(d.min(), 0.0), hi = std::max(d.max(), 0.0);
    const double h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = lo + (i + 0.5) * h;
        const double s = psi(1.0 - d.cdf(t));
        acc += (t >= 0 ? s : s - 1.0) * h;
    }
    return acc;
}

/// Plain sum_i p_i x_i.
inline double plain_mean(const std::vector<double>& p, const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        acc += p[i] * x[i];
    return acc;
}

struct SimplexMin {
    double value;
    std::vector<double> argmin;
};

/**
 * Minimizes f over the 2- or 3-state simplex by repeated grid zooming:
 * a 201-point (or 61x61) grid around the incumbent whose width shrinks
 * by a factor of four per round.
 */
inline SimplexMin zoom_simplex_min(std::size_t n, const std::function<double(const std::vector<double>&)>& f,
                                   int rounds = 14) {
    SimplexMin best{std::numeric_limits<double>::infinity(), {}};
    auto consider = [&](std::vector<double> q) {
        for (double x : q)
            if (x < 0.0)
                return;
        const double v = f(q);
        if (v < best.value)
            best = {v, std::move(q)};
    };
    if (n == 2) {
        double centre = 0.5, width = 0.5;
        for (int r = 0; r < rounds; ++r) {
            const double c = centre;
            for (int i = -100; i <= 100; ++i) {
                const double a = std::clamp(c + width * i / 100.0, 0.0, 1.0);
                consider({a, 1.0 - a});
            }
            centre = best.argmin[0];
            width /= 4.0;
        }
    } else if (n == 3) {
        double c0 = 1.0 / 3, c1 = 1.0 / 3, width = 0.5;
        for (int r = 0; r < rounds; ++r) {
            const double a0 = c0, a1 = c1;
            for (int i = -30; i <= 30; ++i)
                for (int j = -30; j <= 30; ++j) {
                    const double x = std::clamp(a0 + width * i / 30.0, 0.0, 1.0);
                    const double y = std::clamp(a1 + width * j / 30.0, 0.0, 1.0);
                    if (x + y <= 1.0)
                        consider({x, y, 1.0 - x - y});
                }
            c0 = best.argmin[0];
            c1 = best.argmin[1];
            width /= 4.0;
        }
    }
    return best;
}

inline double kl(const std::vector<double>& q, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] > 0.0)
            acc += q[i] * std::log(q[i] / p[i]);
    return acc;
}

inline double chi2(const std::vector<double>& q, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        acc += (q[i] - p[i]) * (q[i] - p[i]) / p[i];
    return acc;
}

} // namespace oracle
