#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace rdu::detail {

/**
 * Phase-one simplex: find x >= 0 with A x = b, or report infeasibility.
 *
 * Dense tableau with one artificial per row and Bland's rule, which is
 * plenty for hull-membership problems with a few hundred columns.
 * Returns x when the minimal total artificial mass is at most tol.
 */
inline std::optional<std::vector<double>> phase_one(const std::vector<std::vector<double>>& a,
                                                    const std::vector<double>& b,
                                                    double tol = 1e-9) {
    const std::size_t m = b.size();
    const std::size_t n = m == 0 ? 0 : a.front().size();
    const std::size_t cols = n + m + 1; // originals, artificials, rhs
    constexpr double eps = 1e-12;

    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            t[i][j] = sign * a[i][j];
        t[i][n + i] = 1.0;
        t[i][cols - 1] = sign * b[i];
        basis[i] = n + i;
    }
    // reduced costs of "minimize sum of artificials"
    auto& obj = t[m];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (j < n || j == cols - 1)
                obj[j] -= t[i][j];

    for (std::size_t iter = 0; iter < 50 * (n + m) + 100; ++iter) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j + 1 < cols; ++j)
            if (obj[j] < -eps) {
                enter = j;
                break;
            }
        if (enter == cols)
            break;
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= eps)
                continue;
            const double ratio = t[i][cols - 1] / t[i][enter];
            if (leave == m || ratio < best - eps ||
                (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m)
            break; // unbounded direction cannot occur for a phase-one problem
        const double piv = t[leave][enter];
        for (auto& x : t[leave])
            x /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter] == 0.0)
                continue;
            const double f = t[i][enter];
            for (std::size_t j = 0; j < cols; ++j)
                t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    if (-obj[cols - 1] > tol)
        return std::nullopt;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n)
            x[basis[i]] = std::max(0.0, t[i][cols - 1]);
    return x;
}

} // namespace rdu::detail
