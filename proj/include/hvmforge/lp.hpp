#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hvmforge/errors.hpp"
#include "hvmforge/rational.hpp"

namespace hvmforge {

// Decision for the program  { find x >= 0 with A x = b }  in exact
// rational arithmetic. Feasible instances come back with a solution;
// infeasible ones with a Farkas vector y satisfying
//   A^T y >= 0  componentwise  and  b^T y < 0,
// which certifies that no nonnegative solution can exist (any x >= 0
// with A x = b would give 0 <= x . (A^T y) = b^T y < 0).
struct FeasibilityResult {
    bool feasible = false;
    std::vector<Rational> solution;  // size n when feasible
    std::vector<Rational> farkas;    // size m when infeasible
};

// Phase-1 simplex on a dense tableau with Bland's anti-cycling rule.
// Minimizes the sum of one artificial variable per row; the system is
// feasible exactly when that sum reaches zero. Redundant rows are
// harmless: their artificials simply remain basic at zero. The Farkas
// vector is read off the simplex multipliers at a positive optimum.
// Sizes here are desk scale, so no sparsity or factorization tricks.
inline FeasibilityResult solve_equality_feasibility(std::vector<std::vector<Rational>> a,
                                                    std::vector<Rational> b) {
    const std::size_t m = a.size();
    if (b.size() != m) throw InternalError("lp: row/rhs size mismatch");
    const std::size_t n = m == 0 ? 0 : a[0].size();
    for (const auto& row : a) {
        if (row.size() != n) throw InternalError("lp: ragged constraint matrix");
    }

    if (m == 0) return {true, std::vector<Rational>(n, Rational(0)), {}};

    // Orient every row so its right-hand side is nonnegative.
    std::vector<int> flip(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0) {
            flip[i] = -1;
            b[i] = -b[i];
            for (auto& v : a[i]) v = -v;
        }
    }

    // Tableau: n structural columns, m artificial columns, rhs column.
    const std::size_t cols = n + m + 1;
    const std::size_t rhs = n + m;
    std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
        t[i][n + i] = 1;
        t[i][rhs] = b[i];
    }
    // Cost row: reduced costs with the artificial basis priced out.
    // t[m][rhs] holds minus the current objective value.
    for (std::size_t j = 0; j < n; ++j) {
        Rational colsum = 0;
        for (std::size_t i = 0; i < m; ++i) colsum += t[i][j];
        t[m][j] = -colsum;
    }
    {
        Rational total = 0;
        for (std::size_t i = 0; i < m; ++i) total += t[i][rhs];
        t[m][rhs] = -total;
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (;;) {
        // Bland: entering column = lowest index with negative reduced cost.
        std::size_t entering = cols;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (t[m][j] < 0) {
                entering = j;
                break;
            }
        }
        if (entering == cols) break;

        // Ratio test; ties resolved toward the lowest basis index.
        std::size_t leaving = m;
        Rational best_ratio;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][entering] <= 0) continue;
            Rational ratio = t[i][rhs] / t[i][entering];
            if (leaving == m || ratio < best_ratio ||
                (ratio == best_ratio && basis[i] < basis[leaving])) {
                leaving = i;
                best_ratio = ratio;
            }
        }
        if (leaving == m) {
            throw InternalError("lp: phase-1 objective unbounded");
        }

        const Rational pivot = t[leaving][entering];
        for (auto& v : t[leaving]) v /= pivot;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leaving || t[i][entering] == 0) continue;
            const Rational factor = t[i][entering];
            for (std::size_t j = 0; j < cols; ++j) {
                t[i][j] -= factor * t[leaving][j];
            }
        }
        basis[leaving] = entering;
    }

    const Rational residual = -t[m][rhs];
    FeasibilityResult result;
    if (residual == 0) {
        result.feasible = true;
        result.solution.assign(n, Rational(0));
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) result.solution[basis[i]] = t[i][rhs];
        }
        // Exact self-check of A x = b on the oriented system.
        for (std::size_t i = 0; i < m; ++i) {
            Rational dot = 0;
            for (std::size_t j = 0; j < n; ++j) dot += a[i][j] * result.solution[j];
            if (dot != b[i]) throw InternalError("lp: solution fails a constraint");
        }
        return result;
    }

    // Simplex multipliers: the reduced cost of artificial i is 1 - y_i.
    // Undo the row orientation, then negate to match the certificate
    // convention above.
    result.feasible = false;
    result.farkas.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Rational y = 1 - t[m][n + i];
        result.farkas[i] = -(Rational(flip[i]) * y);
    }
    // Exact self-check of the Farkas inequalities on the original data.
    Rational bty = 0;
    for (std::size_t i = 0; i < m; ++i) {
        bty += (flip[i] == 1 ? b[i] : -b[i]) * result.farkas[i];
    }
    if (bty >= 0) throw InternalError("lp: certificate fails b^T y < 0");
    for (std::size_t j = 0; j < n; ++j) {
        Rational dot = 0;
        for (std::size_t i = 0; i < m; ++i) {
            dot += (flip[i] == 1 ? a[i][j] : -a[i][j]) * result.farkas[i];
        }
        if (dot < 0) throw InternalError("lp: certificate fails A^T y >= 0");
    }
    return result;
}

}  // namespace hvmforge
