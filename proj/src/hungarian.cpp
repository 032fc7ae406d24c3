#include "rigmixer/correspondence.hpp"

#include <cmath>
#include <limits>

namespace rigmixer {

namespace {

// Large finite block for forbidden cells; finite so potential updates never
// produce inf - inf.
constexpr double kBlocked = 1e13;

// Classic O(n^3) potentials algorithm on a square matrix (minimization).
// Returns col -> row (and implicitly row -> col).
std::vector<int> solve_square(const std::vector<double>& a, int n) {
    const double inf = std::numeric_limits<double>::max();
    std::vector<double> u(static_cast<size_t>(n) + 1, 0.0), v(static_cast<size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<size_t>(n) + 1, 0), way(static_cast<size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<size_t>(n) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = p[static_cast<size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur =
                    a[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_to_row(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j) {
        col_to_row[static_cast<size_t>(j - 1)] = p[static_cast<size_t>(j)] - 1;
    }
    return col_to_row;
}

// Square reduction of the void-slot problem: original rows/cols in the top
// left block, one private void column per row, one private void row per
// column, and free void-void cells in the bottom right.
std::vector<double> build_square(const CostMatrix& m, int& n_out) {
    const int n = m.rows + m.cols;
    std::vector<double> a(static_cast<size_t>(n) * n, kBlocked);
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            a[static_cast<size_t>(r) * n + c] = m.at(r, c);
        }
        a[static_cast<size_t>(r) * n + (m.cols + r)] = m.void_row_cost[static_cast<size_t>(r)];
    }
    for (int c = 0; c < m.cols; ++c) {
        a[static_cast<size_t>(m.rows + c) * n + c] = m.void_col_cost[static_cast<size_t>(c)];
    }
    for (int r = m.rows; r < n; ++r) {
        for (int c = m.cols; c < n; ++c) {
            a[static_cast<size_t>(r) * n + c] = 0.0;
        }
    }
    n_out = n;
    return a;
}

// Deterministic reported total: matched entries in row order, then void
// costs of unmatched rows and columns.
double assignment_total(const CostMatrix& m, const std::vector<int>& row_to_col) {
    double total = 0.0;
    for (int r = 0; r < m.rows; ++r) {
        const int c = row_to_col[static_cast<size_t>(r)];
        total += (c < 0) ? m.void_row_cost[static_cast<size_t>(r)] : m.at(r, c);
    }
    std::vector<char> col_used(static_cast<size_t>(m.cols), 0);
    for (int r = 0; r < m.rows; ++r) {
        if (row_to_col[static_cast<size_t>(r)] >= 0) col_used[static_cast<size_t>(row_to_col[static_cast<size_t>(r)])] = 1;
    }
    for (int c = 0; c < m.cols; ++c) {
        if (!col_used[static_cast<size_t>(c)]) total += m.void_col_cost[static_cast<size_t>(c)];
    }
    return total;
}

std::vector<int> solve_row_to_col(const CostMatrix& m) {
    std::vector<int> row_to_col(static_cast<size_t>(m.rows), -1);
    if (m.rows == 0) return row_to_col;
    if (m.cols == 0) return row_to_col; // all rows void
    int n = 0;
    const std::vector<double> a = build_square(m, n);
    const std::vector<int> col_to_row = solve_square(a, n);
    for (int c = 0; c < m.cols; ++c) {
        const int r = col_to_row[static_cast<size_t>(c)];
        if (r >= 0 && r < m.rows) row_to_col[static_cast<size_t>(r)] = c;
    }
    return row_to_col;
}

} // namespace

Assignment hungarian(const CostMatrix& costs) {
    Assignment best;
    best.row_to_col = solve_row_to_col(costs);
    best.total = assignment_total(costs, best.row_to_col);

    // Refine to the lexicographically smallest optimum: fix each row in turn
    // to its smallest column (void last) that still permits a solution of
    // equal total cost.
    const double tol = 1e-9 * std::max(1.0, std::fabs(best.total));
    CostMatrix work = costs;
    for (int r = 0; r < costs.rows; ++r) {
        const int current = best.row_to_col[static_cast<size_t>(r)];
        int chosen = current;
        for (int cand = 0; cand < costs.cols; ++cand) {
            if (cand == current) { chosen = current; break; }
            bool taken = false;
            for (int rr = 0; rr < r; ++rr) {
                if (best.row_to_col[static_cast<size_t>(rr)] == cand) { taken = true; break; }
            }
            if (taken) continue;
            // Force row r onto cand and re-solve the remainder.
            CostMatrix forced = work;
            for (int c = 0; c < costs.cols; ++c) {
                if (c != cand) forced.at(r, c) = kBlocked;
            }
            forced.void_row_cost[static_cast<size_t>(r)] = kBlocked;
            const std::vector<int> alt = solve_row_to_col(forced);
            const double alt_total = assignment_total(costs, alt);
            if (alt_total <= best.total + tol && alt[static_cast<size_t>(r)] == cand) {
                best.row_to_col = alt;
                chosen = cand;
                break;
            }
        }
        // Pin the decision for subsequent rows.
        for (int c = 0; c < costs.cols; ++c) {
            if (c != chosen) work.at(r, c) = kBlocked;
        }
        if (chosen >= 0) {
            work.void_row_cost[static_cast<size_t>(r)] = kBlocked;
        }
    }
    best.total = assignment_total(costs, best.row_to_col);

    best.col_to_row.assign(static_cast<size_t>(costs.cols), -1);
    for (int r = 0; r < costs.rows; ++r) {
        const int c = best.row_to_col[static_cast<size_t>(r)];
        if (c >= 0) best.col_to_row[static_cast<size_t>(c)] = r;
    }
    return best;
}

} // namespace rigmixer
