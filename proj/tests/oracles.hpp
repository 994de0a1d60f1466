#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's statistics code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        if (std::fabs(a[pivot][col]) < 1e-12) throw std::runtime_error("singular normal equations");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Residual sum of squares of y on the columns of `design` (rows = observations).
inline double rss(const Matrix& design, const std::vector<double>& y) {
    const std::size_t p = design.front().size();
    Matrix xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        for (std::size_t a = 0; a < p; ++a) {
            xty[a] += design[i][a] * y[i];
            for (std::size_t b = 0; b < p; ++b) xtx[a][b] += design[i][a] * design[i][b];
        }
    }
    const auto beta = solve(xtx, xty);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double fit = 0.0;
        for (std::size_t a = 0; a < p; ++a) fit += design[i][a] * beta[a];
        s += (y[i] - fit) * (y[i] - fit);
    }
    return s;
}

struct FTest {
    double f;
    double df1;
    double df2;
    double p;
};

// Genotype F test by explicit normal equations. `covariate` may be empty.
inline FTest genotype_f_test(const std::vector<double>& y, const std::vector<int>& group,
                             const std::vector<double>& covariate) {
    std::vector<int> levels;
    for (int g : group) {
        if (std::find(levels.begin(), levels.end(), g) == levels.end()) levels.push_back(g);
    }
    std::sort(levels.begin(), levels.end());
    Matrix full;
    Matrix reduced;
    for (std::size_t i = 0; i < y.size(); ++i) {
        std::vector<double> row_full{1.0};
        std::vector<double> row_red{1.0};
        for (std::size_t l = 1; l < levels.size(); ++l) row_full.push_back(group[i] == levels[l] ? 1.0 : 0.0);
        if (!covariate.empty()) {
            row_full.push_back(covariate[i]);
            row_red.push_back(covariate[i]);
        }
        full.push_back(row_full);
        reduced.push_back(row_red);
    }
    const double rss_full = rss(full, y);
    const double rss_red = rss(reduced, y);
    const double df1 = static_cast<double>(levels.size()) - 1.0;
    const double df2 = static_cast<double>(y.size()) - static_cast<double>(full.front().size());
    const double f = ((rss_red - rss_full) / df1) / (rss_full / df2);
    boost::math::fisher_f dist(df1, df2);
    return {f, df1, df2, boost::math::cdf(boost::math::complement(dist, f))};
}

// Kruskal-Wallis H with brute-force midranks (O(N^2)) and the
// 12/(N(N+1)) sum R^2/n - 3(N+1) form, tie corrected.
inline double kruskal_h(const std::vector<double>& x, const std::vector<int>& group) {
    const auto n = static_cast<double>(x.size());
    std::map<int, std::pair<double, double>> sums;  // group -> (rank sum, count)
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0.0;
        double equal = 0.0;
        for (double v : x) {
            less += v < x[i] ? 1.0 : 0.0;
            equal += v == x[i] ? 1.0 : 0.0;
        }
        sums[group[i]].first += less + (equal + 1.0) / 2.0;
        sums[group[i]].second += 1.0;
    }
    double h = 0.0;
    for (const auto& [g, s] : sums) h += s.first * s.first / s.second;
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    std::map<double, double> counts;
    for (double v : x) counts[v] += 1.0;
    double ties = 0.0;
    for (const auto& [v, t] : counts) ties += t * t * t - t;
    return h / (1.0 - ties / (n * n * n - n));
}

inline double chi_square_sf(double x, double df) {
    boost::math::chi_squared dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// Pearson chi-square statistic for a contingency table.
inline double chi_square_independence(const std::vector<std::vector<double>>& table) {
    const std::size_t rows = table.size();
    const std::size_t cols = table.front().size();
    std::vector<double> row_sum(rows, 0.0);
    std::vector<double> col_sum(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            row_sum[r] += table[r][c];
            col_sum[c] += table[r][c];
            total += table[r][c];
        }
    }
    double stat = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double expected = row_sum[r] * col_sum[c] / total;
            if (expected > 0.0) stat += (table[r][c] - expected) * (table[r][c] - expected) / expected;
        }
    }
    return stat;
}

}  // namespace oracle
