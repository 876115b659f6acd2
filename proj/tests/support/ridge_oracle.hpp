#pragma once

// Independent dense normal-equation solve for checking the ridge readout:
// Gauss-Jordan with partial pivoting on (A^T A + lambda R) w = A^T y with an
// appended bias column and R = diag(1..1, 0). Shares no code with the library
// solver path.

#include <cmath>
#include <cstddef>
#include <vector>

namespace molres_test {

inline std::vector<double> normal_equation_oracle(const std::vector<std::vector<double>>& x,
                                                  const std::vector<double>& y, double lambda) {
    const std::size_t n = x.size();
    const std::size_t p = x[0].size() + 1; // bias column appended last
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double xi = i + 1 == p ? 1.0 : x[r][i];
                const double xj = j + 1 == p ? 1.0 : x[r][j];
                sum += xi * xj;
            }
            if (i == j && i + 1 != p) sum += lambda;
            a[i][j] = sum;
        }
        double rhs = 0.0;
        for (std::size_t r = 0; r < n; ++r) rhs += (i + 1 == p ? 1.0 : x[r][i]) * y[r];
        a[i][p] = rhs;
    }
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        const double d = a[col][col];
        for (std::size_t c = col; c <= p; ++c) a[col][c] /= d;
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            for (std::size_t c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> w(p);
    for (std::size_t i = 0; i < p; ++i) w[i] = a[i][p];
    return w;
}

} // namespace molres_test
