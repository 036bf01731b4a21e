#pragma once

#include <optional>
#include <vector>

namespace lipnorm {

// Solves the square system M x = rhs by Gaussian elimination with exact
// pivoting on the first nonzero entry. Returns nullopt when M is singular.
template <typename T>
std::optional<std::vector<T>> solve_linear(std::vector<std::vector<T>> M, std::vector<T> rhs) {
    const size_t n = M.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && M[piv][col] == T(0)) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(M[piv], M[col]);
        std::swap(rhs[piv], rhs[col]);
        for (size_t row = col + 1; row < n; ++row) {
            if (M[row][col] == T(0)) continue;
            T f = M[row][col] / M[col][col];
            for (size_t j = col; j < n; ++j) M[row][j] -= f * M[col][j];
            rhs[row] -= f * rhs[col];
        }
    }
    std::vector<T> x(n, T(0));
    for (size_t row = n; row-- > 0;) {
        T acc = rhs[row];
        for (size_t j = row + 1; j < n; ++j) acc -= M[row][j] * x[j];
        x[row] = acc / M[row][row];
    }
    return x;
}

} // namespace lipnorm
