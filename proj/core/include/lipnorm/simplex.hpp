#pragma once

#include <stdexcept>
#include <vector>

namespace lipnorm {

struct LpUnbounded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
struct LpSolution {
    T value{};
    std::vector<T> x;    // primal variables
    std::vector<T> dual; // one multiplier per constraint
};

// Maximizes c.x subject to A x <= b, x >= 0, where b >= 0 so the slack basis
// is feasible from the start. Bland's rule guarantees termination on
// degenerate programs. `eps` is the pivot tolerance: T(0) for exact scalars,
// something like 1e-12 for floating point.
template <typename T>
LpSolution<T> simplex_max(const std::vector<std::vector<T>>& A, const std::vector<T>& b,
                          const std::vector<T>& c, const T& eps = T(0)) {
    const size_t m = A.size(), n = c.size();
    std::vector<std::vector<T>> tab(m, std::vector<T>(n + m + 1, T(0)));
    for (size_t i = 0; i < m; ++i) {
        if (b[i] < T(0)) throw std::invalid_argument("simplex_max: negative right-hand side");
        for (size_t j = 0; j < n; ++j) tab[i][j] = A[i][j];
        tab[i][n + i] = T(1);
        tab[i][n + m] = b[i];
    }
    std::vector<T> obj(n + m, T(0)); // reduced costs
    for (size_t j = 0; j < n; ++j) obj[j] = c[j];
    T value(0);
    std::vector<size_t> basis(m);
    for (size_t i = 0; i < m; ++i) basis[i] = n + i;

    for (;;) {
        size_t enter = n + m;
        for (size_t j = 0; j < n + m; ++j)
            if (obj[j] > eps) {
                enter = j; // Bland: lowest improving index
                break;
            }
        if (enter == n + m) break;

        size_t leave = m;
        for (size_t i = 0; i < m; ++i) {
            if (tab[i][enter] <= eps) continue;
            if (leave == m) {
                leave = i;
                continue;
            }
            // ratio test by cross-multiplication; ties resolved by Bland
            T lhs = tab[i][n + m] * tab[leave][enter];
            T rhs = tab[leave][n + m] * tab[i][enter];
            if (lhs < rhs || (lhs == rhs && basis[i] < basis[leave])) leave = i;
        }
        if (leave == m) throw LpUnbounded("simplex_max: objective unbounded");

        T piv = tab[leave][enter];
        for (auto& t : tab[leave]) t /= piv;
        for (size_t i = 0; i < m; ++i) {
            if (i == leave || tab[i][enter] == T(0)) continue;
            T f = tab[i][enter];
            for (size_t j = 0; j <= n + m; ++j) tab[i][j] -= f * tab[leave][j];
        }
        T f = obj[enter];
        for (size_t j = 0; j < n + m; ++j) obj[j] -= f * tab[leave][j];
        value += f * tab[leave][n + m];
        basis[leave] = enter;
    }

    LpSolution<T> out;
    out.value = value;
    out.x.assign(n, T(0));
    for (size_t i = 0; i < m; ++i)
        if (basis[i] < n) out.x[basis[i]] = tab[i][n + m];
    out.dual.assign(m, T(0));
    for (size_t i = 0; i < m; ++i) out.dual[i] = -obj[n + i];
    return out;
}

} // namespace lipnorm
