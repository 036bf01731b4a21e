#include "lipnorm/summing.hpp"

#include "lipnorm/simplex.hpp"

#include <cmath>

namespace lipnorm {

PairLpExact pair_lp_exact(const std::vector<std::vector<Rat>>& rows, const std::vector<Rat>& cost) {
    std::vector<Rat> b(rows.size(), Rat(1));
    auto sol = simplex_max<Rat>(rows, b, cost);
    // strong duality check: the multipliers must be feasible for the dual
    // (A^T y >= c, y >= 0) and match the primal value exactly
    Rat dual_value(0);
    for (const auto& y : sol.dual) {
        if (y < 0) throw std::logic_error("pair_lp_exact: negative dual multiplier");
        dual_value += y;
    }
    if (dual_value != sol.value) throw std::logic_error("pair_lp_exact: duality gap");
    for (size_t j = 0; j < cost.size(); ++j) {
        Rat acc(0);
        for (size_t i = 0; i < rows.size(); ++i) acc += sol.dual[i] * rows[i][j];
        if (acc < cost[j]) throw std::logic_error("pair_lp_exact: dual infeasible");
    }
    return {sol.value, std::move(sol.x), std::move(sol.dual)};
}

PairLpFloat pair_lp_float(const std::vector<std::vector<long double>>& rows,
                          const std::vector<long double>& cost) {
    std::vector<long double> b(rows.size(), 1.0L);
    auto sol = simplex_max<long double>(rows, b, cost, 1e-12L);
    long double res = 0;
    long double dual_value = 0;
    for (auto y : sol.dual) {
        res = std::max(res, -y);
        dual_value += y;
    }
    res = std::max(res, std::fabs(dual_value - sol.value) / std::max(1.0L, sol.value));
    for (size_t j = 0; j < cost.size(); ++j) {
        long double acc = 0;
        for (size_t i = 0; i < rows.size(); ++i) acc += sol.dual[i] * rows[i][j];
        res = std::max(res, (cost[j] - acc) / std::max(1.0L, cost[j]));
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        long double acc = 0;
        for (size_t j = 0; j < cost.size(); ++j) acc += rows[i][j] * sol.x[j];
        res = std::max(res, acc - 1.0L);
    }
    return {sol.value, std::move(sol.x), std::move(sol.dual), res};
}

} // namespace lipnorm
