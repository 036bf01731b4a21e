#pragma once

#include "lipnorm/ball.hpp"

#include <functional>

namespace lipnorm {

// (1/p)-th power of the p-th absolute moment of the standard symmetric
// s-stable law (characteristic function e^{-|t|^s}), via the Gamma closed
// form. Requires 0 < p < s < 2.
double c_sp(double s, double p);

// n independent standard symmetric s-stable draws, Chambers-Mallows-Stuck
// transform, deterministic per seed.
std::vector<double> sample_stable(double s, size_t n, uint64_t seed);

struct McEstimate {
    double value = 0;
    double se = 0; // one standard error of `value`
};

// Monte Carlo estimate of t_{(s,p)}(x_1..x_n) =
// c_sp^{-1} (int ||sum t_k x_k||^p dmu_s^n)^{1/p} for vectors under an
// arbitrary norm oracle.
McEstimate type_functional(const std::vector<std::vector<double>>& vectors,
                           const std::function<double(const std::vector<double>&)>& norm, double s,
                           double p, size_t N, uint64_t seed);

// stochastic lower bound on the (s,p)-type constant of the Lipschitz dual
// operator S#: max over sampled sequences (g_k) of scaled B_{Y#} vertices of
// t_{(s,p)}(S# g_k) / ||(g_k) | l_s||.
double type_constant_lower(const PointMap& map, const LipschitzBall& ball_Y, double s, double p,
                           size_t trials, size_t N, uint64_t seed);

// Verification of the inequality chain behind the type-constant bound
// pi_{(m(s;q),p)}(S) <= T_{(s,p)}(S#): for random witnesses (sigma, pairs,
// g_k), the mixed q-power sum <= its p-version == the stable-integral form
// <= t_{(s,p)}(S# g_k) * weak_p(sigma) <= T-estimate * ||(g_k)|l_s|| *
// weak_p(sigma), with Monte Carlo steps allowed 3 standard errors of slack.
struct Theorem42Report {
    size_t trials = 0;
    size_t monotonicity_failures = 0; // q-sum > p-sum (exact step)
    size_t identity_failures = 0;     // p-sum vs stable integral beyond 3 SE
    size_t chain_failures = 0;        // integral form > type bound beyond 3 SE
    double worst_z = 0;               // largest violation in SE units
};
Theorem42Report theorem42_witness_check(const PointMap& map, double s, double q, double p,
                                        size_t witnesses, size_t N, uint64_t seed,
                                        const LipschitzBall& ball_X, const LipschitzBall& ball_Y);

} // namespace lipnorm
