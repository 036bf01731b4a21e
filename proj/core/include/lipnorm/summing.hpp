#pragma once

#include "lipnorm/seq.hpp"

namespace lipnorm {

// --- LP kernel over pair weights ---------------------------------------------

// maximize cost . lambda subject to lambda >= 0 and, for each row,
// rows[v] . lambda <= 1. Exact rational path and a long-double path with
// residual checks; both return the vertex multipliers of the dual program.
struct PairLpExact {
    Rat value;
    std::vector<Rat> lambda;
    std::vector<Rat> dual; // one multiplier per row; sum == value
};
PairLpExact pair_lp_exact(const std::vector<std::vector<Rat>>& rows, const std::vector<Rat>& cost);

struct PairLpFloat {
    long double value;
    std::vector<long double> lambda;
    std::vector<long double> dual;
    long double residual; // worst primal/dual feasibility violation
};
PairLpFloat pair_lp_float(const std::vector<std::vector<long double>>& rows,
                          const std::vector<long double>& cost);

// --- summing norms ------------------------------------------------------------

// pi_p of a map: the optimal constant in strong_p(image) <= C weak_p(source).
// Solved as the LP over one weight per unordered domain pair, constrained by
// every vertex of B_{X#}. Exact for integer p >= 1; p = inf is the Lipschitz
// constant; interval for other p.
struct PiPSolution {
    NormValue norm;
    std::vector<double> lambda; // primal pair weights, order of domain pairs
    std::vector<double> dual;   // domination multipliers, one per ball vertex
    std::optional<std::vector<Rat>> lambda_rat, dual_rat; // exact path only
};
PiPSolution pi_p_solve(const PointMap& map, const Exponent& p, const LipschitzBall& ball_X);
NormValue pi_p_exact(const PointMap& map, const Exponent& p, const LipschitzBall& ball_X);

// pi_{(p,m(s;s))} for s <= p: substitute u = sigma^s, maximize the convex
// objective (sum u^{p/s} d_Y^p)^{1/p} over the polytope
// {u >= 0 : sum u |f(a)-f(b)|^s <= 1 for all vertices f}, attained at a
// polytope vertex. Exact enumeration at desk scale (<= 7 pairs), interval
// beyond the cap.
NormValue pi_ps_exact(const PointMap& map, const Exponent& p, const Exponent& s,
                      const LipschitzBall& ball_X);

// lower bound for pi_{(p,m(s;q))}, q <= s, q <= p: multi-start maximization of
// strong_p(image) / mixed_sup(source, s, q) over pair-weight vectors.
NormValue pi_p_msq_lower(const PointMap& map, const Exponent& p, const Exponent& s,
                         const Exponent& q, const LipschitzBall& ball_X, size_t starts = 64,
                         uint64_t seed = 7);

// interval for pi_{(m(s;q),p)}, p <= q <= s. Lower: multi-start sup of
// mixed_sup(image, s, q) / weak_p(source). Upper: min of the interpolation
// bound pi_p(S)^{q/s'(q)} Lip(S)^{q/s}, the s = q collapse Lip(S), and the
// single-functional bound Lip(S) pi_p(I_X).
NormValue pi_msq_p(const PointMap& map, const Exponent& s, const Exponent& q, const Exponent& p,
                   const LipschitzBall& ball_X, const LipschitzBall& ball_Y, size_t starts = 64,
                   uint64_t seed = 7);

// upper bound for pi_{(m(s;p),r)}, r <= p <= s:
// pi_r(S)^{p/s'(p)} * Lip(S)^{p/s}, with s'(p) the index conjugate to p
// relative to s.
NormValue interpolation_upper(const PointMap& map, const Exponent& s, const Exponent& p,
                              const Exponent& r, const LipschitzBall& ball_X);

// upper bound at the interpolated index 1/s = (1-theta)/s0 + theta/s1:
// product of the endpoint bounds raised to 1-theta and theta.
NormValue general_interpolation_upper(const PointMap& map, double theta, const Exponent& s0,
                                      const Exponent& s1, const Exponent& p, const Exponent& r,
                                      const LipschitzBall& ball_X);

// Pietsch-style domination data: a probability measure on B_{X#} vertices and
// a constant.
struct DominationCertificate {
    std::vector<Rat> weights; // nonnegative, sums to 1 exactly
    double C = 0;
    Exponent s{1}, p{1};
};

// true iff d_Y(Ta,Tb) <= C (sum_v w_v |f_v(a)-f_v(b)|^q)^{1/q} for every
// domain pair, within 1e-9 relative slack; certifies pi_{(m(s;q),p)} <= C.
bool domination_check(const PointMap& map, const DominationCertificate& cert, const Exponent& q,
                      const LipschitzBall& ball_X);

// The map y -> (<g_1,y>, ..., <g_K,y>) into the image tuples under the l_s
// distance. Tuple distances are generally irrational, so the embedding is
// materialized on demand as an exact-rational space whose distances are the
// true ones rounded up to a 1/denominator grid (grid ceiling preserves the
// triangle inequality).
struct FunctionalEmbedding {
    SpacePtr domain;
    std::vector<std::vector<Rat>> tuples; // one per domain point
    Exponent s{2};
    double functional_norm = 0; // (sum_k Lip(g_k)^s)^{1/s}

    PointMap realize(long long denom = 1LL << 40) const;
};
FunctionalEmbedding embed_via_functionals(const SpacePtr& Y, const std::vector<std::vector<Rat>>& g_list,
                                          const Exponent& s);

} // namespace lipnorm
