#pragma once

#include "lipnorm/ball.hpp"
#include "lipnorm/exponent.hpp"
#include "lipnorm/norm_value.hpp"

namespace lipnorm {

struct SeqEntry {
    Rat weight;
    size_t left, right;
};

// Finite weighted pair sequence (sigma_j, x'_j, x''_j).
struct WeightedPairSequence {
    SpacePtr space;
    std::vector<SeqEntry> entries;
};

WeightedPairSequence seq_from_json(const std::string& text, const SpacePtr& space);

// Pushes a sequence forward through a base-preserving map.
WeightedPairSequence image_sequence(const PointMap& map, const WeightedPairSequence& seq);

// (sum |sigma_j|^p d(x'_j,x''_j)^p)^{1/p}; sup |sigma_j| d(...) at p = inf.
// Always exact; the rational p-th power is attached for integer p.
NormValue strong_norm(const WeightedPairSequence& seq, const Exponent& p);

// sup over the ball of the strong norm of increments. Exact for p >= 1 (the
// objective is convex in f, so vertices suffice); certified lower bound for
// p in (0,1), where vertex attainment is not known.
NormValue weak_norm(const WeightedPairSequence& seq, const Exponent& p, const LipschitzBall& ball);

// Mixed norm via the measure supremum: sup over probability weights w on ball
// vertices of [sum_j (sum_v w_v a_jv)^{q/s}]^{1/q}, a_jv = |sigma_j|^s
// |f_v(x'_j)-f_v(x''_j)|^s. Concave for q <= s; solved by pairwise
// Frank-Wolfe. Exact when the q=s / s=inf closed forms apply, else an
// interval whose width is the conditional-gradient duality gap.
NormValue mixed_norm_sup(const WeightedPairSequence& seq, const Exponent& s, const Exponent& q,
                         const LipschitzBall& ball, double gap_tol = 1e-9,
                         size_t max_iter = 100000);

// Mixed norm via the factorization infimum: min over positive tau of
// ||tau||_{s'(q)} * weak_s(sigma/tau). Upper bound; alternates between the
// attaining vertex and the closed-form tau, multi-started.
NormValue mixed_norm_inf(const WeightedPairSequence& seq, const Exponent& s, const Exponent& q,
                         const LipschitzBall& ball, size_t starts = 32, uint64_t seed = 1);

// --- double-weight kernels shared with the witness searches -----------------

// diffs[v][j]: increment of ball vertex v on pair j. p may be infinite.
double strong_p_d(const std::vector<double>& w, const std::vector<double>& dist, double p);
double weak_p_d(const std::vector<double>& w, const std::vector<std::vector<double>>& diffs,
                double p, size_t* attaining = nullptr);

struct MixedSupResult {
    double lo = 0, hi = 0;               // bracket for the norm value
    std::vector<double> vertex_weights;  // the maximizing measure found
};
MixedSupResult mixed_sup_d(const std::vector<double>& w,
                           const std::vector<std::vector<double>>& diffs, double s, double q,
                           double gap_tol = 1e-9, size_t max_iter = 100000);

double mixed_inf_d(const std::vector<double>& w, const std::vector<std::vector<double>>& diffs,
                   double s, double q, size_t starts, uint64_t seed);

// Per-pair increment table |f_v(a) - f_v(b)| for an arbitrary pair list, as
// doubles. Pairs live in ball.space().
std::vector<std::vector<double>> diff_table(const LipschitzBall& ball,
                                            const std::vector<std::pair<size_t, size_t>>& pairs);

} // namespace lipnorm
