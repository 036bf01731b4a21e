#pragma once

#include "lipnorm/metric.hpp"

namespace lipnorm {

struct DimensionTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One extreme point f of {f : f(x0) = 0, |f(u) - f(v)| <= d(u,v)}.
struct BallVertex {
    std::vector<Rat> values; // values[i] = f(x_i), values[base] = 0
};

// Exact vertex set of the Lipschitz unit ball of X^#, plus cached pair
// increments. Immutable once built.
class LipschitzBall {
public:
    LipschitzBall(SpacePtr space, std::vector<BallVertex> vertices);

    const SpacePtr& space() const { return space_; }
    const std::vector<BallVertex>& vertices() const { return vertices_; }
    size_t size() const { return vertices_.size(); }

    // |f_v(a) - f_v(b)| for vertex v and unordered pair index k, in the order
    // of space()->pairs().
    const Rat& pair_diff(size_t v, size_t k) const { return pair_diffs_[v][k]; }
    const std::vector<Rat>& pair_diffs(size_t v) const { return pair_diffs_[v]; }

private:
    SpacePtr space_;
    std::vector<BallVertex> vertices_;
    std::vector<std::vector<Rat>> pair_diffs_;
};

// Exact enumeration. A vertex needs n-1 independent tight constraints
// f(u) - f(v) = ±d(u,v); independence makes the tight pairs a spanning tree,
// so trees and sign patterns are enumerated instead of raw constraint subsets.
LipschitzBall enumerate_vertices(const SpacePtr& space, size_t max_points = 8);

// Operator norm of the Lipschitz dual S#: max over vertices g of B_{Y#} of
// Lip(g o S). Equals lipschitz_constant(map).
Rat dual_operator_norm(const PointMap& map, const LipschitzBall& ball_Y);

} // namespace lipnorm
