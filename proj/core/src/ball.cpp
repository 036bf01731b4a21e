#include "lipnorm/ball.hpp"

#include <algorithm>
#include <set>

namespace lipnorm {

LipschitzBall::LipschitzBall(SpacePtr space, std::vector<BallVertex> vertices)
    : space_(std::move(space)), vertices_(std::move(vertices)) {
    const auto& pairs = space_->pairs();
    pair_diffs_.reserve(vertices_.size());
    for (const auto& v : vertices_) {
        std::vector<Rat> row;
        row.reserve(pairs.size());
        for (auto [a, b] : pairs) row.push_back(rat_abs(v.values[a] - v.values[b]));
        pair_diffs_.push_back(std::move(row));
    }
}

namespace {

struct UnionFind {
    std::vector<size_t> parent;
    explicit UnionFind(size_t n) : parent(n) {
        for (size_t i = 0; i < n; ++i) parent[i] = i;
    }
    size_t find(size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

} // namespace

LipschitzBall enumerate_vertices(const SpacePtr& space, size_t max_points) {
    const size_t n = space->n();
    if (n > max_points)
        throw DimensionTooLarge("enumerate_vertices: " + std::to_string(n) + " points exceeds cap " +
                                std::to_string(max_points));
    if (n == 1) return LipschitzBall(space, {BallVertex{{Rat(0)}}});

    const auto& pairs = space->pairs();
    const size_t m = pairs.size(), k = n - 1;

    std::set<std::vector<Rat>> seen;
    std::vector<BallVertex> vertices;

    // all k-subsets of the unordered pairs
    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    for (;;) {
        UnionFind uf(n);
        bool tree = true;
        for (size_t i : idx)
            if (!uf.unite(pairs[i].first, pairs[i].second)) {
                tree = false;
                break;
            }
        if (tree) {
            // adjacency of the tree, edges labeled by subset position
            std::vector<std::vector<std::pair<size_t, size_t>>> adj(n);
            for (size_t e = 0; e < k; ++e) {
                auto [a, b] = pairs[idx[e]];
                adj[a].emplace_back(b, e);
                adj[b].emplace_back(a, e);
            }
            for (size_t signs = 0; signs < (size_t(1) << k); ++signs) {
                // propagate f(u) - f(v) = ±d(u,v) from the base point
                std::vector<Rat> f(n);
                std::vector<bool> done(n, false);
                std::vector<size_t> stack = {space->base()};
                done[space->base()] = true;
                while (!stack.empty()) {
                    size_t u = stack.back();
                    stack.pop_back();
                    for (auto [v, e] : adj[u]) {
                        if (done[v]) continue;
                        auto [a, b] = pairs[idx[e]];
                        Rat step = (signs >> e & 1) ? space->d(a, b) : Rat(-space->d(a, b));
                        // step is f(a) - f(b); orient from u to v
                        f[v] = (v == a) ? Rat(f[u] + step) : Rat(f[u] - step);
                        done[v] = true;
                        stack.push_back(v);
                    }
                }
                bool feasible = true;
                for (auto [a, b] : pairs)
                    if (rat_abs(f[a] - f[b]) > space->d(a, b)) {
                        feasible = false;
                        break;
                    }
                if (feasible && seen.insert(f).second) vertices.push_back(BallVertex{f});
            }
        }
        // next combination
        size_t i = k;
        while (i-- > 0) {
            if (idx[i] != i + m - k) {
                ++idx[i];
                for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return LipschitzBall(space, std::move(vertices));
        }
    }
}

Rat dual_operator_norm(const PointMap& map, const LipschitzBall& ball_Y) {
    if (ball_Y.space().get() != map.codomain.get())
        throw SpaceMismatch("dual_operator_norm: ball built on a different space");
    Rat best(0);
    for (const auto& g : ball_Y.vertices())
        for (auto [a, b] : map.domain->pairs()) {
            Rat ratio = rat_abs(g.values[map(a)] - g.values[map(b)]) / map.domain->d(a, b);
            if (ratio > best) best = ratio;
        }
    return best;
}

} // namespace lipnorm
