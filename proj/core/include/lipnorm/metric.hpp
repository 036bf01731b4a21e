#pragma once

#include "lipnorm/rational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lipnorm {

struct AxiomViolation : std::runtime_error {
    enum class Kind { asymmetry, zero_off_diagonal, triangle, bad_base, bad_shape };
    Kind kind;
    int i = -1, j = -1, k = -1;
    AxiomViolation(Kind kind, std::string msg, int i = -1, int j = -1, int k = -1)
        : std::runtime_error(std::move(msg)), kind(kind), i(i), j(j), k(k) {}
};

struct SpaceMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite pointed metric space with exact rational distances. Immutable after
// validation.
class PointedMetricSpace {
public:
    static std::shared_ptr<const PointedMetricSpace> create(
        std::string name, std::vector<std::string> points, size_t base,
        std::vector<std::vector<Rat>> dist);

    const std::string& name() const { return name_; }
    size_t n() const { return points_.size(); }
    size_t base() const { return base_; }
    const std::vector<std::string>& points() const { return points_; }
    const Rat& d(size_t i, size_t j) const { return dist_[i][j]; }

    size_t index_of(const std::string& label) const;

    // Unordered pairs (i, j) with i < j, in a fixed order.
    const std::vector<std::pair<size_t, size_t>>& pairs() const { return pairs_; }

private:
    PointedMetricSpace() = default;
    std::string name_;
    std::vector<std::string> points_;
    size_t base_ = 0;
    std::vector<std::vector<Rat>> dist_;
    std::vector<std::pair<size_t, size_t>> pairs_;
};

using SpacePtr = std::shared_ptr<const PointedMetricSpace>;

// Base-point-preserving map between two spaces.
struct PointMap {
    std::string name;
    SpacePtr domain;
    SpacePtr codomain;
    std::vector<size_t> assign;

    PointMap(std::string name, SpacePtr dom, SpacePtr cod, std::vector<size_t> assign);

    size_t operator()(size_t i) const { return assign[i]; }
};

SpacePtr discrete_space(size_t n);
SpacePtr validate_space(std::string name, std::vector<std::string> points, size_t base,
                        std::vector<std::vector<Rat>> dist);

PointMap identity_map(const SpacePtr& space);
PointMap constant_map(const SpacePtr& domain, const SpacePtr& codomain);

struct CounterexampleInstance {
    SpacePtr X;
    SpacePtr Y;
    PointMap S;
};
// The three-point instance with equilateral X and Y stretched by a factor 2
// away from y1.
CounterexampleInstance counterexample_instance();

Rat lipschitz_constant(const PointMap& map);
PointMap compose(const PointMap& inner, const PointMap& outer);

// JSON I/O. Space file: {"name", "points", "base", "dist"}; map file:
// {"name", "domain", "codomain", "assign"}.
SpacePtr space_from_json(const std::string& text);
std::string space_to_json(const PointedMetricSpace& space);
PointMap map_from_json(const std::string& text, const SpacePtr& domain, const SpacePtr& codomain);

} // namespace lipnorm
