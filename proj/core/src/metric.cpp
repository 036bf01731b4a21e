#include "lipnorm/metric.hpp"

#include <json.hpp>

#include <algorithm>

namespace lipnorm {

using nlohmann::json;

std::shared_ptr<const PointedMetricSpace> PointedMetricSpace::create(
    std::string name, std::vector<std::string> points, size_t base,
    std::vector<std::vector<Rat>> dist) {
    const size_t n = points.size();
    if (n == 0)
        throw AxiomViolation(AxiomViolation::Kind::bad_shape, "space needs at least one point");
    if (dist.size() != n)
        throw AxiomViolation(AxiomViolation::Kind::bad_shape, "distance matrix is not n x n");
    for (const auto& row : dist)
        if (row.size() != n)
            throw AxiomViolation(AxiomViolation::Kind::bad_shape, "distance matrix is not square");
    if (base >= n)
        throw AxiomViolation(AxiomViolation::Kind::bad_base, "base index out of range",
                             static_cast<int>(base));
    for (size_t i = 0; i < n; ++i) {
        if (dist[i][i] != 0)
            throw AxiomViolation(AxiomViolation::Kind::zero_off_diagonal,
                                 "d(x,x) must be 0 at index " + std::to_string(i),
                                 static_cast<int>(i), static_cast<int>(i));
        for (size_t j = i + 1; j < n; ++j) {
            if (dist[i][j] != dist[j][i])
                throw AxiomViolation(AxiomViolation::Kind::asymmetry,
                                     "d(" + std::to_string(i) + "," + std::to_string(j) +
                                         ") != d(" + std::to_string(j) + "," + std::to_string(i) + ")",
                                     static_cast<int>(i), static_cast<int>(j));
            if (dist[i][j] <= 0)
                throw AxiomViolation(AxiomViolation::Kind::zero_off_diagonal,
                                     "off-diagonal distance must be positive at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")",
                                     static_cast<int>(i), static_cast<int>(j));
        }
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                if (dist[i][k] > dist[i][j] + dist[j][k])
                    throw AxiomViolation(AxiomViolation::Kind::triangle,
                                         "triangle inequality fails for (" + std::to_string(i) +
                                             "," + std::to_string(j) + "," + std::to_string(k) + ")",
                                         static_cast<int>(i), static_cast<int>(j),
                                         static_cast<int>(k));

    auto space = std::shared_ptr<PointedMetricSpace>(new PointedMetricSpace());
    space->name_ = std::move(name);
    space->points_ = std::move(points);
    space->base_ = base;
    space->dist_ = std::move(dist);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) space->pairs_.emplace_back(i, j);
    return space;
}

size_t PointedMetricSpace::index_of(const std::string& label) const {
    auto it = std::find(points_.begin(), points_.end(), label);
    if (it == points_.end())
        throw std::out_of_range("no point labeled '" + label + "' in space " + name_);
    return static_cast<size_t>(it - points_.begin());
}

SpacePtr validate_space(std::string name, std::vector<std::string> points, size_t base,
                        std::vector<std::vector<Rat>> dist) {
    return PointedMetricSpace::create(std::move(name), std::move(points), base, std::move(dist));
}

SpacePtr discrete_space(size_t n) {
    if (n == 0) throw std::invalid_argument("discrete_space: n must be >= 1");
    std::vector<std::string> points;
    std::vector<std::vector<Rat>> dist(n, std::vector<Rat>(n, Rat(1)));
    for (size_t i = 0; i < n; ++i) {
        points.push_back("x" + std::to_string(i));
        dist[i][i] = 0;
    }
    return PointedMetricSpace::create("D" + std::to_string(n), std::move(points), 0,
                                      std::move(dist));
}

PointMap::PointMap(std::string name, SpacePtr dom, SpacePtr cod, std::vector<size_t> assign)
    : name(std::move(name)), domain(std::move(dom)), codomain(std::move(cod)),
      assign(std::move(assign)) {
    if (this->assign.size() != domain->n())
        throw SpaceMismatch("map '" + this->name + "': assignment size != domain size");
    for (size_t t : this->assign)
        if (t >= codomain->n())
            throw SpaceMismatch("map '" + this->name + "': target index out of range");
    if (this->assign[domain->base()] != codomain->base())
        throw SpaceMismatch("map '" + this->name + "' does not preserve the base point");
}

PointMap identity_map(const SpacePtr& space) {
    std::vector<size_t> a(space->n());
    for (size_t i = 0; i < a.size(); ++i) a[i] = i;
    return PointMap("id_" + space->name(), space, space, std::move(a));
}

PointMap constant_map(const SpacePtr& domain, const SpacePtr& codomain) {
    return PointMap("const", domain, codomain,
                    std::vector<size_t>(domain->n(), codomain->base()));
}

CounterexampleInstance counterexample_instance() {
    auto X = discrete_space(3);
    std::vector<std::vector<Rat>> dy = {
        {Rat(0), Rat(1), Rat(2)},
        {Rat(1), Rat(0), Rat(2)},
        {Rat(2), Rat(2), Rat(0)},
    };
    auto Y = PointedMetricSpace::create("Y", {"y0", "y1", "y2"}, 0, std::move(dy));
    PointMap S("S", X, Y, {0, 1, 2});
    return {X, Y, std::move(S)};
}

Rat lipschitz_constant(const PointMap& map) {
    Rat lip(0);
    for (auto [a, b] : map.domain->pairs()) {
        Rat ratio = map.codomain->d(map(a), map(b)) / map.domain->d(a, b);
        if (ratio > lip) lip = ratio;
    }
    return lip;
}

PointMap compose(const PointMap& inner, const PointMap& outer) {
    if (inner.codomain.get() != outer.domain.get())
        throw SpaceMismatch("compose: codomain of '" + inner.name + "' is not domain of '" +
                            outer.name + "'");
    std::vector<size_t> a(inner.domain->n());
    for (size_t i = 0; i < a.size(); ++i) a[i] = outer(inner(i));
    return PointMap(outer.name + "*" + inner.name, inner.domain, outer.codomain, std::move(a));
}

SpacePtr space_from_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<std::string> points = j.at("points").get<std::vector<std::string>>();
    size_t base = 0;
    if (j.contains("base")) {
        std::string b = j.at("base").get<std::string>();
        auto it = std::find(points.begin(), points.end(), b);
        if (it == points.end())
            throw AxiomViolation(AxiomViolation::Kind::bad_base, "base label not a point");
        base = static_cast<size_t>(it - points.begin());
    }
    std::vector<std::vector<Rat>> dist;
    for (const auto& row : j.at("dist")) {
        std::vector<Rat> r;
        for (const auto& v : row)
            r.push_back(v.is_string() ? parse_rat(v.get<std::string>())
                                      : Rat(v.get<long long>()));
        dist.push_back(std::move(r));
    }
    return PointedMetricSpace::create(j.value("name", "space"), std::move(points), base,
                                      std::move(dist));
}

std::string space_to_json(const PointedMetricSpace& space) {
    json j;
    j["name"] = space.name();
    j["points"] = space.points();
    j["base"] = space.points()[space.base()];
    json dist = json::array();
    for (size_t i = 0; i < space.n(); ++i) {
        json row = json::array();
        for (size_t k = 0; k < space.n(); ++k) row.push_back(rat_str(space.d(i, k)));
        dist.push_back(row);
    }
    j["dist"] = dist;
    return j.dump(2);
}

PointMap map_from_json(const std::string& text, const SpacePtr& domain, const SpacePtr& codomain) {
    json j = json::parse(text);
    std::vector<size_t> assign(domain->n());
    for (const auto& [from, to] : j.at("assign").items())
        assign[domain->index_of(from)] = codomain->index_of(to.get<std::string>());
    return PointMap(j.value("name", "map"), domain, codomain, std::move(assign));
}

} // namespace lipnorm
