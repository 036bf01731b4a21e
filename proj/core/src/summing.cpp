#include "lipnorm/summing.hpp"

#include "lipnorm/linalg.hpp"
#include "lipnorm/parallel.hpp"
#include "lipnorm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace lipnorm {

namespace {

void require_domain_ball(const PointMap& map, const LipschitzBall& ball) {
    if (ball.space().get() != map.domain.get())
        throw SpaceMismatch("ball was not enumerated for the map's domain");
}

// d_Y(Sa, Sb) for each unordered domain pair, in pair order
std::vector<Rat> image_distances(const PointMap& map) {
    std::vector<Rat> out;
    out.reserve(map.domain->pairs().size());
    for (auto [a, b] : map.domain->pairs()) out.push_back(map.codomain->d(map(a), map(b)));
    return out;
}

std::vector<double> to_doubles(const std::vector<Rat>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(to_double(x));
    return out;
}

// |g_v(Sa) - g_v(Sb)| over codomain-ball vertices, indexed by domain pair
std::vector<std::vector<double>> image_diff_table(const PointMap& map, const LipschitzBall& ball_Y) {
    const auto& pairs = map.domain->pairs();
    std::vector<std::vector<double>> diffs(ball_Y.size(), std::vector<double>(pairs.size()));
    for (size_t v = 0; v < ball_Y.size(); ++v) {
        const auto& g = ball_Y.vertices()[v].values;
        for (size_t j = 0; j < pairs.size(); ++j)
            diffs[v][j] = std::fabs(to_double(g[map(pairs[j].first)] - g[map(pairs[j].second)]));
    }
    return diffs;
}

// multi-start maximization of eval over positive pair-weight vectors:
// seeded single-pair and uniform starts, random restarts, multiplicative
// coordinate ascent
double witness_search(size_t m, const std::function<double(const std::vector<double>&)>& eval,
                      size_t starts, uint64_t seed,
                      const std::vector<std::vector<double>>& extra_starts = {}) {
    std::vector<std::vector<double>> inits;
    for (size_t j = 0; j < m; ++j) {
        std::vector<double> w(m, 0.0);
        w[j] = 1.0;
        inits.push_back(std::move(w));
    }
    inits.emplace_back(m, 1.0);
    for (const auto& w : extra_starts) inits.push_back(w);
    Rng rng(seed);
    while (inits.size() < m + 1 + extra_starts.size() + starts) {
        std::vector<double> w(m);
        for (auto& x : w) x = std::exp(rng.uniform(-2.0, 2.0));
        inits.push_back(std::move(w));
    }

    static const double factors[] = {1.6, 0.625, 1.12, 0.8928571428571429};
    std::vector<double> results(inits.size(), 0.0);
    parallel_for(inits.size(), [&](size_t i) {
        std::vector<double> w = inits[i];
        double best = eval(w);
        for (int sweep = 0; sweep < 3; ++sweep) {
            bool improved = false;
            for (size_t j = 0; j < m; ++j)
                for (double f : factors) {
                    double old = w[j];
                    w[j] = old * f;
                    double v = eval(w);
                    if (v > best * (1 + 1e-12)) {
                        best = v;
                        improved = true;
                    } else {
                        w[j] = old;
                    }
                }
            if (!improved) break;
        }
        results[i] = best;
    });
    return *std::max_element(results.begin(), results.end());
}

// certified upper bound for the weak p-norm when p < 1, where the vertex scan
// is only a lower bound: weak_p <= min(strong_p, m^{1/p-1} weak_1)
double weak_upper_sub1(const std::vector<double>& w, const std::vector<double>& dist,
                       const std::vector<std::vector<double>>& diffs, double p) {
    double m = 0;
    for (double x : w)
        if (x > 0) m += 1;
    if (m == 0) return 0;
    double by_power_mean = std::pow(m, 1.0 / p - 1.0) * weak_p_d(w, diffs, 1.0);
    return std::min(strong_p_d(w, dist, p), by_power_mean);
}

unsigned long long comb(size_t n, size_t k) {
    if (k > n) return 0;
    unsigned long long r = 1;
    for (size_t i = 0; i < k; ++i) {
        if (r > (1ULL << 62) / (n - i)) return 1ULL << 62;
        r = r * (n - i) / (i + 1);
    }
    return r;
}

template <typename F>
void for_each_subset(size_t n, size_t k, F&& f) {
    std::vector<size_t> idx(k);
    for (size_t i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    for (;;) {
        f(idx);
        size_t i = k;
        bool done = true;
        while (i-- > 0)
            if (idx[i] != i + n - k) {
                ++idx[i];
                for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                done = false;
                break;
            }
        if (done || k == 0) return;
    }
}

} // namespace

PiPSolution pi_p_solve(const PointMap& map, const Exponent& p, const LipschitzBall& ball_X) {
    require_domain_ball(map, ball_X);
    const auto& pairs = map.domain->pairs();
    const size_t m = pairs.size();
    auto dY = image_distances(map);

    if (p.is_inf()) {
        // weak_inf = strong_inf (a vertex attains any single increment), so
        // the optimal constant is the Lipschitz constant
        Rat lip = lipschitz_constant(map);
        PiPSolution out;
        out.norm = NormValue::exact(to_double(lip), lip, "lipschitz");
        out.lambda.assign(m, 0.0);
        out.dual.assign(ball_X.size(), 0.0);
        for (size_t k = 0; k < m; ++k)
            if (dY[k] == lip * map.domain->d(pairs[k].first, pairs[k].second) && lip > 0) {
                out.lambda[k] = 1.0 / to_double(map.domain->d(pairs[k].first, pairs[k].second));
                break;
            }
        return out;
    }

    if (p.value() < 1) {
        // the vertex LP only relaxes the p < 1 weak-norm constraint set, so
        // its value is an upper bound; Lip is always a lower bound
        std::vector<std::vector<long double>> rows(ball_X.size(), std::vector<long double>(m));
        std::vector<long double> cost(m);
        double pd = p.to_double();
        for (size_t v = 0; v < ball_X.size(); ++v)
            for (size_t k = 0; k < m; ++k)
                rows[v][k] = powl((long double)to_double(ball_X.pair_diff(v, k)), pd);
        for (size_t k = 0; k < m; ++k) cost[k] = powl((long double)to_double(dY[k]), pd);
        auto sol = pair_lp_float(rows, cost);
        double hi = (double)powl(sol.value, 1.0L / pd) * (1 + 1e-9);
        PiPSolution out;
        out.norm = NormValue::interval(to_double(lipschitz_constant(map)), hi,
                                       "lp-vertex-relaxation");
        out.lambda.assign(sol.lambda.begin(), sol.lambda.end());
        out.dual.assign(sol.dual.begin(), sol.dual.end());
        return out;
    }

    if (p.is_integer()) {
        long pe = p.as_long();
        std::vector<std::vector<Rat>> rows(ball_X.size(), std::vector<Rat>(m));
        std::vector<Rat> cost(m);
        for (size_t v = 0; v < ball_X.size(); ++v)
            for (size_t k = 0; k < m; ++k) rows[v][k] = rat_pow(ball_X.pair_diff(v, k), pe);
        for (size_t k = 0; k < m; ++k) cost[k] = rat_pow(dY[k], pe);
        auto sol = pair_lp_exact(rows, cost);
        PiPSolution out;
        out.norm = NormValue::exact(std::pow(to_double(sol.value), 1.0 / (double)pe), sol.value,
                                    "lp-exact");
        out.lambda = to_doubles(sol.lambda);
        out.dual = to_doubles(sol.dual);
        out.lambda_rat = std::move(sol.lambda);
        out.dual_rat = std::move(sol.dual);
        return out;
    }

    // fractional p >= 1: long-double LP with residual-widened interval
    double pd = p.to_double();
    std::vector<std::vector<long double>> rows(ball_X.size(), std::vector<long double>(m));
    std::vector<long double> cost(m);
    for (size_t v = 0; v < ball_X.size(); ++v)
        for (size_t k = 0; k < m; ++k)
            rows[v][k] = powl((long double)to_double(ball_X.pair_diff(v, k)), pd);
    for (size_t k = 0; k < m; ++k) cost[k] = powl((long double)to_double(dY[k]), pd);
    auto sol = pair_lp_float(rows, cost);
    double value = (double)powl(sol.value, 1.0L / pd);
    double slack = 1e-9 + (double)std::max(sol.residual, 0.0L);
    PiPSolution out;
    out.norm = NormValue::interval(value * (1 - slack), value * (1 + slack), "lp-float");
    out.norm.value = value;
    out.lambda.assign(sol.lambda.begin(), sol.lambda.end());
    out.dual.assign(sol.dual.begin(), sol.dual.end());
    return out;
}

NormValue pi_p_exact(const PointMap& map, const Exponent& p, const LipschitzBall& ball_X) {
    return pi_p_solve(map, p, ball_X).norm;
}

NormValue pi_ps_exact(const PointMap& map, const Exponent& p, const Exponent& s,
                      const LipschitzBall& ball_X) {
    require_domain_ball(map, ball_X);
    if (s.is_inf() || p.is_inf()) throw InvalidArgument("pi_ps_exact: finite exponents required");
    if (s.value() < 1) throw InvalidArgument("pi_ps_exact: s < 1");
    if (!(s <= p)) throw InvalidArgument("pi_ps_exact: s > p trivializes the class");
    if (s == p) {
        NormValue v = pi_p_exact(map, p, ball_X);
        v.method += "/ps-diagonal";
        return v;
    }

    const auto& pairs = map.domain->pairs();
    const size_t m = pairs.size();
    auto dY = image_distances(map);
    auto dY_d = to_doubles(dY);
    double pd = p.to_double(), sd = s.to_double();

    auto fallback = [&]() {
        auto diffs = diff_table(ball_X, pairs);
        double lower = witness_search(
            m,
            [&](const std::vector<double>& w) {
                double den = weak_p_d(w, diffs, sd);
                return den > 0 ? strong_p_d(w, dY_d, pd) / den : 0.0;
            },
            64, 11);
        // strong_p <= strong_s pointwise, so pi_{(p,m(s;s))} <= pi_s
        NormValue upper = pi_p_exact(map, s, ball_X);
        return NormValue::interval(lower, upper.hi, "witness-search+inclusion");
    };

    if (!s.is_integer() || m > 7) return fallback();

    long se = s.as_long();
    // constraint rows of the u-polytope, deduplicated and dominance-filtered
    std::vector<std::vector<Rat>> rows;
    {
        std::set<std::vector<Rat>> seen;
        for (size_t v = 0; v < ball_X.size(); ++v) {
            std::vector<Rat> row(m);
            for (size_t k = 0; k < m; ++k) row[k] = rat_pow(ball_X.pair_diff(v, k), se);
            if (seen.insert(row).second) rows.push_back(std::move(row));
        }
        std::vector<std::vector<Rat>> kept;
        for (size_t i = 0; i < rows.size(); ++i) {
            bool dominated = false;
            for (size_t j = 0; j < rows.size() && !dominated; ++j) {
                if (i == j) continue;
                bool le = true, strict = false;
                for (size_t k = 0; k < m; ++k) {
                    if (rows[i][k] > rows[j][k]) le = false;
                    if (rows[i][k] < rows[j][k]) strict = true;
                }
                dominated = le && strict;
            }
            if (!dominated) kept.push_back(rows[i]);
        }
        rows = std::move(kept);
    }

    unsigned long long total = 0;
    for (size_t t = 1; t <= std::min(m, rows.size()); ++t) total += comb(m, t) * comb(rows.size(), t);
    if (total > 3000000ULL) return fallback();

    Rat ps = p.value() / s.value();
    bool exact_power = p.is_integer() && denominator(ps) == 1;
    long pe = exact_power ? p.as_long() : 0;
    long pse = exact_power ? numerator(ps).convert_to<long>() : 0;

    double best = 0;
    Rat best_power(0);
    std::set<std::vector<Rat>> seen_u;
    for (size_t t = 1; t <= std::min(m, rows.size()); ++t) {
        for_each_subset(m, t, [&](const std::vector<size_t>& support) {
            for_each_subset(rows.size(), t, [&](const std::vector<size_t>& tight) {
                std::vector<std::vector<Rat>> M(t, std::vector<Rat>(t));
                std::vector<Rat> rhs(t, Rat(1));
                for (size_t i = 0; i < t; ++i)
                    for (size_t j = 0; j < t; ++j) M[i][j] = rows[tight[i]][support[j]];
                auto sol = solve_linear<Rat>(M, rhs);
                if (!sol) return;
                std::vector<Rat> u(m, Rat(0));
                for (size_t j = 0; j < t; ++j) {
                    if ((*sol)[j] < 0) return;
                    u[support[j]] = (*sol)[j];
                }
                for (const auto& row : rows) {
                    Rat acc(0);
                    for (size_t k = 0; k < m; ++k) acc += row[k] * u[k];
                    if (acc > 1) return;
                }
                if (!seen_u.insert(u).second) return;
                if (exact_power) {
                    Rat pw(0);
                    for (size_t k = 0; k < m; ++k) pw += rat_pow(u[k], pse) * rat_pow(dY[k], pe);
                    if (pw > best_power) best_power = pw;
                } else {
                    double acc = 0;
                    for (size_t k = 0; k < m; ++k)
                        acc += std::pow(to_double(u[k]), pd / sd) * std::pow(dY_d[k], pd);
                    if (acc > best) best = acc;
                }
            });
        });
    }
    if (exact_power)
        return NormValue::exact(std::pow(to_double(best_power), 1.0 / pd), best_power, "u-polytope");
    return NormValue::exact(std::pow(best, 1.0 / pd), std::nullopt, "u-polytope");
}

NormValue pi_p_msq_lower(const PointMap& map, const Exponent& p, const Exponent& s,
                         const Exponent& q, const LipschitzBall& ball_X, size_t starts,
                         uint64_t seed) {
    require_domain_ball(map, ball_X);
    if (!(q <= s)) throw InvalidArgument("pi_p_msq_lower: q > s");
    if (!(q <= p)) throw InvalidArgument("pi_p_msq_lower: q > p");
    const auto& pairs = map.domain->pairs();
    const size_t m = pairs.size();
    auto dY_d = to_doubles(image_distances(map));
    std::vector<double> dX_d;
    for (auto [a, b] : pairs) dX_d.push_back(to_double(map.domain->d(a, b)));
    auto diffs = diff_table(ball_X, pairs);
    double pd = p.to_double(), sd = s.to_double(), qd = q.to_double();

    // upper bound of the source mixed norm, so the ratio stays a valid lower
    // bound for the summing norm
    auto denominator = [&](const std::vector<double>& w) {
        if (s.is_inf()) return strong_p_d(w, dX_d, qd);
        if (q == s) {
            if (qd >= 1) return weak_p_d(w, diffs, qd);
            return weak_upper_sub1(w, dX_d, diffs, qd);
        }
        return mixed_sup_d(w, diffs, sd, qd, 1e-7, 4000).hi;
    };
    auto eval = [&](const std::vector<double>& w) {
        double den = denominator(w);
        return den > 0 ? strong_p_d(w, dY_d, pd) / den : 0.0;
    };

    std::vector<std::vector<double>> extra;
    if (p == q && q == s && p.value() >= 1) {
        // the LP maximizer is the optimal sequence for the diagonal case
        auto sol = pi_p_solve(map, p, ball_X);
        std::vector<double> w(m);
        for (size_t k = 0; k < m; ++k) w[k] = std::pow(std::max(sol.lambda[k], 0.0), 1.0 / pd);
        extra.push_back(std::move(w));
    }
    return NormValue::lower(witness_search(m, eval, starts, seed, extra), "witness-search");
}

NormValue pi_msq_p(const PointMap& map, const Exponent& s, const Exponent& q, const Exponent& p,
                   const LipschitzBall& ball_X, const LipschitzBall& ball_Y, size_t starts,
                   uint64_t seed) {
    require_domain_ball(map, ball_X);
    if (ball_Y.space().get() != map.codomain.get())
        throw SpaceMismatch("pi_msq_p: codomain ball mismatch");
    if (!(p <= q)) throw InvalidArgument("pi_msq_p: p > q makes the class constant maps only");
    if (!(q <= s)) throw InvalidArgument("pi_msq_p: q > s");

    const auto& pairs = map.domain->pairs();
    const size_t m = pairs.size();
    auto dY_d = to_doubles(image_distances(map));
    std::vector<double> dX_d;
    for (auto [a, b] : pairs) dX_d.push_back(to_double(map.domain->d(a, b)));
    auto diffs_X = diff_table(ball_X, pairs);
    auto diffs_Y = image_diff_table(map, ball_Y);
    double pd = p.to_double(), sd = s.to_double(), qd = q.to_double();

    // lower bound of the image mixed norm over an upper bound of the source
    // weak norm
    auto numerator = [&](const std::vector<double>& w) {
        if (s.is_inf()) return strong_p_d(w, dY_d, qd);
        if (q == s) return weak_p_d(w, diffs_Y, qd); // vertex scan is a valid lower bound
        return mixed_sup_d(w, diffs_Y, sd, qd, 1e-7, 4000).lo;
    };
    auto denominator = [&](const std::vector<double>& w) {
        if (pd >= 1) return weak_p_d(w, diffs_X, pd);
        return weak_upper_sub1(w, dX_d, diffs_X, pd);
    };
    double lower = witness_search(
        m,
        [&](const std::vector<double>& w) {
            double den = denominator(w);
            return den > 0 ? numerator(w) / den : 0.0;
        },
        starts, seed);

    double lip = to_double(lipschitz_constant(map));
    double upper = std::numeric_limits<double>::infinity();
    if (s == q) upper = lip; // the class is all Lipschitz maps with norm <= Lip
    if (p.value() >= 1 || p.is_inf()) {
        double pip = pi_p_exact(map, p, ball_X).hi;
        if (!s.is_inf() || true) {
            // interpolation bound pi_p(S)^{q/s'(q)} Lip(S)^{q/s}
            Exponent sq = conjugate_index(s, q);
            double e1 = sq.is_inf() ? 0.0 : qd / sq.to_double();
            double e2 = s.is_inf() ? 0.0 : qd / sd;
            upper = std::min(upper, std::pow(pip, e1) * std::pow(lip, e2));
        }
        // single-functional bound Lip(S) pi_p(I_X)
        double pix = pi_p_exact(identity_map(map.domain), p, ball_X).hi;
        upper = std::min(upper, lip * pix);
    }
    return NormValue::interval(lower, upper, "witness-search+interpolation");
}

NormValue interpolation_upper(const PointMap& map, const Exponent& s, const Exponent& p,
                              const Exponent& r, const LipschitzBall& ball_X) {
    require_domain_ball(map, ball_X);
    if (!(r <= p) || !(p <= s)) throw InvalidArgument("interpolation_upper: need r <= p <= s");
    if (!s.is_inf() && s.value() < 1) throw InvalidArgument("interpolation_upper: s < 1");
    double pir = pi_p_exact(map, r, ball_X).hi;
    double lip = to_double(lipschitz_constant(map));
    Exponent sp = conjugate_index(s, p);
    double e1 = sp.is_inf() ? 0.0 : p.to_double() / sp.to_double(); // = 1 - p/s
    double e2 = s.is_inf() ? 0.0 : p.to_double() / s.to_double();
    return NormValue::upper(std::pow(pir, e1) * std::pow(lip, e2), "interpolation");
}

NormValue general_interpolation_upper(const PointMap& map, double theta, const Exponent& s0,
                                      const Exponent& s1, const Exponent& p, const Exponent& r,
                                      const LipschitzBall& ball_X) {
    if (theta < 0 || theta > 1) throw InvalidArgument("general_interpolation_upper: theta");
    NormValue b0 = interpolation_upper(map, s0, p, r, ball_X);
    NormValue b1 = interpolation_upper(map, s1, p, r, ball_X);
    return NormValue::upper(std::pow(b0.value, 1 - theta) * std::pow(b1.value, theta),
                            "interpolation-product");
}

bool domination_check(const PointMap& map, const DominationCertificate& cert, const Exponent& q,
                      const LipschitzBall& ball_X) {
    require_domain_ball(map, ball_X);
    if (cert.weights.size() != ball_X.size())
        throw InvalidArgument("domination_check: weight count != vertex count");
    Rat total(0);
    for (const auto& w : cert.weights) {
        if (w < 0) throw InvalidArgument("domination_check: negative weight");
        total += w;
    }
    if (total != 1) throw InvalidArgument("domination_check: weights do not sum to 1");

    const auto& pairs = map.domain->pairs();
    double qd = q.to_double();
    for (size_t k = 0; k < pairs.size(); ++k) {
        double lhs = to_double(map.codomain->d(map(pairs[k].first), map(pairs[k].second)));
        double rhs;
        if (q.is_inf()) {
            rhs = 0;
            for (size_t v = 0; v < ball_X.size(); ++v)
                if (cert.weights[v] > 0)
                    rhs = std::max(rhs, to_double(ball_X.pair_diff(v, k)));
        } else {
            double acc = 0;
            for (size_t v = 0; v < ball_X.size(); ++v)
                acc += to_double(cert.weights[v]) * std::pow(to_double(ball_X.pair_diff(v, k)), qd);
            rhs = std::pow(acc, 1.0 / qd);
        }
        if (lhs > cert.C * rhs * (1 + 1e-9) + 1e-15) return false;
    }
    return true;
}

FunctionalEmbedding embed_via_functionals(const SpacePtr& Y,
                                          const std::vector<std::vector<Rat>>& g_list,
                                          const Exponent& s) {
    if (g_list.empty()) throw InvalidArgument("embed_via_functionals: empty functional list");
    const size_t n = Y->n();
    FunctionalEmbedding emb;
    emb.domain = Y;
    emb.s = s;
    emb.tuples.assign(n, std::vector<Rat>(g_list.size()));
    double norm_acc = 0;
    for (size_t k = 0; k < g_list.size(); ++k) {
        if (g_list[k].size() != n) throw InvalidArgument("embed_via_functionals: bad functional size");
        Rat lip(0);
        for (auto [a, b] : Y->pairs()) {
            Rat ratio = rat_abs(g_list[k][a] - g_list[k][b]) / Y->d(a, b);
            if (ratio > lip) lip = ratio;
        }
        if (s.is_inf()) norm_acc = std::max(norm_acc, to_double(lip));
        else norm_acc += std::pow(to_double(lip), s.to_double());
        // normalize to vanish at the base point
        for (size_t i = 0; i < n; ++i) emb.tuples[i][k] = g_list[k][i] - g_list[k][Y->base()];
    }
    emb.functional_norm = s.is_inf() ? norm_acc : std::pow(norm_acc, 1.0 / s.to_double());
    return emb;
}

PointMap FunctionalEmbedding::realize(long long denom) const {
    const size_t n = domain->n();
    // collapse coincident tuples
    std::vector<std::vector<Rat>> distinct;
    std::vector<size_t> assign(n);
    for (size_t i = 0; i < n; ++i) {
        auto it = std::find(distinct.begin(), distinct.end(), tuples[i]);
        if (it == distinct.end()) {
            assign[i] = distinct.size();
            distinct.push_back(tuples[i]);
        } else {
            assign[i] = (size_t)(it - distinct.begin());
        }
    }
    const size_t N = distinct.size();
    auto tuple_dist = [&](size_t a, size_t b) -> Rat {
        if (s.is_inf()) {
            Rat best(0);
            for (size_t k = 0; k < distinct[a].size(); ++k)
                best = std::max(best, rat_abs(distinct[a][k] - distinct[b][k]));
            return best;
        }
        if (s.is_integer() && s.as_long() == 1) {
            Rat acc(0);
            for (size_t k = 0; k < distinct[a].size(); ++k)
                acc += rat_abs(distinct[a][k] - distinct[b][k]);
            return acc;
        }
        // irrational l_s distance: grid-ceiling plus one grid unit keeps the
        // triangle inequality through floating-point noise
        double acc = 0;
        for (size_t k = 0; k < distinct[a].size(); ++k)
            acc += std::pow(std::fabs(to_double(distinct[a][k] - distinct[b][k])), s.to_double());
        double d = std::pow(acc, 1.0 / s.to_double());
        long long num = (long long)std::ceil(d * (double)denom) + 1;
        return Rat(Int(num), Int(denom));
    };

    std::vector<std::vector<Rat>> dist(N, std::vector<Rat>(N, Rat(0)));
    for (size_t a = 0; a < N; ++a)
        for (size_t b = a + 1; b < N; ++b) dist[a][b] = dist[b][a] = tuple_dist(a, b);
    std::vector<std::string> labels;
    for (size_t i = 0; i < N; ++i) labels.push_back("t" + std::to_string(i));
    SpacePtr image = validate_space(domain->name() + "_embedded", std::move(labels),
                                    assign[domain->base()], std::move(dist));
    return PointMap("embed", domain, image, assign);
}

} // namespace lipnorm
