#include "lipnorm/seq.hpp"

#include "lipnorm/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace lipnorm {

using nlohmann::json;

WeightedPairSequence seq_from_json(const std::string& text, const SpacePtr& space) {
    json j = json::parse(text);
    WeightedPairSequence seq{space, {}};
    for (const auto& item : j) {
        Rat w = item.at(0).is_string() ? parse_rat(item.at(0).get<std::string>())
                                       : parse_rat(item.at(0).dump());
        seq.entries.push_back({std::move(w), space->index_of(item.at(1).get<std::string>()),
                               space->index_of(item.at(2).get<std::string>())});
    }
    return seq;
}

WeightedPairSequence image_sequence(const PointMap& map, const WeightedPairSequence& seq) {
    if (seq.space.get() != map.domain.get())
        throw SpaceMismatch("image_sequence: sequence lives on a different space");
    WeightedPairSequence out{map.codomain, {}};
    out.entries.reserve(seq.entries.size());
    for (const auto& e : seq.entries) out.entries.push_back({e.weight, map(e.left), map(e.right)});
    return out;
}

NormValue strong_norm(const WeightedPairSequence& seq, const Exponent& p) {
    if (p.is_inf()) {
        Rat best(0);
        for (const auto& e : seq.entries) {
            Rat t = rat_abs(e.weight) * seq.space->d(e.left, e.right);
            if (t > best) best = t;
        }
        return NormValue::exact(to_double(best), best, "strong-sup");
    }
    if (p.is_integer()) {
        long pe = p.as_long();
        Rat power(0);
        for (const auto& e : seq.entries)
            power += rat_pow(rat_abs(e.weight), pe) * rat_pow(seq.space->d(e.left, e.right), pe);
        return NormValue::exact(std::pow(to_double(power), 1.0 / static_cast<double>(pe)), power,
                                "strong-sum");
    }
    double pd = p.to_double(), acc = 0;
    for (const auto& e : seq.entries)
        acc += std::pow(to_double(rat_abs(e.weight)) * to_double(seq.space->d(e.left, e.right)), pd);
    return NormValue::exact(std::pow(acc, 1.0 / pd), std::nullopt, "strong-sum");
}

namespace {

std::vector<double> abs_weights(const WeightedPairSequence& seq) {
    std::vector<double> w;
    w.reserve(seq.entries.size());
    for (const auto& e : seq.entries) w.push_back(std::fabs(to_double(e.weight)));
    return w;
}

std::vector<std::pair<size_t, size_t>> entry_pairs(const WeightedPairSequence& seq) {
    std::vector<std::pair<size_t, size_t>> ps;
    ps.reserve(seq.entries.size());
    for (const auto& e : seq.entries) ps.emplace_back(e.left, e.right);
    return ps;
}

// certified lower bound for the non-convex p < 1 case: vertex scan plus a
// sweep over segments between vertices
double weak_sub1_lower(const std::vector<double>& w,
                       const std::vector<std::vector<double>>& diffs,
                       const LipschitzBall& ball,
                       const std::vector<std::pair<size_t, size_t>>& pairs, double p) {
    const size_t V = ball.size();
    auto eval = [&](const std::vector<double>& f) {
        double acc = 0;
        for (size_t j = 0; j < pairs.size(); ++j)
            acc += std::pow(w[j] * std::fabs(f[pairs[j].first] - f[pairs[j].second]), p);
        return acc;
    };
    double best = 0;
    for (size_t v = 0; v < V; ++v) {
        double acc = 0;
        for (size_t j = 0; j < w.size(); ++j) acc += std::pow(w[j] * diffs[v][j], p);
        best = std::max(best, acc);
    }
    const size_t n = ball.space()->n();
    std::vector<double> f(n);
    for (size_t v1 = 0; v1 < V; ++v1)
        for (size_t v2 = v1 + 1; v2 < V; ++v2)
            for (int t = 1; t < 16; ++t) {
                double g = t / 16.0;
                for (size_t i = 0; i < n; ++i)
                    f[i] = (1 - g) * to_double(ball.vertices()[v1].values[i]) +
                           g * to_double(ball.vertices()[v2].values[i]);
                best = std::max(best, eval(f));
            }
    return std::pow(best, 1.0 / p);
}

} // namespace

NormValue weak_norm(const WeightedPairSequence& seq, const Exponent& p, const LipschitzBall& ball) {
    if (ball.space().get() != seq.space.get())
        throw SpaceMismatch("weak_norm: ball built on a different space");
    if (seq.entries.empty()) return NormValue::exact(0.0, Rat(0), "weak-empty");
    const auto& pairs = seq.space->pairs();
    // pair index of each entry in the ball's cached increments
    std::vector<size_t> pidx(seq.entries.size(), pairs.size());
    for (size_t j = 0; j < seq.entries.size(); ++j) {
        auto [a, b] = std::minmax(seq.entries[j].left, seq.entries[j].right);
        for (size_t k = 0; k < pairs.size(); ++k)
            if (pairs[k] == std::make_pair(a, b)) {
                pidx[j] = k;
                break;
            }
    }

    if (p.is_inf()) return strong_norm(seq, p); // the two sups coincide at infinity

    if (p.is_integer() && p.value() >= 1) {
        long pe = p.as_long();
        Rat best(0);
        for (size_t v = 0; v < ball.size(); ++v) {
            Rat acc(0);
            for (size_t j = 0; j < seq.entries.size(); ++j) {
                if (pidx[j] == pairs.size()) continue; // left == right
                acc += rat_pow(rat_abs(seq.entries[j].weight), pe) *
                       rat_pow(ball.pair_diff(v, pidx[j]), pe);
            }
            if (acc > best) best = acc;
        }
        return NormValue::exact(std::pow(to_double(best), 1.0 / static_cast<double>(pe)), best,
                                "weak-vertex-scan");
    }

    auto w = abs_weights(seq);
    auto diffs = diff_table(ball, entry_pairs(seq));
    double pd = p.to_double();
    if (pd >= 1) {
        double value = weak_p_d(w, diffs, pd);
        return NormValue::exact(value, std::nullopt, "weak-vertex-scan");
    }
    double value = weak_sub1_lower(w, diffs, ball, entry_pairs(seq), pd);
    return NormValue::lower(value, "weak-segment-search");
}

std::vector<std::vector<double>> diff_table(const LipschitzBall& ball,
                                            const std::vector<std::pair<size_t, size_t>>& pairs) {
    std::vector<std::vector<double>> diffs(ball.size(), std::vector<double>(pairs.size()));
    for (size_t v = 0; v < ball.size(); ++v) {
        const auto& vals = ball.vertices()[v].values;
        for (size_t j = 0; j < pairs.size(); ++j)
            diffs[v][j] = std::fabs(to_double(vals[pairs[j].first] - vals[pairs[j].second]));
    }
    return diffs;
}

double strong_p_d(const std::vector<double>& w, const std::vector<double>& dist, double p) {
    if (std::isinf(p)) {
        double best = 0;
        for (size_t j = 0; j < w.size(); ++j) best = std::max(best, w[j] * dist[j]);
        return best;
    }
    double acc = 0;
    for (size_t j = 0; j < w.size(); ++j) acc += std::pow(w[j] * dist[j], p);
    return std::pow(acc, 1.0 / p);
}

double weak_p_d(const std::vector<double>& w, const std::vector<std::vector<double>>& diffs,
                double p, size_t* attaining) {
    double best = 0;
    size_t arg = 0;
    for (size_t v = 0; v < diffs.size(); ++v) {
        double acc = 0;
        if (std::isinf(p)) {
            for (size_t j = 0; j < w.size(); ++j) acc = std::max(acc, w[j] * diffs[v][j]);
        } else {
            for (size_t j = 0; j < w.size(); ++j) acc += std::pow(w[j] * diffs[v][j], p);
        }
        if (acc > best) {
            best = acc;
            arg = v;
        }
    }
    if (attaining) *attaining = arg;
    return std::isinf(p) ? best : std::pow(best, 1.0 / p);
}

MixedSupResult mixed_sup_d(const std::vector<double>& w,
                           const std::vector<std::vector<double>>& diffs, double s, double q,
                           double gap_tol, size_t max_iter) {
    const size_t V = diffs.size(), M = w.size();
    const double r = q / s;
    // a[v][j] = (w_j |f_v increments|)^s; drop pairs that vanish everywhere
    std::vector<std::vector<double>> a(V, std::vector<double>(M, 0.0));
    std::vector<bool> live(M, false);
    for (size_t v = 0; v < V; ++v)
        for (size_t j = 0; j < M; ++j) {
            a[v][j] = std::pow(w[j] * diffs[v][j], s);
            if (a[v][j] > 0) live[j] = true;
        }

    std::vector<double> wt(V, 1.0 / static_cast<double>(V));
    std::vector<double> G(M, 0.0);
    for (size_t j = 0; j < M; ++j)
        for (size_t v = 0; v < V; ++v) G[j] += wt[v] * a[v][j];

    auto objective = [&](const std::vector<double>& g) {
        double acc = 0;
        for (size_t j = 0; j < M; ++j)
            if (live[j]) acc += std::pow(g[j], r);
        return acc;
    };

    double F = objective(G);
    double gap = 0;
    std::vector<double> grad(V), Gtrial(M);
    for (size_t iter = 0; iter < max_iter; ++iter) {
        for (size_t v = 0; v < V; ++v) {
            double g = 0;
            for (size_t j = 0; j < M; ++j) {
                if (a[v][j] == 0) continue;
                g += r * std::pow(std::max(G[j], 1e-300), r - 1.0) * a[v][j];
            }
            grad[v] = g;
        }
        size_t fw = 0, away = V;
        double dot = 0;
        for (size_t v = 0; v < V; ++v) {
            if (grad[v] > grad[fw]) fw = v;
            dot += wt[v] * grad[v];
            if (wt[v] > 1e-15 && (away == V || grad[v] < grad[away])) away = v;
        }
        gap = grad[fw] - dot;
        if (gap <= gap_tol * std::max(1.0, F)) break;

        // pairwise step: shift mass from the worst active vertex to the best
        auto line_max = [&](size_t to, size_t from, double gmax, bool plain) {
            double lo = 0, hi = gmax;
            for (int it = 0; it < 70; ++it) {
                double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                auto val = [&](double g) {
                    for (size_t j = 0; j < M; ++j)
                        Gtrial[j] = plain ? (1 - g) * G[j] + g * a[to][j]
                                          : G[j] + g * (a[to][j] - a[from][j]);
                    return objective(Gtrial);
                };
                if (val(m1) < val(m2)) lo = m1;
                else hi = m2;
            }
            return (lo + hi) / 2;
        };

        double g1 = (away < V && away != fw) ? line_max(fw, away, wt[away], false) : 0.0;
        double F1 = -1;
        if (g1 > 0) {
            for (size_t j = 0; j < M; ++j) Gtrial[j] = G[j] + g1 * (a[fw][j] - a[away][j]);
            F1 = objective(Gtrial);
        }
        if (F1 > F) {
            for (size_t j = 0; j < M; ++j) G[j] += g1 * (a[fw][j] - a[away][j]);
            wt[fw] += g1;
            wt[away] -= g1;
            F = F1;
            continue;
        }
        double g2 = line_max(fw, 0, 1.0, true);
        if (g2 <= 0) break;
        for (size_t j = 0; j < M; ++j) Gtrial[j] = (1 - g2) * G[j] + g2 * a[fw][j];
        double F2 = objective(Gtrial);
        if (F2 <= F) break; // numerically stationary
        for (size_t j = 0; j < M; ++j) G[j] = Gtrial[j];
        for (size_t v = 0; v < V; ++v) wt[v] *= (1 - g2);
        wt[fw] += g2;
        F = F2;
    }

    MixedSupResult out;
    out.lo = std::pow(F, 1.0 / q);
    out.hi = std::pow(F + std::max(gap, 0.0), 1.0 / q);
    out.vertex_weights = std::move(wt);
    return out;
}

double mixed_inf_d(const std::vector<double>& w, const std::vector<std::vector<double>>& diffs,
                   double s, double q, size_t starts, uint64_t seed) {
    const size_t M = w.size();
    const double sp = 1.0 / (1.0 / q - 1.0 / s); // s'(q), finite here since q < s
    std::vector<size_t> live;
    for (size_t j = 0; j < M; ++j) {
        double mx = 0;
        for (const auto& row : diffs) mx = std::max(mx, row[j]);
        if (w[j] * mx > 0) live.push_back(j);
    }
    if (live.empty()) return 0.0;

    auto eval = [&](const std::vector<double>& tau) {
        double A = 0;
        for (size_t k = 0; k < live.size(); ++k) A += std::pow(tau[k], sp);
        A = std::pow(A, 1.0 / sp);
        double W = 0;
        for (const auto& row : diffs) {
            double acc = 0;
            for (size_t k = 0; k < live.size(); ++k)
                acc += std::pow(w[live[k]] / tau[k] * row[live[k]], s);
            W = std::max(W, acc);
        }
        return A * std::pow(W, 1.0 / s);
    };

    auto refine = [&](std::vector<double> tau) {
        double best = eval(tau);
        for (int round = 0; round < 200; ++round) {
            // attaining vertex for the current tau
            size_t vhat = 0;
            double wmax = -1;
            for (size_t v = 0; v < diffs.size(); ++v) {
                double acc = 0;
                for (size_t k = 0; k < live.size(); ++k)
                    acc += std::pow(w[live[k]] / tau[k] * diffs[v][live[k]], s);
                if (acc > wmax) {
                    wmax = acc;
                    vhat = v;
                }
            }
            // closed-form optimum against the frozen vertex: tau_j ~ b_j^{q/s'}
            for (size_t k = 0; k < live.size(); ++k) {
                double b = w[live[k]] * diffs[vhat][live[k]];
                tau[k] = std::max(std::pow(b, q / sp), 1e-12);
            }
            double val = eval(tau);
            if (val >= best - 1e-15 * best) {
                best = std::min(best, val);
                break;
            }
            best = val;
        }
        return best;
    };

    // seed from the measure-sup solution: tau_j = G_j^{1/(s+s')}
    auto sup = mixed_sup_d(w, diffs, s, q, 1e-9, 20000);
    std::vector<double> tau0(live.size(), 1.0);
    {
        std::vector<double> G(M, 0.0);
        for (size_t v = 0; v < diffs.size(); ++v)
            for (size_t j = 0; j < M; ++j)
                G[j] += sup.vertex_weights[v] * std::pow(w[j] * diffs[v][j], s);
        for (size_t k = 0; k < live.size(); ++k)
            tau0[k] = std::max(std::pow(G[live[k]], 1.0 / (s + sp)), 1e-12);
    }
    double best = std::min(refine(std::vector<double>(live.size(), 1.0)), refine(tau0));

    Rng rng(seed);
    for (size_t t = 0; t + 2 < starts; ++t) {
        std::vector<double> tau(live.size());
        for (auto& x : tau) x = std::exp(rng.uniform(-1.5, 1.5));
        best = std::min(best, refine(std::move(tau)));
    }
    return best;
}

NormValue mixed_norm_sup(const WeightedPairSequence& seq, const Exponent& s, const Exponent& q,
                         const LipschitzBall& ball, double gap_tol, size_t max_iter) {
    if (!(q <= s)) throw InvalidArgument("mixed_norm_sup: q > s");
    if (q == s) {
        NormValue v = weak_norm(seq, q, ball);
        v.method = "mixed-sup/weak";
        return v;
    }
    if (s.is_inf()) {
        NormValue v = strong_norm(seq, q);
        v.method = "mixed-sup/strong";
        return v;
    }
    auto res = mixed_sup_d(abs_weights(seq), diff_table(ball, entry_pairs(seq)), s.to_double(),
                           q.to_double(), gap_tol, max_iter);
    NormValue out = NormValue::interval(res.lo, res.hi, "mixed-sup/frank-wolfe");
    out.value = res.lo;
    return out;
}

NormValue mixed_norm_inf(const WeightedPairSequence& seq, const Exponent& s, const Exponent& q,
                         const LipschitzBall& ball, size_t starts, uint64_t seed) {
    if (!(q <= s)) throw InvalidArgument("mixed_norm_inf: q > s");
    if (q == s) {
        NormValue w = weak_norm(seq, q, ball); // tau = 1 is optimal, ||tau||_inf = 1
        return NormValue::upper(w.value, "mixed-inf/weak");
    }
    if (s.is_inf()) {
        NormValue v = strong_norm(seq, q); // tau_j ~ |sigma_j| d_j attains it
        return NormValue::upper(v.value, "mixed-inf/strong");
    }
    double v = mixed_inf_d(abs_weights(seq), diff_table(ball, entry_pairs(seq)), s.to_double(),
                           q.to_double(), starts, seed);
    return NormValue::upper(v, "mixed-inf/factorization");
}

} // namespace lipnorm
