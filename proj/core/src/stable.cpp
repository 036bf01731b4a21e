#include "lipnorm/stable.hpp"

#include "lipnorm/rng.hpp"
#include "lipnorm/seq.hpp"

#include <algorithm>
#include <cmath>

namespace lipnorm {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_sp(double s, double p) {
    if (!(0 < p && p < s && s < 2)) throw InvalidArgument("stable: need 0 < p < s < 2");
}

// one standard symmetric s-stable draw, Chambers-Mallows-Stuck
double stable_draw(Rng& rng, double s) {
    double theta = kPi * (rng.uniform() - 0.5);
    if (s == 1.0) return std::tan(theta);
    double w = rng.exponential();
    return std::sin(s * theta) / std::pow(std::cos(theta), 1.0 / s) *
           std::pow(std::cos((1.0 - s) * theta) / w, (1.0 - s) / s);
}

// mean and standard error of the p-th root of the empirical p-th moment,
// scaled by 1/c_sp (delta method for the root)
McEstimate moment_root(const std::vector<double>& powered, double p, double c) {
    const double n = (double)powered.size();
    double mean = 0;
    for (double x : powered) mean += x;
    mean /= n;
    double var = 0;
    for (double x : powered) var += (x - mean) * (x - mean);
    var /= (n - 1);
    double se_mean = std::sqrt(var / n);
    McEstimate out;
    out.value = std::pow(mean, 1.0 / p) / c;
    out.se = mean > 0 ? out.value * se_mean / (p * mean) : se_mean / c;
    return out;
}

double lip_seminorm(const SpacePtr& space, const std::vector<double>& f) {
    double best = 0;
    for (auto [a, b] : space->pairs())
        best = std::max(best, std::fabs(f[a] - f[b]) / to_double(space->d(a, b)));
    return best;
}

} // namespace

double c_sp(double s, double p) {
    require_sp(s, p);
    double lg = std::lgamma((s - p) / s) + std::lgamma((1.0 + p) / 2.0) -
                std::lgamma((2.0 - p) / 2.0) - std::lgamma(0.5);
    return 2.0 * std::exp(lg / p);
}

std::vector<double> sample_stable(double s, size_t n, uint64_t seed) {
    if (!(0 < s && s < 2)) throw InvalidArgument("sample_stable: need 0 < s < 2");
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = stable_draw(rng, s);
    return out;
}

McEstimate type_functional(const std::vector<std::vector<double>>& vectors,
                           const std::function<double(const std::vector<double>&)>& norm, double s,
                           double p, size_t N, uint64_t seed) {
    require_sp(s, p);
    if (vectors.empty()) throw InvalidArgument("type_functional: empty sequence");
    const size_t n = vectors.size(), dim = vectors[0].size();
    Rng rng(seed);
    std::vector<double> powered(N), y(dim);
    for (size_t i = 0; i < N; ++i) {
        std::fill(y.begin(), y.end(), 0.0);
        for (size_t k = 0; k < n; ++k) {
            double t = stable_draw(rng, s);
            for (size_t d = 0; d < dim; ++d) y[d] += t * vectors[k][d];
        }
        powered[i] = std::pow(norm(y), p);
    }
    return moment_root(powered, p, c_sp(s, p));
}

double type_constant_lower(const PointMap& map, const LipschitzBall& ball_Y, double s, double p,
                           size_t trials, size_t N, uint64_t seed) {
    require_sp(s, p);
    if (ball_Y.space().get() != map.codomain.get())
        throw SpaceMismatch("type_constant_lower: codomain ball mismatch");
    const size_t nX = map.domain->n();
    Rng rng(seed);
    double best = 0;
    for (size_t t = 0; t < trials; ++t) {
        size_t len = 1 + rng.index(3);
        std::vector<std::vector<double>> duals; // S# g_k as functions on X
        double gnorm_s = 0;
        for (size_t k = 0; k < len; ++k) {
            const auto& g = ball_Y.vertices()[rng.index(ball_Y.size())].values;
            double scale = rng.uniform(0.5, 2.0);
            std::vector<double> gd(map.codomain->n());
            for (size_t i = 0; i < gd.size(); ++i) gd[i] = scale * to_double(g[i]);
            gnorm_s += std::pow(lip_seminorm(map.codomain, gd), s);
            std::vector<double> pull(nX);
            for (size_t i = 0; i < nX; ++i) pull[i] = gd[map(i)];
            duals.push_back(std::move(pull));
        }
        if (gnorm_s == 0) continue;
        auto est = type_functional(
            duals, [&](const std::vector<double>& f) { return lip_seminorm(map.domain, f); }, s, p,
            N, rng.next());
        best = std::max(best, est.value / std::pow(gnorm_s, 1.0 / s));
    }
    return best;
}

Theorem42Report theorem42_witness_check(const PointMap& map, double s, double q, double p,
                                        size_t witnesses, size_t N, uint64_t seed,
                                        const LipschitzBall& ball_X, const LipschitzBall& ball_Y) {
    require_sp(s, p);
    if (!(p <= q && q < s)) throw InvalidArgument("theorem42_witness_check: need p <= q < s");
    if (ball_X.space().get() != map.domain.get() || ball_Y.space().get() != map.codomain.get())
        throw SpaceMismatch("theorem42_witness_check: ball mismatch");

    const auto& pairs = map.domain->pairs();
    const double c = c_sp(s, p);
    Rng rng(seed);
    Theorem42Report rep;
    rep.trials = witnesses;

    for (size_t trial = 0; trial < witnesses; ++trial) {
        size_t m = 1 + rng.index(3), ng = 1 + rng.index(3);
        std::vector<double> sigma(m);
        std::vector<size_t> pk(m);
        for (size_t j = 0; j < m; ++j) {
            sigma[j] = rng.uniform(0.5, 2.0);
            pk[j] = rng.index(pairs.size());
        }
        // g_k = scaled codomain-ball vertices; delta[k][j] = g_k(Sx'_j)-g_k(Sx''_j)
        std::vector<std::vector<double>> delta(ng, std::vector<double>(m));
        std::vector<std::vector<double>> duals(ng, std::vector<double>(map.domain->n()));
        double gnorm_s = 0;
        for (size_t k = 0; k < ng; ++k) {
            const auto& g = ball_Y.vertices()[rng.index(ball_Y.size())].values;
            double scale = rng.uniform(0.5, 2.0);
            std::vector<double> gd(map.codomain->n());
            for (size_t i = 0; i < gd.size(); ++i) gd[i] = scale * to_double(g[i]);
            gnorm_s += std::pow(lip_seminorm(map.codomain, gd), s);
            for (size_t j = 0; j < m; ++j)
                delta[k][j] = gd[map(pairs[pk[j]].first)] - gd[map(pairs[pk[j]].second)];
            for (size_t i = 0; i < duals[k].size(); ++i) duals[k][i] = gd[map(i)];
        }

        auto power_sum = [&](double e) {
            double acc = 0;
            for (size_t j = 0; j < m; ++j) {
                double inner = 0;
                for (size_t k = 0; k < ng; ++k) inner += std::pow(std::fabs(delta[k][j]), s);
                acc += std::pow(sigma[j], e) * std::pow(inner, e / s);
            }
            return std::pow(acc, 1.0 / e);
        };
        double A = power_sum(q), B = power_sum(p);
        if (A > B * (1 + 1e-9) + 1e-12) {
            ++rep.monotonicity_failures;
            rep.worst_z = std::max(rep.worst_z, 1e9);
        }

        // per-entry stable scale of the exact p-sum, for the reference sample
        std::vector<double> bpow(m);
        for (size_t j = 0; j < m; ++j) {
            double inner = 0;
            for (size_t k = 0; k < ng; ++k) inner += std::pow(std::fabs(delta[k][j]), s);
            bpow[j] = std::pow(sigma[j], p) * std::pow(inner, p / s);
        }

        // shared stable samples for the two integral forms; uR re-estimates
        // the exact p-sum B through the per-entry stable identity, so the
        // B == C comparison is between identically heavy-tailed estimates
        // instead of against a constant (the one-sided z is inconsistent for
        // 2p >= s, where |.|^p has infinite variance)
        Rng mc = rng.split(1000 + trial);
        std::vector<double> uC(N), uD(N), uR(N), t(ng);
        std::vector<double> h(map.domain->n());
        for (size_t i = 0; i < N; ++i) {
            for (size_t k = 0; k < ng; ++k) t[k] = stable_draw(mc, s);
            double acc = 0, ref = 0;
            for (size_t j = 0; j < m; ++j) {
                double lin = 0;
                for (size_t k = 0; k < ng; ++k) lin += t[k] * delta[k][j];
                acc += std::pow(sigma[j] * std::fabs(lin), p);
                ref += bpow[j] * std::pow(std::fabs(stable_draw(mc, s)), p);
            }
            uC[i] = acc;
            uR[i] = ref;
            std::fill(h.begin(), h.end(), 0.0);
            for (size_t k = 0; k < ng; ++k)
                for (size_t x = 0; x < h.size(); ++x) h[x] += t[k] * duals[k][x];
            uD[i] = std::pow(lip_seminorm(map.domain, h), p);
        }
        McEstimate C = moment_root(uC, p, c);
        McEstimate R = moment_root(uR, p, c);
        McEstimate Dt = moment_root(uD, p, c); // t_{(s,p)}(S# g_k)

        std::vector<std::vector<double>> diffs(ball_X.size(), std::vector<double>(m));
        for (size_t v = 0; v < ball_X.size(); ++v)
            for (size_t j = 0; j < m; ++j) diffs[v][j] = to_double(ball_X.pair_diff(v, pk[j]));
        double weak = weak_p_d(sigma, diffs, p);

        double zB = std::fabs(R.value - C.value) /
                    std::max(std::sqrt(R.se * R.se + C.se * C.se), 1e-15);
        if (zB > 3) ++rep.identity_failures;
        rep.worst_z = std::max(rep.worst_z, zB);

        double bound = Dt.value * weak;
        double se = (C.se + Dt.se * weak);
        double zC = (C.value - bound) / std::max(se, 1e-15);
        // final form with the running type-constant estimate is implied since
        // the estimate is a running max over t/||g||, but verify explicitly
        double final_bound = std::max(Dt.value / std::pow(gnorm_s, 1.0 / s), 0.0) *
                             std::pow(gnorm_s, 1.0 / s) * weak;
        double zF = (C.value - final_bound) / std::max(se, 1e-15);
        double z = std::max(zC, zF);
        if (z > 3) ++rep.chain_failures;
        rep.worst_z = std::max(rep.worst_z, z);
    }
    return rep;
}

} // namespace lipnorm
