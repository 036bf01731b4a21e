#include "lipnorm/audit.hpp"

#include "lipnorm/molecule.hpp"
#include "lipnorm/stable.hpp"
#include "lipnorm/summing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lipnorm {

namespace {

std::string fmt(double x) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

// relative slack shared by all hard floating-point comparisons
bool leq(double a, double b) { return a <= b * (1 + 1e-9) + 1e-12; }

const Rat kMenu[4] = {Rat(1, 2), Rat(1), Rat(3, 2), Rat(2)};

std::string map_witness(const PointMap& map) {
    std::ostringstream os;
    os << "domain=" << space_to_json(*map.domain) << " codomain=" << space_to_json(*map.codomain)
       << " assign=[";
    for (size_t i = 0; i < map.assign.size(); ++i) os << (i ? "," : "") << map.assign[i];
    os << "]";
    return os.str();
}

std::string seq_witness(const WeightedPairSequence& seq) {
    std::ostringstream os;
    os << "space=" << space_to_json(*seq.space) << " entries=[";
    for (size_t j = 0; j < seq.entries.size(); ++j)
        os << (j ? " " : "") << rat_str(seq.entries[j].weight) << "*(" << seq.entries[j].left
           << "," << seq.entries[j].right << ")";
    os << "]";
    return os.str();
}

std::string molecule_witness(const Molecule& m) {
    std::ostringstream os;
    os << "space=" << space_to_json(*m.space) << " support=[";
    for (size_t i = 0; i < m.support.size(); ++i) {
        os << (i ? " " : "") << "(";
        for (size_t k = 0; k < m.dim; ++k) os << (k ? "," : "") << rat_str(m.support[i][k]);
        os << ")";
    }
    os << "]";
    return os.str();
}

// pass records keep the short tag; failures append the full witness
void judge(AuditReport& rep, std::string check, uint64_t seed, bool ok, std::string tag,
           const std::string& witness, std::string detail) {
    rep.add(std::move(check), ok ? std::move(tag) : tag + " " + witness, seed,
            ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail));
}

Molecule random_molecule(Rng& rng, const SpacePtr& space, size_t dim) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        AtomDecomposition d{space, dim, {}, {}};
        size_t n_atoms = 1 + rng.index(3);
        for (size_t j = 0; j < n_atoms; ++j) {
            Atom a;
            a.v.resize(dim);
            for (auto& x : a.v) x = Rat((long)rng.index(9)) / 2 - 2; // {-2,-3/2,...,2}
            a.left = rng.index(space->n());
            do a.right = rng.index(space->n());
            while (a.right == a.left);
            d.atoms.push_back(std::move(a));
        }
        Molecule m = molecule_from_atoms(d);
        bool nonzero = false;
        for (const auto& tuple : m.support)
            for (const auto& x : tuple) nonzero = nonzero || x != 0;
        if (nonzero) return m;
    }
    // fall back to a fixed nonzero atom
    AtomDecomposition d{space, dim, {Atom{std::vector<Rat>(dim, Rat(1)), 0, 1}}, {}};
    return molecule_from_atoms(d);
}

} // namespace

size_t AuditReport::passes() const {
    return (size_t)std::count_if(records.begin(), records.end(),
                                 [](const CheckRecord& r) { return r.status == CheckStatus::pass; });
}
size_t AuditReport::fails() const {
    return (size_t)std::count_if(records.begin(), records.end(),
                                 [](const CheckRecord& r) { return r.status == CheckStatus::fail; });
}
size_t AuditReport::soft_warns() const {
    return (size_t)std::count_if(records.begin(), records.end(), [](const CheckRecord& r) {
        return r.status == CheckStatus::soft_warn;
    });
}

void AuditReport::add(std::string check, std::string instance, uint64_t seed, CheckStatus status,
                      std::string detail) {
    records.push_back(
        {std::move(check), std::move(instance), seed, status, std::move(detail)});
}

void AuditReport::merge(AuditReport other) {
    records.insert(records.end(), std::make_move_iterator(other.records.begin()),
                   std::make_move_iterator(other.records.end()));
}

std::string AuditReport::to_text() const {
    std::ostringstream os;
    for (const auto& r : records)
        os << check_status_str(r.status) << " " << r.check << " seed=" << r.seed << " instance={"
           << r.instance << "} detail={" << r.detail << "}\n";
    os << "summary pass=" << passes() << " fail=" << fails() << " soft-warn=" << soft_warns()
       << "\n";
    return os.str();
}

SpacePtr random_space(Rng& rng, size_t min_points, size_t max_points) {
    size_t n = min_points + rng.index(max_points - min_points + 1);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        std::vector<std::vector<Rat>> dist(n, std::vector<Rat>(n, Rat(0)));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = kMenu[rng.index(4)];
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i)
            for (size_t j = 0; j < n && ok; ++j)
                for (size_t k = 0; k < n && ok; ++k)
                    if (i != j && j != k && i != k) ok = dist[i][j] <= dist[i][k] + dist[k][j];
        if (!ok) continue;
        std::vector<std::string> points;
        for (size_t i = 0; i < n; ++i) points.push_back("x" + std::to_string(i));
        return PointedMetricSpace::create("rand", std::move(points), 0, std::move(dist));
    }
    return discrete_space(n);
}

PointMap random_map(Rng& rng, const SpacePtr& domain, const SpacePtr& codomain) {
    std::vector<size_t> assign(domain->n());
    for (size_t i = 0; i < assign.size(); ++i)
        assign[i] = i == domain->base() ? codomain->base() : rng.index(codomain->n());
    return PointMap("rand-map", domain, codomain, std::move(assign));
}

WeightedPairSequence random_sequence(Rng& rng, const SpacePtr& space, size_t max_len) {
    WeightedPairSequence seq{space, {}};
    size_t len = 1 + rng.index(max_len);
    for (size_t j = 0; j < len; ++j) {
        SeqEntry e;
        e.weight = kMenu[rng.index(4)];
        e.left = rng.index(space->n());
        do e.right = rng.index(space->n());
        while (e.right == e.left);
        seq.entries.push_back(e);
    }
    return seq;
}

AuditReport check_prop33(size_t trials, uint64_t seed) {
    AuditReport rep;

    // closed-form slices: q = s and s = inf collapse both programs to the
    // weak / strong norm, so sup and inf agree exactly
    {
        auto X = discrete_space(3);
        auto ball = enumerate_vertices(X);
        WeightedPairSequence seq{X, {{Rat(1), 0, 1}, {Rat(3, 2), 1, 2}}};
        const std::pair<Exponent, Exponent> slices[] = {{Exponent(2), Exponent(2)},
                                                        {Exponent::infinity(), Exponent(2)}};
        for (const auto& [s, q] : slices) {
            auto sup = mixed_norm_sup(seq, s, q, ball);
            auto inf = mixed_norm_inf(seq, s, q, ball);
            bool ok = std::fabs(sup.value - inf.value) <= 1e-12 * std::max(1.0, inf.value);
            judge(rep, "prop33-closed-form-slice", seed, ok,
                  "(s,q)=(" + exponent_str(s) + "," + exponent_str(q) + ") on D_3",
                  seq_witness(seq), "sup=" + fmt(sup.value) + " inf=" + fmt(inf.value));
        }
    }

    Rng rng(seed);
    const std::pair<Exponent, Exponent> combos[] = {
        {Exponent(Rat(3, 2)), Exponent(1)}, {Exponent(2), Exponent(1)},
        {Exponent(2), Exponent(Rat(3, 2))}, {Exponent(3), Exponent(2)},
        {Exponent::infinity(), Exponent(2)}, {Exponent(2), Exponent(2)},
        {Exponent(2), Exponent(Rat(1, 2))}};
    for (size_t t = 0; t < trials; ++t) {
        Rng tr = rng.split(t);
        auto X = random_space(tr);
        auto ball = enumerate_vertices(X);
        auto seq = random_sequence(tr, X);
        const auto& [s, q] = combos[tr.index(std::size(combos))];
        std::string tag = "trial=" + std::to_string(t) + " (s,q)=(" + exponent_str(s) + "," +
                          exponent_str(q) + ")";
        auto sup = mixed_norm_sup(seq, s, q, ball);
        auto inf = mixed_norm_inf(seq, s, q, ball);
        judge(rep, "prop33-order", seed, leq(sup.lo, inf.hi), tag, seq_witness(seq),
              "sup=" + fmt(sup.lo) + " inf=" + fmt(inf.hi));
        double gap = inf.hi - sup.lo;
        judge(rep, "prop33-gap", seed, gap <= 1e-6 * std::max(1.0, inf.hi), tag, seq_witness(seq),
              "gap=" + fmt(gap) + " sup=" + fmt(sup.lo) + " inf=" + fmt(inf.hi));
    }
    return rep;
}

AuditReport check_compositions(size_t trials, uint64_t seed, size_t starts) {
    AuditReport rep;

    // the naive composition formula pi_p(T.S) <= pi_r(T) pi_s(S) at
    // (p,r,s)=(1,2,2) must be violated on the three-point counterexample
    {
        auto inst = counterexample_instance();
        auto ball_X = enumerate_vertices(inst.X);
        auto ball_Y = enumerate_vertices(inst.Y);
        Rat lhs = *pi_p_exact(inst.S, Exponent(1), ball_X).power; // I_Y . S = S
        Rat lhs2 = lhs * lhs;
        Rat rhs2 = *pi_p_exact(identity_map(inst.Y), Exponent(2), ball_Y).power *
                   *pi_p_exact(inst.S, Exponent(2), ball_X).power;
        judge(rep, "composition-false-formula", seed, lhs2 > rhs2,
              "three-point counterexample, (p,r,s)=(1,2,2)", map_witness(inst.S),
              "pi_1(T.S)^2=" + rat_str(lhs2) + " vs pi_2(T)^2*pi_2(S)^2=" + rat_str(rhs2) +
                  " (violation expected)");
    }

    Rng rng(seed);
    const struct {
        long s, p, r;
    } mixed[] = {{2, 2, 2}, {2, 2, 1}, {3, 2, 1}, {4, 3, 2}};
    for (size_t t = 0; t < trials; ++t) {
        Rng tr = rng.split(t);
        auto X = random_space(tr);
        auto Y = random_space(tr);
        auto Z = random_space(tr);
        auto ball_X = enumerate_vertices(X);
        auto ball_Y = enumerate_vertices(Y);
        auto ball_Z = enumerate_vertices(Z);
        PointMap S = random_map(tr, X, Y);
        PointMap T = random_map(tr, Y, Z);
        PointMap TS = compose(S, T);
        std::string tag = "trial=" + std::to_string(t);
        std::string wit = map_witness(S) + " outer " + map_witness(T);

        if (t == 0) {
            // constant outer map: the composition has summing norm zero
            PointMap C = compose(S, constant_map(Y, Z));
            Rat z = *pi_p_exact(C, Exponent(1), ball_X).power;
            judge(rep, "composition-constant-collapse", seed, z == 0, tag, wit,
                  "pi_1(const.S)=" + rat_str(z));
        }

        // exact ideal property on both sides, p in {1, 2}
        for (long p : {1L, 2L}) {
            Rat lhs = *pi_p_exact(TS, Exponent(p), ball_X).power;
            Rat left = rat_pow(lipschitz_constant(T), p) * *pi_p_exact(S, Exponent(p), ball_X).power;
            Rat right = *pi_p_exact(T, Exponent(p), ball_Y).power *
                        rat_pow(lipschitz_constant(S), p);
            judge(rep, "composition-ideal-outer", seed, lhs <= left, tag + " p=" + std::to_string(p),
                  wit, "pi^p(T.S)=" + rat_str(lhs) + " Lip(T)^p*pi^p(S)=" + rat_str(left));
            judge(rep, "composition-ideal-inner", seed, lhs <= right,
                  tag + " p=" + std::to_string(p), wit,
                  "pi^p(T.S)=" + rat_str(lhs) + " pi^p(T)*Lip(S)^p=" + rat_str(right));
        }

        // mixed composition bound: pi_{(p,m(r;r))}(T.S) <= pi_s(T) pi_{(m(s;p),r)}(S)
        {
            const auto& [s, p, r] = mixed[t % std::size(mixed)];
            auto lhs = pi_ps_exact(TS, Exponent(p), Exponent(r), ball_X);
            auto piT = pi_p_exact(T, Exponent(s), ball_Y);
            auto piS = pi_msq_p(S, Exponent(s), Exponent(p), Exponent(r), ball_X, ball_Y, starts,
                                tr.next());
            judge(rep, "composition-mixed-through-dual", seed, leq(lhs.lo, piT.hi * piS.hi),
                  tag + " (s,p,r)=(" + std::to_string(s) + "," + std::to_string(p) + "," +
                      std::to_string(r) + ")",
                  wit,
                  "lhs=" + fmt(lhs.lo) + " pi_s(T)=" + fmt(piT.hi) + " pi_msq(S)=" + fmt(piS.hi));
        }

        // mixing-kind composition at (t,s,r,p,q)=(4,3,2,2,1):
        // pi_{(m(4;2),1)}(T.S) <= pi_{(m(4;3),2)}(T) pi_{(m(2;2),1)}(S)
        {
            auto lhs = pi_msq_p(TS, Exponent(4), Exponent(2), Exponent(1), ball_X, ball_Z, starts,
                                tr.next());
            auto h1 = pi_msq_p(T, Exponent(4), Exponent(3), Exponent(2), ball_Y, ball_Z, starts,
                               tr.next());
            auto h2 = pi_msq_p(S, Exponent(2), Exponent(2), Exponent(1), ball_X, ball_Y, starts,
                               tr.next());
            judge(rep, "composition-mixing-kinds", seed, leq(lhs.lo, h1.hi * h2.hi), tag, wit,
                  "lhs=" + fmt(lhs.lo) + " rhs=" + fmt(h1.hi * h2.hi));
        }
    }
    return rep;
}

AuditReport check_inclusions(size_t trials, uint64_t seed, size_t starts) {
    AuditReport rep;

    // cross-power comparison of pi_{p2} <= pi_{p1}: powers pw_i = pi^{p_i}
    auto mono_ok = [](const Rat& pw1, long p1, const Rat& pw2, long p2) {
        return rat_pow(pw2, p1) <= rat_pow(pw1, p2);
    };

    {
        auto inst = counterexample_instance();
        auto ball_X = enumerate_vertices(inst.X);
        Rat w1 = *pi_p_exact(inst.S, Exponent(1), ball_X).power;
        Rat w2 = *pi_p_exact(inst.S, Exponent(2), ball_X).power;
        judge(rep, "inclusion-pi-counterexample", seed, mono_ok(w1, 1, w2, 2),
              "pi_2(S) <= pi_1(S) on the counterexample", map_witness(inst.S),
              "pi_1=" + rat_str(w1) + " pi_2^2=" + rat_str(w2));
        // p = s makes the diagonal inclusion a tautology
        auto a = pi_ps_exact(inst.S, Exponent(2), Exponent(2), ball_X);
        auto b = pi_p_exact(inst.S, Exponent(2), ball_X);
        judge(rep, "inclusion-diagonal-tautology", seed, *a.power == *b.power, "p=s slice",
              map_witness(inst.S), "pi_(2,m(2;2))^2=" + rat_str(*a.power));
    }

    Rng rng(seed);
    for (size_t t = 0; t < trials; ++t) {
        Rng tr = rng.split(t);
        auto X = random_space(tr);
        auto Y = random_space(tr);
        auto ball_X = enumerate_vertices(X);
        auto ball_Y = enumerate_vertices(Y);
        PointMap S = random_map(tr, X, Y);
        std::string tag = "trial=" + std::to_string(t);
        std::string wit = map_witness(S);

        // exact monotonicity pi_{p2} <= pi_{p1} for p1 <= p2
        Rat w1 = *pi_p_exact(S, Exponent(1), ball_X).power;
        Rat w2 = *pi_p_exact(S, Exponent(2), ball_X).power;
        Rat w3 = *pi_p_exact(S, Exponent(3), ball_X).power;
        bool mono = mono_ok(w1, 1, w2, 2) && mono_ok(w1, 1, w3, 3) && mono_ok(w2, 2, w3, 3);
        judge(rep, "inclusion-pi-p-monotone", seed, mono, tag, wit,
              "pi_1=" + rat_str(w1) + " pi_2^2=" + rat_str(w2) + " pi_3^3=" + rat_str(w3));

        // sequence norm monotone in s (fixed q) and antitone in q (fixed s)
        auto seq = random_sequence(tr, X);
        {
            auto lo = mixed_norm_sup(seq, Exponent(Rat(3, 2)), Exponent(1), ball_X);
            auto hi = mixed_norm_inf(seq, Exponent(2), Exponent(1), ball_X);
            judge(rep, "inclusion-seq-s-monotone", seed, leq(lo.lo, hi.hi), tag, seq_witness(seq),
                  "m(3/2;1)=" + fmt(lo.lo) + " m(2;1)=" + fmt(hi.hi));
        }
        {
            auto lo = mixed_norm_sup(seq, Exponent(2), Exponent(2), ball_X);
            auto hi = mixed_norm_inf(seq, Exponent(2), Exponent(1), ball_X);
            judge(rep, "inclusion-seq-q-antitone", seed, leq(lo.lo, hi.hi), tag, seq_witness(seq),
                  "m(2;2)=" + fmt(lo.lo) + " m(2;1)=" + fmt(hi.hi));
        }

        // diagonal-kind inclusion scale: pi_{(4,m(2;2))} <= pi_{(2,m(1;1))}
        {
            auto a = pi_ps_exact(S, Exponent(4), Exponent(2), ball_X);
            auto b = pi_ps_exact(S, Exponent(2), Exponent(1), ball_X);
            judge(rep, "inclusion-ps-scale", seed, leq(a.lo, b.hi), tag, wit,
                  "pi_(4,m(2;2))=" + fmt(a.lo) + " pi_(2,m(1;1))=" + fmt(b.hi));
        }

        // mixing-kind inclusion: pi_{(m(3;2),2)} <= pi_{(m(4;1),1)}
        {
            auto a = pi_msq_p(S, Exponent(3), Exponent(2), Exponent(2), ball_X, ball_Y, starts,
                              tr.next());
            auto b = pi_msq_p(S, Exponent(4), Exponent(1), Exponent(1), ball_X, ball_Y, starts,
                              tr.next());
            judge(rep, "inclusion-mixing-scale", seed, leq(a.lo, b.hi), tag, wit,
                  "pi_(m(3;2),2)=" + fmt(a.lo) + " pi_(m(4;1),1)=" + fmt(b.hi));
        }

        // pi_s(T) <= pi_{(p,m(s;p))}(T): the right side is only lower-boundable,
        // so an unresolved comparison is reported, not failed
        {
            auto lhs = pi_p_exact(S, Exponent(2), ball_X);
            auto rl = pi_p_msq_lower(S, Exponent(1), Exponent(2), Exponent(1), ball_X, starts,
                                     tr.next());
            bool resolved = lhs.hi <= rl.lo * (1 + 1e-6) + 1e-9;
            rep.add("inclusion-diag-vs-mixing-soft",
                    resolved ? tag : tag + " " + wit, seed,
                    resolved ? CheckStatus::pass : CheckStatus::soft_warn,
                    "pi_2=" + fmt(lhs.hi) + " lower(pi_(1,m(2;1)))=" + fmt(rl.lo));
        }
    }
    return rep;
}

AuditReport check_interpolation(size_t trials, uint64_t seed, size_t starts) {
    AuditReport rep;

    // identity on the discrete n-point space: the LP value against the
    // independent max-cut closed form N/K, and against the published 2 - 2/n
    for (size_t n = 2; n <= 6; ++n) {
        auto Dn = discrete_space(n);
        auto ball = enumerate_vertices(Dn);
        PointMap I = identity_map(Dn);
        Rat derived = Rat((long)(n * (n - 1) / 2)) / Rat((long)((n / 2) * ((n + 1) / 2)));
        Rat published = Rat(2) - Rat(2, (long)n);
        for (long r = 1; r <= 3; ++r) {
            Rat pw = *pi_p_exact(I, Exponent(r), ball).power;
            std::string tag = "n=" + std::to_string(n) + " r=" + std::to_string(r);
            judge(rep, "dn-lp-vs-maxcut", seed, pw == derived, tag, space_to_json(*Dn),
                  "pi_r^r=" + rat_str(pw) + " maxcut=" + rat_str(derived));
            judge(rep, "dn-published-formula", seed, pw == published, tag, space_to_json(*Dn),
                  "pi_r^r=" + rat_str(pw) + " published 2-2/n=" + rat_str(published));
        }
        // mixing collapse pi_{(m(s;p),p)}(I) = (2-2/n)^{1/p-1/s}; the n=4
        // ball is the dominant cost, so trimmed-start runs stop at n=3
        if (n <= (starts >= 16 ? 4u : 3u)) {
            const std::pair<long, long> sp[] = {{2, 1}, {4, 3}};
            for (const auto& [s, p] : sp) {
                auto val = pi_msq_p(I, Exponent(s), Exponent(p), Exponent(p), ball, ball, starts);
                double target =
                    std::pow(2.0 - 2.0 / (double)n, 1.0 / (double)p - 1.0 / (double)s);
                bool ok = leq(val.lo, target) && leq(target, val.hi) && val.width() < 1e-3;
                judge(rep, "dn-mixing-collapse", seed, ok,
                      "n=" + std::to_string(n) + " (s,p)=(" + std::to_string(s) + "," +
                          std::to_string(p) + ")",
                      space_to_json(*Dn),
                      "interval=[" + fmt(val.lo) + "," + fmt(val.hi) + "] published=" +
                          fmt(target));
            }
        }
    }

    // final worked example: pi_{(m(4;3),2)}(S) in [2, 2.029663590]
    {
        auto inst = counterexample_instance();
        auto ball_X = enumerate_vertices(inst.X);
        auto ball_Y = enumerate_vertices(inst.Y);
        auto val = pi_msq_p(inst.S, Exponent(4), Exponent(3), Exponent(2), ball_X, ball_Y);
        bool ok = std::fabs(val.hi - 2.029663590) <= 1e-6 && val.lo >= 2 - 1e-9;
        judge(rep, "interpolation-worked-example", seed, ok, "(s,p,r)=(4,3,2)",
              map_witness(inst.S), "interval=[" + fmt(val.lo) + "," + fmt(val.hi) + "]");
    }

    Rng rng(seed);
    const struct {
        long s, p, r;
    } sets[] = {{4, 3, 2}, {3, 2, 1}, {2, 2, 1}};
    for (size_t t = 0; t < trials; ++t) {
        Rng tr = rng.split(t);
        auto X = random_space(tr);
        auto Y = random_space(tr);
        auto ball_X = enumerate_vertices(X);
        auto ball_Y = enumerate_vertices(Y);
        PointMap S = random_map(tr, X, Y);
        std::string tag = "trial=" + std::to_string(t);
        std::string wit = map_witness(S);

        const auto& [s, p, r] = sets[t % std::size(sets)];
        auto lo = pi_msq_p(S, Exponent(s), Exponent(p), Exponent(r), ball_X, ball_Y, starts,
                           tr.next());
        auto up = interpolation_upper(S, Exponent(s), Exponent(p), Exponent(r), ball_X);
        judge(rep, "interpolation-upper-bound", seed, leq(lo.lo, up.hi),
              tag + " (s,p,r)=(" + std::to_string(s) + "," + std::to_string(p) + "," +
                  std::to_string(r) + ")",
              wit, "lower=" + fmt(lo.lo) + " upper=" + fmt(up.hi));

        // theta endpoints: equal endpoint indices reproduce the plain bound
        auto g0 = general_interpolation_upper(S, 0.5, Exponent(s), Exponent(s), Exponent(p),
                                              Exponent(r), ball_X);
        judge(rep, "interpolation-theta-endpoint", seed,
              std::fabs(g0.hi - up.hi) <= 1e-9 * std::max(1.0, up.hi), tag, wit,
              "theta-bound=" + fmt(g0.hi) + " plain=" + fmt(up.hi));

        // interpolated index: 1/3 = (1/2)/2 + (1/2)/6
        auto g1 = general_interpolation_upper(S, 0.5, Exponent(2), Exponent(6), Exponent(2),
                                              Exponent(1), ball_X);
        auto lo3 = pi_msq_p(S, Exponent(3), Exponent(2), Exponent(1), ball_X, ball_Y, starts,
                            tr.next());
        judge(rep, "interpolation-theta-bound", seed, leq(lo3.lo, g1.hi), tag, wit,
              "lower=" + fmt(lo3.lo) + " theta-bound=" + fmt(g1.hi));

        // ((s;p),r)-space equivalence chain at s=4, p=2, r1=2, r0=1 (theta=1/3):
        // pi_{(m(4;2),2)}(I) <= pi_{(m(4;1),1)}(I) <= pi_{(m(4;2),2)}(I)^3
        PointMap I = identity_map(X);
        auto L = pi_msq_p(I, Exponent(4), Exponent(2), Exponent(2), ball_X, ball_X, starts,
                          tr.next());
        auto M = pi_msq_p(I, Exponent(4), Exponent(1), Exponent(1), ball_X, ball_X, starts,
                          tr.next());
        bool chain = leq(L.lo, M.hi) && leq(M.lo, std::pow(L.hi, 3.0));
        judge(rep, "interpolation-space-equivalence", seed, chain, tag, space_to_json(*X),
              "L=[" + fmt(L.lo) + "," + fmt(L.hi) + "] M=[" + fmt(M.lo) + "," + fmt(M.hi) + "]");
    }
    return rep;
}

AuditReport check_counterexample() {
    AuditReport rep;
    auto inst = counterexample_instance();
    auto ball_X = enumerate_vertices(inst.X);
    auto ball_Y = enumerate_vertices(inst.Y);
    PointMap IY = identity_map(inst.Y);

    Rat p1 = *pi_p_exact(inst.S, Exponent(1), ball_X).power;
    Rat p2 = *pi_p_exact(inst.S, Exponent(2), ball_X).power;
    auto sol_y = pi_p_solve(IY, Exponent(2), ball_Y);
    Rat py = *sol_y.norm.power;

    judge(rep, "counterexample-pi1", 0, p1 == Rat(5, 2), "pi_1(S)", map_witness(inst.S),
          "lp value " + rat_str(p1) + ", expected 5/2");
    judge(rep, "counterexample-pi2-squared", 0, p2 == Rat(9, 2), "pi_2(S)^2", map_witness(inst.S),
          "lp value " + rat_str(p2) + ", expected 9/2");
    judge(rep, "counterexample-pi2-identity-squared", 0, py == Rat(11, 8), "pi_2(I_Y)^2",
          map_witness(IY), "lp value " + rat_str(py) + ", expected 11/8");

    Rat lhs2 = p1 * p1, rhs2 = p2 * py;
    judge(rep, "counterexample-margin", 0, lhs2 == Rat(25, 4) && rhs2 == Rat(99, 16) && lhs2 > rhs2,
          "pi_1(S)^2 vs pi_2(S)^2 pi_2(I_Y)^2", map_witness(inst.S),
          rat_str(lhs2) + " > " + rat_str(rhs2) + ", margin " + rat_str(lhs2 - rhs2));

    // the dual multipliers certify the identity LP value exactly
    bool cert = sol_y.dual_rat.has_value();
    if (cert) {
        Rat total(0);
        for (const auto& y : *sol_y.dual_rat) {
            cert = cert && y >= 0;
            total += y;
        }
        cert = cert && total == py;
    }
    judge(rep, "counterexample-dual-certificate", 0, cert, "pi_2(I_Y)^2 duality", map_witness(IY),
          "dual sum equals primal value " + rat_str(py));
    return rep;
}

AuditReport check_stable(size_t trials, uint64_t seed, size_t mc_samples) {
    AuditReport rep;
    Rng rng(seed);

    // moment identity: (E|sum t_k a_k|^p)^{1/p} = c_sp ||a||_s for independent
    // standard s-stable t_k. The summand |.|^p has infinite variance when
    // 2p >= s, which makes the one-sided z against the closed form
    // inconsistent (the empirical standard error collapses together with the
    // estimate whenever the tail is under-sampled). The identically
    // distributed reference sample |t ||a||_s|^p symmetrizes the comparison,
    // so its z self-normalizes for every admissible (s, p); the closed form
    // is checked directly only on the finite-variance slice.
    const double combos[3][2] = {{1.5, 1.0}, {1.2, 0.5}, {1.9, 1.5}};
    auto abs0 = [](const std::vector<double>& y) { return std::fabs(y[0]); };
    for (size_t c = 0; c < 3; ++c) {
        double s = combos[c][0], p = combos[c][1];
        for (size_t t = 0; t < trials; ++t) {
            Rng tr = rng.split(c * 100000 + t);
            size_t len = 1 + tr.index(4);
            std::vector<std::vector<double>> vecs(len, std::vector<double>(1));
            double exact = 0;
            for (auto& v : vecs) {
                v[0] = (tr.index(2) ? 1.0 : -1.0) * tr.uniform(0.5, 2.0);
                exact += std::pow(std::fabs(v[0]), s);
            }
            exact = std::pow(exact, 1.0 / s);
            auto est = type_functional(vecs, abs0, s, p, mc_samples, tr.next());
            auto ref = type_functional({{exact}}, abs0, s, p, mc_samples, tr.next());
            double z = std::fabs(est.value - ref.value) /
                       std::max(std::hypot(est.se, ref.se), 1e-15);
            std::ostringstream wit;
            wit << "a=[";
            for (size_t k = 0; k < len; ++k) wit << (k ? "," : "") << fmt(vecs[k][0]);
            wit << "]";
            judge(rep, "stable-moment-identity", seed, z <= 3.0,
                  "trial=" + std::to_string(t) + " (s,p)=(" + fmt(s) + "," + fmt(p) + ")",
                  wit.str(),
                  "estimate=" + fmt(est.value) + " reference=" + fmt(ref.value) +
                      " exact=" + fmt(exact) + " z=" + fmt(z));
            if (2 * p < s) {
                double zc = std::fabs(est.value - exact) / std::max(est.se, 1e-15);
                judge(rep, "stable-moment-closed-form", seed, zc <= 3.0,
                      "trial=" + std::to_string(t) + " (s,p)=(" + fmt(s) + "," + fmt(p) + ")",
                      wit.str(), "estimate=" + fmt(est.value) + " exact=" + fmt(exact) +
                                     " z=" + fmt(zc));
            }
        }
    }

    // witness-level inequality chain behind the type bound, on D_3
    {
        auto D3 = discrete_space(3);
        auto ball = enumerate_vertices(D3);
        auto r42 = theorem42_witness_check(identity_map(D3), 1.5, 1.0, 1.0, trials, mc_samples,
                                           rng.next(), ball, ball);
        bool ok = r42.monotonicity_failures == 0 && r42.identity_failures == 0 &&
                  r42.chain_failures == 0;
        judge(rep, "stable-type-chain", seed, ok, "D_3 (s,q,p)=(1.5,1,1)", space_to_json(*D3),
              "trials=" + std::to_string(r42.trials) + " worst_z=" + fmt(r42.worst_z) +
                  " failures=" + std::to_string(r42.monotonicity_failures) + "/" +
                  std::to_string(r42.identity_failures) + "/" +
                  std::to_string(r42.chain_failures));
    }

    // the type-constant estimate is a usable finite lower bound
    {
        auto inst = counterexample_instance();
        auto ball_Y = enumerate_vertices(inst.Y);
        double tl = type_constant_lower(inst.S, ball_Y, 1.5, 1.0, std::min<size_t>(trials, 10),
                                        std::max<size_t>(mc_samples / 10, 1000), rng.next());
        judge(rep, "stable-type-constant-finite", seed, std::isfinite(tl) && tl >= 0,
              "counterexample S (s,p)=(1.5,1)", map_witness(inst.S), "lower=" + fmt(tl));
    }
    return rep;
}

AuditReport check_molecules(size_t trials, uint64_t seed, size_t starts) {
    AuditReport rep;
    Rng rng(seed);
    const Exponent two(2);
    for (size_t t = 0; t < trials; ++t) {
        Rng tr = rng.split(t);
        auto X = random_space(tr);
        auto ball = enumerate_vertices(X);
        const size_t dim = 2;
        std::string tag = "trial=" + std::to_string(t);

        // single atom: cs_p(v m_ab) = ||v|| d(a,b), certified from both sides
        {
            size_t a = tr.index(X->n()), b;
            do b = tr.index(X->n());
            while (b == a);
            std::vector<Rat> v = {kMenu[tr.index(4)], Rat((long)tr.index(5)) - 2};
            AtomDecomposition single{X, dim, {Atom{v, a, b}}, {}};
            Molecule m = molecule_from_atoms(single);
            double exact = vector_norm(v, two) * to_double(X->d(a, b));
            auto u = cs_upper(m, two, std::nullopt, ball, two, 8, tr.next(), {single});
            auto l = cs_lower(m, two, ball, two, 8, tr.next());
            bool ok = std::fabs(u.hi - exact) <= 1e-9 * std::max(1.0, exact) &&
                      std::fabs(l.lo - exact) <= 1e-9 * std::max(1.0, exact);
            judge(rep, "molecule-single-atom", seed, ok, tag, molecule_witness(m),
                  "upper=" + fmt(u.hi) + " lower=" + fmt(l.lo) + " exact=" + fmt(exact));
        }

        Molecule m1 = random_molecule(tr, X, dim);
        Molecule m2 = random_molecule(tr, X, dim);

        // duality sandwich for cs_2
        {
            auto u = cs_upper(m1, two, std::nullopt, ball, two, 16, tr.next());
            auto l = cs_lower(m1, two, ball, two, 16, tr.next());
            judge(rep, "molecule-duality-order", seed, leq(l.lo, u.hi), tag, molecule_witness(m1),
                  "lower=" + fmt(l.lo) + " upper=" + fmt(u.hi));
            double gap = u.hi - l.lo;
            rep.add("molecule-duality-gap",
                    gap <= 1e-4 * std::max(1.0, u.hi) ? tag : tag + " " + molecule_witness(m1),
                    seed,
                    gap <= 1e-4 * std::max(1.0, u.hi) ? CheckStatus::pass : CheckStatus::soft_warn,
                    "gap=" + fmt(gap));
        }

        // beta-triangle of the cs_{p',r} upper values, witnessed by the
        // rescaled concatenation of the two winning decompositions
        {
            Exponent r(t % 2 ? 1L : 2L);
            double P = 2.0, R = r.to_double();
            double beta = 1.0 / (1.0 / P + 1.0 / R);
            auto d1 = cs_upper_detail(m1, two, r, ball, two, 16, tr.next());
            auto d2 = cs_upper_detail(m2, two, r, ball, two, 16, tr.next());
            if (d1.value.hi > 0 && d2.value.hi > 0) {
                AtomDecomposition hint{X, dim, {}, {}};
                for (const auto* d : {&d1, &d2}) {
                    double aP = 0;
                    for (size_t j = 0; j < d->best.atoms.size(); ++j)
                        aP += std::pow(d->best.sigma[j] * vector_norm(d->best.atoms[j].v, two), P);
                    double a = std::pow(aP, 1.0 / P);
                    double w = d->value.hi / std::max(a, 1e-300);
                    double scale = std::pow(w, R / (P + R)) / std::pow(std::max(a, 1e-300),
                                                                       P / (P + R));
                    for (size_t j = 0; j < d->best.atoms.size(); ++j) {
                        hint.atoms.push_back(d->best.atoms[j]);
                        hint.sigma.push_back(scale * d->best.sigma[j]);
                    }
                }
                Molecule msum{X, dim, m1.support};
                for (size_t i = 0; i < msum.support.size(); ++i)
                    for (size_t k = 0; k < dim; ++k) msum.support[i][k] += m2.support[i][k];
                auto u12 = cs_upper(msum, two, r, ball, two, 16, tr.next(), {hint});
                double lhs = std::pow(u12.hi, beta);
                double rhs = std::pow(d1.value.hi, beta) + std::pow(d2.value.hi, beta);
                judge(rep, "molecule-beta-triangle", seed, leq(lhs, rhs),
                      tag + " r=" + exponent_str(r),
                      molecule_witness(m1) + " plus " + molecule_witness(m2),
                      "sum^beta=" + fmt(lhs) + " parts=" + fmt(rhs) + " beta=" + fmt(beta));
            }
        }

        // operator ratio: cs_{s'}(S_G m) <= pi_{(m(s;p),r)}(S) cs_{p',r}(m)
        {
            auto Y = random_space(tr);
            auto ball_Y = enumerate_vertices(Y);
            PointMap S = random_map(tr, X, Y);
            const struct {
                long s, p, r;
            } sets[] = {{2, 2, 2}, {2, 2, 1}, {4, 2, 1}};
            const auto& [s, p, r] = sets[t % std::size(sets)];
            Exponent s_conj = s == 2 ? Exponent(2) : Exponent(Rat(4, 3));
            auto img = image_molecule(S, m1);
            auto lhs = cs_lower(img, s_conj, ball_Y, two, 8, tr.next());
            auto piub = pi_msq_p(S, Exponent(s), Exponent(p), Exponent(r), ball, ball_Y, starts,
                                 tr.next());
            auto csub = cs_upper(m1, Exponent(p), Exponent(r), ball, two, 16, tr.next());
            judge(rep, "molecule-operator-ratio", seed, leq(lhs.lo, piub.hi * csub.hi),
                  tag + " (s,p,r)=(" + std::to_string(s) + "," + std::to_string(p) + "," +
                      std::to_string(r) + ")",
                  molecule_witness(m1) + " through " + map_witness(S),
                  "cs_lower(S_G m)=" + fmt(lhs.lo) + " pi*cs=" + fmt(piub.hi * csub.hi));
        }
    }
    return rep;
}

AuditReport run_all(uint64_t seed, const std::string& scale) {
    bool desk;
    if (scale == "desk") desk = true;
    else if (scale == "smoke") desk = false;
    else throw InvalidArgument("run_all: scale must be 'smoke' or 'desk'");

    // smoke trims both the trial counts and the witness-search starts; the
    // searches only feed lower bounds, so shrinking them loosens hard checks
    // instead of flipping them
    size_t starts = desk ? 32 : 8;
    AuditReport rep;
    rep.merge(check_counterexample());
    rep.merge(check_prop33(desk ? 100 : 10, seed + 1));
    rep.merge(check_compositions(desk ? 50 : 4, seed + 2, starts));
    rep.merge(check_inclusions(desk ? 50 : 4, seed + 3, starts));
    rep.merge(check_interpolation(desk ? 20 : 3, seed + 4, starts));
    rep.merge(check_stable(desk ? 50 : 8, seed + 5, desk ? 100000 : 20000));
    rep.merge(check_molecules(desk ? 100 : 12, seed + 6, starts));
    return rep;
}

} // namespace lipnorm
