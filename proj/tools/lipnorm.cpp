#include "lipnorm/audit.hpp"
#include "lipnorm/molecule.hpp"
#include "lipnorm/stable.hpp"
#include "lipnorm/summing.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lipnorm;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void print_norm(const std::string& label, const NormValue& v, double secs) {
    std::ostringstream os;
    os.precision(12);
    os << label << " value=" << v.value;
    if (v.power) os << " power=" << rat_str(*v.power);
    os << " status=" << status_str(v.status) << " lo=" << v.lo << " hi=" << v.hi
       << " method=" << v.method << " time=" << secs << "s";
    std::cout << os.str() << "\n";
}

int paper_check() {
    Timer timer;
    int failures = 0;
    auto line = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "pass " : "FAIL ") << name << ": " << detail << "\n";
        if (!ok) ++failures;
    };

    auto inst = counterexample_instance();
    auto ball_X = enumerate_vertices(inst.X);
    auto ball_Y = enumerate_vertices(inst.Y);
    PointMap IY = identity_map(inst.Y);

    Rat p1 = *pi_p_exact(inst.S, Exponent(1), ball_X).power;
    Rat p2 = *pi_p_exact(inst.S, Exponent(2), ball_X).power;
    Rat py = *pi_p_exact(IY, Exponent(2), ball_Y).power;
    line("pi_1(S) = 5/2", p1 == Rat(5, 2), "computed " + rat_str(p1));
    line("pi_2(S)^2 = 9/2", p2 == Rat(9, 2), "computed " + rat_str(p2));
    line("pi_2(I_Y)^2 = 11/8", py == Rat(11, 8), "computed " + rat_str(py));
    line("counterexample 25/4 > 99/16", p1 * p1 == Rat(25, 4) && p2 * py == Rat(99, 16) &&
                                            p1 * p1 > p2 * py,
         "pi_1(S)^2 = " + rat_str(p1 * p1) + ", pi_2(S)^2 pi_2(I_Y)^2 = " + rat_str(p2 * py));

    for (size_t n = 2; n <= 6; ++n) {
        auto Dn = discrete_space(n);
        auto ball = enumerate_vertices(Dn);
        PointMap I = identity_map(Dn);
        Rat published = Rat(2) - Rat(2, (long)n);
        for (long r = 1; r <= 3; ++r) {
            Rat pw = *pi_p_exact(I, Exponent(r), ball).power;
            line("pi_" + std::to_string(r) + "(I_D" + std::to_string(n) + ")^" +
                     std::to_string(r) + " = " + rat_str(published),
                 pw == published, "computed " + rat_str(pw));
        }
    }

    {
        auto val = pi_msq_p(inst.S, Exponent(4), Exponent(3), Exponent(2), ball_X, ball_Y);
        bool ok = std::fabs(val.hi - 2.029663590) <= 1e-6 && val.lo >= 2 - 1e-9;
        std::ostringstream os;
        os.precision(12);
        os << "computed [" << val.lo << ", " << val.hi << "]";
        line("pi_(m(4;3),2)(S) in [2, 2.029663590]", ok, os.str());
    }

    const std::pair<long, long> sp[] = {{2, 1}, {4, 3}};
    for (size_t n = 2; n <= 4; ++n) {
        auto Dn = discrete_space(n);
        auto ball = enumerate_vertices(Dn);
        PointMap I = identity_map(Dn);
        for (const auto& [s, p] : sp) {
            auto val = pi_msq_p(I, Exponent(s), Exponent(p), Exponent(p), ball, ball);
            double target = std::pow(2.0 - 2.0 / (double)n, 1.0 / (double)p - 1.0 / (double)s);
            bool ok = val.lo <= target * (1 + 1e-9) + 1e-12 &&
                      target <= val.hi * (1 + 1e-9) + 1e-12 && val.width() < 1e-3;
            std::ostringstream os;
            os.precision(12);
            os << "expected " << target << ", computed [" << val.lo << ", " << val.hi << "]";
            line("pi_(m(" + std::to_string(s) + ";" + std::to_string(p) + ")," +
                     std::to_string(p) + ")(I_D" + std::to_string(n) + ") = (2-2/n)^(1/p-1/s)",
                 ok, os.str());
        }
    }

    std::ostringstream os;
    os.precision(4);
    os << "paper-check " << (failures ? "FAILED" : "passed") << " (" << failures
       << " mismatches, " << timer.seconds() << "s)";
    std::cout << os.str() << "\n";
    return failures ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified Lipschitz summing-norm calculator for finite metric spaces"};
    app.require_subcommand(1);

    std::string space_path, domain_path, codomain_path, map_path, seq_path, mol_path;
    std::string kind, norm_name, check_name, scale = "desk";
    std::string p_str = "1", s_str = "inf", q_str = "1", r_str;
    uint64_t seed = 0;
    size_t trials = 50, samples = 100000;
    double tolerance = 1e-9;
    app.add_option("--tolerance", tolerance, "gap tolerance for iterative solvers");

    auto* c_validate = app.add_subcommand("validate", "check a metric space file");
    c_validate->add_option("space", space_path, "space JSON file")->required();

    auto* c_vertices = app.add_subcommand("vertices", "enumerate Lipschitz ball vertices");
    c_vertices->add_option("space", space_path)->required();

    auto* c_lip = app.add_subcommand("lip", "Lipschitz constant of a map");
    c_lip->add_option("domain", domain_path)->required();
    c_lip->add_option("codomain", codomain_path)->required();
    c_lip->add_option("map", map_path)->required();

    auto* c_seq = app.add_subcommand("seq-norm", "norm of a weighted pair sequence");
    c_seq->add_option("--kind", kind, "strong|weak|mixed-sup|mixed-inf")->required();
    c_seq->add_option("--p", p_str);
    c_seq->add_option("--s", s_str);
    c_seq->add_option("--q", q_str);
    c_seq->add_option("--seed", seed);
    c_seq->add_option("space", space_path)->required();
    c_seq->add_option("sequence", seq_path)->required();

    auto* c_sum = app.add_subcommand("summing", "summing norm of a map");
    c_sum->add_option("--kind", kind, "pi_p|p_ms|p_msq|msq_p")->required();
    c_sum->add_option("--p", p_str);
    c_sum->add_option("--s", s_str);
    c_sum->add_option("--q", q_str);
    c_sum->add_option("--r", r_str);
    c_sum->add_option("--seed", seed);
    c_sum->add_option("domain", domain_path)->required();
    c_sum->add_option("codomain", codomain_path)->required();
    c_sum->add_option("map", map_path)->required();

    auto* c_mol = app.add_subcommand("molecule", "Chevet-Saphar norm of a molecule");
    c_mol->add_option("--norm", norm_name, "cs_p|cs_pr")->required();
    c_mol->add_option("--p", p_str);
    c_mol->add_option("--r", r_str);
    c_mol->add_option("--seed", seed);
    c_mol->add_option("space", space_path)->required();
    c_mol->add_option("molecule", mol_path)->required();

    auto* c_stable = app.add_subcommand("stable", "stable-law Monte Carlo checks");
    c_stable->add_option("--check", check_name, "moment|type")->required();
    c_stable->add_option("--s", s_str)->required();
    c_stable->add_option("--p", p_str)->required();
    c_stable->add_option("--samples", samples);
    c_stable->add_option("--trials", trials);
    c_stable->add_option("--seed", seed);
    c_stable->add_option("domain", domain_path);
    c_stable->add_option("codomain", codomain_path);
    c_stable->add_option("map", map_path);

    auto* c_audit = app.add_subcommand("audit", "randomized theorem audit");
    c_audit->add_option("--check", check_name,
                        "prop33|compositions|inclusions|interpolation|counterexample|stable|"
                        "molecules (default: all)");
    c_audit->add_option("--trials", trials);
    c_audit->add_option("--seed", seed);
    c_audit->add_option("--scale", scale, "smoke|desk");

    app.add_subcommand("paper-check", "recompute every headline value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    auto* sub = app.get_subcommands().front();

    try {
        Timer timer;
        if (sub == c_validate) {
            auto space = space_from_json(slurp(space_path));
            std::cout << "ok name=" << space->name() << " points=" << space->n()
                      << " base=" << space->points()[space->base()] << "\n";
            return 0;
        }
        if (sub == c_vertices) {
            auto space = space_from_json(slurp(space_path));
            auto ball = enumerate_vertices(space);
            for (const auto& v : ball.vertices()) {
                std::ostringstream os;
                for (size_t i = 0; i < v.values.size(); ++i)
                    os << (i ? " " : "") << space->points()[i] << "=" << rat_str(v.values[i]);
                std::cout << os.str() << "\n";
            }
            return 0;
        }
        if (sub == c_lip) {
            auto dom = space_from_json(slurp(domain_path));
            auto cod = space_from_json(slurp(codomain_path));
            auto map = map_from_json(slurp(map_path), dom, cod);
            Rat lip = lipschitz_constant(map);
            std::ostringstream os;
            os.precision(12);
            os << "lip value=" << to_double(lip) << " exact=" << rat_str(lip) << " time="
               << timer.seconds() << "s";
            std::cout << os.str() << "\n";
            return 0;
        }
        if (sub == c_seq) {
            auto space = space_from_json(slurp(space_path));
            auto seq = seq_from_json(slurp(seq_path), space);
            auto ball = enumerate_vertices(space);
            NormValue v;
            if (kind == "strong") v = strong_norm(seq, parse_exponent(p_str));
            else if (kind == "weak") v = weak_norm(seq, parse_exponent(p_str), ball);
            else if (kind == "mixed-sup")
                v = mixed_norm_sup(seq, parse_exponent(s_str), parse_exponent(q_str), ball,
                                   tolerance);
            else if (kind == "mixed-inf")
                v = mixed_norm_inf(seq, parse_exponent(s_str), parse_exponent(q_str), ball, 32,
                                   seed + 1);
            else throw CLI::ValidationError("--kind", "unknown sequence norm '" + kind + "'");
            print_norm("seq-norm kind=" + kind, v, timer.seconds());
            return 0;
        }
        if (sub == c_sum) {
            auto dom = space_from_json(slurp(domain_path));
            auto cod = space_from_json(slurp(codomain_path));
            auto map = map_from_json(slurp(map_path), dom, cod);
            auto ball = enumerate_vertices(dom);
            NormValue v;
            if (kind == "pi_p") v = pi_p_exact(map, parse_exponent(p_str), ball);
            else if (kind == "p_ms")
                v = pi_ps_exact(map, parse_exponent(p_str), parse_exponent(s_str), ball);
            else if (kind == "p_msq")
                v = pi_p_msq_lower(map, parse_exponent(p_str), parse_exponent(s_str),
                                   parse_exponent(q_str), ball, 64, seed + 7);
            else if (kind == "msq_p") {
                auto ball_cod = enumerate_vertices(cod);
                v = pi_msq_p(map, parse_exponent(s_str), parse_exponent(q_str),
                             parse_exponent(r_str.empty() ? p_str : r_str), ball, ball_cod, 64,
                             seed + 7);
            } else throw CLI::ValidationError("--kind", "unknown summing kind '" + kind + "'");
            print_norm("summing kind=" + kind, v, timer.seconds());
            return 0;
        }
        if (sub == c_mol) {
            auto space = space_from_json(slurp(space_path));
            auto m = molecule_from_json(slurp(mol_path), space);
            auto ball = enumerate_vertices(space);
            Exponent p = parse_exponent(p_str);
            std::optional<Exponent> r;
            if (norm_name == "cs_pr") {
                if (r_str.empty()) throw CLI::ValidationError("--r", "cs_pr needs --r");
                r = parse_exponent(r_str);
            } else if (norm_name != "cs_p")
                throw CLI::ValidationError("--norm", "unknown norm '" + norm_name + "'");
            auto u = cs_upper(m, p, r, ball, Exponent(2), 32, seed + 5);
            print_norm("molecule norm=" + norm_name + " bound=upper", u, timer.seconds());
            if (!r) {
                auto l = cs_lower(m, p, ball, Exponent(2), 32, seed + 5);
                print_norm("molecule norm=" + norm_name + " bound=lower", l, timer.seconds());
            }
            return 0;
        }
        if (sub == c_stable) {
            double s = parse_exponent(s_str).to_double(), p = parse_exponent(p_str).to_double();
            if (check_name == "moment") {
                Rng rng(seed);
                std::vector<std::vector<double>> vecs(3, std::vector<double>(1));
                double exact = 0;
                for (auto& v : vecs) {
                    v[0] = rng.uniform(0.5, 2.0);
                    exact += std::pow(v[0], s);
                }
                exact = std::pow(exact, 1.0 / s);
                auto est = type_functional(
                    vecs, [](const std::vector<double>& y) { return std::fabs(y[0]); }, s, p,
                    samples, seed + 1);
                double z = std::fabs(est.value - exact) / std::max(est.se, 1e-15);
                std::ostringstream os;
                os.precision(12);
                os << "stable moment estimate=" << est.value << " se=" << est.se
                   << " exact=" << exact << " z=" << z << " c_sp=" << c_sp(s, p) << " time="
                   << timer.seconds() << "s";
                std::cout << os.str() << "\n";
                return z <= 3.0 ? 0 : 1;
            }
            if (check_name == "type") {
                if (map_path.empty())
                    throw CLI::ValidationError("map", "type check needs domain/codomain/map files");
                auto dom = space_from_json(slurp(domain_path));
                auto cod = space_from_json(slurp(codomain_path));
                auto map = map_from_json(slurp(map_path), dom, cod);
                auto ball = enumerate_vertices(cod);
                double tl = type_constant_lower(map, ball, s, p, trials, samples, seed);
                std::ostringstream os;
                os.precision(12);
                os << "stable type-constant lower=" << tl << " status=lower time="
                   << timer.seconds() << "s";
                std::cout << os.str() << "\n";
                return 0;
            }
            throw CLI::ValidationError("--check", "unknown stable check '" + check_name + "'");
        }
        if (sub == c_audit) {
            AuditReport rep;
            size_t starts = scale == "smoke" ? 8 : 32;
            if (check_name.empty() || check_name == "all") rep = run_all(seed, scale);
            else if (check_name == "prop33") rep = check_prop33(trials, seed);
            else if (check_name == "compositions") rep = check_compositions(trials, seed, starts);
            else if (check_name == "inclusions") rep = check_inclusions(trials, seed, starts);
            else if (check_name == "interpolation") rep = check_interpolation(trials, seed, starts);
            else if (check_name == "counterexample") rep = check_counterexample();
            else if (check_name == "stable")
                rep = check_stable(trials, seed, scale == "smoke" ? 20000 : 100000);
            else if (check_name == "molecules") rep = check_molecules(trials, seed, starts);
            else throw CLI::ValidationError("--check", "unknown check '" + check_name + "'");
            std::cout << rep.to_text();
            std::ostringstream os;
            os.precision(4);
            os << "time=" << timer.seconds() << "s";
            std::cout << os.str() << "\n";
            return rep.ok() ? 0 : 1;
        }
        return paper_check();
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
