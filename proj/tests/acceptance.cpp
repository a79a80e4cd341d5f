// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance <path to wfk executable> <scratch directory>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "wfk/manifest.hpp"

using namespace wfk;
namespace fs = std::filesystem;

namespace {

struct Params {
    int n, s;
    double beta, c;
};

std::vector<Params> grid() {
    std::vector<Params> out;
    for (int n : {1, 2})
        for (int s : {1, 2, 3})
            for (double b : {-1.0, 0.5, 1.0})
                for (double c : {0.0, 1.0}) out.push_back({n, s, b, c});
    return out;
}

std::string label(const Params& g) {
    std::ostringstream os;
    os << "(n=" << g.n << ", s=" << g.s << ", beta=" << g.beta << ", c=" << g.c << ")";
    return os.str();
}

std::vector<Point> points_for(const WeakFManifold& m, int count, std::uint64_t seed) {
    return sample_points({count, seed, -1.0, 1.0}, m.dim());
}

// Tracks the worst value of a quantity against a bound.
struct Tally {
    double worst = 0.0;
    std::string where;
    bool ok = true;

    void bound(double value, double limit, const std::string& ctx) {
        if (!std::isfinite(value) || value >= limit) {
            if (ok) where = ctx;
            ok = false;
        }
        if (!std::isfinite(value) || value > worst) {
            worst = value;
            if (ok) where = ctx;
        }
    }
    void require(bool cond, const std::string& ctx) {
        if (!cond && ok) where = ctx;
        ok = ok && cond;
    }
};

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome from(const Tally& t, const std::string& what) {
    std::ostringstream os;
    os << what << ", worst " << t.worst;
    if (!t.ok) os << " at " << t.where;
    return {t.ok, os.str()};
}

double report_residual(const std::vector<ResidualReport>& reps, const std::string& id) {
    for (const auto& r : reps)
        if (r.id == id) return r.residual;
    return INFINITY;
}

double value_of(const ResidualReport& r, const std::string& key) {
    for (const auto& [k, v] : r.values)
        if (k == key) return v;
    return NAN;
}

Expr vertical_potential(const WeakFManifold& m) {
    Expr v = Expr::constant(0);
    for (int p = 0; p < m.s; ++p) v = v + Expr::variable(2 * m.n + p);
    return v;
}

Outcome criterion1() {
    Tally t;
    std::uint64_t seed = 100;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        for (const auto& p : points_for(m, 5, seed++)) {
            const auto ax = check_axioms(m, p);
            t.bound(report_residual(ax, "axiom.5"), 1e-8, "axiom.5 " + label(g));
            t.bound(report_residual(ax, "axiom.6"), 1e-8, "axiom.6 " + label(g));
            t.bound(kenmotsu_residual(m, p).residual, 1e-8, "kenmotsu.12 " + label(g));
        }
    }
    return from(t, "axiom.5, axiom.6, kenmotsu.12 < 1e-8 over 36 instances x 5 points");
}

Outcome criterion2() {
    Tally t;
    std::uint64_t seed = 200;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        for (const auto& p : points_for(m, 5, seed++)) {
            const auto r = theorem1_check(m, p);
            t.bound(report_residual(r, "n1"), 1e-6, "n1 " + label(g));
            t.bound(report_residual(r, "deta"), 1e-6, "deta " + label(g));
            t.bound(report_residual(r, "dphi"), 1e-6, "dphi " + label(g));
            t.bound(std::abs(dphi_proportionality(m, p) - 2.0), 1e-6, "dPhi constant " + label(g));
        }
    }
    return from(t, "N1, d eta < 1e-6 and dPhi = 2 beta eta_bar ^ Phi (constant 2 +- 1e-6)");
}

Outcome criterion3() {
    Tally t;
    std::uint64_t seed = 300;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const double b2 = g.beta * g.beta;
        for (const auto& p : points_for(m, 5, seed++)) {
            const LocalGeometry geo(m.metric, p);
            const Eigen::MatrixXd E = geo.orthonormal_frame();
            const double k12 = geo.inner(geo.curvature(E.col(0), E.col(1), E.col(1)), E.col(0));
            t.bound(std::abs(k12 + g.s * b2), 1e-6, "g(R(e1,e2)e2,e1) " + label(g));
            const Eigen::VectorXd xb = m.xi_bar().value_at(p);
            for (const auto& xi : m.xi)
                t.bound((geo.ricci_operator() * xi.value_at(p) + 2.0 * g.n * b2 * xb).cwiseAbs().maxCoeff(), 1e-6,
                        "Ric# xi " + label(g));
            t.bound(std::abs(geo.scalar_curvature() + 2.0 * g.s * g.n * (2 * g.n + 1) * b2), 1e-6, "r " + label(g));
        }
    }
    return from(t, "sectional -s beta^2, Ric# xi_i = -2n beta^2 xi_bar, r = -2sn(2n+1) beta^2 within 1e-6");
}

Outcome criterion4() {
    Tally t;
    std::uint64_t seed = 400;
    std::vector<std::string> ids;
    for (const auto& id : identity_ids())
        if (id != "27.literal") ids.push_back(id);
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        for (const auto& p : points_for(m, 5, seed++))
            for (const auto& r : audit_identities(m, p, ids)) {
                const bool fd = r.id == "21" || r.id == "22" || r.id == "23";
                t.bound(r.residual, fd ? 1e-4 : 1e-8, "(" + r.id + ") " + label(g));
            }
    }
    return from(t, "jet identities < 1e-8, finite-difference identities 21-23 < 1e-4");
}

Outcome criterion5() {
    Tally t;
    std::uint64_t seed = 500;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        for (const auto& p : points_for(m, 5, seed++)) {
            const auto [a, b] = theorem4_residual(m, p);
            t.bound(a.residual, 1e-6, "thm4.28 " + label(g));
            t.bound(b.residual, 1e-6, "thm4.29 " + label(g));
        }
    }
    return from(t, "definitional Ric* and r* against thm4.28, thm4.29 within 1e-6");
}

Outcome criterion6() {
    Tally t;
    std::uint64_t seed = 600;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const double b2 = g.beta * g.beta;
        const double gap = (1 + g.c) * b2 * (2 * g.n * (g.s - 1) + 1 - g.s);
        const double predicted[] = {gap, 2 * g.n * gap, gap};
        for (const auto& p : points_for(m, 2, seed++)) {
            const auto reps = discrepancy_audit(m, p);
            for (std::size_t k = 0; k < reps.size(); ++k) {
                const double observed = value_of(reps[k], "oracle") - value_of(reps[k], "reference");
                t.bound(std::abs(observed - predicted[k]), 1e-6, reps[k].id + " " + label(g));
                if (g.s == 1) t.bound(std::abs(observed), 1e-6, reps[k].id + " s=1 " + label(g));
                if (g.s > 1 && g.c > 0) t.require(std::abs(observed) > 1e-6, reps[k].id + " no gap " + label(g));
            }
            t.bound(std::abs(value_of(reps[0], "oracle") + g.s * (1 + g.c) * b2), 1e-6, "oracle Ric* " + label(g));
        }
    }
    return from(t, "oracle minus reference equals (1+c) beta^2 (2n(s-1)+1-s) (x2n for r*) within 1e-6");
}

// Least squares of Hess v + Ric* = lambda B1 + mu B2 with B1 = g - sum eta eta + eta_bar eta_bar,
// B2 = eta_bar eta_bar, assembled independently of the library fit.
std::pair<double, double> gradient_fit(const WeakFManifold& m, const Expr& v, const std::vector<Point>& pts) {
    const int N = m.dim();
    Eigen::MatrixXd A(N * N * static_cast<int>(pts.size()), 2);
    Eigen::VectorXd y(A.rows());
    int row = 0;
    for (const auto& p : pts) {
        const Eigen::MatrixXd lhs = gradient_and_hessian(m.metric, v, p).second.matrix() + star_ricci(m, p).matrix();
        const Eigen::MatrixXd g = m.metric.value_at(p);
        Eigen::MatrixXd ee = Eigen::MatrixXd::Zero(N, N);
        for (const auto& e : m.eta) ee += e.value_at(p) * e.value_at(p).transpose();
        const Eigen::VectorXd eb = m.eta_bar().value_at(p);
        const Eigen::MatrixXd b2 = eb * eb.transpose();
        const Eigen::MatrixXd b1 = g - ee + b2;
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j, ++row) {
                A(row, 0) = b1(i, j);
                A(row, 1) = b2(i, j);
                y(row) = lhs(i, j);
            }
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    return {c(0), c(1)};
}

Outcome criterion7() {
    Tally t;
    std::uint64_t seed = 700;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const auto pts = points_for(m, 3, seed++);
        const double lambda = g.s * g.beta - g.s * (1 + g.c) * g.beta * g.beta;
        const SolitonFit fit = fit_soliton_constants(m, m.xi_bar(), pts);
        t.bound(std::abs(fit.lambda - lambda), 1e-6, "lambda " + label(g));
        t.bound(std::abs(fit.mu + lambda), 1e-6, "mu " + label(g));
        t.bound(fit.residual, 1e-6, "fit residual " + label(g));
        t.bound(prop5_check(fit.lambda, fit.mu).gap, 1e-5, "prop5 " + label(g));
        const std::string expected = lambda < -1e-9 ? "expanding" : lambda > 1e-9 ? "shrinking" : "steady";
        t.require(to_string(classify(fit.lambda)) == expected, "classification " + label(g));
        const auto [gl, gm] = gradient_fit(m, vertical_potential(m), pts);
        t.bound(std::abs(gl - fit.lambda), 1e-8, "gradient lambda " + label(g));
        t.bound(std::abs(gm - fit.mu), 1e-8, "gradient mu " + label(g));
    }
    return from(t, "fitted lambda = s beta - s(1+c) beta^2 = -mu, prop5 gap < 1e-5, gradient form within 1e-8");
}

Outcome criterion8() {
    Tally t;
    struct Case {
        std::string name;
        FiberSpec fiber;
        int s;
        std::string sigma;
        double beta;
    };
    const std::vector<Case> cases{
        {"flat fiber", kahler_product({1}), 1, "exp(x3)", 1.0},
        {"flat fiber, c=2", kahler_product({1}), 2, "2*exp(-0.5*(x3+x4))", -0.5},
        {"two-factor fiber", kahler_product({1, 2}), 2, "3*exp(0.5*(x5+x6))", 0.5},
        {"two-factor fiber, s=1", kahler_product({1, 2}), 1, "exp(x5)", 1.0},
        {"genuinely twisted", kahler_product({1}), 1, "exp(x3+x1^2)", 1.0},
        {"genuinely twisted, weak fiber", kahler_product({2}), 2, "exp(x3+x4)*(2+x1*x2)", 1.0},
    };
    std::uint64_t seed = 800;
    for (const auto& c : cases) {
        const int dim = 2 * c.fiber.n + c.s;
        const auto m = build_twisted_product(c.fiber, c.s, parse_expression(c.sigma, dim), Expr::constant(c.beta));
        for (const auto& p : points_for(m, 5, seed++)) {
            t.bound(kenmotsu_residual(m, p).residual, 1e-8, "kenmotsu.12 " + c.name);
            for (const auto& r : twisted_product_audit(m, p)) t.bound(r.residual, 1e-6, r.id + " " + c.name);
        }
    }
    return from(t, "kenmotsu.12 < 1e-8 with the declared beta and relations (i)-(iii) < 1e-6 on 6 products");
}

Outcome criterion9() {
    Tally t;
    std::uint64_t seed = 900;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const double b2 = g.beta * g.beta;
        for (const auto& p : points_for(m, 2, seed++)) {
            const EinsteinFit fit = eta_einstein_fit(m, p);
            t.bound(std::abs(fit.a + 2.0 * g.s * g.n * b2), 1e-6, "a " + label(g));
            t.bound(std::abs(fit.b - 2.0 * (g.s - 1) * g.n * b2), 1e-6, "b " + label(g));
            const EinsteinFit star = star_eta_einstein_fit(m, p);
            t.bound(std::abs(star.a - star_scalar(m, p) / (2.0 * g.n)), 1e-6, "a* = r*/2n " + label(g));
        }
    }
    return from(t, "a = -2sn beta^2, b = 2(s-1)n beta^2, star fit a = r*/2n within 1e-6");
}

Outcome criterion10() {
    Tally t;
    std::uint64_t seed = 1000;
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const double lambda = g.s * g.beta - g.s * (1 + g.c) * g.beta * g.beta;
        const SolitonData sol{m.xi_bar(), std::nullopt, lambda, -lambda};
        const Point p = points_for(m, 1, seed++).front();
        const auto reps = lemma2_audit(m, sol, p);
        if (g.c == 0) {
            t.bound(reps[0].residual, 1e-4, "lemma2.42 gap at c=0 " + label(g));
            t.bound(reps[2].residual, 1e-3, "lemma2.35 at c=0 " + label(g));
        } else {
            const double predicted = 2.0 * g.s * g.c * std::pow(g.beta, 3);
            t.bound(std::abs(value_of(reps[0], "d_slot_gap") / predicted - 1.0), 1e-3, "lemma2.42 D-slot gap " + label(g));
        }
        for (const auto& r : reps) t.require(r.audit, "audit flag " + label(g));
        CheckRequest req;
        req.ids = {"lemma2.42", "lemma2.34", "lemma2.35"};
        t.require(summarize(run_checks(m, sol, {p}, req)).ok(), "lemma2 affects the run verdict " + label(g));
    }
    return from(t, "lemma2.42 gap < 1e-4 at c=0 and 2sc beta^3 (rel. 1e-3) at c>0, lemma2.35 < 1e-3, report-only");
}

Outcome criterion11() {
    Tally t;
    std::mt19937 rng(1100);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& [n, s] : {std::pair{1, 2}, std::pair{1, 1}, std::pair{2, 1}}) {
        const auto m = build_example2(n, s, 1, 1);
        const int N = m.dim();
        for (int trial = 0; trial < 2; ++trial) {
            Point p(static_cast<std::size_t>(N));
            for (double& x : p) x = 0.5 * u(rng);
            const LocalGeometry geo(m.metric, p);
            const auto fd = wfk_test::fd_christoffel(m.metric, p);
            for (int l = 0; l < N; ++l)
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) {
                        t.bound(std::abs(fd[static_cast<std::size_t>((l * N + i) * N + j)] - geo.christoffel(l, i, j)),
                                1e-4, "Christoffel");
                        for (int k = 0; k < N && N <= 4; ++k)
                            t.bound(std::abs(wfk_test::fd_riemann(m.metric, p, l, i, j, k) - geo.riemann(l, i, j, k)),
                                    1e-4, "Riemann");
                    }
        }
    }
    std::mt19937 erng(20241015);
    for (int trial = 0; trial < 200; ++trial) {
        const Expr e = wfk_test::random_safe(erng, 3, 4);
        std::vector<double> p(3);
        for (double& x : p) x = u(erng);
        t.bound(wfk_test::jet_fd_error(e, p), 1e-6, "expression " + to_string(e));
    }
    return from(t, "jet vs finite-difference Gamma and R within 1e-4; 200 random expression jets within 1e-6 (rel.)");
}

int run_cli(const std::string& cmd, std::string* output = nullptr) {
    std::string text;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (!pipe) return -1;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, got);
    const int status = pclose(pipe);
    if (output) *output = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome criterion12(const std::string& wfk, const fs::path& work) {
    if (wfk.empty() || !fs::exists(wfk)) return {false, "wfk executable not found"};
    fs::create_directories(work);
    Tally t;
    const std::string exe = "\"" + wfk + "\" ";
    const fs::path e2 = work / "e2.json", r1 = work / "r1.json", r2 = work / "r2.json";
    t.require(run_cli(exe + "example2 --n 1 --s 2 --beta 1 --c 1 --out \"" + e2.string() + "\"") == 0, "example2 exit");
    for (const auto& r : {r1, r2})
        t.require(run_cli(exe + "check \"" + e2.string() + "\" --points 5 --seed 42 --reproducible --out \"" +
                          r.string() + "\"") == 0,
                  "check exit");
    t.require(slurp(r1) == slurp(r2) && !slurp(r1).empty(), "reports differ between identical runs");

    std::string manifest = slurp(e2);
    const std::string good = "\"exp(2*(x3+x4))\"";
    const auto pos = manifest.find(good);
    t.require(pos != std::string::npos, "emitted metric entry");
    if (pos != std::string::npos) {
        manifest.replace(pos, good.size(), "\"exp(2*(x3+)\"");
        std::ofstream(work / "bad_expr.json") << manifest;
        std::string out;
        t.require(run_cli(exe + "check \"" + (work / "bad_expr.json").string() + "\"", &out) == 2, "bad expression exit");
        t.require(out.find('^') != std::string::npos && out.find("metric[0][0]") != std::string::npos,
                  "bad expression span");
    }
    std::ofstream(work / "bad_json.json") << "{\"version\": \"wfk/1\",\n \"n\": 1,, \"s\": 1}";
    std::string out;
    t.require(run_cli(exe + "check \"" + (work / "bad_json.json").string() + "\"", &out) == 2, "bad JSON exit");
    t.require(out.find("line 2, column 9") != std::string::npos && out.find('^') != std::string::npos, "bad JSON span");
    return from(t, "example2 -> check exits 0 with byte-identical reports; malformed manifests exit 2 with spans");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string wfk = argc > 1 ? argv[1] : "";
    const fs::path work = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "wfk_acceptance";

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"Axioms and Kenmotsu condition", criterion1},
        {"Normality and dPhi", criterion2},
        {"Curvature suite", criterion3},
        {"Identity audit", criterion4},
        {"Star Ricci relation", criterion5},
        {"Discrepancy audit", criterion6},
        {"Soliton suite", criterion7},
        {"Twisted products", criterion8},
        {"Eta-Einstein constants", criterion9},
        {"Lie derivative audit", criterion10},
        {"Numerics hygiene", criterion11},
        {"CLI", [&] { return criterion12(wfk, work); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
