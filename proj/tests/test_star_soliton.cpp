#include <cmath>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "wfk/star_soliton.hpp"

using namespace wfk;

namespace {

Point random_point(std::mt19937& rng, int dim) {
    std::uniform_real_distribution<double> u(-1, 1);
    Point p(static_cast<std::size_t>(dim));
    for (double& x : p) x = u(rng);
    return p;
}

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

Point origin(const WeakFManifold& m) { return Point(static_cast<std::size_t>(m.dim()), 0.0); }

// Sum of the xi coordinates: grad v = xi_bar on example2.
Expr vertical_potential(const WeakFManifold& m) {
    Expr v = Expr::constant(0);
    for (int p = 0; p < m.s; ++p) v = v + Expr::variable(2 * m.n + p);
    return v;
}

double value(const ResidualReport& r, const std::string& key) {
    for (const auto& [k, v] : r.values)
        if (k == key) return v;
    FAIL("missing value " << key);
    return 0;
}

}  // namespace

TEST_CASE("star Ricci tensor on example2") {
    const auto m = build_example2(1, 2, 1, 1);
    const auto rs = star_ricci(m, origin(m));
    CHECK(rs(0, 0) == doctest::Approx(-4.0));
    CHECK(rs(1, 1) == doctest::Approx(-4.0));
    for (int p = 2; p < 4; ++p)
        for (int j = 0; j < 4; ++j) {
            CHECK(std::abs(rs(p, j)) < 1e-12);
            CHECK(std::abs(rs(j, p)) < 1e-12);
        }
    CHECK(star_scalar(m, origin(m)) == doctest::Approx(-8.0));

    const auto m1 = build_example2(1, 1, 1, 1);
    CHECK(star_ricci(m1, origin(m1))(0, 0) == doctest::Approx(-2.0));
    CHECK(star_scalar(m1, origin(m1)) == doctest::Approx(-4.0));

    const auto flat = build_twisted_product(kahler_product({1, 2}), 2, Expr::constant(1));
    CHECK(std::abs(star_scalar(flat, Point{0.1, 0.2, 0.3, 0.4, 0.5, 0.6})) < 1e-12);

    // Oracle: half trace over a g-orthonormal frame.
    const Point p{0.2, -0.3, 0.1, 0.4};
    const LocalGeometry geo(m.metric, p);
    const Eigen::MatrixXd E = geo.orthonormal_frame();
    const Eigen::MatrixXd f = m.f.value_at(p);
    const auto got = star_ricci(m, p);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double want = 0;
            for (int a = 0; a < 4; ++a)
                want += 0.5 * geo.inner(geo.curvature(Eigen::VectorXd::Unit(4, i), f.col(j), f * E.col(a)), E.col(a));
            CHECK(got(i, j) == doctest::Approx(want).epsilon(1e-10));
        }
}

TEST_CASE("star Ricci relation and symmetry gate over the grid") {
    std::mt19937 rng(21);
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        for (int t = 0; t < 2; ++t) {
            const Point p = random_point(rng, m.dim());
            INFO("n=" << g.n << " s=" << g.s << " beta=" << g.beta << " c=" << g.c);
            const auto [r28, r29] = theorem4_residual(m, p);
            CHECK(r28.residual < 1e-6);
            CHECK(r29.residual < 1e-6);
            CHECK(star_symmetry_check(m, p).pass);
            CHECK(star_trace_check(m, p).pass);
            CHECK(cor2_check(m, p).pass);
            CHECK(star_scalar(m, p) == doctest::Approx(-2.0 * g.s * g.n * (1 + g.c) * g.beta * g.beta).epsilon(1e-9));
        }
    }
    const auto flat = build_twisted_product(kahler_product({1}), 1, Expr::constant(1));
    const auto [f28, f29] = theorem4_residual(flat, Point{0.1, 0.2, 0.3});
    CHECK(f28.residual < 1e-8);
    CHECK(f29.residual < 1e-8);
}

TEST_CASE("star eta-Einstein fit") {
    const auto m = build_example2(1, 2, 1, 1);
    const auto fit = star_eta_einstein_fit(m, origin(m));
    CHECK(fit.a == doctest::Approx(-4.0));
    CHECK(fit.b == doctest::Approx(4.0));
    CHECK(fit.residual < 1e-10);
    CHECK(fit.a == doctest::Approx(star_scalar(m, origin(m)) / 2));

    const auto m1 = build_example2(1, 1, 1, 1);
    CHECK(star_eta_einstein_fit(m1, origin(m1)).a == doctest::Approx(-2.0));

    const auto flat = build_twisted_product(kahler_product({1}), 1, Expr::constant(1));
    const auto f0 = star_eta_einstein_fit(flat, Point{0.1, 0.2, 0.3});
    CHECK(std::abs(f0.a) < 1e-12);
    CHECK(std::abs(f0.b) < 1e-12);
}

TEST_CASE("soliton residuals") {
    const auto m = build_example2(1, 2, 1, 1);
    const Point p{0.2, -0.1, 0.3, 0.1};
    const SolitonData sol{m.xi_bar(), std::nullopt, -2.0, 2.0};
    const auto v = soliton_residual(m, sol, p);
    CHECK(v.residual < 1e-6);
    CHECK(v.cross_residual < 1e-6);
    CHECK(v.classification == SolitonClass::expanding);
    CHECK(to_string(v.classification) == "expanding");
    CHECK(v.prop5_gap == 0.0);

    // The reference constant -4 does not solve the equation.
    CHECK(soliton_residual(m, {m.xi_bar(), std::nullopt, -4.0, 4.0}, p).residual > 1.0);

    const auto m1 = build_example2(1, 1, 1, 1);
    CHECK(soliton_residual(m1, {m1.xi_bar(), std::nullopt, -1.0, 1.0}, Point{0.1, 0.2, 0.3}).residual < 1e-6);

    // V = 0 on the flat product: trivial soliton with lambda = mu = 0.
    const auto flat = build_twisted_product(kahler_product({1}), 1, Expr::constant(1));
    const auto z = soliton_residual(flat, {VectorField::zero(3), std::nullopt, 0.0, 0.0}, Point{0.1, 0.2, 0.3});
    CHECK(z.residual == 0.0);
    CHECK(z.classification == SolitonClass::steady);

    CHECK_THROWS_AS(soliton_residual(m, {std::nullopt, std::nullopt, 0, 0}, p), ValidationError);
}

TEST_CASE("gradient solitons") {
    const auto m = build_example2(1, 2, 1, 1);
    const Point p{0.2, -0.1, 0.3, 0.1};
    const Expr v = parse_expression("x3+x4", 4);
    const auto grad = gradient_soliton_residual(m, {std::nullopt, v, -2.0, 2.0}, p);
    CHECK(grad.residual < 1e-6);
    CHECK(grad.cross_residual < 1e-6);

    const auto m0 = build_example2(1, 1, 1, 0);
    const auto steady = gradient_soliton_residual(m0, {std::nullopt, parse_expression("x3", 3), 0.0, 0.0}, Point{0.1, 0.2, 0.3});
    CHECK(steady.residual < 1e-6);
    CHECK(steady.classification == SolitonClass::steady);

    const auto flat = build_twisted_product(kahler_product({1}), 1, Expr::constant(1));
    CHECK(gradient_soliton_residual(flat, {std::nullopt, Expr::constant(3), 0.0, 0.0}, Point{0.1, 0.2, 0.3}).residual == 0.0);

    // Gradient and vector forms agree for V = grad v, even off-soliton.
    std::mt19937 rng(22);
    for (const auto& g : grid()) {
        const auto mm = build_example2(g.n, g.s, g.beta, g.c);
        const Point q = random_point(rng, mm.dim());
        for (double lambda : {0.3, -1.0}) {
            const auto a = soliton_residual(mm, {mm.xi_bar(), std::nullopt, lambda, 0.5}, q);
            const auto b = gradient_soliton_residual(mm, {std::nullopt, vertical_potential(mm), lambda, 0.5}, q);
            CHECK(std::abs(a.residual - b.residual) < 1e-8);
        }
    }

    CHECK_THROWS_AS(gradient_soliton_residual(m, {m.xi_bar(), std::nullopt, 0, 0}, p), ValidationError);
}

TEST_CASE("fitted soliton constants over the grid") {
    const auto m = build_example2(1, 2, 1, 1);
    const auto fit = fit_soliton_constants(m, m.xi_bar(), {Point{0.1, 0.2, 0.3, 0.4}, Point{-0.3, 0.2, 0.1, 0}});
    CHECK(fit.lambda == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(fit.mu == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(fit.residual < 1e-8);
    CHECK_THROWS_AS(fit_soliton_constants(m, m.xi_bar(), {origin(m)}), ValidationError);

    const auto m1 = build_example2(1, 1, 1, 1);
    const auto fit1 = fit_soliton_constants(m1, m1.xi_bar(), {Point{0.1, 0.2, 0.3}, Point{0.3, 0.1, -0.2}});
    CHECK(fit1.lambda == doctest::Approx(-1.0));
    CHECK(fit1.mu == doctest::Approx(1.0));

    // V = 0 on an eta-Einstein instance reduces to the star fit.
    const auto z = fit_soliton_constants(m, VectorField::zero(4), {Point{0.1, 0.2, 0.3, 0.4}, origin(m)});
    CHECK(z.lambda == doctest::Approx(-4.0));
    CHECK(z.mu == doctest::Approx(4.0));

    std::mt19937 rng(23);
    for (const auto& g : grid()) {
        const auto mm = build_example2(g.n, g.s, g.beta, g.c);
        const std::vector<Point> sample{random_point(rng, mm.dim()), random_point(rng, mm.dim())};
        const auto f = fit_soliton_constants(mm, mm.xi_bar(), sample);
        const double lambda = g.s * g.beta - g.s * (1 + g.c) * g.beta * g.beta;
        INFO("n=" << g.n << " s=" << g.s << " beta=" << g.beta << " c=" << g.c);
        CHECK(std::abs(f.lambda - lambda) < 1e-6);
        CHECK(std::abs(f.mu + lambda) < 1e-6);
        CHECK(f.residual < 1e-6);
        CHECK(prop5_check(f.lambda, f.mu).gap < 1e-5);
        CHECK(classify(f.lambda) == classify(lambda));
        const auto grad = gradient_soliton_residual(mm, {std::nullopt, vertical_potential(mm), f.lambda, f.mu}, sample[0]);
        CHECK(grad.residual < 1e-8);
    }
}

TEST_CASE("classification and the lambda + mu gap") {
    CHECK(classify(-0.5) == SolitonClass::expanding);
    CHECK(classify(0.0) == SolitonClass::steady);
    CHECK(classify(1e-12) == SolitonClass::steady);
    CHECK(classify(0.5) == SolitonClass::shrinking);
    CHECK(to_string(SolitonClass::shrinking) == "shrinking");

    const auto a = prop5_check(-2, 2);
    CHECK(a.pass);
    CHECK(a.gap == 0.0);
    CHECK_FALSE(a.cor3_gap);
    const auto b = prop5_check(0, 0);
    CHECK(b.pass);
    REQUIRE(b.cor3_gap);
    CHECK(*b.cor3_gap == 0.0);
    const auto c = prop5_check(1, 1);
    CHECK_FALSE(c.pass);
    CHECK(c.gap == 2.0);
}

TEST_CASE("contact vector fields") {
    const auto m = build_example2(1, 2, 1, 1);
    const Point p{0.2, -0.1, 0.3, 0.1};
    const auto xi = contact_field_check(m, m.xi_bar(), p);
    CHECK(xi.is_contact);
    CHECK(xi.is_strict);
    CHECK(std::abs(xi.sigma) < 1e-12);

    const auto d1 = contact_field_check(m, VectorField::coordinate(4, 0), p);
    CHECK(d1.is_contact);
    CHECK(std::abs(d1.sigma) < 1e-12);

    VectorField v = VectorField::zero(4);
    v.components[2] = parse_expression("x1", 4);
    CHECK_FALSE(contact_field_check(m, v, p).is_contact);

    // Scaling V = t d_t on the classical line factor: L_V dt = dt.
    const auto m0 = build_example2(1, 1, 1, 0);
    VectorField w = VectorField::zero(3);
    w.components[2] = parse_expression("x3", 3);
    const auto sc = contact_field_check(m0, w, Point{0.1, 0.2, 0.3});
    CHECK(sc.is_contact);
    CHECK_FALSE(sc.is_strict);
    CHECK(sc.sigma == doctest::Approx(1.0));
}

TEST_CASE("Lie derivative audit") {
    const auto m = build_example2(1, 2, 1, 1);
    const Point p{0.1, 0.2, 0.1, -0.1};
    const auto reps = lemma2_audit(m, {m.xi_bar(), std::nullopt, -2.0, 2.0}, p);
    REQUIRE(reps.size() == 3);
    CHECK(reps[0].id == "lemma2.42");
    CHECK(reps[0].audit);
    CHECK(value(reps[0], "d_slot_gap") == doctest::Approx(4.0).epsilon(1e-3));
    CHECK(value(reps[0], "predicted_gap") == doctest::Approx(4.0));
    CHECK(reps[0].flagged);
    CHECK(reps[0].note.empty());

    const auto m0 = build_example2(1, 1, 1, 0);
    const auto r0 = lemma2_audit(m0, {m0.xi_bar(), std::nullopt, 0.0, 0.0}, Point{0.1, 0.2, 0.3});
    CHECK(r0[0].residual < 1e-4);
    CHECK(r0[2].id == "lemma2.35");
    CHECK(r0[2].residual < 1e-3);
    for (const auto& r : r0) CHECK(r.audit);

    // Off-hypothesis input is reported, not rejected.
    const auto off = lemma2_audit(m, {m.xi_bar(), std::nullopt, 5.0, 0.0}, p);
    CHECK_FALSE(off[0].note.empty());
}

TEST_CASE("example2 discrepancy audit") {
    std::mt19937 rng(24);
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const Point p = random_point(rng, m.dim());
        const auto reps = discrepancy_audit(m, p);
        REQUIRE(reps.size() == 3);
        const double gap = (1 + g.c) * g.beta * g.beta * (2 * g.n * (g.s - 1) + 1 - g.s);
        INFO("n=" << g.n << " s=" << g.s << " beta=" << g.beta << " c=" << g.c);
        for (const auto& r : reps) CHECK(r.pass);
        CHECK(value(reps[0], "oracle") == doctest::Approx(-g.s * (1 + g.c) * g.beta * g.beta));
        CHECK(value(reps[0], "gap") == doctest::Approx(gap).epsilon(1e-9));
        CHECK(value(reps[1], "gap") == doctest::Approx(2 * g.n * gap).epsilon(1e-9));
        CHECK(value(reps[2], "gap") == doctest::Approx(gap).epsilon(1e-9));
        if (g.s == 1) {
            for (const auto& r : reps) CHECK(std::abs(value(r, "gap")) < 1e-6);
        }
    }
    const auto m = build_example2(1, 2, 1, 1);
    const auto reps = discrepancy_audit(m, origin(m));
    CHECK(value(reps[0], "reference") == doctest::Approx(-6.0));
    CHECK(value(reps[1], "reference") == doctest::Approx(-12.0));
    CHECK(value(reps[2], "reference") == doctest::Approx(-4.0));
    CHECK(value(reps[2], "oracle") == doctest::Approx(-2.0));
    for (const auto& r : reps) CHECK(r.flagged);
}

TEST_CASE("eta-Einstein constants with V = xi_bar") {
    std::mt19937 rng(25);
    for (const auto& g : grid()) {
        const auto m = build_example2(g.n, g.s, g.beta, g.c);
        const Point p = random_point(rng, m.dim());
        const auto contact = contact_field_check(m, m.xi_bar(), p);
        CHECK(contact.is_strict);
        const auto fit = eta_einstein_fit(m, p);
        const double b2 = g.beta * g.beta;
        CHECK(std::abs(fit.a + 2 * g.s * g.n * b2) < 1e-6);
        CHECK(std::abs(fit.b - 2 * (g.s - 1) * g.n * b2) < 1e-6);
        CHECK(std::abs(scalar_curvature(m.metric, p) + 2 * g.s * g.n * (2 * g.n + 1) * b2) < 1e-6);
    }
}

TEST_CASE("golden example2 values") {
    std::ifstream in(std::string(WFK_TEST_DATA) + "/example2_golden.json");
    REQUIRE(in);
    const auto doc = nlohmann::json::parse(in);
    REQUIRE(doc["cases"].size() >= 5);
    for (const auto& c : doc["cases"]) {
        const int n = c["n"], s = c["s"];
        const double beta = c["beta"], cc = c["c"];
        const auto m = build_example2(n, s, beta, cc);
        const Point p(static_cast<std::size_t>(m.dim()), 0.1);
        INFO("n=" << n << " s=" << s << " beta=" << beta << " c=" << cc);
        const auto& oracle = c["oracle"];
        const auto& reference = c["paper_printed"];
        const auto& gap = c["predicted_gap"];

        const auto disc = discrepancy_audit(m, p);
        CHECK(value(disc[0], "oracle") == doctest::Approx(oracle["ric_star_e1"].get<double>()).epsilon(1e-9));
        CHECK(value(disc[1], "oracle") == doctest::Approx(oracle["r_star"].get<double>()).epsilon(1e-9));
        CHECK(value(disc[2], "oracle") == doctest::Approx(oracle["lambda"].get<double>()).epsilon(1e-9));
        CHECK(value(disc[0], "reference") == doctest::Approx(reference["ric_star_e1"].get<double>()));
        CHECK(value(disc[1], "reference") == doctest::Approx(reference["r_star"].get<double>()));
        CHECK(value(disc[2], "reference") == doctest::Approx(reference["lambda"].get<double>()));
        // Reference values differ from the oracle by the predicted gap, and agree for s = 1.
        for (const auto& [idx, key] : {std::pair{0, "ric_star_e1"}, {1, "r_star"}, {2, "lambda"}}) {
            const double diff = oracle[key].get<double>() - reference[key].get<double>();
            CHECK(std::abs(diff - gap[key].get<double>()) < 1e-12);
            CHECK(std::abs(value(disc[static_cast<std::size_t>(idx)], "gap") - diff) < 1e-6);
            if (s == 1) CHECK(std::abs(diff) < 1e-12);
            if (s > 1 && cc > 0) CHECK(std::abs(diff) > 1e-6);
        }

        const auto fit = eta_einstein_fit(m, p);
        CHECK(fit.a == doctest::Approx(oracle["a"].get<double>()).epsilon(1e-9));
        CHECK(std::abs(fit.b - oracle["b"].get<double>()) < 1e-9);
        CHECK(scalar_curvature(m.metric, p) == doctest::Approx(oracle["r"].get<double>()).epsilon(1e-9));
    }
}
