#include "wfk/catalogue.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "wfk/errors.hpp"

namespace wfk {

namespace {

enum class Needs { none, twisted, constant_beta, example2, vector_field, potential, soliton };

struct Entry {
    CheckInfo info;
    std::string group;
    Needs needs;
};

const std::vector<Entry>& entries() {
    using K = CheckKind;
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t;
        auto add = [&](std::string id, std::string module, K kind, double tol, std::string summary, std::string group,
                       Needs needs) {
            t.push_back({{std::move(id), std::move(module), kind, tol, std::move(summary)}, std::move(group), needs});
        };
        add("geom.compat", "geometry", K::identity, 1e-9, "D g = 0", "geom", Needs::none);
        add("geom.bianchi1", "geometry", K::identity, 1e-8, "first Bianchi identity", "geom", Needs::none);
        add("geom.contracted_bianchi", "geometry", K::identity, 1e-5, "dr = 2 div Ric", "geom", Needs::none);

        for (const char* id : {"axiom.5", "axiom.6", "axiom.f_xi", "axiom.eta_f", "axiom.eta_Q", "axiom.Qf", "axiom.Q_xi",
                               "axiom.g_xi", "axiom.f3", "axiom.dual", "axiom.f_skew", "axiom.Q_sym"})
            add(id, "weakf", K::identity, 1e-8, "weak metric f-structure axiom", "axioms", Needs::none);
        add("n1", "weakf", K::identity, 1e-6, "normality tensor vanishes", "thm1", Needs::none);
        add("deta", "weakf", K::identity, 1e-6, "d eta^i = 0", "thm1", Needs::none);
        add("dphi", "weakf", K::identity, 1e-6, "dPhi = 2 beta eta_bar ^ Phi", "thm1", Needs::none);
        add("prop1.10", "weakf", K::identity, 1e-8, "D_xi_i xi_j in D and antisymmetric", "prop1", Needs::none);

        add("kenmotsu.12", "kenmotsu", K::identity, 1e-8, "weak beta f-Kenmotsu condition", "kenmotsu", Needs::none);
        for (const auto& id : identity_ids()) {
            const bool fd = id == "21" || id == "22" || id == "23";
            if (id == "27.literal")
                add(id, "kenmotsu", K::audit, 1e-8, "uncorrected R_{fX,fY} identity", "identities", Needs::constant_beta);
            else
                add(id, "kenmotsu", K::identity, fd ? 1e-4 : 1e-8, "Kenmotsu curvature identity", "identities",
                    Needs::constant_beta);
        }
        add("twisted.i", "kenmotsu", K::identity, 1e-6, "twisted product relation (i)", "twisted", Needs::twisted);
        add("twisted.ii", "kenmotsu", K::identity, 1e-6, "twisted product relation (ii)", "twisted", Needs::twisted);
        add("twisted.iii", "kenmotsu", K::identity, 1e-6, "twisted product relation (iii)", "twisted", Needs::twisted);
        add("einstein.11", "kenmotsu", K::instance, 1e-8, "Ric is eta-Einstein", "einstein11", Needs::example2);
        add("einstein.24", "kenmotsu", K::instance, 1e-8, "eta-Einstein closed form", "einstein24", Needs::example2);
        add("einstein.thm67", "kenmotsu", K::instance, 1e-6, "a, b and r closed forms", "einstein67", Needs::example2);

        add("star.def", "star-soliton", K::identity, 1e-6, "Ric* symmetric and [Ric#, Q] = 0", "stardef",
            Needs::constant_beta);
        add("star.30", "star-soliton", K::identity, 1e-6, "first-Bianchi traces of Ric*", "star30", Needs::none);
        add("thm4.28", "star-soliton", K::identity, 1e-6, "Ric* against Ric(X, QY)", "thm4", Needs::constant_beta);
        add("thm4.29", "star-soliton", K::identity, 1e-6, "r* against trace(Q Ric#)", "thm4", Needs::constant_beta);
        add("cor2", "star-soliton", K::instance, 1e-6, "Ric* = (r*/2n)(g - sum eta eta)", "cor2", Needs::example2);
        add("soliton.32", "star-soliton", K::identity, 1e-6, "star eta-Ricci soliton equation", "soliton",
            Needs::vector_field);
        add("soliton.33", "star-soliton", K::identity, 1e-6, "expanded soliton equation", "soliton", Needs::vector_field);
        add("grad.75", "star-soliton", K::identity, 1e-6, "gradient soliton equation", "gradient", Needs::potential);
        add("grad.77", "star-soliton", K::identity, 1e-6, "gradient soliton, vector form", "gradient", Needs::potential);
        add("prop5", "star-soliton", K::identity, 1e-5, "lambda + mu = 0", "prop5", Needs::soliton);
        add("contact.65", "star-soliton", K::audit, 1e-8, "L_V eta^i = sigma eta^i", "contact", Needs::vector_field);
        add("lemma2.42", "star-soliton", K::audit, 1e-4, "L_V D along xi_i against its closed form", "lemma2",
            Needs::vector_field);
        add("lemma2.34", "star-soliton", K::audit, 1e-3, "L_V R along xi_i against its closed form", "lemma2",
            Needs::vector_field);
        add("lemma2.35", "star-soliton", K::audit, 1e-3, "(L_V R)(X, xi_j) xi_i = 0", "lemma2", Needs::vector_field);
        add("disc.ricstar", "star-soliton", K::audit, 1e-6, "reference Ric* gap", "disc", Needs::example2);
        add("disc.rstar", "star-soliton", K::audit, 1e-6, "reference r* gap", "disc", Needs::example2);
        add("disc.lambda", "star-soliton", K::audit, 1e-6, "reference soliton constant gap", "disc", Needs::example2);
        return t;
    }();
    return table;
}

const Entry* find_entry(std::string_view id) {
    for (const auto& e : entries())
        if (e.info.id == id) return &e;
    return nullptr;
}

bool satisfied(Needs needs, const WeakFManifold& m, const std::optional<SolitonData>& sol) {
    const bool constant = m.beta.is_constant();
    switch (needs) {
        case Needs::none: return true;
        case Needs::twisted: return m.twisted.has_value();
        case Needs::constant_beta: return constant;
        case Needs::example2: return constant && m.c.has_value();
        case Needs::vector_field: return constant && sol && sol->V;
        case Needs::potential: return constant && sol && sol->potential;
        case Needs::soliton: return sol.has_value();
    }
    return false;
}

std::string requirement(Needs needs) {
    switch (needs) {
        case Needs::none: return "";
        case Needs::twisted: return "a twisted product manifest";
        case Needs::constant_beta: return "a constant beta";
        case Needs::example2: return "a constant beta and the example2 parameter c";
        case Needs::vector_field: return "a constant beta and a soliton block with V";
        case Needs::potential: return "a constant beta and a soliton block with a potential";
        case Needs::soliton: return "a soliton block";
    }
    return "";
}

std::vector<ResidualReport> geometry_checks(const WeakFManifold& m, const Point& p) {
    const LocalGeometry geo(m.metric, p);
    const int n = geo.dim();
    double bianchi = 0.0;
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    bianchi = std::max(bianchi, std::abs(geo.riemann(l, i, j, k) + geo.riemann(l, j, k, i) +
                                                         geo.riemann(l, k, i, j)));
    const Eigen::VectorXd dr = scalar_curvature_gradient(m.metric, p);
    const Eigen::VectorXd div = ricci_divergence(m.metric, p);
    return {make_report("geom.compat", p, geo.metric_compatibility_residual(), 1e-9),
            make_report("geom.bianchi1", p, bianchi, 1e-8),
            make_report("geom.contracted_bianchi", p, (dr - 2 * div).cwiseAbs().maxCoeff(), 1e-5)};
}

std::vector<ResidualReport> run_group(const std::string& group, const WeakFManifold& m,
                                      const std::optional<SolitonData>& sol, const Point& p,
                                      const std::vector<std::string>& ids) {
    if (group == "geom") return geometry_checks(m, p);
    if (group == "axioms") return check_axioms(m, p);
    if (group == "thm1") return theorem1_check(m, p);
    if (group == "prop1") return {prop1_check(m, p)};
    if (group == "kenmotsu") return {kenmotsu_residual(m, p)};
    if (group == "identities") return audit_identities(m, p, ids);
    if (group == "twisted") return twisted_product_audit(m, p);
    if (group == "einstein11") return {einstein11_check(m, p)};
    if (group == "einstein24") return {einstein24_check(m, p)};
    if (group == "einstein67") return {einstein_constants_check(m, p)};
    if (group == "stardef") return {star_symmetry_check(m, p)};
    if (group == "star30") return {star_trace_check(m, p)};
    if (group == "thm4") {
        auto [a, b] = theorem4_residual(m, p);
        return {a, b};
    }
    if (group == "cor2") return {cor2_check(m, p)};
    if (group == "soliton" || group == "gradient") {
        const bool grad = group == "gradient";
        const SolitonVerdict v = grad ? gradient_soliton_residual(m, *sol, p) : soliton_residual(m, *sol, p);
        ResidualReport a = make_report(grad ? "grad.75" : "soliton.32", p, v.residual, 1e-6);
        ResidualReport b = make_report(grad ? "grad.77" : "soliton.33", p, v.cross_residual, 1e-6);
        for (auto* r : {&a, &b}) {
            r->note = to_string(v.classification);
            r->values = {{"lambda", sol->lambda}, {"mu", sol->mu}};
        }
        return {a, b};
    }
    if (group == "prop5") {
        const Prop5Result r = prop5_check(sol->lambda, sol->mu);
        ResidualReport rep = make_report("prop5", p, std::max(r.gap, r.cor3_gap.value_or(0.0)), 1e-5);
        rep.values = {{"gap", r.gap}};
        if (r.cor3_gap) rep.values.push_back({"cor3_gap", *r.cor3_gap});
        return {rep};
    }
    if (group == "contact") {
        const ContactVerdict c = contact_field_check(m, *sol->V, p);
        ResidualReport rep = make_report("contact.65", p, c.residual, 1e-8, true);
        rep.values = {{"sigma", c.sigma}};
        rep.note = c.is_strict ? "strictly contact" : c.is_contact ? "contact" : "not contact";
        return {rep};
    }
    if (group == "lemma2") return lemma2_audit(m, *sol, p);
    if (group == "disc") return discrepancy_audit(m, p);
    throw std::logic_error("unknown check group " + group);
}

}  // namespace

std::string to_string(CheckKind k) {
    switch (k) {
        case CheckKind::identity: return "identity";
        case CheckKind::instance: return "instance";
        case CheckKind::audit: return "audit";
    }
    return "identity";
}

const std::vector<CheckInfo>& check_catalogue() {
    static const std::vector<CheckInfo> infos = [] {
        std::vector<CheckInfo> out;
        for (const auto& e : entries()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

const CheckInfo* find_check(std::string_view id) {
    const Entry* e = find_entry(id);
    return e ? &e->info : nullptr;
}

std::vector<std::string> default_checks(const WeakFManifold& m, const std::optional<SolitonData>& sol) {
    std::vector<std::string> out;
    for (const auto& e : entries())
        if (satisfied(e.needs, m, sol)) out.push_back(e.info.id);
    return out;
}

std::vector<CheckRecord> run_checks(const WeakFManifold& m, const std::optional<SolitonData>& sol,
                                    const std::vector<Point>& points, const CheckRequest& request) {
    const std::vector<std::string> ids = request.ids.empty() ? default_checks(m, sol) : request.ids;
    for (const auto& [id, tol] : request.tolerances)
        if (!find_entry(id)) throw std::invalid_argument("unknown check id in tolerance override: " + id);

    // Group the requested ids, keeping catalogue order.
    std::set<std::string> wanted;
    std::vector<std::string> groups;
    std::map<std::string, std::vector<std::string>> group_ids;
    for (const auto& id : ids) {
        const Entry* e = find_entry(id);
        if (!e) throw std::invalid_argument("unknown check id: " + id);
        if (!satisfied(e->needs, m, sol)) throw ValidationError("check " + id + " needs " + requirement(e->needs));
        if (!wanted.insert(id).second) continue;
        if (std::find(groups.begin(), groups.end(), e->group) == groups.end()) groups.push_back(e->group);
        group_ids[e->group].push_back(id);
    }

    std::vector<CheckRecord> out;
    for (std::size_t k = 0; k < points.size(); ++k) {
        for (const auto& group : groups) {
            if (group == "prop5" && k > 0) continue;  // point independent
            for (ResidualReport& r : run_group(group, m, sol, points[k], group_ids[group])) {
                if (!wanted.count(r.id)) continue;
                if (auto it = request.tolerances.find(r.id); it != request.tolerances.end()) {
                    r.tolerance = it->second;
                    r.pass = std::isfinite(r.residual) && r.residual < r.tolerance;
                    if (r.id == "27.literal" || r.id.rfind("lemma2.", 0) == 0) r.flagged = !r.pass;
                }
                out.push_back({std::move(r), static_cast<int>(k)});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CheckRecord& a, const CheckRecord& b) {
        if (a.report.id != b.report.id) return a.report.id < b.report.id;
        return a.point_index < b.point_index;
    });
    return out;
}

RunSummary summarize(const std::vector<CheckRecord>& records) {
    RunSummary s;
    for (const auto& r : records) {
        if (r.report.audit) {
            ++s.audits;
            if (r.report.flagged) ++s.flagged;
        } else if (r.report.pass) {
            ++s.pass;
        } else {
            ++s.fail;
        }
    }
    return s;
}

}  // namespace wfk
