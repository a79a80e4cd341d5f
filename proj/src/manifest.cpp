#include "wfk/manifest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <random>
#include <sstream>

#include <openssl/evp.h>

namespace wfk {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ManifestError(where + ": " + what); }

const json& member(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where, "missing field \"" + key + "\"");
    return *it;
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "expected a finite number");
    return x;
}

Expr expression(const json& v, int dim, const std::string& where) {
    if (v.is_number()) return Expr::constant(number(v, where));
    if (!v.is_string()) fail(where, "expected an expression string");
    const std::string text = v.get<std::string>();
    try {
        return parse_expression(text, dim);
    } catch (const ParseError& err) {
        fail(where, std::string(err.what()) + "\n" + caret_line(text, err.span()));
    }
}

// A constant expression (number or string), e.g. lambda and mu.
double constant(const json& v, int dim, const std::string& where, const std::string& what) {
    const Expr e = expression(v, dim, where);
    if (e.max_variable_index() >= 0) fail(where, "must be a constant" + what);
    try {
        return evaluate(e, Point(static_cast<std::size_t>(dim), 0.0));
    } catch (const DomainError& err) {
        const std::string text = v.is_string() ? v.get<std::string>() : v.dump();
        fail(where, std::string(err.what()) + "\n" + caret_line(text, err.span()));
    }
}

const json& array(const json& v, std::size_t size, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    if (v.size() != size) fail(where, "expected " + std::to_string(size) + " entries, got " + std::to_string(v.size()));
    return v;
}

std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

MetricField lower_triangle(const json& v, int dim, int vars, const std::string& where) {
    array(v, static_cast<std::size_t>(dim), where);
    MetricField g(dim);
    for (int i = 0; i < dim; ++i) {
        const auto row = at(where, static_cast<std::size_t>(i));
        array(v[static_cast<std::size_t>(i)], static_cast<std::size_t>(i + 1), row);
        for (int j = 0; j <= i; ++j)
            g.set(i, j, expression(v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], vars, at(row, j)));
    }
    return g;
}

ExprMatrix full_matrix(const json& v, int dim, int vars, const std::string& where) {
    array(v, static_cast<std::size_t>(dim), where);
    ExprMatrix m(dim);
    for (int i = 0; i < dim; ++i) {
        const auto row = at(where, static_cast<std::size_t>(i));
        array(v[static_cast<std::size_t>(i)], static_cast<std::size_t>(dim), row);
        for (int j = 0; j < dim; ++j)
            m(i, j) = expression(v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], vars, at(row, j));
    }
    return m;
}

std::vector<Expr> components(const json& v, int dim, const std::string& where) {
    array(v, static_cast<std::size_t>(dim), where);
    std::vector<Expr> out;
    for (int i = 0; i < dim; ++i) out.push_back(expression(v[static_cast<std::size_t>(i)], dim, at(where, i)));
    return out;
}

ordered_json lower_json(const MetricField& g) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < g.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j <= i; ++j) row.push_back(to_string(g(i, j)));
        rows.push_back(row);
    }
    return rows;
}

ordered_json full_json(const ExprMatrix& m) {
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < m.dim(); ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(to_string(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

ordered_json list_json(const std::vector<Expr>& es) {
    ordered_json out = ordered_json::array();
    for (const auto& e : es) out.push_back(to_string(e));
    return out;
}

// Line and caret for a byte offset into a JSON document.
std::string locate(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    const std::size_t start = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const std::size_t line_begin = start == std::string_view::npos ? 0 : start + 1;
    std::size_t line_end = text.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = text.size();
    std::size_t line_no = 1;
    for (std::size_t i = 0; i < line_begin; ++i) line_no += text[i] == '\n';
    const std::size_t col = offset > line_begin ? offset - line_begin - 1 : 0;
    std::ostringstream os;
    os << "line " << line_no << ", column " << col + 1 << "\n"
       << caret_line(text.substr(line_begin, line_end - line_begin), {col, col + 1});
    return os.str();
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        throw ManifestError("invalid JSON at " + locate(text, err.byte) + "\n" + err.what());
    }
}

}  // namespace

Manifest parse_manifest(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) fail("manifest", "expected a JSON object");
    const json& version = member(doc, "version", "manifest");
    if (!version.is_string() || version.get<std::string>() != manifest_version)
        fail("version", "unsupported manifest version " + version.dump() + ", expected \"" + manifest_version + "\"");

    Manifest out;
    WeakFManifold& m = out.manifold;
    m.n = integer(member(doc, "n", "manifest"), "n");
    m.s = integer(member(doc, "s", "manifest"), "s");
    if (m.n < 1) fail("n", "must be at least 1");
    if (m.s < 1) fail("s", "must be at least 1");
    const int dim = m.dim();
    if (doc.contains("dim") && integer(doc["dim"], "dim") != dim)
        fail("dim", "coordinate count " + doc["dim"].dump() + " does not equal 2n + s = " + std::to_string(dim));

    m.beta = expression(member(doc, "beta", "manifest"), dim, "beta");
    if (doc.contains("c") && !doc["c"].is_null()) m.c = number(doc["c"], "c");
    m.metric = lower_triangle(member(doc, "metric", "manifest"), dim, dim, "metric");
    m.f = full_matrix(member(doc, "f", "manifest"), dim, dim, "f");
    m.Q = full_matrix(member(doc, "Q", "manifest"), dim, dim, "Q");
    const json& xi = array(member(doc, "xi", "manifest"), static_cast<std::size_t>(m.s), "xi");
    const json& eta = array(member(doc, "eta", "manifest"), static_cast<std::size_t>(m.s), "eta");
    for (int i = 0; i < m.s; ++i) {
        m.xi.push_back({components(xi[static_cast<std::size_t>(i)], dim, at("xi", i))});
        m.eta.push_back({components(eta[static_cast<std::size_t>(i)], dim, at("eta", i))});
    }
    if (doc.contains("origin")) {
        if (!doc["origin"].is_string()) fail("origin", "expected a string");
        m.origin = doc["origin"].get<std::string>();
    }
    if (doc.contains("twisted")) {
        const json& tw = doc["twisted"];
        const int d = 2 * m.n;
        m.twisted = TwistedData{lower_triangle(member(tw, "fiber_metric", "twisted"), d, d, "twisted.fiber_metric"),
                                expression(member(tw, "sigma", "twisted"), dim, "twisted.sigma")};
    }

    if (doc.contains("soliton")) {
        const json& sol = doc["soliton"];
        const bool has_v = sol.is_object() && sol.contains("V");
        const bool has_pot = sol.is_object() && sol.contains("potential");
        if (has_v == has_pot) fail("soliton", "exactly one of \"V\" and \"potential\" is required");
        SolitonData data;
        if (has_v) data.V = VectorField{components(sol["V"], dim, "soliton.V")};
        if (has_pot) data.potential = expression(sol["potential"], dim, "soliton.potential");
        const std::string why = "; variable soliton functions are not supported";
        data.lambda = constant(member(sol, "lambda", "soliton"), dim, "soliton.lambda", why);
        data.mu = constant(member(sol, "mu", "soliton"), dim, "soliton.mu", why);
        out.soliton = data;
    }

    if (doc.contains("tolerances")) {
        const json& tol = doc["tolerances"];
        if (!tol.is_object()) fail("tolerances", "expected an object");
        for (const auto& [id, v] : tol.items()) {
            if (!find_check(id)) fail("tolerances", "unknown check id \"" + id + "\"");
            const double t = number(v, "tolerances." + id);
            if (!(t > 0)) fail("tolerances." + id, "must be positive");
            out.tolerances[id] = t;
        }
    }
    if (doc.contains("checks")) {
        const json& checks = doc["checks"];
        if (!checks.is_array()) fail("checks", "expected an array of check ids");
        for (std::size_t i = 0; i < checks.size(); ++i) {
            if (!checks[i].is_string()) fail(at("checks", i), "expected a string");
            const std::string id = checks[i].get<std::string>();
            if (!find_check(id)) fail(at("checks", i), "unknown check id \"" + id + "\"");
            out.checks.push_back(id);
        }
    }
    if (doc.contains("sampling")) {
        const json& s = doc["sampling"];
        if (s.contains("count")) out.sampling.count = integer(s["count"], "sampling.count");
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned()) fail("sampling.seed", "expected a non-negative integer");
            out.sampling.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("box")) {
            const json& box = array(s["box"], 2, "sampling.box");
            out.sampling.lo = number(box[0], "sampling.box[0]");
            out.sampling.hi = number(box[1], "sampling.box[1]");
        }
        if (out.sampling.count < 1) fail("sampling.count", "must be at least 1");
        if (!(out.sampling.lo < out.sampling.hi)) fail("sampling.box", "lower bound must be below the upper bound");
    }

    std::vector<Point> points = sample_points(out.sampling, dim);
    validate(m, points);
    return out;
}

ordered_json manifest_to_json(const Manifest& mf) {
    const WeakFManifold& m = mf.manifold;
    ordered_json doc;
    doc["version"] = manifest_version;
    if (!m.origin.empty()) doc["origin"] = m.origin;
    doc["n"] = m.n;
    doc["s"] = m.s;
    if (m.beta.is_constant())
        doc["beta"] = m.beta.constant_value();
    else
        doc["beta"] = to_string(m.beta);
    if (m.c) doc["c"] = *m.c;
    doc["dim"] = m.dim();
    doc["metric"] = lower_json(m.metric);
    doc["f"] = full_json(m.f);
    doc["Q"] = full_json(m.Q);
    doc["xi"] = ordered_json::array();
    doc["eta"] = ordered_json::array();
    for (const auto& x : m.xi) doc["xi"].push_back(list_json(x.components));
    for (const auto& e : m.eta) doc["eta"].push_back(list_json(e.components));
    if (m.twisted) doc["twisted"] = {{"sigma", to_string(m.twisted->sigma)}, {"fiber_metric", lower_json(m.twisted->fiber_metric)}};
    if (mf.soliton) {
        ordered_json sol;
        if (mf.soliton->V) sol["V"] = list_json(mf.soliton->V->components);
        if (mf.soliton->potential) sol["potential"] = to_string(*mf.soliton->potential);
        sol["lambda"] = mf.soliton->lambda;
        sol["mu"] = mf.soliton->mu;
        doc["soliton"] = sol;
    }
    if (!mf.tolerances.empty()) doc["tolerances"] = mf.tolerances;
    if (!mf.checks.empty()) doc["checks"] = mf.checks;
    doc["sampling"] = {{"count", mf.sampling.count}, {"seed", mf.sampling.seed}, {"box", {mf.sampling.lo, mf.sampling.hi}}};
    return doc;
}

Manifest manifest_for(const WeakFManifold& m, bool with_soliton) {
    Manifest out;
    out.manifold = m;
    if (with_soliton && m.c && m.beta.is_constant()) {
        const double b = m.beta.constant_value();
        const double lambda = m.s * b - m.s * (1 + *m.c) * b * b;
        out.soliton = SolitonData{m.xi_bar(), std::nullopt, lambda, -lambda};
    }
    return out;
}

std::vector<Point> sample_points(const SamplingPolicy& policy, int dim) {
    std::mt19937_64 rng(policy.seed);
    std::uniform_real_distribution<double> u(policy.lo, policy.hi);
    std::vector<Point> out(static_cast<std::size_t>(policy.count), Point(static_cast<std::size_t>(dim)));
    for (auto& p : out)
        for (double& x : p) x = u(rng);
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

double round15(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

ordered_json report_to_json(const std::vector<CheckRecord>& records, const std::vector<Point>& points,
                            const SamplingPolicy& sampling, const ReportOptions& options) {
    ordered_json doc;
    doc["tool"] = "wfk";
    doc["tool_version"] = tool_version;
    doc["manifest_sha256"] = options.digest;
    if (!options.reproducible) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        doc["timestamp"] = buf;
    }
    doc["sampling"] = {{"count", sampling.count}, {"seed", sampling.seed}, {"box", {sampling.lo, sampling.hi}}};
    ordered_json pts = ordered_json::array();
    for (const auto& p : points) {
        ordered_json row = ordered_json::array();
        for (double x : p) row.push_back(round15(x));
        pts.push_back(row);
    }
    doc["points"] = pts;

    ordered_json recs = ordered_json::array();
    for (const auto& rec : records) {
        const ResidualReport& r = rec.report;
        ordered_json j;
        j["id"] = r.id;
        j["point"] = rec.point_index;
        // Non-finite residuals have no JSON number form.
        if (std::isfinite(r.residual))
            j["residual"] = round15(r.residual);
        else
            j["residual"] = nullptr;
        j["tolerance"] = r.tolerance;
        j["pass"] = r.pass;
        if (r.audit) {
            j["audit"] = true;
            j["flagged"] = r.flagged;
        }
        if (!r.note.empty()) j["note"] = r.note;
        if (!r.values.empty()) {
            ordered_json vals;
            for (const auto& [k, v] : r.values) vals[k] = std::isfinite(v) ? ordered_json(round15(v)) : ordered_json(nullptr);
            j["values"] = vals;
        }
        recs.push_back(j);
    }
    doc["records"] = recs;
    const RunSummary s = summarize(records);
    doc["summary"] = {{"pass", s.pass}, {"fail", s.fail}, {"flagged", s.flagged}, {"audits", s.audits}};
    return doc;
}

FiberSpec parse_fiber(std::string_view text) {
    const json doc = parse_json(text);
    FiberSpec fiber;
    fiber.n = integer(member(doc, "n", "fiber"), "fiber.n");
    if (fiber.n < 1) fail("fiber.n", "must be at least 1");
    const int d = 2 * fiber.n;
    fiber.metric = lower_triangle(member(doc, "metric", "fiber"), d, d, "fiber.metric");
    fiber.J = full_matrix(member(doc, "J", "fiber"), d, d, "fiber.J");
    return fiber;
}

}  // namespace wfk
