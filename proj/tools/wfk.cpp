#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wfk/manifest.hpp"

using namespace wfk;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_input = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError("cannot write " + path);
    out << text;
}

struct CheckArgs {
    std::string manifest;
    std::optional<int> points;
    std::optional<std::uint64_t> seed;
    std::vector<double> box;
    std::vector<std::string> only;
    std::vector<std::string> tol;
    std::string out;
    bool reproducible = false;
};

int run_check(const CheckArgs& args) {
    const std::string text = read_file(args.manifest);
    Manifest mf = parse_manifest(text);
    SamplingPolicy sampling = mf.sampling;
    if (args.points) {
        if (*args.points < 1) throw ManifestError("--points must be at least 1");
        sampling.count = *args.points;
    }
    if (args.seed) sampling.seed = *args.seed;
    if (!args.box.empty()) {
        if (!(args.box[0] < args.box[1])) throw ManifestError("--box: lower bound must be below the upper bound");
        sampling.lo = args.box[0];
        sampling.hi = args.box[1];
    }

    CheckRequest request;
    request.ids = args.only.empty() ? mf.checks : args.only;
    request.tolerances = mf.tolerances;
    for (const auto& t : args.tol) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) throw ManifestError("--tol expects id=value, got \"" + t + "\"");
        const std::string id = t.substr(0, eq);
        if (!find_check(id)) throw ManifestError("--tol: unknown check id \"" + id + "\"");
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(t.substr(eq + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size() - eq - 1 || !(v > 0))
            throw ManifestError("--tol: \"" + t.substr(eq + 1) + "\" is not a positive number");
        request.tolerances[id] = v;
    }
    for (const auto& id : request.ids)
        if (!find_check(id)) throw ManifestError("--only: unknown check id \"" + id + "\"");

    const auto points = sample_points(sampling, mf.manifold.dim());
    validate(mf.manifold, points);
    const auto records = run_checks(mf.manifold, mf.soliton, points, request);
    const auto report = report_to_json(records, points, sampling, {args.reproducible, sha256_hex(text)});
    write_output(args.out, report.dump(2) + "\n");
    const RunSummary s = summarize(records);
    std::cerr << "pass " << s.pass << ", fail " << s.fail << ", flagged " << s.flagged << "\n";
    return s.ok() ? exit_pass : exit_fail;
}

int list_checks() {
    for (const auto& c : check_catalogue())
        std::cout << c.id << "\t" << c.module << "\t" << to_string(c.kind) << "\t" << c.tolerance << "\t" << c.summary
                  << "\n";
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak beta f-Kenmotsu structure checker"};
    app.require_subcommand(1);

    CheckArgs check;
    auto* cmd_check = app.add_subcommand("check", "Run residual checks on a manifest");
    cmd_check->add_option("manifest", check.manifest, "Manifest path")->required();
    cmd_check->add_option("--points", check.points, "Number of sample points");
    cmd_check->add_option("--seed", check.seed, "Sampling seed");
    cmd_check->add_option("--box", check.box, "Sampling cube bounds LO HI")->expected(2);
    cmd_check->add_option("--only", check.only, "Comma-separated check ids")->delimiter(',');
    cmd_check->add_option("--tol", check.tol, "Tolerance override id=value");
    cmd_check->add_option("--out", check.out, "Report path (default: standard output)");
    cmd_check->add_flag("--reproducible", check.reproducible, "Omit the timestamp");

    int n = 1, s = 1;
    double beta = 1.0, c = 0.0;
    bool no_soliton = false;
    std::string out;
    auto* cmd_e2 = app.add_subcommand("example2", "Emit an example2 manifest");
    cmd_e2->add_option("--n", n, "Half the contact dimension")->required();
    cmd_e2->add_option("--s", s, "Number of characteristic fields")->required();
    cmd_e2->add_option("--beta", beta, "Constant beta")->required();
    cmd_e2->add_option("--c", c, "Deformation parameter c >= 0")->required();
    cmd_e2->add_flag("--no-soliton", no_soliton, "Omit the soliton block");
    cmd_e2->add_option("--out", out, "Manifest path (default: standard output)");

    std::vector<double> kahler;
    std::string fiber_path, sigma, twisted_beta;
    int ts = 1;
    auto* cmd_tw = app.add_subcommand("twisted", "Emit a twisted product manifest");
    auto* opt_kahler = cmd_tw->add_option("--kahler", kahler, "Scales c_i of flat weak Kahler factors")->delimiter(',');
    auto* opt_fiber = cmd_tw->add_option("--fiber", fiber_path, "Fiber manifest path");
    opt_kahler->excludes(opt_fiber);
    cmd_tw->add_option("--s", ts, "Number of line factors")->required();
    cmd_tw->add_option("--sigma", sigma, "Twisting function")->required();
    cmd_tw->add_option("--beta", twisted_beta, "Explicit beta expression (default: inferred)");
    cmd_tw->add_option("--out", out, "Manifest path (default: standard output)");

    app.add_subcommand("list-checks", "List catalogue check ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*cmd_check) return run_check(check);
        if (app.got_subcommand("list-checks")) return list_checks();
        if (*cmd_e2) {
            const Manifest mf = manifest_for(build_example2(n, s, beta, c), !no_soliton);
            write_output(out, manifest_to_json(mf).dump(2) + "\n");
            return exit_pass;
        }
        if (*cmd_tw) {
            if (kahler.empty() && fiber_path.empty()) throw ManifestError("twisted needs --kahler or --fiber");
            const FiberSpec fiber = fiber_path.empty() ? kahler_product(kahler) : parse_fiber(read_file(fiber_path));
            const int dim = 2 * fiber.n + ts;
            auto parse_arg = [&](const std::string& name, const std::string& text) {
                try {
                    return parse_expression(text, dim);
                } catch (const ParseError& err) {
                    throw ManifestError(name + ": " + err.what() + "\n" + caret_line(text, err.span()));
                }
            };
            std::optional<Expr> b;
            if (!twisted_beta.empty()) b = parse_arg("--beta", twisted_beta);
            const auto m = build_twisted_product(fiber, ts, parse_arg("--sigma", sigma), b);
            write_output(out, manifest_to_json(manifest_for(m)).dump(2) + "\n");
            return exit_pass;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
