#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfk/star_soliton.hpp"

namespace wfk {

enum class CheckKind {
    identity,  // holds on every weak beta f-Kenmotsu manifold
    instance,  // a conclusion verified on example2 instances
    audit,     // report-only, never fails a run
};

std::string to_string(CheckKind k);

struct CheckInfo {
    std::string id;
    std::string module;
    CheckKind kind;
    double tolerance;
    std::string summary;
};

const std::vector<CheckInfo>& check_catalogue();
// nullptr for unknown ids.
const CheckInfo* find_check(std::string_view id);

struct CheckRecord {
    ResidualReport report;
    int point_index = 0;
};

struct CheckRequest {
    std::vector<std::string> ids;               // empty selects default_checks
    std::map<std::string, double> tolerances;  // per-id overrides
};

// Checks that apply to m: twisted.* need twisted data, soliton ids need the
// matching soliton block, constant-beta ids need constant beta, and instance
// ids plus the discrepancy audit need the example2 parameter c.
std::vector<std::string> default_checks(const WeakFManifold& m, const std::optional<SolitonData>& sol);

// Records sorted by (id, point index). Unknown ids throw std::invalid_argument;
// inapplicable ids throw ValidationError.
std::vector<CheckRecord> run_checks(const WeakFManifold& m, const std::optional<SolitonData>& sol,
                                    const std::vector<Point>& points, const CheckRequest& request);

struct RunSummary {
    int pass = 0;     // non-audit passes
    int fail = 0;     // non-audit failures
    int flagged = 0;  // audits that flag a discrepancy
    int audits = 0;
    bool ok() const { return fail == 0; }
};

RunSummary summarize(const std::vector<CheckRecord>& records);

}  // namespace wfk
