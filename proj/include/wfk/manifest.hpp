#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "wfk/catalogue.hpp"

namespace wfk {

inline constexpr const char* manifest_version = "wfk/1";
inline constexpr const char* tool_version = "1.0.0";

// Malformed manifest content; the message names the offending field and, for
// expressions, carries a caret line under the source text.
class ManifestError : public Error {
public:
    using Error::Error;
};

struct SamplingPolicy {
    int count = 5;
    std::uint64_t seed = 42;
    double lo = -1.0;
    double hi = 1.0;
};

struct Manifest {
    WeakFManifold manifold;
    std::optional<SolitonData> soliton;
    std::map<std::string, double> tolerances;
    std::vector<std::string> checks;
    SamplingPolicy sampling;
};

// Parses and validates (at the sample points) a manifest document.
Manifest parse_manifest(std::string_view text);
nlohmann::ordered_json manifest_to_json(const Manifest& m);

// Manifest for a builder output with default sampling. example2 manifests
// carry the soliton block V = xi_bar with lambda = s beta - s(1+c) beta^2,
// mu = -lambda unless with_soliton is false.
Manifest manifest_for(const WeakFManifold& m, bool with_soliton = true);

// Seeded uniform points in [lo, hi]^dim (mt19937_64).
std::vector<Point> sample_points(const SamplingPolicy& policy, int dim);

std::string sha256_hex(std::string_view data);

// Rounds to 15 significant digits.
double round15(double x);

struct ReportOptions {
    bool reproducible = false;
    std::string digest;
};

nlohmann::ordered_json report_to_json(const std::vector<CheckRecord>& records, const std::vector<Point>& points,
                                      const SamplingPolicy& sampling, const ReportOptions& options);

// Reads "n", "metric" (lower-triangle rows) and "J" (full rows) over x1..x2n.
FiberSpec parse_fiber(std::string_view text);

}  // namespace wfk
