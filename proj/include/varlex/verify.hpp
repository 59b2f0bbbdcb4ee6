#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace varlex {

/// One verification check: an inequality or family of inequalities measured
/// at desk scale. `status` is "pass" / "fail" for asserted checks and
/// "report" for measured-only quantities (finite-sample directions of the
/// iff-theorems are reported, never asserted).
struct CheckResult {
    std::string id;
    std::string anchor; // the mathematical fact the check exercises
    std::string status = "pass";
    double tolerance = 0.0;
    double runtime_ms = 0.0;
    std::map<std::string, double> measured;
    std::string detail;

    bool failed() const { return status == "fail"; }
};

/// Verification run options. `numbers` carries per-check trial counts,
/// problem sizes, and tolerance overrides; anything missing falls back to
/// the full acceptance-scale defaults.
struct VerifyOptions {
    std::uint64_t seed = 20250817;
    int threads = 0;
    std::vector<std::string> checks; // empty = every known check
    std::map<std::string, double> numbers;

    double number(const std::string& key, double fallback) const;
    long count(const std::string& key, long fallback) const;
};

struct VerificationReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool all_passed() const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Known check names, in execution order.
const std::vector<std::string>& known_checks();

/// Parses {"schema": 1, "seed": ..., "threads": ..., "checks": [...],
/// "numbers": {...}}. Throws std::invalid_argument naming the offending
/// field on malformed input.
VerifyOptions options_from_json(const nlohmann::json& config);

VerificationReport run_verification(const VerifyOptions& options);

// Individual suites (the acceptance harness drives them directly).
std::vector<CheckResult> check_collapse(const VerifyOptions& options);
std::vector<CheckResult> check_foundations(const VerifyOptions& options);
std::vector<CheckResult> check_trivial_weight(const VerifyOptions& options);
std::vector<CheckResult> check_averaging(const VerifyOptions& options);
std::vector<CheckResult> check_maximal(const VerifyOptions& options);
std::vector<CheckResult> check_cz(const VerifyOptions& options);
std::vector<CheckResult> check_cover(const VerifyOptions& options);
std::vector<CheckResult> check_matrix(const VerifyOptions& options);
std::vector<CheckResult> check_norm_projection(const VerifyOptions& options);

} // namespace varlex
