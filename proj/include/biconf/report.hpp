#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "biconf/config.hpp"
#include "biconf/residuals.hpp"
#include "biconf/scalar.hpp"

namespace biconf {

enum class ReportFormat { json, csv, table };

ReportFormat parse_format(std::string_view name);
std::string_view format_extension(ReportFormat format);

// Recorded in every report next to the verdicts.
extern const char* const kMethodNote;

struct ResidualEntry {
    double norm = 0;
    double scale = 0;
    bool zero = false;
};

struct PointRecord {
    std::size_t index = 0;
    RationalVector x;
    std::string lambda;  // "p/q" in exact mode, shortest decimal in float mode
    ResidualEntry cl;
    ResidualEntry sdl;
    ResidualEntry nd;
    ResidualEntry nd2;
    bool harmonic = false;
    bool nd_equals_sdl = false;
    bool nd2_equals_minus_sdl = false;
    bool nd_equals_twice_sdl = false;
    bool nd2_equals_twice_sdl = false;
};

struct OrderRecord {
    int order = 0;
    double norm = 0;
    double scale = 0;
    bool zero = false;
};

struct PolyPointRecord {
    std::size_t index = 0;
    RationalVector x;
    std::vector<OrderRecord> orders;  // orders 1..k
    bool closed_form_match = false;   // Delta^k phi against the closed form
};

struct SkippedPoint {
    std::size_t index = 0;
    RationalVector x;
    std::string error;
};

struct InstanceReport {
    std::string name;
    ConformalInstance instance;
    CheckKind check = CheckKind::biharmonic;
    int order = 2;
    SamplePlan plan;
    std::vector<PointRecord> points;
    std::vector<PolyPointRecord> poly_points;
    std::vector<SkippedPoint> skipped;
    std::string verdict;
    std::optional<std::string> expected;
    bool match = true;
};

struct CheckReport {
    Mode mode = Mode::exact;
    double tol = 1e-9;
    std::vector<InstanceReport> instances;
    std::optional<double> seconds;

    bool all_match() const;
};

struct TrialRecord {
    MobiusMap map;
    std::uint64_t sample_seed = 0;
    std::string verdict;
    int evaluated = 0;
    int sdl_zero = 0;
    int harmonic_points = 0;
    int cl_nonzero = 0;
    int skipped = 0;
};

struct BiharmonicCell {
    int m = 0;
    int c1 = 0;
    int c2 = 0;
    int epsilon = 0;
    std::vector<TrialRecord> trials;
    std::string verdict;
    std::string expected;
    bool match = false;
};

struct BiharmonicSweep {
    Mode mode = Mode::exact;
    std::uint64_t seed = 0;
    int trials = 0;
    int points = 0;
    std::vector<BiharmonicCell> cells;
    std::optional<double> seconds;

    bool all_match() const;
};

struct PolyCell {
    int k = 0;
    int m = 0;
    int points = 0;
    bool zero = false;         // Delta^k phi = 0 at every point
    bool lower_zero = false;   // Delta^(k-1) phi = 0 at every point
    bool proper = false;
    bool expected_zero = false;
    bool expected_proper = false;
    bool closed_form_match = false;
    bool match = false;
};

struct PolySweep {
    Mode mode = Mode::exact;
    std::uint64_t seed = 0;
    int points = 0;
    std::vector<PolyCell> cells;
    std::optional<double> seconds;

    bool all_match() const;
};

struct SuiteResult {
    std::string name;
    int checks = 0;
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
};

struct SelftestReport {
    Mode mode = Mode::exact;
    double tol = 1e-9;
    std::vector<SuiteResult> suites;
    std::optional<double> seconds;

    bool passed() const;
};

nlohmann::ordered_json to_json(const CheckReport& r);
nlohmann::ordered_json to_json(const BiharmonicSweep& r);
nlohmann::ordered_json to_json(const PolySweep& r);
nlohmann::ordered_json to_json(const SelftestReport& r);

// Byte-stable rendering: same report, same bytes.
std::string render(const CheckReport& r, ReportFormat format);
std::string render(const BiharmonicSweep& r, ReportFormat format);
std::string render(const PolySweep& r, ReportFormat format);
std::string render(const SelftestReport& r, ReportFormat format);

}  // namespace biconf
