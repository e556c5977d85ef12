#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "biconf/config.hpp"
#include "biconf/errors.hpp"
#include "biconf/report.hpp"
#include "biconf/verifier.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
    std::string mode = "exact";
    std::string format = "json";
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> points;
    std::string out;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--mode", f.mode, "Arithmetic: exact (rationals) or float")
        ->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--tol", f.tol, "Relative zero tolerance, float mode only")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", f.seed, "Random seed");
    cmd->add_option("--points", f.points, "Sample points per instance or trial")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "Output file (default: $BICONF_OUTPUT_DIR/<command>.<ext>, else stdout)");
    cmd->add_flag("--timing", f.timing, "Record wall-clock seconds in the report (breaks byte stability)");
}

biconf::RunOptions run_options(const CommonFlags& f) {
    biconf::RunOptions opts;
    opts.mode = biconf::parse_mode(f.mode);
    if (f.tol) {
        if (opts.mode != biconf::Mode::floating) {
            throw biconf::ConfigError("--tol only applies to --mode float");
        }
        opts.tol = *f.tol;
    }
    return opts;
}

void emit(const std::string& text, const CommonFlags& f, const std::string& command) {
    std::filesystem::path path = f.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("BICONF_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
            path = std::filesystem::path(dir) /
                   (command + "." + std::string(biconf::format_extension(biconf::parse_format(f.format))));
        }
    }
    if (path.empty()) {
        std::cout << text;
        return;
    }
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream file(path, std::ios::binary);
    file << text;
    if (!file) {
        throw std::runtime_error("cannot write " + path.string());
    }
    std::cerr << "wrote " << path.string() << "\n";
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

int report_status(bool ok, const std::string& what) {
    std::cerr << what << ": " << (ok ? "all verdicts as expected" : "VERDICT MISMATCH") << "\n";
    return ok ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification of biharmonic and polyharmonic conformal maps between space forms"};
    app.require_subcommand(1);

    CommonFlags check_flags;
    std::string config_path;
    auto* check = app.add_subcommand("check", "Evaluate residuals and verdicts for the instances in a config file");
    check->add_option("config", config_path, "Instance config (JSON)")->required();
    add_common(check, check_flags);

    CommonFlags bih_flags;
    biconf::BiharmonicSweepOptions bih;
    auto* sweep_bih = app.add_subcommand("sweep-biharmonic", "Classification table over m, curvatures and epsilon");
    add_common(sweep_bih, bih_flags);
    sweep_bih->add_option("--trials", bih.trials, "Random maps per cell")->check(CLI::PositiveNumber);
    sweep_bih->add_option("--m-min", bih.m_min, "Smallest dimension")->check(CLI::Range(3, 64));
    sweep_bih->add_option("--m-max", bih.m_max, "Largest dimension")->check(CLI::Range(3, 64));

    CommonFlags poly_flags;
    biconf::PolySweepOptions poly;
    auto* sweep_poly = app.add_subcommand("sweep-polyharmonic", "Delta^k phi table for inversions over k and m");
    add_common(sweep_poly, poly_flags);
    sweep_poly->add_option("--k-min", poly.k_min, "Smallest order")->check(CLI::Range(1, 16));
    sweep_poly->add_option("--k-max", poly.k_max, "Largest order")->check(CLI::Range(1, 16));
    sweep_poly->add_option("--m-min", poly.m_min, "Smallest dimension")->check(CLI::Range(2, 64));
    sweep_poly->add_option("--m-max", poly.m_max, "Largest dimension")->check(CLI::Range(2, 64));

    CommonFlags self_flags;
    self_flags.format = "table";
    auto* self = app.add_subcommand("selftest", "Run the built-in invariant suites");
    add_common(self, self_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*check) {
            const auto opts = run_options(check_flags);
            auto configs = biconf::load_config(config_path);
            for (auto& cfg : configs) {
                if (check_flags.seed) {
                    cfg.plan.seed = *check_flags.seed;
                }
                if (check_flags.points) {
                    cfg.plan.count = *check_flags.points;
                }
            }
            const Stopwatch clock;
            biconf::CheckReport report;
            try {
                report = biconf::run_check(configs, opts);
            } catch (const biconf::SamplingError& e) {
                throw biconf::ConfigError(e.what());
            } catch (const biconf::ModelError& e) {
                throw biconf::ConfigError(e.what());
            }
            if (check_flags.timing) {
                report.seconds = clock.seconds();
            }
            emit(biconf::render(report, biconf::parse_format(check_flags.format)), check_flags, "check");
            return report_status(report.all_match(), "check");
        }
        if (*sweep_bih) {
            const auto opts = run_options(bih_flags);
            if (bih_flags.seed) {
                bih.seed = *bih_flags.seed;
            }
            if (bih_flags.points) {
                bih.points = *bih_flags.points;
            }
            if (bih.m_max < bih.m_min) {
                throw biconf::ConfigError("--m-max must be >= --m-min");
            }
            const Stopwatch clock;
            auto report = biconf::sweep_biharmonic(bih, opts);
            if (bih_flags.timing) {
                report.seconds = clock.seconds();
            }
            emit(biconf::render(report, biconf::parse_format(bih_flags.format)), bih_flags, "sweep-biharmonic");
            return report_status(report.all_match(), "sweep-biharmonic");
        }
        if (*sweep_poly) {
            const auto opts = run_options(poly_flags);
            if (poly_flags.seed) {
                poly.seed = *poly_flags.seed;
            }
            if (poly_flags.points) {
                poly.points = *poly_flags.points;
            }
            if (poly.k_max < poly.k_min || poly.m_max < poly.m_min) {
                throw biconf::ConfigError("need --k-min <= --k-max and --m-min <= --m-max");
            }
            const Stopwatch clock;
            auto report = biconf::sweep_polyharmonic(poly, opts);
            if (poly_flags.timing) {
                report.seconds = clock.seconds();
            }
            emit(biconf::render(report, biconf::parse_format(poly_flags.format)), poly_flags, "sweep-polyharmonic");
            return report_status(report.all_match(), "sweep-polyharmonic");
        }
        if (*self) {
            const auto opts = run_options(self_flags);
            const Stopwatch clock;
            auto report = biconf::selftest(opts);
            if (self_flags.timing) {
                report.seconds = clock.seconds();
            }
            emit(biconf::render(report, biconf::parse_format(self_flags.format)), self_flags, "selftest");
            std::cerr << "selftest: " << (report.passed() ? "pass" : "FAIL") << "\n";
            return report.passed() ? kExitOk : kExitMismatch;
        }
    } catch (const biconf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
