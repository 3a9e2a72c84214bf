// Command-line front end: run, sweep, validate.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "pairwalk/error.hpp"
#include "pairwalk/experiment.hpp"
#include "pairwalk/validation.hpp"

namespace {

using nlohmann::json;
using namespace pairwalk;

constexpr int kExitOk = 0;
constexpr int kExitEngine = 1;
constexpr int kExitConfig = 2;

int report_error(const Error& e) {
    json doc{{"status", "error"}, {"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) doc["field"] = ce->field();
    std::cout << doc.dump() << std::endl;
    return e.kind() == ErrorKind::ConfigError ? kExitConfig : kExitEngine;
}

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return "out";
}

ExperimentSpec load(const std::string& path, const Overrides& overrides) {
    return apply_overrides(load_spec(path), overrides);
}

json artifact_json(const ArtifactPaths& p) {
    return {{"time_series", p.time_series.string()},
            {"marginals", p.marginals.string()},
            {"report", p.report.string()}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-particle pulsed quantum walk simulator"};
    app.set_version_flag("--version", kEngineVersion);
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_dir;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    Overrides overrides;
    std::optional<int> n_sites;
    std::optional<double> dt;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("spec", spec_path, "Experiment JSON file")->required()->check(CLI::ExistingFile);
        cmd->add_flag("--fast", overrides.fast, "Halve N and t_final");
        cmd->add_option("--out-dir", out_dir, std::string("Output directory (default $") + kOutDirEnv + " or ./out)");
        cmd->add_option("--dt", dt, "Override the time step");
        cmd->add_option("--n-sites", n_sites, "Override the lattice size");
    };

    CLI::App* run = app.add_subcommand("run", "Run every point of a spec and write per-point artifacts");
    add_run_flags(run);
    CLI::App* sweep = app.add_subcommand("sweep", "Run a sweep in parallel and write an aggregate table");
    add_run_flags(sweep);
    sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    CLI::App* validate = app.add_subcommand("validate", "Small-N oracle and invariant checks");
    bool flip_sign = false;
    validate->add_flag("--mutate-rhs-sign", flip_sign, "Negate the RHS kernel (the checks must then fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    overrides.n_sites = n_sites;
    overrides.dt = dt;

    try {
        if (*run) {
            const ExperimentSpec spec = load(spec_path, overrides);
            json written = json::array();
            for (const ArtifactPaths& p : run_single(spec, output_dir(out_dir))) written.push_back(artifact_json(p));
            std::cout << json{{"status", "ok"}, {"artifacts", written}}.dump() << std::endl;
            return kExitOk;
        }
        if (*sweep) {
            const ExperimentSpec spec = load(spec_path, overrides);
            const SweepResult result = run_sweep(spec, output_dir(out_dir), threads);
            json failed = json::array();
            for (const PointSummary& row : result.rows) {
                if (!row.ok) failed.push_back({{"name", row.name}, {"kind", row.error_kind}});
            }
            std::cout << json{{"status", result.all_ok() ? "ok" : "partial"},
                              {"table", result.table.string()},
                              {"points", result.rows.size()},
                              {"failed", failed}}
                             .dump()
                      << std::endl;
            return result.all_ok() ? kExitOk : kExitEngine;
        }
        ValidationOptions options;
        if (flip_sign) {
            options.rhs = [base = default_rhs()](std::span<const cplx> in, const LatticeSpec& lattice, double field,
                                                 std::span<cplx> out, Gauge gauge) {
                base(in, lattice, field, out, gauge);
                for (cplx& v : out) v = -v;
            };
        }
        const ValidationReport report = validate_suite(options);
        for (const CheckResult& c : report.checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << format_number(c.value)
                      << " threshold=" << format_number(c.threshold);
            if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
            std::cout << '\n';
        }
        std::cout << (report.all_passed() ? "validate: all checks passed" : "validate: FAILURES") << std::endl;
        return report.all_passed() ? kExitOk : kExitEngine;
    } catch (const Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cout << json{{"status", "error"}, {"kind", "Internal"}, {"message", e.what()}}.dump() << std::endl;
        return kExitEngine;
    }
}
