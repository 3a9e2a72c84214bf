#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pairwalk/integrator.hpp"
#include "pairwalk/lattice.hpp"
#include "pairwalk/observables.hpp"

namespace pairwalk {

inline constexpr const char* kEngineVersion = "pairwalk 1.0.0";

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "PAIRWALK_OUT_DIR";

/// Exactly one of impulse / amplitude is set.
struct PulseSetting {
    std::optional<double> impulse;
    std::optional<double> amplitude;
    double width = 1.0;
    double center = 10.0;

    GaussianPulse resolve() const;
};

struct InitialSetting {
    double width = 1.0;  // sigma
    int offset = 0;      // d0; centers at N/2 -/+ d0
};

struct SweepAxes {
    std::vector<double> impulses;
    std::vector<double> interactions;
    std::vector<double> widths;  // initial sigma

    std::size_t points() const;
};

struct OutputSetting {
    bool time_series = true;
    bool marginals = true;
};

struct ExperimentSpec {
    std::string name = "run";
    LatticeSpec lattice;
    InitialSetting initial;
    PulseSetting pulse;
    IntegratorConfig integrator;
    std::optional<SweepAxes> sweep;
    OutputSetting outputs;

    /// Start of the post-pulse velocity window, tau + 5 rho.
    double velocity_window_start() const { return pulse.center + 5.0 * pulse.width; }
};

/// Parses and validates a JSON experiment document; throws ConfigError naming
/// the offending field.
ExperimentSpec parse_spec(const nlohmann::json& doc);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Fully resolved configuration, defaults included.
nlohmann::json to_json(const ExperimentSpec& spec);

/// Structural checks beyond parsing; ConfigError on failure.
void validate_spec(const ExperimentSpec& spec);

struct Overrides {
    bool fast = false;  // halves N and t_final
    std::optional<int> n_sites;
    std::optional<double> dt;
};
ExperimentSpec apply_overrides(ExperimentSpec spec, const Overrides& overrides);

/// One grid point per combination of sweep values (interaction outermost,
/// impulse innermost). A spec without sweep axes expands to itself.
std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec);

struct PointSummary {
    std::string name;
    double impulse = 0.0;
    double interaction = 0.0;
    double width = 0.0;
    bool ok = false;
    std::string error_kind;
    std::string error_message;
    RunReport report;
    std::optional<VelocityEstimate> velocity;
    std::optional<VelocityEstimate> bound_velocity;
    std::optional<VelocityEstimate> unbound_velocity;
    ObservableRecord final_record;
    double exchange_asymmetry = 0.0;
};

struct Simulation {
    PointSummary summary;
    ObservableSeries series;
    Wavefunction final_state;
};

/// Runs one grid point in memory. Engine errors propagate.
Simulation simulate(const ExperimentSpec& point);

/// Like `simulate`, but engine errors are captured in the summary.
Simulation simulate_captured(const ExperimentSpec& point);

/// Runs every grid point with up to `threads` workers; results are in
/// expand_sweep order. `on_done` (optional) is called once per finished point.
std::vector<Simulation> simulate_all(const std::vector<ExperimentSpec>& points, int threads,
                                     const std::function<void(const Simulation&)>& on_done = {});

struct ArtifactPaths {
    std::filesystem::path time_series;
    std::filesystem::path marginals;
    std::filesystem::path report;
};

/// Writes the time-series CSV, marginal NDJSON and run-report JSON of one
/// point under `out_dir`.
ArtifactPaths write_artifacts(const Simulation& sim, const ExperimentSpec& point,
                              const std::filesystem::path& out_dir);

nlohmann::json report_json(const Simulation& sim, const ExperimentSpec& point);

/// run_single: every point of the spec (one without sweep axes), artifacts
/// per point. Throws on the first engine error.
std::vector<ArtifactPaths> run_single(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

struct SweepResult {
    std::vector<PointSummary> rows;
    std::filesystem::path table;
    bool all_ok() const;
};

/// run_sweep: per-point artifacts plus an aggregate `<name>.sweep.csv`.
/// Failed points are recorded in the table and the sweep continues.
SweepResult run_sweep(const ExperimentSpec& spec, const std::filesystem::path& out_dir, int threads);

/// Aggregate table columns, in order.
const std::vector<std::string>& sweep_columns();
/// Time-series CSV columns, in order.
const std::vector<std::string>& time_series_columns();

std::string format_number(double value);

}  // namespace pairwalk
