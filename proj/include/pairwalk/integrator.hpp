#pragma once

#include <vector>

#include "pairwalk/lattice.hpp"
#include "pairwalk/observables.hpp"
#include "pairwalk/pulse.hpp"

namespace pairwalk {

/// What `evolve` does when the edge monitor trips.
enum class EdgePolicy {
    Abort,  // throw EdgeContamination
    Flag,   // finish the run and mark the report invalid
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_final = 100.0;
    double record_interval = 0.1;
    double marginal_interval = 1.0;
    double norm_tolerance = 1e-6;
    double edge_tolerance = 1e-8;
    int bound_width = kDefaultBoundWidth;
    Gauge gauge = Gauge::Centered;
    EdgePolicy edge_policy = EdgePolicy::Abort;
};

/// Largest dt accepted for a given lattice and drive: 2.8 / (8 + U + B N).
double stability_limit(const LatticeSpec& lattice, const PulseTrain& drive);

/// Throws BadSpec when the config is inconsistent or dt exceeds the
/// stability limit.
void validate_config(const IntegratorConfig& config, const LatticeSpec& lattice,
                     const PulseTrain& drive);

/// Classical RK4 step with the field sampled at t, t + dt/2 and t + dt.
Wavefunction rk4_step(const Wavefunction& state, const LatticeSpec& lattice,
                      const PulseTrain& drive, double dt, Gauge gauge = Gauge::Centered);

struct RunReport {
    double max_norm_drift = 0.0;
    double max_edge_probability = 0.0;
    bool edge_contaminated = false;
    long long steps = 0;
    double wall_seconds = 0.0;
    double final_time = 0.0;

    bool valid() const { return !edge_contaminated; }
};

struct EvolveResult {
    Wavefunction state;
    RunReport report;
};

/// Integrates from state.time() to config.t_final, emitting a record to
/// `sink` at t0 and every record_interval. Throws NormDrift when a sample's
/// norm leaves tolerance and EdgeContamination (under EdgePolicy::Abort) when
/// the edge probability exceeds edge_tolerance.
EvolveResult evolve(const Wavefunction& initial, const LatticeSpec& lattice, const PulseTrain& drive,
                    const IntegratorConfig& config, ObservableSink& sink);

/// RK4 engine used by `evolve`.
///
/// The state lives as separate real and imaginary planes padded by one zero
/// site on every side. Stages are pipelined row by row: while stage 0 works
/// on row r, stage s works on row r - s, so stage rows live in small ring
/// buffers and the state grid streams through memory once per step.
class Rk4Stepper {
public:
    Rk4Stepper(const LatticeSpec& lattice, Gauge gauge);

    void load(const Wavefunction& state);
    /// Copies the current amplitudes into `state` (grid must match).
    void store(Wavefunction& state) const;

    /// Advances the loaded state from t to t + dt.
    void step(double t, double dt, const PulseTrain& drive);

    /// Takes `steps` consecutive steps of size dt starting at time t.
    void advance(double t, double dt, long long steps, const PulseTrain& drive);

private:
    static constexpr int kRing = 4;

    struct RowRing {
        std::vector<double> re;
        std::vector<double> im;
    };

    void pipeline_step(double t, double dt, const PulseTrain& drive);
    void fill_potential(std::vector<double>& pot, double field) const;

    LatticeSpec lattice_;
    Gauge gauge_;
    int n_ = 0;
    int pitch_ = 0;
    bool has_onsite_ = false;
    std::vector<double> psi_re_, psi_im_;
    // acc, stage 1, stage 2, stage 3
    std::vector<RowRing> rings_;
    std::vector<double> zero_row_;
    // Potentials at t, t + dt/2, t + dt.
    std::vector<std::vector<double>> potentials_;
};

}  // namespace pairwalk
