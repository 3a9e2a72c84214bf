#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pairwalk/lattice.hpp"
#include "pairwalk/pulse.hpp"

namespace pairwalk {

/// Signature of the right-hand side df/dt = -i H(t) f.
using RhsFunction =
    std::function<void(std::span<const cplx> in, const LatticeSpec& lattice, double field, std::span<cplx> out,
                       Gauge gauge)>;

/// The production kernel as an RhsFunction.
RhsFunction default_rhs();

/// Textbook RK4 over an arbitrary RHS, field at t, t + dt/2, t + dt.
Wavefunction reference_rk4(const RhsFunction& rhs, Wavefunction state, const LatticeSpec& lattice,
                           const PulseTrain& drive, double dt, long long steps, Gauge gauge = Gauge::Centered);

/// Random normalized amplitudes, deterministic in `seed`.
Wavefunction random_state(int n_sites, unsigned long long seed);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // limit it was judged against
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

struct ValidationOptions {
    /// Kernel under test. Replacing it (e.g. with a sign-flipped copy) must
    /// make the oracle checks fail.
    RhsFunction rhs = default_rhs();
    unsigned long long seed = 20240601;
};

/// Small-N oracle cross-checks and invariants; seconds to run.
ValidationReport validate_suite(const ValidationOptions& options = {});

}  // namespace pairwalk
