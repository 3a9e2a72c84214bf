#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "pairwalk/integrator.hpp"
#include "pairwalk/validation.hpp"

using namespace pairwalk;

TEST_SUITE("validation suite") {
    TEST_CASE("the production kernel passes every check") {
        const ValidationReport report = validate_suite();
        CHECK(report.checks.size() >= 10);
        for (const CheckResult& c : report.checks) {
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.passed);
        }
        CHECK(report.all_passed());
    }

    TEST_CASE("a sign-flipped kernel is caught") {
        ValidationOptions options;
        options.rhs = [inner = default_rhs()](std::span<const cplx> in, const LatticeSpec& lattice, double field,
                                              std::span<cplx> out, Gauge gauge) {
            inner(in, lattice, field, out, gauge);
            for (cplx& v : out) v = -v;
        };
        const ValidationReport report = validate_suite(options);
        CHECK_FALSE(report.all_passed());
        int failed = 0;
        for (const CheckResult& c : report.checks) failed += c.passed ? 0 : 1;
        CHECK(failed >= 2);
    }

    TEST_CASE("reference RK4 matches a single production step") {
        const LatticeSpec lattice{10, 1.0, 3.0, {}};
        const PulseTrain drive(GaussianPulse{0.4, 1.0, 0.5});
        const Wavefunction f = random_state(10, 2);
        const Wavefunction a = reference_rk4(default_rhs(), f, lattice, drive, 0.01, 1);
        const Wavefunction b = rk4_step(f, lattice, drive, 0.01);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.amplitudes()[k] - b.amplitudes()[k]));
        CHECK(worst < 1e-15);
        CHECK(a.time() == doctest::Approx(0.01));
    }

    TEST_CASE("random states are normalized and seeded") {
        const Wavefunction a = random_state(9, 5);
        CHECK(a.norm_squared() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(random_state(9, 5).amplitudes()[3] == a.amplitudes()[3]);
        CHECK(random_state(9, 6).amplitudes()[3] != a.amplitudes()[3]);
    }
}
