#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "doctest.h"
#include "support.hpp"

#include "pairwalk/integrator.hpp"
#include "pairwalk/oracle.hpp"
#include "pairwalk/validation.hpp"

using namespace pairwalk;
using testing::delta;
using testing::kind_of;
using testing::max_diff;

namespace {

constexpr double kPi = std::numbers::pi;

IntegratorConfig quick_config(double t_final, double dt = 1e-3) {
    IntegratorConfig c;
    c.dt = dt;
    c.t_final = t_final;
    c.record_interval = 0.1;
    c.marginal_interval = 0.5;
    c.edge_policy = EdgePolicy::Flag;  // random states touch the edges
    return c;
}

Wavefunction symmetric_random(int n, unsigned long long seed) {
    Wavefunction f = random_state(n, seed);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < a; ++b) f(b, a) = f(a, b);
    }
    const double s = 1.0 / std::sqrt(f.norm_squared());
    for (cplx& v : f.amplitudes()) v *= s;
    return f;
}

}  // namespace

TEST_SUITE("stability") {
    TEST_CASE("limit formula") {
        const LatticeSpec lattice{200, 1.0, 4.0, {}};
        const PulseTrain drive(GaussianPulse{0.5, 1.0, 10.0});
        CHECK(stability_limit(lattice, drive) == doctest::Approx(2.8 / (8.0 + 4.0 + 0.5 * 200)));
        CHECK(stability_limit(lattice, {}) == doctest::Approx(2.8 / 12.0));
    }

    TEST_CASE("configs beyond the limit or with inconsistent intervals are rejected") {
        const LatticeSpec lattice{40, 1.0, 4.0, {}};
        const PulseTrain drive(pulse_from_impulse(kPi, 1.0, 10.0));
        IntegratorConfig c = quick_config(1.0);
        CHECK_NOTHROW(validate_config(c, lattice, drive));
        c.dt = stability_limit(lattice, drive);
        c.record_interval = c.marginal_interval = c.dt;
        CHECK(kind_of([&] { validate_config(c, lattice, drive); }) == ErrorKind::BadSpec);
        c = quick_config(1.0);
        c.record_interval = 0.0015;
        CHECK(kind_of([&] { validate_config(c, lattice, drive); }) == ErrorKind::BadSpec);
        c = quick_config(1.0);
        c.norm_tolerance = 0.0;
        CHECK(kind_of([&] { validate_config(c, lattice, drive); }) == ErrorKind::BadSpec);
        c = quick_config(1.0);
        c.dt = 0.0;
        CHECK(kind_of([&] { validate_config(c, lattice, drive); }) == ErrorKind::BadSpec);
    }
}

TEST_SUITE("rk4_step") {
    TEST_CASE("one step from a single-site excitation matches the eigen-propagator") {
        const LatticeSpec lattice{8, 1.0, 0.0, {}};
        const Wavefunction f = delta(8, 3, 5);
        const Wavefunction rk = rk4_step(f, lattice, {}, 1e-3);
        const Wavefunction exact = oracle::exact_propagate(f, oracle::build_dense(lattice), 1e-3);
        CHECK(max_diff(rk.amplitudes(), exact.amplitudes()) < 1e-12);
        CHECK(rk.time() == doctest::Approx(1e-3));
    }

    TEST_CASE("dt=0 is the identity") {
        const LatticeSpec lattice{8, 1.0, 4.0, {}};
        const Wavefunction f = random_state(8, 2);
        const Wavefunction same = rk4_step(f, lattice, PulseTrain(GaussianPulse{1.0, 1.0, 0.0}), 0.0);
        CHECK(max_diff(same.amplitudes(), f.amplitudes()) == 0.0);
        CHECK(same.time() == f.time());
    }

    TEST_CASE("single-step norm drift is O(dt^5)") {
        const LatticeSpec lattice{12, 1.0, 4.0, {}};
        const Wavefunction f = random_state(12, 3);
        const Wavefunction next = rk4_step(f, lattice, PulseTrain(GaussianPulse{0.3, 1.0, 0.0}), 1e-3);
        CHECK(std::abs(next.norm_squared() - 1.0) < 1e-14);
    }

    TEST_CASE("samples the field at t, t + dt/2 and t + dt") {
        std::mt19937_64 rng(4);
        for (int c = 0; c < 20; ++c) {
            const int n = 8 + static_cast<int>(rng() % 5);
            LatticeSpec lattice{n, 1.0, 0.5 * (rng() % 10), std::vector<double>(n)};
            for (double& e : lattice.onsite_energy) e = (static_cast<int>(rng() % 200) - 100) / 200.0;
            const PulseTrain drive(GaussianPulse{0.8, 0.2, 0.05});
            Wavefunction f = random_state(n, rng());
            f.set_time(0.01 * (rng() % 10));
            const Gauge gauge = c % 2 ? Gauge::Centered : Gauge::Absolute;
            const Wavefunction fast = rk4_step(f, lattice, drive, 0.01, gauge);
            const Wavefunction ref = reference_rk4(default_rhs(), f, lattice, drive, 0.01, 1, gauge);
            CHECK(max_diff(fast.amplitudes(), ref.amplitudes()) < 1e-14);
        }
    }
}

TEST_SUITE("stepper") {
    TEST_CASE("pipelined stepper equals textbook RK4 over many steps") {
        std::mt19937_64 rng(6);
        for (int c = 0; c < 12; ++c) {
            const int n = 8 + static_cast<int>(rng() % 17);
            LatticeSpec lattice{n, 1.0, 0.7 * (rng() % 12), {}};
            if (c % 3 == 0) {
                lattice.onsite_energy.resize(n);
                for (double& e : lattice.onsite_energy) e = (static_cast<int>(rng() % 200) - 100) / 100.0;
            }
            const PulseTrain drive(pulse_from_impulse(0.3 * (rng() % 20), 0.2, 0.3));
            const Gauge gauge = c % 2 ? Gauge::Centered : Gauge::Absolute;
            const Wavefunction f = random_state(n, rng());
            Rk4Stepper stepper(lattice, gauge);
            stepper.load(f);
            stepper.advance(0.0, 2e-3, 400, drive);
            Wavefunction fast(n);
            stepper.store(fast);
            const Wavefunction ref = reference_rk4(default_rhs(), f, lattice, drive, 2e-3, 400, gauge);
            CAPTURE(n);
            CHECK(max_diff(fast.amplitudes(), ref.amplitudes()) < 1e-12);
        }
    }

    TEST_CASE("step and advance agree") {
        const LatticeSpec lattice{16, 1.0, 3.0, {}};
        const PulseTrain drive(pulse_from_impulse(2.0, 0.3, 0.2));
        const Wavefunction f = random_state(16, 8);
        Rk4Stepper a(lattice, Gauge::Centered), b(lattice, Gauge::Centered);
        a.load(f);
        b.load(f);
        a.advance(0.0, 1e-3, 300, drive);
        for (int s = 0; s < 300; ++s) b.step(s * 1e-3, 1e-3, drive);
        Wavefunction wa(16), wb(16);
        a.store(wa);
        b.store(wb);
        CHECK(max_diff(wa.amplitudes(), wb.amplitudes()) == 0.0);
    }
}

TEST_SUITE("evolve") {
    TEST_CASE("N=8, U=4, F=0, t=1 matches the oracle within 1e-8") {
        const LatticeSpec lattice{8, 1.0, 4.0, {}};
        const Wavefunction f = random_state(8, 12);
        ObservableSeries series;
        const EvolveResult r = evolve(f, lattice, {}, quick_config(1.0), series);
        const Wavefunction exact = oracle::exact_propagate(f, oracle::build_dense(lattice), 1.0);
        CHECK(max_diff(r.state.amplitudes(), exact.amplitudes()) < 1e-8);
        CHECK(r.report.steps == 1000);
        CHECK(r.report.final_time == doctest::Approx(1.0));
        CHECK(r.state.time() == doctest::Approx(1.0));
    }

    TEST_CASE("halving dt shrinks the error about 16x") {
        const LatticeSpec lattice{8, 1.0, 4.0, {}};
        const Wavefunction f = random_state(8, 13);
        const Wavefunction exact = oracle::exact_propagate(f, oracle::build_dense(lattice), 1.0);
        auto error = [&](double dt) {
            Rk4Stepper s(lattice, Gauge::Centered);
            s.load(f);
            s.advance(0.0, dt, std::llround(1.0 / dt), {});
            Wavefunction out(8);
            s.store(out);
            return max_diff(out.amplitudes(), exact.amplitudes());
        };
        const double ratio = error(0.02) / error(0.01);
        CHECK(ratio > 12.0);
        CHECK(ratio < 20.0);
    }

    TEST_CASE("no force, symmetric state: the centroid stays at N/2") {
        const LatticeSpec lattice{64, 1.0, 0.0, {}};
        const Wavefunction f = build_initial_state(lattice, InitialStateSpec::centered(64, 1.0, 0));
        ObservableSeries series;
        evolve(f, lattice, {}, quick_config(10.0), series);
        for (const ObservableRecord& r : series.records()) {
            CHECK(std::abs(r.centroid_1 - 32.0) < 1e-6);
            CHECK(std::abs(r.centroid_2 - 32.0) < 1e-6);
        }
    }

    TEST_CASE("records land on the sampling grid") {
        const LatticeSpec lattice{24, 1.0, 2.0, {}};
        const Wavefunction f = build_initial_state(lattice, InitialStateSpec::centered(24, 1.0, 0));
        ObservableSeries series;
        evolve(f, lattice, {}, quick_config(2.0), series);
        const auto& recs = series.records();
        REQUIRE(recs.size() == 21);
        for (std::size_t k = 0; k < recs.size(); ++k) {
            CHECK(recs[k].time == doctest::Approx(0.1 * static_cast<double>(k)));
            const bool due = k % 5 == 0;
            CHECK(recs[k].marginal_1.empty() == !due);
        }
        CHECK(recs.front().marginal_1.size() == 24);
    }

    TEST_CASE("exchange symmetry persists through a pulse") {
        const LatticeSpec lattice{20, 1.0, 4.0, {}};
        const PulseTrain drive(pulse_from_impulse(3 * kPi / 4, 0.5, 1.0));
        const Wavefunction f = symmetric_random(20, 21);
        ObservableSeries series;
        IntegratorConfig c = quick_config(4.0);
        c.edge_policy = EdgePolicy::Flag;
        const EvolveResult r = evolve(f, lattice, drive, c, series);
        CHECK(exchange_asymmetry(r.state) < 1e-10);
        CHECK(r.report.max_norm_drift < 1e-9);
    }

    TEST_CASE("U=0 keeps a product state pure through a pulse") {
        const LatticeSpec lattice{40, 1.0, 0.0, {}};
        const PulseTrain drive(pulse_from_impulse(kPi / 2, 0.5, 2.0));
        const Wavefunction f = build_initial_state(lattice, InitialStateSpec::centered(40, 1.0, 3));
        ObservableSeries series;
        evolve(f, lattice, drive, quick_config(6.0), series);
        for (const ObservableRecord& r : series.records()) CHECK(std::abs(1.0 - r.purity) < 1e-8);
    }

    TEST_CASE("unnormalized or mismatched initial states are rejected") {
        const LatticeSpec lattice{8, 1.0, 0.0, {}};
        Wavefunction f = random_state(8, 1);
        f(0, 0) += 0.1;
        ObservableSeries series;
        CHECK(kind_of([&] { evolve(f, lattice, {}, quick_config(1.0), series); }) == ErrorKind::BadSpec);
        const Wavefunction g = random_state(9, 1);
        CHECK(kind_of([&] { evolve(g, lattice, {}, quick_config(1.0), series); }) == ErrorKind::BadSpec);
    }

    TEST_CASE("norm drift beyond tolerance throws after reporting the sample") {
        const LatticeSpec lattice{16, 1.0, 4.0, {}};
        const Wavefunction f = random_state(16, 4);
        IntegratorConfig c = quick_config(1.0, 0.05);
        c.norm_tolerance = 1e-15;
        ObservableSeries series;
        CHECK(kind_of([&] { evolve(f, lattice, {}, c, series); }) == ErrorKind::NormDrift);
        CHECK(series.records().size() >= 2);
    }

    TEST_CASE("edge contamination aborts or flags") {
        const LatticeSpec lattice{16, 1.0, 0.0, {}};
        const Wavefunction f = build_initial_state(lattice, InitialStateSpec::centered(16, 1.0, 0));
        ObservableSeries series;
        IntegratorConfig c = quick_config(6.0);
        c.edge_policy = EdgePolicy::Abort;
        CHECK(kind_of([&] { evolve(f, lattice, {}, c, series); }) == ErrorKind::EdgeContamination);
        c.edge_policy = EdgePolicy::Flag;
        ObservableSeries flagged;
        const EvolveResult r = evolve(f, lattice, {}, c, flagged);
        CHECK(r.report.edge_contaminated);
        CHECK_FALSE(r.report.valid());
        CHECK(r.report.max_edge_probability > c.edge_tolerance);
        CHECK(flagged.back().time == doctest::Approx(6.0));
    }

    TEST_CASE("identical inputs give bit-identical results, also from parallel threads") {
        const LatticeSpec lattice{30, 1.0, 4.0, {}};
        const PulseTrain drive(pulse_from_impulse(5 * kPi / 4, 0.5, 1.0));
        const Wavefunction f = build_initial_state(lattice, InitialStateSpec::centered(30, 1.0, 0));
        IntegratorConfig c = quick_config(3.0);
        c.edge_policy = EdgePolicy::Flag;
        auto run = [&] {
            ObservableSeries s;
            return evolve(f, lattice, drive, c, s).state;
        };
        const Wavefunction serial = run();
        Wavefunction a, b;
        std::thread ta([&] { a = run(); });
        std::thread tb([&] { b = run(); });
        ta.join();
        tb.join();
        CHECK(max_diff(serial.amplitudes(), a.amplitudes()) == 0.0);
        CHECK(max_diff(serial.amplitudes(), b.amplitudes()) == 0.0);
    }

    TEST_CASE("t_final equal to the start time records once") {
        const LatticeSpec lattice{8, 1.0, 0.0, {}};
        const Wavefunction f = random_state(8, 1);
        ObservableSeries series;
        IntegratorConfig c = quick_config(0.0);
        const EvolveResult r = evolve(f, lattice, {}, c, series);
        CHECK(series.records().size() == 1);
        CHECK(r.report.steps == 0);
    }
}
