#include "pairwalk/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pairwalk/error.hpp"
#include "pairwalk/integrator.hpp"
#include "pairwalk/observables.hpp"
#include "pairwalk/oracle.hpp"

namespace pairwalk {

namespace {

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return s;
}

CheckResult below(std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(name), value < threshold, value, threshold, std::move(detail)};
}

std::vector<double> random_onsite(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::vector<double> eps(n);
    for (double& e : eps) e = u(rng);
    return eps;
}

// -i H f through the dense oracle matrix.
std::vector<cplx> dense_rhs(const oracle::DenseHamiltonian& h, const Wavefunction& f) {
    const Eigen::Index dim = h.matrix.rows();
    Eigen::Map<const Eigen::VectorXcd> v(f.amplitudes().data(), dim);
    const Eigen::VectorXcd hv = h.matrix.cast<cplx>() * v;
    std::vector<cplx> out(dim);
    for (Eigen::Index k = 0; k < dim; ++k) out[k] = cplx(0.0, -1.0) * hv[k];
    return out;
}

double rk4_error_vs_exact(const RhsFunction& rhs, const LatticeSpec& lattice, const Wavefunction& psi0,
                          double t, double dt) {
    const Wavefunction exact = oracle::exact_propagate(psi0, oracle::build_dense(lattice), t);
    const Wavefunction rk = reference_rk4(rhs, psi0, lattice, PulseTrain{}, dt, std::llround(t / dt));
    return max_diff(rk.amplitudes(), exact.amplitudes());
}

}  // namespace

RhsFunction default_rhs() {
    return [](std::span<const cplx> in, const LatticeSpec& lattice, double field, std::span<cplx> out,
              Gauge gauge) { apply_rhs(in, lattice, field, out, gauge); };
}

Wavefunction reference_rk4(const RhsFunction& rhs, Wavefunction state, const LatticeSpec& lattice,
                           const PulseTrain& drive, double dt, long long steps, Gauge gauge) {
    const std::size_t size = state.size();
    std::vector<cplx> k1(size), k2(size), k3(size), k4(size), tmp(size);
    auto psi = state.amplitudes();
    for (long long s = 0; s < steps; ++s) {
        const double t = state.time();
        const double f0 = drive.field_at(t);
        const double fh = drive.field_at(t + 0.5 * dt);
        const double f1 = drive.field_at(t + dt);
        rhs(psi, lattice, f0, k1, gauge);
        for (std::size_t i = 0; i < size; ++i) tmp[i] = psi[i] + 0.5 * dt * k1[i];
        rhs(tmp, lattice, fh, k2, gauge);
        for (std::size_t i = 0; i < size; ++i) tmp[i] = psi[i] + 0.5 * dt * k2[i];
        rhs(tmp, lattice, fh, k3, gauge);
        for (std::size_t i = 0; i < size; ++i) tmp[i] = psi[i] + dt * k3[i];
        rhs(tmp, lattice, f1, k4, gauge);
        for (std::size_t i = 0; i < size; ++i) psi[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        state.set_time(t + dt);
    }
    return state;
}

Wavefunction random_state(int n_sites, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Wavefunction psi(n_sites);
    for (cplx& a : psi.amplitudes()) a = {g(rng), g(rng)};
    const double norm = std::sqrt(psi.norm_squared());
    for (cplx& a : psi.amplitudes()) a /= norm;
    return psi;
}

bool ValidationReport::all_passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport validate_suite(const ValidationOptions& options) {
    ValidationReport report;
    auto& out = report.checks;
    std::mt19937_64 rng(options.seed);
    const RhsFunction& rhs = options.rhs;

    // Kernel against the dense matrix, with disorder so every diagonal term counts.
    {
        LatticeSpec lattice{8, 1.0, 4.0, random_onsite(8, rng)};
        const Wavefunction f = random_state(8, rng());
        std::vector<cplx> got(f.size());
        rhs(f.amplitudes(), lattice, 0.0, got, Gauge::Centered);
        const double err = max_diff(got, dense_rhs(oracle::build_dense(lattice), f));
        out.push_back(below("rhs_matches_dense_hamiltonian", err, 1e-12));
    }

    // RK4 against eigendecomposition, and its convergence order.
    {
        const LatticeSpec lattice{8, 1.0, 4.0, {}};
        const Wavefunction f = random_state(8, rng());
        const double e1 = rk4_error_vs_exact(rhs, lattice, f, 1.0, 1e-3);
        out.push_back(below("rk4_matches_exact_propagation", e1, 1e-8, "N=8 U=4 t=1 dt=1e-3"));
        const double coarse = rk4_error_vs_exact(rhs, lattice, f, 1.0, 0.02);
        const double fine = rk4_error_vs_exact(rhs, lattice, f, 1.0, 0.01);
        const double ratio = coarse / fine;
        out.push_back({"rk4_fourth_order", ratio >= 12.0 && ratio <= 20.0, ratio, 16.0,
                       "error ratio for dt 0.02 -> 0.01, expected in [12, 20]"});
    }

    // Production stepper against the reference RK4 through a pulse.
    {
        LatticeSpec lattice{12, 1.0, 3.0, random_onsite(12, rng)};
        const PulseTrain drive(pulse_from_impulse(1.3, 0.3, 0.5));
        const double dt = 5e-3;
        const long long steps = 200;
        const Wavefunction f = random_state(12, rng());
        Wavefunction fast = f;
        Rk4Stepper stepper(lattice, Gauge::Centered);
        stepper.load(fast);
        stepper.advance(0.0, dt, steps, drive);
        stepper.store(fast);
        const Wavefunction ref = reference_rk4(rhs, f, lattice, drive, dt, steps);
        out.push_back(below("stepper_matches_reference_rk4", max_diff(fast.amplitudes(), ref.amplitudes()), 1e-11));
    }

    // <g, H f> = <H g, f> with a field on.
    {
        LatticeSpec lattice{10, 1.0, 2.5, random_onsite(10, rng)};
        const Wavefunction f = random_state(10, rng());
        const Wavefunction g = random_state(10, rng());
        std::vector<cplx> hf(f.size()), hg(g.size());
        rhs(f.amplitudes(), lattice, 0.7, hf, Gauge::Centered);
        rhs(g.amplitudes(), lattice, 0.7, hg, Gauge::Centered);
        // rhs = -i H, so <g, H f> = i <g, rhs f> and <H g, f> = conj(i <f, rhs g>).
        const cplx lhs = cplx(0, 1) * inner(g.amplitudes(), hf);
        const cplx rhs_side = std::conj(cplx(0, 1) * inner(f.amplitudes(), hg));
        out.push_back(below("hamiltonian_hermitian", std::abs(lhs - rhs_side), 1e-12));
    }

    // U = 0 spectrum is a sum of single-particle levels.
    {
        const LatticeSpec lattice{10, 1.0, 0.0, {}};
        const auto spectrum = oracle::diagonalize(oracle::build_dense(lattice));
        const std::vector<double> expected = oracle::noninteracting_spectrum(lattice);
        double err = 0.0;
        for (std::size_t k = 0; k < expected.size(); ++k) {
            err = std::max(err, std::abs(spectrum.energies[static_cast<Eigen::Index>(k)] - expected[k]));
        }
        out.push_back(below("noninteracting_spectrum", err, 1e-10));
    }

    // Gauge choice changes only a global phase; U = 0 keeps the state a product.
    {
        const int n = 16;
        const LatticeSpec interacting{n, 1.0, 4.0, {}};
        const LatticeSpec free{n, 1.0, 0.0, {}};
        const PulseTrain drive(pulse_from_impulse(std::numbers::pi / 2, 0.5, 2.0));
        const Wavefunction f = build_initial_state(interacting, InitialStateSpec::centered(n, 1.0, 0));
        const double dt = 1e-3;
        const long long steps = 4000;
        const Wavefunction a = reference_rk4(rhs, f, interacting, drive, dt, steps, Gauge::Centered);
        const Wavefunction b = reference_rk4(rhs, f, interacting, drive, dt, steps, Gauge::Absolute);
        const double overlap = std::abs(inner(a.amplitudes(), b.amplitudes()));
        const auto [ca1, ca2] = centroid(a);
        const auto [cb1, cb2] = centroid(b);
        const double dev = std::max({std::abs(1.0 - overlap), std::abs(ca1 - cb1), std::abs(ca2 - cb2),
                                     std::abs(purity(a) - purity(b))});
        out.push_back(below("gauge_invariance", dev, 1e-9));

        const Wavefunction c = reference_rk4(rhs, f, free, drive, dt, steps);
        out.push_back(below("u0_purity_stays_one", std::abs(1.0 - purity(c)), 1e-8));
        out.push_back(below("norm_conserved", std::abs(1.0 - a.norm_squared()), 1e-9));
    }

    // Truncated pulse integrates to its nominal impulse.
    {
        const GaussianPulse p = pulse_from_impulse(3.0 * std::numbers::pi / 4, 1.0, 10.0);
        const int panels = 200000;  // Simpson over the active window
        const double a = p.center - kPulseCutoffWidths * p.width;
        const double b = p.center + kPulseCutoffWidths * p.width;
        const double h = (b - a) / panels;
        double sum = field_at(p, a) + field_at(p, b);
        for (int k = 1; k < panels; ++k) sum += (k % 2 ? 4.0 : 2.0) * field_at(p, a + k * h);
        const double integral = sum * h / 3.0;
        out.push_back(below("pulse_impulse_quadrature", std::abs(integral - p.impulse()), 1e-10));
    }

    // dt above the stability bound is refused before any step is taken.
    {
        const LatticeSpec lattice{20, 1.0, 4.0, {}};
        const PulseTrain drive(pulse_from_impulse(std::numbers::pi, 1.0, 10.0));
        IntegratorConfig config;
        config.dt = 1.01 * stability_limit(lattice, drive);
        config.record_interval = config.dt;
        config.marginal_interval = config.dt;
        bool rejected = false;
        try {
            validate_config(config, lattice, drive);
        } catch (const Error& e) {
            rejected = e.kind() == ErrorKind::BadSpec;
        }
        out.push_back({"unstable_dt_rejected", rejected, config.dt, stability_limit(lattice, drive), ""});
    }

    return report;
}

}  // namespace pairwalk
