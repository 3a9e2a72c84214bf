#include "pairwalk/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "pairwalk/error.hpp"

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace pairwalk {

double stability_limit(const LatticeSpec& lattice, const PulseTrain& drive) {
    return 2.8 / (8.0 + lattice.interaction + drive.peak_amplitude() * lattice.n_sites);
}

namespace {

// Number of dt-steps spanning `interval`; the interval must be a whole
// multiple of dt.
long long whole_steps(double interval, double dt, const char* what) {
    const double ratio = interval / dt;
    const long long steps = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-6 * std::max(1.0, ratio)) {
        throw Error(ErrorKind::BadSpec, std::string(what) + " must be a multiple of dt");
    }
    return steps;
}

}  // namespace

void validate_config(const IntegratorConfig& config, const LatticeSpec& lattice,
                     const PulseTrain& drive) {
    lattice.validate();
    if (!(config.dt > 0.0)) throw Error(ErrorKind::BadSpec, "dt must be > 0");
    const double limit = stability_limit(lattice, drive);
    if (!(config.dt < limit)) {
        throw Error(ErrorKind::BadSpec, "dt=" + std::to_string(config.dt) +
                                            " exceeds the RK4 stability limit " + std::to_string(limit));
    }
    if (!(config.record_interval > 0.0)) throw Error(ErrorKind::BadSpec, "record_interval must be > 0");
    if (!(config.marginal_interval > 0.0)) throw Error(ErrorKind::BadSpec, "marginal_interval must be > 0");
    if (!(config.norm_tolerance > 0.0)) throw Error(ErrorKind::BadSpec, "norm_tolerance must be > 0");
    if (!(config.edge_tolerance > 0.0)) throw Error(ErrorKind::BadSpec, "edge_tolerance must be > 0");
    if (config.bound_width < 0) throw Error(ErrorKind::BadSpec, "bound_width must be >= 0");
    whole_steps(config.record_interval, config.dt, "record_interval");
    whole_steps(config.marginal_interval, config.dt, "marginal_interval");
}

Rk4Stepper::Rk4Stepper(const LatticeSpec& lattice, Gauge gauge)
    : lattice_(lattice),
      gauge_(gauge),
      n_(lattice.n_sites),
      pitch_(lattice.n_sites + 2),
      has_onsite_(lattice.has_onsite_energy()) {
    const std::size_t padded = static_cast<std::size_t>(pitch_) * (n_ + 2);
    psi_re_.assign(padded, 0.0);
    psi_im_.assign(padded, 0.0);
    rings_.resize(4);
    for (RowRing& ring : rings_) {
        ring.re.assign(static_cast<std::size_t>(pitch_) * kRing, 0.0);
        ring.im.assign(static_cast<std::size_t>(pitch_) * kRing, 0.0);
    }
    zero_row_.assign(pitch_, 0.0);
    potentials_.assign(3, std::vector<double>(n_, 0.0));
}

void Rk4Stepper::load(const Wavefunction& state) {
    if (state.n_sites() != n_) throw Error(ErrorKind::BadSpec, "state grid does not match lattice");
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            const std::size_t i = static_cast<std::size_t>(a + 1) * pitch_ + (b + 1);
            psi_re_[i] = state(a, b).real();
            psi_im_[i] = state(a, b).imag();
        }
    }
}

void Rk4Stepper::store(Wavefunction& state) const {
    if (state.n_sites() != n_) throw Error(ErrorKind::BadSpec, "state grid does not match lattice");
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            const std::size_t i = static_cast<std::size_t>(a + 1) * pitch_ + (b + 1);
            state(a, b) = cplx(psi_re_[i], psi_im_[i]);
        }
    }
}

namespace {

// Sets flush-to-zero and denormals-are-zero for the lifetime of the guard.
// Far tails of the wave packet otherwise drift through the denormal range,
// which is an order of magnitude slower on x86.
class FlushDenormals {
public:
#if defined(__SSE__)
    FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
    ~FlushDenormals() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#endif
};

enum class StageKind { First, Middle, Last };

// Pointers to the first real site of each row (index -1 and n are padding).
struct RowArgs {
    const double* up_r;
    const double* up_i;
    const double* mid_r;
    const double* mid_i;
    const double* down_r;
    const double* down_i;
    const double* psi_r;
    const double* psi_i;
    double* acc_r;
    double* acc_i;
    double* out_r;
    double* out_i;
    const double* potential;  // null when the stage carries no potential
    int n;
    int row;
    double hop;
    double u;
    double c_acc;
    double a_next;
};

// One RK4 stage on one row: k = -i H x, then
//   First:  acc = psi + c k,  out = psi + a k
//   Middle: acc += c k,       out = psi + a k
//   Last:   out = acc + c k   (out is the state row)
template <StageKind kind, bool with_potential>
void stage_row(const RowArgs& s) {
    const double* __restrict ur = s.up_r;
    const double* __restrict ui = s.up_i;
    const double* __restrict xr = s.mid_r;
    const double* __restrict xi = s.mid_i;
    const double* __restrict dr = s.down_r;
    const double* __restrict di = s.down_i;
    const double* __restrict pr = s.psi_r;
    const double* __restrict pi = s.psi_i;
    double* __restrict ar = s.acc_r;
    double* __restrict ai = s.acc_i;
    double* __restrict yr = s.out_r;
    double* __restrict yi = s.out_i;
    const double* __restrict pot = s.potential;
    const int n = s.n;
    const double hop = s.hop;
    const double c = s.c_acc;
    const double a = s.a_next;
    const double row_pot = with_potential ? pot[s.row] : 0.0;

    // Input rows never overlap output rows; GCC cannot prove it for the
    // read-modify-write accumulator without the hint.
#pragma GCC ivdep
    for (int b = 0; b < n; ++b) {
        double hr = hop * (ur[b] + dr[b] + xr[b - 1] + xr[b + 1]);
        double hi = hop * (ui[b] + di[b] + xi[b - 1] + xi[b + 1]);
        if constexpr (with_potential) {
            const double v = row_pot + pot[b];
            hr += v * xr[b];
            hi += v * xi[b];
        }
        const double kr = hi;
        const double ki = -hr;
        if constexpr (kind == StageKind::First) {
            ar[b] = pr[b] + c * kr;
            ai[b] = pi[b] + c * ki;
        } else if constexpr (kind == StageKind::Middle) {
            ar[b] += c * kr;
            ai[b] += c * ki;
        }
        if constexpr (kind == StageKind::Last) {
            yr[b] = ar[b] + c * kr;
            yi[b] = ai[b] + c * ki;
        } else {
            yr[b] = pr[b] + a * kr;
            yi[b] = pi[b] + a * ki;
        }
    }
    if (s.u != 0.0) {
        // Hubbard term on the diagonal site: k += -i U x.
        const int b = s.row;
        const double kr = s.u * xi[b];
        const double ki = -s.u * xr[b];
        if constexpr (kind == StageKind::Last) {
            yr[b] += c * kr;
            yi[b] += c * ki;
        } else {
            ar[b] += c * kr;
            ai[b] += c * ki;
            yr[b] += a * kr;
            yi[b] += a * ki;
        }
    }
}

template <StageKind kind>
void run_row(const RowArgs& s) {
    s.potential ? stage_row<kind, true>(s) : stage_row<kind, false>(s);
}

}  // namespace

void Rk4Stepper::fill_potential(std::vector<double>& pot, double field) const {
    const double origin = gauge_ == Gauge::Centered ? 0.5 * n_ : 0.0;
    for (int k = 0; k < n_; ++k) pot[k] = lattice_.onsite(k) - field * (k - origin);
}

void Rk4Stepper::step(double t, double dt, const PulseTrain& drive) {
    if (dt == 0.0) return;
    const FlushDenormals ftz;
    pipeline_step(t, dt, drive);
}

void Rk4Stepper::advance(double t, double dt, long long steps, const PulseTrain& drive) {
    if (dt == 0.0) return;
    const FlushDenormals ftz;
    for (long long k = 0; k < steps; ++k) pipeline_step(t + static_cast<double>(k) * dt, dt, drive);
}

void Rk4Stepper::pipeline_step(double t, double dt, const PulseTrain& drive) {
    // Potential of each stage, or null when the stage carries none.
    const double fields[3] = {drive.field_at(t), drive.field_at(t + 0.5 * dt), drive.field_at(t + dt)};
    const double* stage_pot[3];
    for (int k = 0; k < 3; ++k) {
        if (fields[k] != 0.0 || has_onsite_) {
            fill_potential(potentials_[k], fields[k]);
            stage_pot[k] = potentials_[k].data();
        } else {
            stage_pot[k] = nullptr;
        }
    }

    const std::size_t pitch = static_cast<std::size_t>(pitch_);
    const double* zero = zero_row_.data() + 1;
    auto grid_row = [&](std::vector<double>& plane, int row) {
        return plane.data() + static_cast<std::size_t>(row + 1) * pitch + 1;
    };
    auto ring_row = [&](RowRing& ring, int row, bool imag) {
        std::vector<double>& v = imag ? ring.im : ring.re;
        return v.data() + static_cast<std::size_t>(row % kRing) * pitch + 1;
    };
    // Rows of a ring-buffered stage; rows off the lattice read as zeros.
    auto ring_in = [&](RowRing& ring, int row, bool imag) -> const double* {
        return (row < 0 || row >= n_) ? zero : ring_row(ring, row, imag);
    };

    RowArgs args{};
    args.n = n_;
    args.hop = lattice_.hopping;
    args.u = lattice_.interaction;

    for (int r = 0; r < n_ + 3; ++r) {
        for (int stage = 0; stage < 4; ++stage) {
            const int row = r - stage;
            if (row < 0) break;
            if (row >= n_) continue;
            RowRing& acc = rings_[0];
            args.row = row;
            args.psi_r = grid_row(psi_re_, row);
            args.psi_i = grid_row(psi_im_, row);
            args.acc_r = ring_row(acc, row, false);
            args.acc_i = ring_row(acc, row, true);
            if (stage == 0) {
                args.up_r = grid_row(psi_re_, row - 1);
                args.up_i = grid_row(psi_im_, row - 1);
                args.mid_r = args.psi_r;
                args.mid_i = args.psi_i;
                args.down_r = grid_row(psi_re_, row + 1);
                args.down_i = grid_row(psi_im_, row + 1);
            } else {
                RowRing& in = rings_[stage];
                args.up_r = ring_in(in, row - 1, false);
                args.up_i = ring_in(in, row - 1, true);
                args.mid_r = ring_in(in, row, false);
                args.mid_i = ring_in(in, row, true);
                args.down_r = ring_in(in, row + 1, false);
                args.down_i = ring_in(in, row + 1, true);
            }
            if (stage < 3) {
                RowRing& out = rings_[stage + 1];
                args.out_r = ring_row(out, row, false);
                args.out_i = ring_row(out, row, true);
            } else {
                args.out_r = grid_row(psi_re_, row);
                args.out_i = grid_row(psi_im_, row);
            }
            switch (stage) {
                case 0:
                    args.potential = stage_pot[0];
                    args.c_acc = dt / 6.0;
                    args.a_next = 0.5 * dt;
                    run_row<StageKind::First>(args);
                    break;
                case 1:
                    args.potential = stage_pot[1];
                    args.c_acc = dt / 3.0;
                    args.a_next = 0.5 * dt;
                    run_row<StageKind::Middle>(args);
                    break;
                case 2:
                    args.potential = stage_pot[1];
                    args.c_acc = dt / 3.0;
                    args.a_next = dt;
                    run_row<StageKind::Middle>(args);
                    break;
                default:
                    args.potential = stage_pot[2];
                    args.c_acc = dt / 6.0;
                    args.a_next = 0.0;
                    run_row<StageKind::Last>(args);
                    break;
            }
        }
    }
}

Wavefunction rk4_step(const Wavefunction& state, const LatticeSpec& lattice, const PulseTrain& drive,
                      double dt, Gauge gauge) {
    Wavefunction next = state;
    if (dt == 0.0) return next;
    Rk4Stepper stepper(lattice, gauge);
    stepper.load(state);
    stepper.step(state.time(), dt, drive);
    stepper.store(next);
    next.set_time(state.time() + dt);
    return next;
}

EvolveResult evolve(const Wavefunction& initial, const LatticeSpec& lattice, const PulseTrain& drive,
                    const IntegratorConfig& config, ObservableSink& sink) {
    validate_config(config, lattice, drive);
    if (initial.n_sites() != lattice.n_sites) {
        throw Error(ErrorKind::BadSpec, "state grid does not match lattice");
    }
    if (std::abs(initial.norm_squared() - 1.0) > 1e-9) {
        throw Error(ErrorKind::BadSpec, "initial state must be normalized");
    }

    const auto wall_start = std::chrono::steady_clock::now();
    const double t0 = initial.time();
    const double span = config.t_final - t0;
    if (span < 0.0) throw Error(ErrorKind::BadSpec, "t_final precedes the state time");
    const long long total = whole_steps(span, config.dt, "t_final - t0");
    const long long record_every = whole_steps(config.record_interval, config.dt, "record_interval");
    const long long marginal_every = whole_steps(config.marginal_interval, config.dt, "marginal_interval");

    RecordOptions options;
    options.bound_width = config.bound_width;
    options.reference_site = centroid(initial).first;

    EvolveResult result{initial, RunReport{}};
    RunReport& report = result.report;
    Wavefunction& snapshot = result.state;
    Rk4Stepper stepper(lattice, config.gauge);
    stepper.load(initial);

    auto sample = [&](long long step) {
        const double t = t0 + static_cast<double>(step) * config.dt;
        stepper.store(snapshot);
        snapshot.set_time(t);
        options.with_marginal = step % marginal_every == 0;
        const ObservableRecord record = measure(snapshot, options);
        const double drift = std::abs(1.0 - record.norm);
        report.max_norm_drift = std::max(report.max_norm_drift, drift);
        report.max_edge_probability = std::max(report.max_edge_probability, record.edge_probability);
        sink.on_record(record);
        if (drift > config.norm_tolerance) {
            throw Error(ErrorKind::NormDrift, "|1 - norm| = " + std::to_string(drift) +
                                                  " at t = " + std::to_string(t));
        }
        if (record.edge_probability > config.edge_tolerance) {
            report.edge_contaminated = true;
            if (config.edge_policy == EdgePolicy::Abort) {
                throw Error(ErrorKind::EdgeContamination,
                            "edge probability " + std::to_string(record.edge_probability) +
                                " at t = " + std::to_string(t) + "; lattice too small for this run");
            }
        }
    };

    sample(0);
    long long step = 0;
    while (step < total) {
        const long long next = std::min(total, (step / record_every + 1) * record_every);
        stepper.advance(t0 + static_cast<double>(step) * config.dt, config.dt, next - step, drive);
        step = next;
        sample(step);
    }
    if (total == 0) snapshot.set_time(t0);

    report.steps = total;
    report.final_time = t0 + static_cast<double>(total) * config.dt;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

}  // namespace pairwalk
