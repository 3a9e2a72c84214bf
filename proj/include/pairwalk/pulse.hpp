#pragma once

#include <span>
#include <utility>
#include <vector>

namespace pairwalk {

/// Beyond this many widths from its center a pulse is treated as exactly zero.
inline constexpr double kPulseCutoffWidths = 10.0;

/// F(t) = B exp(-(t - tau)^2 / (4 rho^2)).
struct GaussianPulse {
    double amplitude = 0.0;  // B
    double width = 1.0;      // rho
    double center = 0.0;     // tau

    /// Closed-form time integral of the untruncated pulse, 2 sqrt(pi) B rho.
    double impulse() const;

    /// True while |t - tau| <= 10 rho.
    bool active_at(double t) const;
};

/// Pulse value at time t; exactly zero outside the 10-rho window.
double field_at(const GaussianPulse& pulse, double t);

/// Amplitude B giving the requested impulse for a pulse of the given width.
/// Throws BadSpec for width <= 0.
double calibrate_amplitude(double target_impulse, double width);

/// Convenience: a fully specified pulse carrying `impulse`.
GaussianPulse pulse_from_impulse(double impulse, double width, double center);

/// A drive made of pulses applied additively. The experiments use one.
class PulseTrain {
public:
    PulseTrain() = default;
    PulseTrain(GaussianPulse p) : pulses_{p} {}  // NOLINT(google-explicit-constructor)
    explicit PulseTrain(std::vector<GaussianPulse> pulses) : pulses_(std::move(pulses)) {}

    double field_at(double t) const;
    bool active_at(double t) const;
    double impulse() const;

    /// Sum of |B| over the train, an upper bound on |F(t)|; used for the
    /// integrator stability bound.
    double peak_amplitude() const;

    std::span<const GaussianPulse> pulses() const { return pulses_; }
    bool empty() const { return pulses_.empty(); }

private:
    std::vector<GaussianPulse> pulses_;
};

}  // namespace pairwalk
