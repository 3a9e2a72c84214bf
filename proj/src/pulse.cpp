#include "pairwalk/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pairwalk/error.hpp"

namespace pairwalk {

double GaussianPulse::impulse() const {
    return 2.0 * std::sqrt(std::numbers::pi) * amplitude * width;
}

bool GaussianPulse::active_at(double t) const {
    return std::abs(t - center) <= kPulseCutoffWidths * width;
}

double field_at(const GaussianPulse& pulse, double t) {
    if (!pulse.active_at(t)) return 0.0;
    const double s = t - pulse.center;
    return pulse.amplitude * std::exp(-s * s / (4.0 * pulse.width * pulse.width));
}

double calibrate_amplitude(double target_impulse, double width) {
    if (!(width > 0.0)) {
        throw Error(ErrorKind::BadSpec, "pulse width must be > 0");
    }
    return target_impulse / (2.0 * std::sqrt(std::numbers::pi) * width);
}

GaussianPulse pulse_from_impulse(double impulse, double width, double center) {
    return GaussianPulse{calibrate_amplitude(impulse, width), width, center};
}

double PulseTrain::field_at(double t) const {
    double f = 0.0;
    for (const GaussianPulse& p : pulses_) f += pairwalk::field_at(p, t);
    return f;
}

bool PulseTrain::active_at(double t) const {
    return std::any_of(pulses_.begin(), pulses_.end(),
                       [t](const GaussianPulse& p) { return p.amplitude != 0.0 && p.active_at(t); });
}

double PulseTrain::impulse() const {
    double total = 0.0;
    for (const GaussianPulse& p : pulses_) total += p.impulse();
    return total;
}

double PulseTrain::peak_amplitude() const {
    double peak = 0.0;
    for (const GaussianPulse& p : pulses_) peak += std::abs(p.amplitude);
    return peak;
}

}  // namespace pairwalk
