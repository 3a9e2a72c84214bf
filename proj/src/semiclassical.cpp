#include "pairwalk/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pairwalk/error.hpp"

namespace pairwalk {

namespace {

constexpr double kPi = std::numbers::pi;

struct LinearFit2 {
    double a = 0.0;
    double b = 0.0;
};

// Weighted least squares for y ~ a x1 + b x2 via the 2x2 normal equations.
LinearFit2 solve_two_column(std::span<const VelocityPoint> data, auto&& x1, auto&& x2, bool weighted) {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1y = 0.0, s2y = 0.0;
    for (const VelocityPoint& p : data) {
        const double w = weighted ? p.weight : 1.0;
        const double u = x1(p.impulse);
        const double v = x2(p.impulse);
        s11 += w * u * u;
        s12 += w * u * v;
        s22 += w * v * v;
        s1y += w * u * p.velocity;
        s2y += w * v * p.velocity;
    }
    const double det = s11 * s22 - s12 * s12;
    if (!(std::abs(det) > 1e-12 * std::max(1e-300, s11 * s22))) {
        throw Error(ErrorKind::DegenerateFit, "design matrix is rank-deficient");
    }
    return {(s22 * s1y - s12 * s2y) / det, (s11 * s2y - s12 * s1y) / det};
}

FitReport score(std::span<const VelocityPoint> data, auto&& predict) {
    FitReport report;
    double mean = 0.0;
    for (const VelocityPoint& p : data) mean += p.velocity;
    mean /= static_cast<double>(data.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const VelocityPoint& p : data) {
        const double r = p.velocity - predict(p.impulse);
        report.residuals.push_back(r);
        ss_res += r * r;
        ss_tot += (p.velocity - mean) * (p.velocity - mean);
    }
    report.residual_rms = std::sqrt(ss_res / static_cast<double>(data.size()));
    report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return report;
}

}  // namespace

double momentum_after_pulse(double k0, double impulse) {
    double k = std::remainder(k0 + impulse, 2.0 * kPi);  // [-pi, pi]
    if (k <= -kPi) k += 2.0 * kPi;
    return k;
}

double free_energy(double k, double z, double hopping) {
    return 4.0 * hopping * std::cos(k) * std::cos(z);
}

double bound_energy(double k, double interaction, double hopping) {
    const double c = std::cos(k);
    return std::sqrt(interaction * interaction + 16.0 * hopping * hopping * c * c);
}

double DispersionModel::bound_term(double k) const {
    const double c = std::cos(k);
    return std::sin(k) * c / std::sqrt(interaction * interaction + 16.0 * hopping * hopping * c * c);
}

double DispersionModel::unbound_term(double k) const {
    return -std::sin(k) * std::cos(relative_momentum);
}

double predicted_velocity(const DispersionModel& model, double k) {
    if (!model.fitted()) {
        throw Error(ErrorKind::UnfittedModel, "gamma and beta must be set before predicting");
    }
    return *model.gamma * model.bound_term(k) + *model.beta * model.unbound_term(k);
}

DispersionFit fit_gamma_beta(std::span<const VelocityPoint> data, const DispersionModel& model,
                             bool weighted) {
    if (data.size() < 6) {
        throw Error(ErrorKind::BadSpec, "need at least 6 impulse points, got " + std::to_string(data.size()));
    }
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end(),
                                              [](const auto& a, const auto& b) { return a.impulse < b.impulse; });
    if (hi->impulse - lo->impulse < kPi) {
        throw Error(ErrorKind::BadSpec, "impulses must span at least half the 2 pi period");
    }
    if (model.interaction == 0.0 && model.hopping == 0.0) {
        throw Error(ErrorKind::DegenerateFit, "bound term undefined for U = J = 0");
    }

    auto bound = [&](double impulse) { return model.bound_term(momentum_after_pulse(0.0, impulse)); };
    auto unbound = [&](double impulse) { return model.unbound_term(momentum_after_pulse(0.0, impulse)); };
    const LinearFit2 fit = solve_two_column(data, bound, unbound, weighted);

    DispersionFit out{model, {}};
    out.model.gamma = fit.a;
    out.model.beta = fit.b;
    out.report = score(data, [&](double impulse) {
        return predicted_velocity(out.model, momentum_after_pulse(0.0, impulse));
    });
    return out;
}

SinusoidFit fit_sinusoid(std::span<const VelocityPoint> data) {
    if (data.size() < 3) throw Error(ErrorKind::BadSpec, "need at least 3 points for a sinusoid fit");
    auto s = [](double i) { return std::sin(i); };
    auto c = [](double i) { return std::cos(i); };
    // A sin(I + phi) = (A cos phi) sin I + (A sin phi) cos I
    const LinearFit2 fit = solve_two_column(data, s, c, false);
    SinusoidFit out;
    out.amplitude = std::hypot(fit.a, fit.b);
    out.phase = std::atan2(fit.b, fit.a);
    out.report = score(data, [&](double i) { return fit.a * std::sin(i) + fit.b * std::cos(i); });
    return out;
}

}  // namespace pairwalk
