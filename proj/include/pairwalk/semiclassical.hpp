#pragma once

#include <optional>
#include <span>
#include <vector>

namespace pairwalk {

/// Wavevector after a pulse of impulse I, k = k0 + I, reduced to (-pi, pi].
double momentum_after_pulse(double k0, double impulse);

/// Unbound two-particle band, E = 4 J cos(k) cos(z), k the center-of-mass and
/// z the relative momentum.
double free_energy(double k, double z, double hopping = 1.0);

/// Bound-pair band, E = sqrt(U^2 + 16 J^2 cos^2(k)).
double bound_energy(double k, double interaction, double hopping = 1.0);

/// Semi-classical drift model
///   v(k) = gamma sin k cos k / sqrt(U^2 + 16 J^2 cos^2 k) - beta sin k cos z
/// whose two terms track the bound and unbound band slopes. gamma and beta
/// are fit constants.
struct DispersionModel {
    double hopping = 1.0;
    double interaction = 0.0;
    std::optional<double> gamma;
    std::optional<double> beta;
    double relative_momentum = 0.0;  // z

    bool fitted() const { return gamma.has_value() && beta.has_value(); }

    /// The bound-band and unbound-band basis functions at k.
    double bound_term(double k) const;
    double unbound_term(double k) const;
};

/// Throws UnfittedModel when gamma or beta is unset.
double predicted_velocity(const DispersionModel& model, double k);

struct VelocityPoint {
    double impulse = 0.0;
    double velocity = 0.0;
    double weight = 1.0;  // used only by weighted fits
};

struct FitReport {
    double r_squared = 0.0;
    double residual_rms = 0.0;
    std::vector<double> residuals;
};

struct DispersionFit {
    DispersionModel model;
    FitReport report;
};

/// Least-squares gamma and beta for data taken at k = momentum_after_pulse(0,
/// I). Needs >= 6 points spanning at least half of the 2 pi impulse period
/// (BadSpec otherwise); throws DegenerateFit on a rank-deficient design.
DispersionFit fit_gamma_beta(std::span<const VelocityPoint> data, const DispersionModel& model,
                             bool weighted = false);

/// v(I) = A sin(I + phi) fitted by linear least squares in (sin I, cos I).
struct SinusoidFit {
    double amplitude = 0.0;  // A >= 0
    double phase = 0.0;      // phi in (-pi, pi]
    FitReport report;
};
SinusoidFit fit_sinusoid(std::span<const VelocityPoint> data);

}  // namespace pairwalk
