#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pairwalk/lattice.hpp"

namespace pairwalk {

enum class Particle { First = 1, Second = 2 };

/// Default half-width of the diagonal band counted as a bound pair.
inline constexpr int kDefaultBoundWidth = 1;

/// Sites counted as "edge" for contamination monitoring.
inline constexpr int kEdgeMargin = 3;

/// Mean position of each particle, sum n_i |f|^2.
std::pair<double, double> centroid(const Wavefunction& state);

/// tr(rho_1^2) / tr(rho_1)^2 with rho_1 = M M^dagger, M the amplitude grid
/// as a matrix. Equals tr(rho_1^2) for a normalized state.
double purity(const Wavefunction& state);

/// One-particle density of the chosen particle.
std::vector<double> marginal_density(const Wavefunction& state, Particle particle);

double double_occupancy(const Wavefunction& state);

/// Probability that |n1 - n2| <= width.
double bound_fraction(const Wavefunction& state, int width = kDefaultBoundWidth);

/// Probability that either particle sits within `margin` sites of an edge.
double edge_probability(const Wavefunction& state, int margin = kEdgeMargin);

/// max |f(n1,n2) - f(n2,n1)|.
double exchange_asymmetry(const Wavefunction& state);

/// Centroid of particle 1 restricted to the bound band |n1 - n2| <= width and
/// to its complement. Each is NaN when its region carries no weight.
struct BranchCentroids {
    double bound = 0.0;
    double unbound = 0.0;
};
BranchCentroids branch_centroids(const Wavefunction& state, int width = kDefaultBoundWidth);

/// Probability strictly left / right of the reference site. The unit bin
/// containing the reference is split evenly between the two sides.
struct BranchSplit {
    double left = 0.0;
    double right = 0.0;
};
BranchSplit branch_split(std::span<const double> density, double reference);

struct ObservableRecord {
    double time = 0.0;
    double centroid_1 = 0.0;
    double centroid_2 = 0.0;
    double norm = 0.0;
    double purity = 1.0;
    double double_occupancy = 0.0;
    double bound_fraction = 0.0;
    double left_fraction = 0.0;
    double right_fraction = 0.0;
    double edge_probability = 0.0;
    double bound_centroid_1 = 0.0;
    double unbound_centroid_1 = 0.0;
    std::vector<double> marginal_1;  // empty unless a marginal snapshot was due
};

struct RecordOptions {
    int bound_width = kDefaultBoundWidth;
    double reference_site = 0.0;  // for the left/right split
    bool with_marginal = false;
};

/// Evaluates every observable on one snapshot.
ObservableRecord measure(const Wavefunction& state, const RecordOptions& options);

/// Receives immutable observable records from a running evolution.
class ObservableSink {
public:
    virtual ~ObservableSink() = default;
    virtual void on_record(const ObservableRecord& record) = 0;
};

/// Sink that keeps every record in memory.
class ObservableSeries : public ObservableSink {
public:
    void on_record(const ObservableRecord& record) override { records_.push_back(record); }

    const std::vector<ObservableRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    const ObservableRecord& back() const { return records_.back(); }

private:
    std::vector<ObservableRecord> records_;
};

struct TimeSample {
    double time = 0.0;
    double value = 0.0;
};

struct VelocityEstimate {
    double impulse = 0.0;
    double mean_velocity = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    double fit_residual = 0.0;  // RMS of the linear-fit residuals
    int samples = 0;
};

/// Least-squares slope of position versus time over [t_start, t_end].
/// Throws InsufficientSamples with fewer than 10 samples in the window.
VelocityEstimate mean_velocity(std::span<const TimeSample> series, double t_start, double t_end,
                               double impulse = 0.0);

/// Pulls one scalar column out of a record series.
template <class Field>
std::vector<TimeSample> column(const std::vector<ObservableRecord>& records, Field field) {
    std::vector<TimeSample> out;
    out.reserve(records.size());
    for (const ObservableRecord& r : records) out.push_back({r.time, r.*field});
    return out;
}

}  // namespace pairwalk
