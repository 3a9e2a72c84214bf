#include "pairwalk/observables.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "pairwalk/error.hpp"

namespace pairwalk {

std::pair<double, double> centroid(const Wavefunction& state) {
    const int n = state.n_sites();
    double c1 = 0.0;
    double c2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p = std::norm(state(i, j));
            row += p;
            c2 += j * p;
        }
        c1 += i * row;
    }
    return {c1, c2};
}

double purity(const Wavefunction& state) {
    using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const int n = state.n_sites();
    Eigen::Map<const RowMajor> m(state.amplitudes().data(), n, n);

    // Only the lower triangle of the Hermitian Gram matrix is formed.
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    rho.selfadjointView<Eigen::Lower>().rankUpdate(m);
    double trace = 0.0;
    double diag = 0.0;
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
        trace += rho(j, j).real();
        diag += std::norm(rho(j, j));
        for (int i = j + 1; i < n; ++i) off += std::norm(rho(i, j));
    }
    // Normalized by tr(rho)^2 so that integrator norm drift does not read as entanglement.
    return trace > 0.0 ? (diag + 2.0 * off) / (trace * trace) : 0.0;
}

std::vector<double> marginal_density(const Wavefunction& state, Particle particle) {
    const int n = state.n_sites();
    std::vector<double> p(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = std::norm(state(i, j));
            p[particle == Particle::First ? i : j] += w;
        }
    }
    return p;
}

double double_occupancy(const Wavefunction& state) {
    double s = 0.0;
    for (int i = 0; i < state.n_sites(); ++i) s += std::norm(state(i, i));
    return s;
}

double bound_fraction(const Wavefunction& state, int width) {
    const int n = state.n_sites();
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - width);
        const int hi = std::min(n - 1, i + width);
        for (int j = lo; j <= hi; ++j) s += std::norm(state(i, j));
    }
    return s;
}

double edge_probability(const Wavefunction& state, int margin) {
    const int n = state.n_sites();
    auto near_edge = [&](int k) { return k < margin || k >= n - margin; };
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        if (near_edge(i)) {
            for (int j = 0; j < n; ++j) s += std::norm(state(i, j));
        } else {
            for (int j = 0; j < margin; ++j) s += std::norm(state(i, j));
            for (int j = n - margin; j < n; ++j) s += std::norm(state(i, j));
        }
    }
    return s;
}

double exchange_asymmetry(const Wavefunction& state) {
    const int n = state.n_sites();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(state(i, j) - state(j, i)));
    }
    return worst;
}

BranchCentroids branch_centroids(const Wavefunction& state, int width) {
    const int n = state.n_sites();
    double wb = 0.0, xb = 0.0, wu = 0.0, xu = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double p = std::norm(state(i, j));
            if (std::abs(i - j) <= width) {
                wb += p;
                xb += i * p;
            } else {
                wu += p;
                xu += i * p;
            }
        }
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    return {wb > 0.0 ? xb / wb : nan, wu > 0.0 ? xu / wu : nan};
}

BranchSplit branch_split(std::span<const double> density, double reference) {
    BranchSplit split;
    for (std::size_t k = 0; k < density.size(); ++k) {
        const double site = static_cast<double>(k);
        if (site < reference - 0.5) {
            split.left += density[k];
        } else if (site >= reference + 0.5) {
            split.right += density[k];
        } else {
            split.left += 0.5 * density[k];
            split.right += 0.5 * density[k];
        }
    }
    return split;
}

ObservableRecord measure(const Wavefunction& state, const RecordOptions& options) {
    ObservableRecord r;
    r.time = state.time();
    std::tie(r.centroid_1, r.centroid_2) = centroid(state);
    r.norm = state.norm_squared();
    r.purity = purity(state);
    r.double_occupancy = double_occupancy(state);
    r.bound_fraction = bound_fraction(state, options.bound_width);
    r.edge_probability = edge_probability(state);
    const BranchCentroids branches = branch_centroids(state, options.bound_width);
    r.bound_centroid_1 = branches.bound;
    r.unbound_centroid_1 = branches.unbound;

    std::vector<double> m1 = marginal_density(state, Particle::First);
    const BranchSplit split = branch_split(m1, options.reference_site);
    r.left_fraction = split.left;
    r.right_fraction = split.right;
    if (options.with_marginal) r.marginal_1 = std::move(m1);
    return r;
}

VelocityEstimate mean_velocity(std::span<const TimeSample> series, double t_start, double t_end,
                               double impulse) {
    double st = 0.0, sx = 0.0;
    int count = 0;
    for (const TimeSample& s : series) {
        if (s.time >= t_start && s.time <= t_end && std::isfinite(s.value)) {
            st += s.time;
            sx += s.value;
            ++count;
        }
    }
    if (count < 10) {
        throw Error(ErrorKind::InsufficientSamples,
                    std::to_string(count) + " samples in velocity window, need >= 10");
    }
    const double mt = st / count;
    const double mx = sx / count;
    double stt = 0.0, stx = 0.0;
    for (const TimeSample& s : series) {
        if (s.time >= t_start && s.time <= t_end && std::isfinite(s.value)) {
            stt += (s.time - mt) * (s.time - mt);
            stx += (s.time - mt) * (s.value - mx);
        }
    }
    const double slope = stx / stt;
    double ss = 0.0;
    for (const TimeSample& s : series) {
        if (s.time >= t_start && s.time <= t_end && std::isfinite(s.value)) {
            const double r = s.value - (mx + slope * (s.time - mt));
            ss += r * r;
        }
    }
    return VelocityEstimate{impulse, slope, t_start, t_end, std::sqrt(ss / count), count};
}

}  // namespace pairwalk
