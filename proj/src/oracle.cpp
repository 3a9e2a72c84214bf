#include "pairwalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pairwalk/error.hpp"

namespace pairwalk::oracle {

namespace {

int wrap(int k, int n) { return ((k % n) + n) % n; }

// The dense path also serves hand-checkable toy chains, so the N >= 8 rule of
// the simulator is not applied here.
void check_dense_lattice(const LatticeSpec& lattice) {
    if (lattice.n_sites < 1) throw Error(ErrorKind::BadSpec, "n_sites must be >= 1");
    LatticeSpec probe = lattice;
    probe.n_sites = std::max(probe.n_sites, 8);
    if (!lattice.onsite_energy.empty() && static_cast<int>(lattice.onsite_energy.size()) != lattice.n_sites) {
        throw Error(ErrorKind::BadSpec, "onsite_energy must have n_sites entries");
    }
    probe.onsite_energy.clear();
    probe.validate();
}

int pair_distance(int a, int b, int n, Boundary boundary) {
    const int d = std::abs(a - b);
    return boundary == Boundary::Periodic ? std::min(d, n - d) : d;
}

}  // namespace

DenseHamiltonian build_dense(const LatticeSpec& lattice, Boundary boundary) {
    check_dense_lattice(lattice);
    const int n = lattice.n_sites;
    if (n > kMaxDenseSites) {
        throw Error(ErrorKind::TooLarge, "dense Hamiltonian limited to N <= " + std::to_string(kMaxDenseSites));
    }
    const int dim = n * n;
    DenseHamiltonian h{lattice, boundary, Eigen::MatrixXd::Zero(dim, dim)};
    auto idx = [n](int a, int b) { return a * n + b; };
    const double hop = lattice.hopping;

    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int row = idx(a, b);
            h.matrix(row, row) = lattice.onsite(a) + lattice.onsite(b) + (a == b ? lattice.interaction : 0.0);
            for (int step : {-1, 1}) {
                int a2 = a + step;
                int b2 = b + step;
                if (boundary == Boundary::Periodic) {
                    a2 = wrap(a2, n);
                    b2 = wrap(b2, n);
                }
                if (a2 >= 0 && a2 < n) h.matrix(row, idx(a2, b)) += hop;
                if (b2 >= 0 && b2 < n) h.matrix(row, idx(a, b2)) += hop;
            }
        }
    }
    return h;
}

Spectrum diagonalize(const DenseHamiltonian& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.matrix);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::BadSpec, "eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Wavefunction exact_propagate(const Wavefunction& state, const Spectrum& spectrum, double t) {
    const Eigen::Index dim = spectrum.vectors.rows();
    if (static_cast<Eigen::Index>(state.size()) != dim) {
        throw Error(ErrorKind::BadSpec, "state does not match Hamiltonian dimension");
    }
    Eigen::Map<const Eigen::VectorXcd> f(state.amplitudes().data(), dim);
    Eigen::VectorXcd coeffs = spectrum.vectors.transpose().cast<cplx>() * f;
    for (Eigen::Index k = 0; k < dim; ++k) {
        coeffs[k] *= std::polar(1.0, -spectrum.energies[k] * t);
    }
    Wavefunction out(state.n_sites(), state.time() + t);
    Eigen::Map<Eigen::VectorXcd>(out.amplitudes().data(), dim) = spectrum.vectors.cast<cplx>() * coeffs;
    return out;
}

Wavefunction exact_propagate(const Wavefunction& state, const DenseHamiltonian& hamiltonian, double t) {
    return exact_propagate(state, diagonalize(hamiltonian), t);
}

double pair_weight(const Eigen::Ref<const Eigen::VectorXd>& eigenvector, int n_sites, Boundary boundary) {
    double w = 0.0;
    for (int a = 0; a < n_sites; ++a) {
        for (int b = 0; b < n_sites; ++b) {
            if (pair_distance(a, b, n_sites, boundary) <= 1) {
                const double c = eigenvector[a * n_sites + b];
                w += c * c;
            }
        }
    }
    return w;
}

ClassifiedSpectrum classify_spectrum(const LatticeSpec& lattice) {
    const DenseHamiltonian h = build_dense(lattice, Boundary::Open);
    const Spectrum spectrum = diagonalize(h);
    ClassifiedSpectrum out;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index k = 0; k < spectrum.energies.size(); ++k) {
        const double w = pair_weight(spectrum.vectors.col(k), lattice.n_sites, Boundary::Open);
        const BandState s{nan, spectrum.energies[k], w};
        if (lattice.interaction > 0.0 && w > kBoundThreshold) {
            out.bound.push_back(s);
        } else {
            out.unbound.push_back(s);
        }
    }
    return out;
}

std::vector<BandState> bound_band(const LatticeSpec& lattice) {
    if (lattice.interaction <= 0.0) {
        throw Error(ErrorKind::NoBoundBand, "no interaction, no bound pairs");
    }
    ClassifiedSpectrum spectrum = classify_spectrum(lattice);
    if (spectrum.bound.empty()) {
        throw Error(ErrorKind::NoBoundBand, "no eigenstate exceeds the pair-weight threshold");
    }
    return std::move(spectrum.bound);
}

std::vector<BandState> bound_band_periodic(const LatticeSpec& lattice) {
    lattice.validate();
    if (lattice.interaction <= 0.0) {
        throw Error(ErrorKind::NoBoundBand, "no interaction, no bound pairs");
    }
    if (lattice.has_onsite_energy()) {
        throw Error(ErrorKind::BadSpec, "momentum-resolved bands need a uniform chain");
    }
    const int n = lattice.n_sites;
    const double hop = lattice.hopping;
    std::vector<BandState> out;
    for (int m = -(n - 1) / 2; m <= n / 2; ++m) {
        const double total_k = 2.0 * std::numbers::pi * m / n;
        const cplx forward = hop * (1.0 + std::polar(1.0, -total_k));  // couples r to r + 1
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
        for (int r = 0; r < n; ++r) {
            const int next = wrap(r + 1, n);
            block(r, next) += forward;
            block(next, r) += std::conj(forward);
        }
        block(0, 0) += lattice.interaction;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
        for (int j = 0; j < n; ++j) {
            const auto v = solver.eigenvectors().col(j);
            const double w = std::norm(v[0]) + std::norm(v[1]) + std::norm(v[n - 1]);
            if (w > kBoundThreshold) out.push_back({0.5 * total_k, solver.eigenvalues()[j], w});
        }
    }
    if (out.empty()) throw Error(ErrorKind::NoBoundBand, "no bound state in any momentum block");
    return out;
}

std::vector<double> noninteracting_spectrum(const LatticeSpec& lattice) {
    const int n = lattice.n_sites;
    std::vector<double> single(n);
    for (int j = 1; j <= n; ++j) single[j - 1] = 2.0 * lattice.hopping * std::cos(std::numbers::pi * j / (n + 1));
    std::vector<double> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * n);
    for (double a : single) {
        for (double b : single) pairs.push_back(a + b);
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

}  // namespace pairwalk::oracle
