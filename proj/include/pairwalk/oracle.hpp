#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pairwalk/lattice.hpp"

namespace pairwalk::oracle {

/// Dense paths are limited to chains this long (matrix dimension N^2).
inline constexpr int kMaxDenseSites = 64;

/// Pair-localization weight above which an eigenstate counts as bound.
inline constexpr double kBoundThreshold = 0.5;

enum class Boundary { Open, Periodic };

/// Field-free two-particle Hamiltonian in the site basis |n1, n2>, index
/// n1 * N + n2 (the Wavefunction layout). With F = 0 every entry is real, so
/// the Hermitian matrix is stored as a real symmetric one.
struct DenseHamiltonian {
    LatticeSpec lattice;
    Boundary boundary = Boundary::Open;
    Eigen::MatrixXd matrix;

    int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// Throws TooLarge for N > 64. Chains shorter than the simulator minimum are
/// accepted.
DenseHamiltonian build_dense(const LatticeSpec& lattice, Boundary boundary = Boundary::Open);

struct Spectrum {
    Eigen::VectorXd energies;  // ascending
    Eigen::MatrixXd vectors;   // columns are eigenvectors
};

Spectrum diagonalize(const DenseHamiltonian& hamiltonian);

/// exp(-i H t) f by spectral decomposition.
Wavefunction exact_propagate(const Wavefunction& state, const Spectrum& spectrum, double t);
Wavefunction exact_propagate(const Wavefunction& state, const DenseHamiltonian& hamiltonian, double t);

/// Weight of |n1 - n2| <= 1 in a site-basis eigenvector (cyclic distance on
/// periodic chains).
double pair_weight(const Eigen::Ref<const Eigen::VectorXd>& eigenvector, int n_sites, Boundary boundary);

struct BandState {
    double momentum = 0.0;  // per-particle k = K/2; NaN when not resolved
    double energy = 0.0;
    double pair_weight = 0.0;
};

struct ClassifiedSpectrum {
    std::vector<BandState> bound;
    std::vector<BandState> unbound;
};

/// Diagonalizes the open chain and splits eigenstates at the pair-weight
/// threshold.
ClassifiedSpectrum classify_spectrum(const LatticeSpec& lattice);

/// Bound-pair eigenstates of the open chain. Throws NoBoundBand when none
/// qualifies (always for U = 0).
std::vector<BandState> bound_band(const LatticeSpec& lattice);

/// Ring variant resolved by total momentum K = 2 pi m / N: each K block is the
/// N x N relative-coordinate problem
///   (H phi)(r) = J (1 + e^{iK}) phi(r-1) + J (1 + e^{-iK}) phi(r+1) + U delta_{r0} phi(r).
/// Returns the bound states with their per-particle momentum K/2.
std::vector<BandState> bound_band_periodic(const LatticeSpec& lattice);

/// Sorted multiset of single-particle sums 2J cos(q_a) + 2J cos(q_b) on the
/// open chain, q = pi j / (N + 1).
std::vector<double> noninteracting_spectrum(const LatticeSpec& lattice);

}  // namespace pairwalk::oracle
