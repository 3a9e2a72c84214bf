#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pairwalk {

using cplx = std::complex<double>;

/// One-dimensional tight-binding chain shared by both particles.
/// Units: hbar = J = e = a = 1.
struct LatticeSpec {
    int n_sites = 0;
    double hopping = 1.0;
    double interaction = 0.0;
    std::vector<double> onsite_energy;  // empty means all zero

    /// Throws BadSpec when n_sites < 8, interaction < 0, or onsite_energy has
    /// the wrong length.
    void validate() const;

    bool has_onsite_energy() const;
    double onsite(int n) const { return onsite_energy.empty() ? 0.0 : onsite_energy[n]; }
};

/// Two-particle amplitude grid f(n1, n2), row-major in n1.
class Wavefunction {
public:
    Wavefunction() = default;
    explicit Wavefunction(int n_sites, double time = 0.0)
        : n_(n_sites), time_(time), amps_(static_cast<std::size_t>(n_sites) * n_sites) {}

    int n_sites() const { return n_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    cplx& operator()(int n1, int n2) { return amps_[index(n1, n2)]; }
    const cplx& operator()(int n1, int n2) const { return amps_[index(n1, n2)]; }

    std::span<cplx> amplitudes() { return amps_; }
    std::span<const cplx> amplitudes() const { return amps_; }

    std::size_t size() const { return amps_.size(); }

    double norm_squared() const;

private:
    std::size_t index(int n1, int n2) const { return static_cast<std::size_t>(n1) * n_ + n2; }

    int n_ = 0;
    double time_ = 0.0;
    std::vector<cplx> amps_;
};

struct InitialStateSpec {
    double width = 1.0;  // sigma, sites
    int center_1 = 0;
    int center_2 = 0;

    /// Centers at (N/2 - offset, N/2 + offset).
    static InitialStateSpec centered(int n_sites, double width, int offset);
};

/// Probability weight a Gaussian product may leave outside the lattice.
inline constexpr double kEdgeOverlapLimit = 1e-12;

/// Normalized product of Gaussians exp(-(n - c)^2 / (4 sigma^2)) for each
/// particle. Throws BadSpec for sigma <= 0 or centers off the lattice and
/// EdgeOverlap when the untruncated profile would put >= 1e-12 of its weight
/// outside [0, N).
Wavefunction build_initial_state(const LatticeSpec& lattice, const InitialStateSpec& init);

/// Where the scalar potential -F * x is anchored. Centered measures x from
/// N/2; Absolute uses the raw site index. The two differ by a global phase.
enum class Gauge { Centered, Absolute };

/// Writes df/dt = -i H(t) f into `out` (same size as the state), with open
/// boundaries and the linear potential of strength `field`.
void apply_rhs(const Wavefunction& state, const LatticeSpec& lattice, double field,
               std::span<cplx> out, Gauge gauge = Gauge::Centered);

/// Allocating convenience overload.
std::vector<cplx> apply_rhs(const Wavefunction& state, const LatticeSpec& lattice, double field,
                            Gauge gauge = Gauge::Centered);

/// Raw-span kernel used by the integrator: out = -i H f, both n x n grids.
void apply_rhs(std::span<const cplx> in, const LatticeSpec& lattice, double field,
               std::span<cplx> out, Gauge gauge = Gauge::Centered);

}  // namespace pairwalk
