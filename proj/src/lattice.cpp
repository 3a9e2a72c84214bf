#include "pairwalk/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "pairwalk/error.hpp"

namespace pairwalk {

void LatticeSpec::validate() const {
    if (n_sites < 8) {
        throw Error(ErrorKind::BadSpec, "n_sites must be >= 8, got " + std::to_string(n_sites));
    }
    if (!(interaction >= 0.0)) {
        throw Error(ErrorKind::BadSpec, "interaction must be >= 0 (repulsive Hubbard only)");
    }
    if (!std::isfinite(hopping)) {
        throw Error(ErrorKind::BadSpec, "hopping must be finite");
    }
    if (!onsite_energy.empty() && static_cast<int>(onsite_energy.size()) != n_sites) {
        throw Error(ErrorKind::BadSpec, "onsite_energy must have n_sites entries");
    }
}

bool LatticeSpec::has_onsite_energy() const {
    return std::any_of(onsite_energy.begin(), onsite_energy.end(),
                       [](double e) { return e != 0.0; });
}

double Wavefunction::norm_squared() const {
    double s = 0.0;
    for (const cplx& a : amps_) s += std::norm(a);
    return s;
}

InitialStateSpec InitialStateSpec::centered(int n_sites, double width, int offset) {
    return InitialStateSpec{width, n_sites / 2 - offset, n_sites / 2 + offset};
}

namespace {

std::string scientific(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// Fraction of sum_n exp(-(n-c)^2/(2 sigma^2)) over all integers n that falls
// outside [0, N).
double outside_weight(int n_sites, int center, double sigma) {
    const int reach = static_cast<int>(std::ceil(40.0 * sigma)) + 2;
    double inside = 0.0;
    double outside = 0.0;
    for (int n = center - reach; n <= center + reach; ++n) {
        const double d = n - center;
        const double w = std::exp(-d * d / (2.0 * sigma * sigma));
        if (n < 0 || n >= n_sites) {
            outside += w;
        } else {
            inside += w;
        }
    }
    return outside / (inside + outside);
}

std::vector<double> gaussian_profile(int n_sites, int center, double sigma) {
    std::vector<double> g(n_sites);
    for (int n = 0; n < n_sites; ++n) {
        const double d = n - center;
        g[n] = std::exp(-d * d / (4.0 * sigma * sigma));
    }
    return g;
}

}  // namespace

Wavefunction build_initial_state(const LatticeSpec& lattice, const InitialStateSpec& init) {
    lattice.validate();
    const int n = lattice.n_sites;
    if (!(init.width > 0.0)) {
        throw Error(ErrorKind::BadSpec, "initial width must be > 0");
    }
    for (int c : {init.center_1, init.center_2}) {
        if (c < 0 || c >= n) {
            throw Error(ErrorKind::BadSpec, "initial center " + std::to_string(c) + " is off the lattice");
        }
    }
    const double w1 = outside_weight(n, init.center_1, init.width);
    const double w2 = outside_weight(n, init.center_2, init.width);
    const double lost = 1.0 - (1.0 - w1) * (1.0 - w2);
    if (lost >= kEdgeOverlapLimit) {
        throw Error(ErrorKind::EdgeOverlap,
                    "Gaussian tail weight outside the lattice is " + scientific(lost));
    }

    const std::vector<double> g1 = gaussian_profile(n, init.center_1, init.width);
    const std::vector<double> g2 = gaussian_profile(n, init.center_2, init.width);
    Wavefunction psi(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) psi(i, j) = g1[i] * g2[j];
    }
    const double scale = 1.0 / std::sqrt(psi.norm_squared());
    for (cplx& a : psi.amplitudes()) a *= scale;
    return psi;
}

void apply_rhs(std::span<const cplx> in, const LatticeSpec& lattice, double field,
               std::span<cplx> out, Gauge gauge) {
    const int n = lattice.n_sites;
    const double hop = lattice.hopping;
    const double u = lattice.interaction;
    const double origin = gauge == Gauge::Centered ? 0.5 * n : 0.0;
    const bool with_eps = lattice.has_onsite_energy();
    const bool with_potential = with_eps || field != 0.0;

    // Interleaved re/im view; every coefficient below is real, so both parts
    // follow the same recurrence and -i * s is a swap with a sign flip.
    const double* f = reinterpret_cast<const double*>(in.data());
    double* o = reinterpret_cast<double*>(out.data());
    const std::size_t stride = 2 * static_cast<std::size_t>(n);

    for (int n1 = 0; n1 < n; ++n1) {
        const double* row = f + n1 * stride;
        const double* up = n1 > 0 ? row - stride : nullptr;
        const double* down = n1 + 1 < n ? row + stride : nullptr;
        double* dst = o + n1 * stride;
        const double row_pot = with_potential ? lattice.onsite(n1) - field * (n1 - origin) : 0.0;

        for (int n2 = 0; n2 < n; ++n2) {
            const std::size_t j = 2 * static_cast<std::size_t>(n2);
            double re = 0.0;
            double im = 0.0;
            if (up) {
                re += up[j];
                im += up[j + 1];
            }
            if (down) {
                re += down[j];
                im += down[j + 1];
            }
            if (n2 > 0) {
                re += row[j - 2];
                im += row[j - 1];
            }
            if (n2 + 1 < n) {
                re += row[j + 2];
                im += row[j + 3];
            }
            re *= hop;
            im *= hop;
            if (with_potential) {
                const double v = row_pot + lattice.onsite(n2) - field * (n2 - origin);
                re += v * row[j];
                im += v * row[j + 1];
            }
            dst[j] = im;
            dst[j + 1] = -re;
        }
        if (u != 0.0) {
            const std::size_t j = 2 * static_cast<std::size_t>(n1);
            dst[j] += u * row[j + 1];
            dst[j + 1] -= u * row[j];
        }
    }
}

void apply_rhs(const Wavefunction& state, const LatticeSpec& lattice, double field,
               std::span<cplx> out, Gauge gauge) {
    if (out.size() != state.size() || state.n_sites() != lattice.n_sites) {
        throw Error(ErrorKind::BadSpec, "grid shape does not match lattice");
    }
    apply_rhs(state.amplitudes(), lattice, field, out, gauge);
}

std::vector<cplx> apply_rhs(const Wavefunction& state, const LatticeSpec& lattice, double field,
                            Gauge gauge) {
    std::vector<cplx> out(state.size());
    apply_rhs(state, lattice, field, out, gauge);
    return out;
}

}  // namespace pairwalk
