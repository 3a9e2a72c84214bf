#pragma once

#include <complex>
#include <functional>
#include <random>
#include <span>

#include "doctest.h"

#include "pairwalk/error.hpp"
#include "pairwalk/lattice.hpp"

namespace testing {

using pairwalk::cplx;
using pairwalk::Wavefunction;

inline double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
    return s;
}

// Kind of the engine error thrown by `fn`; fails the test when nothing is thrown.
inline pairwalk::ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const pairwalk::Error& e) {
        return e.kind();
    }
    FAIL("expected an engine error");
    return pairwalk::ErrorKind::ConfigError;
}

inline Wavefunction delta(int n, int a, int b) {
    Wavefunction f(n);
    f(a, b) = 1.0;
    return f;
}

}  // namespace testing
