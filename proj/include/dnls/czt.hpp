#pragma once

#include <cstddef>
#include <span>

#include "dnls/core.hpp"

namespace dnls {

// Bluestein chirp-z: s_m = sum_{q=q_lo}^{q_lo+Q-1} c[q-q_lo] e^{i beta q m}
// for m = m_lo .. m_lo+M-1. Integer offsets may be negative; centred index
// ranges keep the quadratic phases small.
CVec chirp_z(std::span<const cplx> c, long long q_lo, double beta, long long m_lo, std::size_t M);

// Band-limited (trigonometric) interpolant of the samples f on g, evaluated
// at x_m = a + m step, m = 0..M-1. The Nyquist mode is split evenly between
// +N/2 and -N/2 so real data interpolate to real values.
CVec trig_interp_uniform(const Grid1D& g, std::span<const cplx> f, double a, double step,
                         std::size_t M);

// Same interpolant from a precomputed unnormalized forward FFT of f.
CVec trig_interp_uniform_hat(const Grid1D& g, std::span<const cplx> fhat, double a, double step,
                             std::size_t M);

// Riemann sum S(xi_m) = sum_j f_j e^{-i y_j xi_m} at xi_m = xi0 + m dxi.
CVec dft_uniform(const Grid1D& g, std::span<const cplx> f, double xi0, double dxi, std::size_t M);

// Fraction of spectral energy in the top `band` fraction of |k| (interpolation tail estimate).
double spectral_tail_fraction(const Grid1D& g, std::span<const cplx> fhat, double band = 0.1);

}  // namespace dnls
