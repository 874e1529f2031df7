#include "dnls/czt.hpp"

#include <cmath>

#include "dnls/fft.hpp"

namespace dnls {

namespace {
inline cplx half_square_phase(double beta, long long n, double sign) {
    const double nn = static_cast<double>(n);
    return std::polar(1.0, sign * 0.5 * beta * nn * nn);
}
}  // namespace

CVec chirp_z(std::span<const cplx> c, long long q_lo, double beta, long long m_lo, std::size_t M) {
    const std::size_t Q = c.size();
    CVec out(M);
    if (Q == 0 || M == 0) return out;
    const std::size_t len_b = Q + M - 1;
    const std::size_t P = next_pow2(len_b);
    const auto& plan = fft_plan(P);

    CVec A(P, cplx{});
    for (std::size_t i = 0; i < Q; ++i)
        A[i] = c[i] * half_square_phase(beta, q_lo + static_cast<long long>(i), 1.0);

    const long long n_lo = m_lo - q_lo - static_cast<long long>(Q - 1);
    CVec B(P, cplx{});
    for (std::size_t k = 0; k < len_b; ++k)
        B[k] = half_square_phase(beta, n_lo + static_cast<long long>(k), -1.0);

    plan.forward(A);
    plan.forward(B);
    for (std::size_t k = 0; k < P; ++k) A[k] *= B[k];
    plan.inverse(A);

    const double inv = 1.0 / static_cast<double>(P);
    for (std::size_t m = 0; m < M; ++m) {
        const long long mm = m_lo + static_cast<long long>(m);
        out[m] = A[m + Q - 1] * inv * half_square_phase(beta, mm, 1.0);
    }
    return out;
}

CVec trig_interp_uniform_hat(const Grid1D& g, std::span<const cplx> fhat, double a, double step,
                             std::size_t M) {
    const std::size_t N = g.size();
    const long long half = static_cast<long long>(N / 2);
    const long long m0 = static_cast<long long>(M / 2);
    // Centre the output index: x = ac + m' step.
    const double ac = a + static_cast<double>(m0) * step;
    const double dk = g.dk();
    const double shift = ac + g.half_width();

    CVec c(N + 1);
    const double invN = 1.0 / static_cast<double>(N);
    for (long long q = -half; q <= half; ++q) {
        cplx coeff;
        if (q == -half || q == half)
            coeff = 0.5 * fhat[static_cast<std::size_t>(half)];
        else
            coeff = fhat[static_cast<std::size_t>(q < 0 ? q + static_cast<long long>(N) : q)];
        const double ph = std::fmod(static_cast<double>(q) * dk * shift, 2.0 * kPi);
        c[static_cast<std::size_t>(q + half)] = coeff * std::polar(invN, ph);
    }
    return chirp_z(c, -half, dk * step, -m0, M);
}

CVec trig_interp_uniform(const Grid1D& g, std::span<const cplx> f, double a, double step,
                         std::size_t M) {
    CVec fhat(f.begin(), f.end());
    fft_plan(g.size()).forward(fhat);
    return trig_interp_uniform_hat(g, fhat, a, step, M);
}

CVec dft_uniform(const Grid1D& g, std::span<const cplx> f, double xi0, double dxi, std::size_t M) {
    const std::size_t N = g.size();
    const long long j0 = static_cast<long long>(N / 2);
    const long long m0 = static_cast<long long>(M / 2);
    const double yc = g.x(static_cast<std::size_t>(j0));
    const double xic = xi0 + static_cast<double>(m0) * dxi;
    const double dy = g.dx();

    CVec c(N);
    for (std::size_t j = 0; j < N; ++j) {
        const double jp = static_cast<double>(static_cast<long long>(j) - j0);
        c[j] = f[j] * std::polar(1.0, -std::fmod(jp * dy * xic, 2.0 * kPi));
    }
    CVec s = chirp_z(c, -j0, -dy * dxi, -m0, M);
    for (std::size_t m = 0; m < M; ++m) {
        const double mp = static_cast<double>(static_cast<long long>(m) - m0);
        s[m] *= std::polar(1.0, -yc * (xic + mp * dxi));
    }
    return s;
}

double spectral_tail_fraction(const Grid1D& g, std::span<const cplx> fhat, double band) {
    const double kmax = g.dk() * static_cast<double>(g.size() / 2);
    const double cut = (1.0 - band) * kmax;
    double tail = 0.0, total = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double e = std::norm(fhat[j]);
        total += e;
        if (std::abs(g.k(j)) >= cut) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace dnls
