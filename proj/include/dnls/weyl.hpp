#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "dnls/core.hpp"

namespace dnls {

// Smooth step used by the cutoff: psi(tau) = e^{-1/tau} / (e^{-1/tau} + e^{-1/(1-tau)}),
// 0 for tau <= 0 and 1 for tau >= 1.
double bump_psi(double tau);

// gamma(s) = psi((r_outer - |s|) / (r_outer - r_inner)); identity == true means gamma == 1.
struct CutoffSpec {
    double r_inner = 1.0;
    double r_outer = 2.0;
    bool identity = false;

    double operator()(double s) const;
    void validate() const;
};

using Symbol = std::function<cplx(double x, double xi)>;

// Gamma(x, xi) = gamma((x + F'(xi)) / sqrt(h)).
Symbol lambda_cutoff_symbol(const CutoffSpec& g, const SymbolF& F, double h);

struct DenseOptions {
    std::size_t cap = 512;
    // xi quadrature uses spacing h dk / xi_oversample over the grid's Brillouin zone.
    // 1 reproduces the plain grid-node quadrature.
    int xi_oversample = 1;
};

class DenseOperator {
public:
    DenseOperator(const Grid1D& g, double h);

    const Grid1D& grid() const noexcept { return grid_; }
    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return grid_.size(); }

    cplx& operator()(std::size_t j, std::size_t l) { return m_[j * grid_.size() + l]; }
    const cplx& operator()(std::size_t j, std::size_t l) const { return m_[j * grid_.size() + l]; }

    CVec apply(std::span<const cplx> v) const;
    DenseOperator operator*(const DenseOperator& o) const;
    DenseOperator operator-(const DenseOperator& o) const;
    double frobenius() const;

private:
    Grid1D grid_;
    double h_;
    CVec m_;
};

// Midpoint quadrature of the Weyl double integral on the grid. O(N^2 log N) via one
// FFT per anti-diagonal; refuses N above the cap.
DenseOperator weyl_dense(const Symbol& a, double h, const Grid1D& grid, const DenseOptions& opt = {});

// weyl_dense(a) * weyl_dense(b).
DenseOperator sharp_product_dense(const Symbol& a, const Symbol& b, double h, const Grid1D& grid,
                                  const DenseOptions& opt = {});

struct FilterOptions {
    // Zero-padding factor of the chirp-FFT box (power of two). 1 keeps the periodic box.
    int padding = 1;
    // Spectral refinement of v before chirping (power of two). The result is sampled
    // back at the original nodes.
    int oversample = 1;
    // Cells with |v| <= support_tol * max|v| are ignored by the chirp monitor.
    double support_tol = 1e-12;
    // Test hook: scales the chirp phase. Anything but 1 breaks the identity on purpose.
    double chirp_scale = 1.0;
};

struct ChirpReport {
    double max_increment = 0.0;  // largest phase jump between adjacent support cells
    bool resolved = true;
};

// Phase increments of m(y) = exp(i (y + c1)^2 / (4 c2 h)) over the support of v.
ChirpReport chirp_monitor(const ScaledField& v, double h, const SymbolF& F, double support_tol = 1e-12);

// v_Lambda = conj(m) IFFT[ gamma(2 c2 k sqrt(h)) FFT[m v] ].
// Throws NumericalError when the chirp is not resolved on the support of v.
ScaledField filter_fast(const ScaledField& v, double h, const SymbolF& F, const CutoffSpec& g,
                        const FilterOptions& opt = {});

// Same transform with multiplier 1 - gamma (v_{Lambda^c} directly).
ScaledField filter_fast_complement(const ScaledField& v, double h, const SymbolF& F,
                                   const CutoffSpec& g, const FilterOptions& opt = {});

struct FormCheck {
    bool performed = false;
    double rel_diff = 0.0;
};

// (y + c1) t v + 2 c2 D_y v. When `check` is given and the chirp is resolved on the
// support, the chirp form conj(m) 2 c2 D(m v) is also evaluated and must agree to `tol`.
ScaledField vector_field_scaled(const ScaledField& v, double t, const SymbolF& F,
                                FormCheck* check = nullptr, double tol = 1e-10);
ScaledField vector_field_scaled_chirp(const ScaledField& v, double t, const SymbolF& F);

}  // namespace dnls
