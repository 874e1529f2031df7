#pragma once

#include <string>
#include <vector>

#include "dnls/core.hpp"
#include "dnls/fit.hpp"
#include "dnls/weyl.hpp"

namespace dnls {

struct FrameInfo {
    double tail_fraction = 0.0;  // spectral energy of u in the top 10% of |k|
    bool tail_warning = false;
};

// v(t, y_j) = sqrt(t) u(t, t y_j) with band-limited interpolation of u.
// Needs t >= 1 and t Y <= L.
ScaledField to_v_frame(const Field& u, const Grid1D& ygrid, FrameInfo* info = nullptr,
                       double tail_threshold = 1e-10);

// Scaled grid on [-Y, Y) fine enough that the chirp (y + c1)^2 t_max / (4 c2) moves by
// at most pi/2 per cell anywhere on the grid.
Grid1D make_ygrid(double Y, double t_max, const SymbolF& F);

struct ScaledCheckpoint {
    double t = 1.0;
    ScaledField v;
    ScaledField vlam;
    ScaledField vlamc;
    Norms nv, nlam, nlamc;
    double h() const { return 1.0 / t; }
};

// v_Lambda = filter_fast(v, 1/t), v_{Lambda^c} = v - v_Lambda.
ScaledCheckpoint split_v(const ScaledField& v, const SymbolF& F, const CutoffSpec& g,
                         const FilterOptions& opt = {});

// Closed-form flow of the reduced ODE D_t v = w v + lambda t^{-a/2} |v|^a v from t0 to t,
// pointwise at scaled position y. Needs lambda2 > 0 and alpha < 2.
cplx ode_flow(cplx v0, double y, double t0, double t, const ModelParams& p, const SymbolF& F);

struct RemainderRow {
    double t = 0.0;
    double vlamc_inf = 0.0;
    double vlamc_l2 = 0.0;
    double R_inf_proxy = 0.0;
    double ratio = 0.0;  // ||v_{Lambda^c}||_inf / ||v||_inf
};

struct RemainderSeries {
    std::vector<RemainderRow> rows;
    SlopeFit slope_inf, slope_l2, slope_R, slope_ratio_final_decade;
    double bound_inf = -0.15;
    double bound_l2 = -0.4;
    double bound_R = 0.0;       // -(5/4 - alpha/2) + 0.15
    double bound_R_h02 = 0.0;   // (1/4 - alpha/2) + 0.15, reported only
    bool inf_ok = false, l2_ok = false, R_ok = false, ratio_to_zero = false;
};

// Rates over checkpoints with t >= t_min (>= 8 of them). The R proxy at t_m is
// t_m^{a/2} max_y |zeta(t_{m+1}) - Flow(zeta(t_{m-1}))| / (t_{m+1} - t_{m-1}) with
// zeta = v_Lambda e^{-i w t}: the centred difference of v_Lambda measured against the
// exact flow of the R = 0 equation (one-sided at the ends).
RemainderSeries remainder_rates(const std::vector<ScaledCheckpoint>& cks, const ModelParams& p,
                                const SymbolF& F, double t_min = 10.0);

}  // namespace dnls
