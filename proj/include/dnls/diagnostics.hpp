#pragma once

#include <string>
#include <vector>

#include "dnls/core.hpp"
#include "dnls/fit.hpp"
#include "dnls/solver.hpp"
#include "dnls/weyl.hpp"

namespace dnls {

enum class VfForm { Auto, Direct, Chirp };

// Chirp phase phi = (x^2 + 2 c1 t x) / (4 c2 t) resolved (< pi per cell) on the support of u.
// `margin` scales pi down for a safety factor.
bool vf_chirp_resolved(const Field& u, double t, const SymbolF& F, double margin = 1.0);

// (x + c1 t) u + 2 c2 t D u. Auto picks the chirp form e^{-i phi} 2 c2 t D(e^{i phi} u)
// when t >= 1 and the chirp is resolved with margin 1/2. When `check` is given and the
// chirp is resolved, both forms are evaluated and must agree to `tol`.
Field L_apply(const Field& u, double t, const SymbolF& F, VfForm form = VfForm::Auto,
              FormCheck* check = nullptr, double tol = 1e-10);
Field L_apply_direct(const Field& u, double t, const SymbolF& F);
Field L_apply_chirp(const Field& u, double t, const SymbolF& F);

struct GnRatios {
    double r1 = 0.0;
    double r4 = 0.0;
};

struct VFRow {
    double t = 0.0;
    double l2 = 0.0;
    double Lnorm = 0.0;
    double L2norm = 0.0;
    double linf = 0.0;
    double r1 = 0.0;
    double r4 = 0.0;
};

// r1 = ||u||_inf / (t^{-1/2} ||u||_2^{1/2} ||Lu||_2^{1/2});
// r4 = ||Lu||_4 / (||u||_inf^{1/2} ||L^2 u||_2^{1/2}). Needs t >= 1 and u != 0.
GnRatios gn_ratios(const Field& u, double t, const SymbolF& F);

// One report row. r1 and r4 are set to 0 where their preconditions fail (t < 1 or zero norms).
VFRow vf_row(const Field& u, const SymbolF& F);

struct VFReport {
    std::vector<VFRow> rows;
};

VFReport vf_report(const Trajectory& traj);

struct MonotonicityVerdict {
    std::vector<std::pair<double, double>> series;  // (t, ||L u||_2)
    double x_norm0 = 0.0;
    double max_violation = 0.0;  // max_t ||L u|| / ||x u0|| - 1 (<= 0 when satisfied)
    double tol = 1e-3;
    bool asserted = true;  // false when the parameters are not strictly dissipative
    bool passed = true;
};

MonotonicityVerdict vf_monotonicity(const VFReport& rep, double x_norm0, const ModelParams& p,
                                    double tol = 1e-3);

struct GrowthVerdict {
    SlopeFit fit;
    double bound = 0.0;  // 2 - alpha + 0.15
    bool degenerate = false;
    bool passed = true;
};

// Log-log slope of ||L^2 u||_2 over the last decade of rows (>= 8 points).
GrowthVerdict vf_growth_L2sq(const VFReport& rep, const ModelParams& p);

}  // namespace dnls
