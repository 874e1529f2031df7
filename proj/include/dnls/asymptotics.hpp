#pragma once

#include <span>
#include <string>
#include <vector>

#include "dnls/core.hpp"
#include "dnls/fit.hpp"
#include "dnls/semiclassical.hpp"
#include "dnls/solver.hpp"

namespace dnls {

// Phi(t_m, y) = int_1^{t_m} s^{-a/2} |v_Lambda(s, y)|^a ds, trapezoid in s.
struct PhaseAccumulator {
    Grid1D ygrid;
    std::vector<double> t;
    std::vector<RVec> phi;
    // Richardson estimate |Phi_full - Phi_half| / 3 per checkpoint and y.
    std::vector<RVec> err;
};

// Trapezoid of s^{-a/2} f(s, y) over the checkpoint times. The first interval
// [1, t_0] (if t_0 > 1) uses the value at t_0. Requires t_0 <= 1.05 and
// t_{m+1} / t_m <= 1.1; a larger gap throws PreconditionError.
PhaseAccumulator phi_accumulate(const std::vector<ScaledCheckpoint>& cks, const ModelParams& p);
PhaseAccumulator phi_accumulate(const Grid1D& ygrid, const std::vector<double>& t,
                                const std::vector<CVec>& vlam, const ModelParams& p);

// z = v_Lambda exp(-i w(y) t - i lambda1 Phi + lambda2 Phi).
// Throws NumericalError when lambda2 Phi > 700.
CVec z_of(const ScaledField& vlam, std::span<const double> phi, const SymbolF& F,
          const ModelParams& p);

struct Dyad {
    double t1 = 0.0;
    double t2 = 0.0;  // == 2 t1
    double diff = 0.0;  // ||z(t2) - z(t1)||_inf
};

struct AsymptoticProfile {
    Grid1D ygrid;
    CVec zplus;
    RVec psi_plus;
    double kappa_est = 0.0;
    double T_max = 0.0;
    double fit_t_lo = 0.0, fit_t_hi = 0.0;
    std::vector<Dyad> dyads;        // every dyad with t1 >= t_min
    std::vector<Dyad> final_dyads;  // the chain T/8 -> T/4 -> T/2 -> T ending at the latest possible T
    bool converged = false;
    std::string verdict;  // "converged" or "not converged: ..."
};

// z_+ := z(T_max). kappa_est is minus the log-log slope of the dyadic Cauchy
// differences; converged when the final three dyads decrease strictly.
// Needs >= 10 checkpoints with t >= t_min.
AsymptoticProfile extract_zplus(const Grid1D& ygrid, const std::vector<double>& t,
                                const std::vector<CVec>& z, double t_min = 10.0);

struct PsiPlus {
    RVec primary;    // e^{a l2 Phi(T)} - K(T)
    RVec secondary;  // a l2 int_1^T s^{-a/2} (|z|^a - |z_+|^a) ds
    RVec budget;     // quadrature error estimates plus a roundoff floor, per y
    double truncation = 0.0;  // crude size of the neglected tail beyond T (reported only)
    double max_discrepancy = 0.0;
    double max_ratio = 0.0;   // max |primary - secondary| / budget on the thresholded set
    bool agree = false;       // max_ratio <= 1
};

// Throws NonConvergence if the estimators differ by more than 10x the budget
// on {|z_+| >= threshold ||z_+||_inf}.
PsiPlus psi_plus(const PhaseAccumulator& phi, const std::vector<CVec>& z, const AsymptoticProfile& prof,
                 const ModelParams& p, double threshold = 1e-3);

// K = 1 + (2 a l2 / (2 - a)) |z_+|^a (t^{(2-a)/2} - 1).
RVec K_of(double t, std::span<const cplx> zplus, const ModelParams& p);
// S = ln(K + psi) / (a l2). Throws PreconditionError naming y when K + psi <= 0.
RVec S_of(double t, std::span<const cplx> zplus, std::span<const double> psi,
          const ModelParams& p, const Grid1D* ygrid = nullptr);
// e^{i l1 S} (K + psi)^{-1/a}; checked against e^{i lambda S} to 1e-12.
CVec modification_factor(double t, std::span<const cplx> zplus, std::span<const double> psi,
                         const ModelParams& p, const Grid1D* ygrid = nullptr);

// Pointwise y mask {|z_+| >= threshold ||z_+||_inf}.
std::vector<bool> support_mask(std::span<const cplx> zplus, double threshold);

// Model t^{-1/2} e^{i (w(x/t) t + lambda S(t, x/t))} z_+(x/t) on the x-grid of u,
// zero for x/t outside [-Y, Y).
Field profile_model(const Grid1D& xgrid, double t, const AsymptoticProfile& prof,
                    const SymbolF& F, const ModelParams& p);

struct ProfileResidual {
    double r_inf = 0.0;
    double r_l2 = 0.0;
};

// Throws PreconditionError when more than `coverage_tol` of the mass of u lies outside |x| < t Y.
ProfileResidual profile_residuals(const Field& u, const AsymptoticProfile& prof, const SymbolF& F,
                                  const ModelParams& p, double coverage_tol = 1e-4);

// u_+(x) = (4 pi c2)^{-1/2} e^{-i pi/4} e^{-i c1 x / (2 c2)} int z_+(y) e^{-i y x / (2 c2)} dy
// on xgrid. Throws PreconditionError when xgrid does not resolve the band of u_+ or
// its extent aliases the y-grid sampling.
Field u_plus(const CVec& zplus, const Grid1D& ygrid, const SymbolF& F, const Grid1D& xgrid);

// || u(t) - e^{i lambda S(t, x/t)} e^{i F(D) t} u_+ ||_2.
double scattering_residual(const Field& u, const AsymptoticProfile& prof, const Field& uplus,
                           const SymbolF& F, const ModelParams& p);

struct LimitProbe {
    std::vector<std::pair<double, double>> series;  // (t, t^{1/a} ||u||_inf)
    double target = 0.0;
    double alpha0 = 0.0;          // (5 + sqrt 89) / 8
    bool alpha_in_range = false;  // alpha0 < alpha < 2
    double final_value = 0.0;
    double final_rel_err = 0.0;
    double max_rel_err_final_decade = 0.0;
    bool within_tol = false;      // every final-decade value within tol of the target
    bool monotone = false;        // |value - target| non-increasing over the final decade
    double tol = 0.1;
};

double universal_limit_target(const ModelParams& p);
double alpha_zero();

LimitProbe universal_limit_probe(const std::vector<std::pair<double, double>>& linf_series,
                                 const ModelParams& p, double tol = 0.1);
LimitProbe universal_limit_probe(const Trajectory& traj, double tol = 0.1);

// Relative difference of the final probe values of two runs.
double probe_agreement(const LimitProbe& a, const LimitProbe& b);

// Closed-form R = 0 flow of every point of v0 from v0.t to t.
ScaledField ode_reference(const ScaledField& v0, double t, const ModelParams& p, const SymbolF& F);

}  // namespace dnls
