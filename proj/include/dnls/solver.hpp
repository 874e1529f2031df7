#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dnls/core.hpp"

namespace dnls {

// dt used from t_start onwards (until the next segment starts).
struct ScheduleSegment {
    double t_start = 0.0;
    double dt = 1e-3;
};

struct StepConfig {
    double dt = 1e-3;
    double t_max = 10.0;
    double checkpoint_ratio = 1.0905077326652577;  // 2^{1/8}: dyadic times land on checkpoints
    double boundary_budget = 1e-4;
    std::vector<ScheduleSegment> schedule;   // optional table, sorted by t_start
    std::vector<double> extra_checkpoints;   // added to the geometric schedule
    double sponge_strength = 0.0;            // > 0 enables the absorbing layer (breaks the ledger)

    void validate() const;
    double dt_at(double t) const;
};

struct LedgerEntry {
    double t = 0.0;
    double mass = 0.0;         // ||u(t)||_2^2
    double dissipation = 0.0;  // 2 lambda2 int_0^t ||u||_{a+2}^{a+2}, trapezoid in time
    double defect = 0.0;
};

struct DissipationLedger {
    double initial_mass = 0.0;
    double cumulative_dissipation = 0.0;
    std::vector<LedgerEntry> series;
};

struct Checkpoint {
    double t = 0.0;
    Field u;  // empty values when fields are not kept
    Norms norms;
};

struct Trajectory {
    ModelParams params;
    SymbolF symbol;
    Grid1D grid;
    std::vector<Checkpoint> checkpoints;
    DissipationLedger ledger;
    double x_norm0 = 0.0;  // ||x u_0||_2
    std::size_t steps = 0;
    std::vector<std::string> warnings;
};

struct StepInfo {
    double t = 0.0;
    double dt = 0.0;
    double mass = 0.0;
};

struct EvolveOptions {
    bool test_mode = false;   // permits lambda2 == 0 (conservative limit)
    bool keep_fields = true;  // store Field snapshots in the trajectory
    std::function<void(const Checkpoint&, const DissipationLedger&)> on_checkpoint;
    std::function<void(const StepInfo&)> on_step;
    // Ledger state when resuming; ignored for fresh runs.
    double resume_initial_mass = -1.0;
    double resume_dissipation = 0.0;
};

// Free flow over dt: u_hat_k <- e^{i F(k) dt} u_hat_k.
Field linear_step(const Field& u, double dt, const SymbolF& F);

// Pointwise closed-form flow of d|u|/dt = -lambda2 |u|^{a+1}, d theta/dt = lambda1 |u|^a.
Field nonlinear_step_exact(const Field& u, double dt, const ModelParams& p);

// Strang splitting N_{dt/2} L_dt N_{dt/2} with checkpoints at t_m = ratio^m (m >= 0) past the start time,
// the extra times and t_max. Throws BoundaryTrip or NumericalError on abort.
Trajectory strang_evolve(const Field& u0, const StepConfig& cfg, const ModelParams& p,
                         const SymbolF& F, const EvolveOptions& opt = {});

std::vector<LedgerEntry> ledger_defect(const Trajectory& traj);

// Checkpoint times after t0 up to t_max (inclusive).
std::vector<double> checkpoint_times(double t0, const StepConfig& cfg);

// Box sizing heuristic 1.5 t_max (2 c2 k99 + |c1|).
double recommended_half_width(const Field& u0, double t_max, const SymbolF& F);

// Binary checkpoint file: magic "DNLSCKP1", uint64 N, then doubles
// L, t, alpha, lambda1, lambda2, c2, c1, c0, initial_mass, cumulative_dissipation,
// followed by N (re, im) pairs.
struct CheckpointFile {
    Field u;
    ModelParams params;
    SymbolF symbol;
    double initial_mass = 0.0;
    double cumulative_dissipation = 0.0;
};

void write_checkpoint(const std::string& path, const CheckpointFile& ck);
CheckpointFile read_checkpoint(const std::string& path);

}  // namespace dnls
