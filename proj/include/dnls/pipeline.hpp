#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnls/asymptotics.hpp"
#include "dnls/config.hpp"
#include "dnls/diagnostics.hpp"
#include "dnls/semiclassical.hpp"
#include "dnls/solver.hpp"

namespace dnls {

// 0 success, 2 config error, 3 numerical abort, 4 non-convergence.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitNonConvergence = 4 };

int exit_code_for(const Error& e);

struct SolveOptions {
    std::string resume_path;  // checkpoint file written by a previous solve
    std::string out_dir;      // overrides cfg.output.dir when non-empty
    bool keep_fields = false; // keep every checkpoint field in memory
    bool write_files = true;
    bool quiet = true;
};

struct SolveResult {
    Trajectory traj;
    std::string out_dir;
};

// Runs strang_evolve and writes config.txt, ledger.csv, norms.csv, vf_report.csv,
// state.ckp, fields/ and plot.gp under the output directory.
SolveResult cmd_solve(const ExperimentConfig& cfg, const SolveOptions& opt = {});

// Everything the asymptotic analysis of one trajectory produces.
struct ResidualRow {
    double t = 0.0;
    double r_inf_scaled = 0.0;  // ||u - model||_inf t^{1/2}
    double r_l2 = 0.0;
    double scat_l2 = 0.0;
    double limit_probe = 0.0;   // t^{1/a} ||u||_inf
    double target = 0.0;
};

struct OdeComparison {
    double t0 = 0.0;
    double T = 0.0;
    double max_rel_err = 0.0;  // over {|z_+| >= threshold max|z_+|}
    bool ok = false;
};

struct AsymptoticsReport {
    ModelParams params;
    SymbolF symbol;
    Grid1D ygrid;
    std::vector<ScaledCheckpoint> scaled;  // v and v_{Lambda^c} values dropped after the norms
    std::vector<std::string> warnings;
    RemainderSeries remainder;
    PhaseAccumulator phi;
    std::vector<CVec> z;
    AsymptoticProfile profile;
    std::optional<PsiPlus> psi;
    std::string psi_error;
    double identity4_defect = 0.0;  // max relative defect of the integrated amplitude law at T
    std::vector<ResidualRow> residuals;
    std::vector<double> dyadic_times;  // T/4, T/2, T of the final chain
    bool r_inf_nonincreasing = false;
    bool scat_nonincreasing = false;
    LimitProbe limit;
    std::optional<OdeComparison> ode;
    SlopeFit decay;  // log-log slope of ||u||_inf over [50, T]
    bool decay_fitted = false;
};

// Needs stored fields at every checkpoint with t >= 1.
AsymptoticsReport analyze_trajectory(const Trajectory& traj, const ExperimentConfig& cfg);

// Integrated amplitude law at the last checkpoint:
// max over the mask of |e^{a l2 Phi} - 1 - a l2 int s^{-a/2} |z|^a ds| / e^{a l2 Phi}.
double identity4_defect(const PhaseAccumulator& phi, const std::vector<CVec>& z, const ModelParams& p,
                        const std::vector<bool>& mask);

// Solves (or loads fields written by a previous solve from `from_dir`), analyzes,
// and writes profile.csv, residuals.csv, remainder.csv, verdict.txt.
AsymptoticsReport cmd_asymptotics(const ExperimentConfig& cfg, const std::string& from_dir = {},
                                  const std::string& out_dir = {});

// Loads a trajectory from a solve directory with fields/index.csv.
Trajectory load_trajectory(const std::string& dir, const ExperimentConfig& cfg);

struct OracleRow {
    std::string name;
    double h = 0.0;
    double value = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    bool all_pass() const;
};

// Dense Weyl checks on the oracle grid. Throws PreconditionError when n exceeds the cap.
OracleReport run_oracle(const ExperimentConfig& cfg);
OracleReport cmd_oracle(const ExperimentConfig& cfg, const std::string& out_dir = {});

// Runs each config in its own thread and directory; returns one exit code per config.
std::vector<int> sweep(const std::vector<ExperimentConfig>& cfgs, unsigned max_parallel = 0);

// Verdict text as key = value lines.
std::string verdict_text(const AsymptoticsReport& rep);

}  // namespace dnls
