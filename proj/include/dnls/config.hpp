#pragma once

#include <string>
#include <vector>

#include "dnls/core.hpp"
#include "dnls/solver.hpp"
#include "dnls/weyl.hpp"

namespace dnls {

// Flat description of the initial datum; `kind` picks which fields matter.
struct InitialConfig {
    std::string kind = "gaussian";  // gaussian | supergaussian | twobump | file
    double amplitude = 1.0;
    double width = 1.0;
    double chirp = 0.0;
    double velocity = 0.0;
    double center = 0.0;
    int order = 2;
    double amplitude2 = 1.0;
    double separation = 10.0;
    std::string path;

    InitialSpec to_spec() const;
    bool operator==(const InitialConfig&) const = default;
};

struct ScaledGridConfig {
    double Y = 5.0;
    std::size_t m = 0;  // 0 picks the size from the chirp rule at t_max
    bool operator==(const ScaledGridConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "out";
    bool write_fields = false;   // one binary field file per checkpoint
    bool write_checkpoint = true;  // resumable state at t_max
    bool operator==(const OutputConfig&) const = default;
};

struct PipelineConfig {
    bool vf_report = true;
    bool asymptotics = false;
    double fit_t_min = 10.0;  // remainder and Cauchy windows start here
    double ode_t0 = 100.0;    // launch time of the closed-form comparison
    bool operator==(const PipelineConfig&) const = default;
};

struct Tolerances {
    double monotonicity = 1e-3;
    double support_threshold = 1e-3;  // pointwise checks use |z_+| >= this * max|z_+|
    double limit = 0.1;
    double ode_rel = 0.15;
    double coverage = 1e-4;
    double oracle = 1e-6;
    double identity = 1e-8;
    bool operator==(const Tolerances&) const = default;
};

struct OracleConfig {
    std::size_t n = 128;
    double half_width = 8.0;
    std::vector<double> h = {0.25, 0.0625};
    std::size_t cap = 512;
    int xi_oversample = 16;
    int padding = 4;
    double chirp_scale = 1.0;  // test hook for the negative control
    bool operator==(const OracleConfig&) const = default;
};

struct ExperimentConfig {
    std::string name = "run";
    bool test_mode = false;
    ModelParams model;
    SymbolF symbol;
    std::size_t n = 4096;
    double half_width = 200.0;
    ScaledGridConfig scaled;
    StepConfig time;
    CutoffSpec cutoff;
    FilterOptions filter;
    InitialConfig initial;
    OutputConfig output;
    PipelineConfig pipeline;
    Tolerances tol;
    OracleConfig oracle;

    Grid1D grid() const { return Grid1D(n, half_width); }
    // Throws ConfigError on any inconsistent value.
    void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Sectioned `key = value` text; '#' starts a comment. Unknown sections or keys,
// duplicates and malformed values throw ConfigError naming the line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Every key, doubles printed with 17 significant digits so parsing is bit-exact.
std::string serialize_config(const ExperimentConfig& cfg);
void save_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace dnls
