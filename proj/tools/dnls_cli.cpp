// dnls: solve, analyze and verify the dissipative NLS laboratory.
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dnls/acceptance.hpp"
#include "dnls/pipeline.hpp"

using namespace dnls;

namespace {

ExperimentConfig config_or_default(const std::string& path) {
    return path.empty() ? ExperimentConfig{} : load_config(path);
}

std::set<int> parse_ids(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dnls: split-step laboratory for the 1D dissipative NLS"};
    app.require_subcommand(1);

    std::string config_path, resume_path, out_dir, from_dir, criteria;
    bool verbose = false;
    unsigned jobs = 0;
    std::vector<std::string> sweep_configs;

    auto* solve = app.add_subcommand("solve", "evolve one configuration and write its artifacts");
    solve->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    solve->add_option("--resume", resume_path, "checkpoint file to continue from")->check(CLI::ExistingFile);
    solve->add_option("--out", out_dir, "output directory (overrides output.dir)");
    solve->add_flag("-v,--verbose", verbose, "print checkpoint progress");

    auto* asym = app.add_subcommand("asymptotics", "profile extraction and residual series");
    asym->add_option("--config", config_path, "config file");
    asym->add_option("--from", from_dir, "solve directory with stored fields")->check(CLI::ExistingDirectory);
    asym->add_option("--out", out_dir, "output directory");

    auto* oracle = app.add_subcommand("oracle", "dense Weyl validation report");
    oracle->add_option("--config", config_path, "config file")->check(CLI::ExistingFile);
    oracle->add_option("--out", out_dir, "output directory");

    auto* sw = app.add_subcommand("sweep", "run several configurations concurrently");
    sw->add_option("--config", sweep_configs, "config files")->required()->check(CLI::ExistingFile);
    sw->add_option("-j,--jobs", jobs, "parallel runs (default: hardware threads)");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--out", out_dir, "work directory");
    verify->add_option("--criteria", criteria, "comma-separated criterion ids (default: all)");
    verify->add_flag("-v,--verbose", verbose, "progress on stderr");

    auto* defaults = app.add_subcommand("defaults", "print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            const auto cfg = load_config(config_path);
            SolveOptions so;
            so.resume_path = resume_path;
            so.out_dir = out_dir;
            so.quiet = !verbose;
            const auto res = cmd_solve(cfg, so);
            for (const auto& w : res.traj.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "wrote " << res.out_dir << " (" << res.traj.checkpoints.size() << " checkpoints, "
                      << res.traj.steps << " steps)\n";
            return kExitOk;
        }
        if (*asym) {
            std::string path = config_path;
            if (path.empty() && !from_dir.empty()) path = from_dir + "/config.txt";
            if (path.empty()) throw ConfigError("asymptotics: need --config or --from");
            const auto cfg = load_config(path);
            const auto rep = cmd_asymptotics(cfg, from_dir, out_dir);
            std::cout << verdict_text(rep);
            return rep.profile.converged && rep.psi_error.empty() ? kExitOk : kExitNonConvergence;
        }
        if (*oracle) {
            const auto cfg = config_or_default(config_path);
            const auto rep = cmd_oracle(cfg, out_dir);
            for (const auto& r : rep.rows)
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " h=" << r.h << " value=" << r.value
                          << " tol=" << r.tol << "\n";
            return rep.all_pass() ? kExitOk : kExitNumerical;
        }
        if (*sw) {
            std::vector<ExperimentConfig> cfgs;
            for (const auto& p : sweep_configs) cfgs.push_back(load_config(p));
            const auto codes = sweep(cfgs, jobs);
            int worst = 0;
            for (std::size_t i = 0; i < codes.size(); ++i) {
                std::cout << sweep_configs[i] << ": exit " << codes[i] << "\n";
                worst = std::max(worst, codes[i]);
            }
            return worst;
        }
        if (*verify) {
            AcceptanceOptions ao;
            ao.only = parse_ids(criteria);
            if (!out_dir.empty()) ao.work_dir = out_dir;
            ao.verbose = verbose;
            const auto res = run_acceptance(ao, std::cout);
            for (const auto& r : res)
                if (!r.pass) return 1;
            return kExitOk;
        }
        if (*defaults) {
            std::cout << serialize_config(ExperimentConfig{});
            return kExitOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
