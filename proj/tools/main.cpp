// Command-line front end for the decentralized data-driven control toolkit.
//
// Verbs mirror the design procedure: `collect` excites the plant and
// records data, `synthesize` solves the per-subsystem LMIs, `simulate`
// runs the tracking loop, `verify` re-checks stored artifacts, and
// `pipeline` chains everything.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ddc/errors.hpp"
#include "ddc/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> pairs;
};

void add_common_options(CLI::App* cmd, CliOverrides& ov) {
    cmd->add_option("--config", ov.config_path, "configuration file (key = value lines)");

    // Every config key doubles as a flag of the same name.
    static const char* keys[] = {"chain_length", "mass",          "spring_k",
                                 "drag_b",       "ts",            "samples",
                                 "amplitude",    "seed",          "v_r",
                                 "duration",     "init_low",      "init_high",
                                 "max_retries",  "bounds",        "safety_factor",
                                 "solver_max_iters", "solver_restarts", "epsilon_margin",
                                 "jobs"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            std::string("--") + key,
            [&ov, key](const std::string& value) { ov.pairs.emplace_back(key, value); });
    }
    cmd->add_option_function<std::string>(
        "--out", [&ov](const std::string& value) { ov.pairs.emplace_back("out_dir", value); },
        "output directory");
}

ddc::PipelineConfig resolve_config(const CliOverrides& ov) {
    ddc::PipelineConfig cfg;
    if (!ov.config_path.empty())
        cfg = ddc::load_config(ov.config_path);
    for (const auto& [key, value] : ov.pairs)
        ddc::set_config_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized data-driven controller design"};
    app.require_subcommand(1);

    CliOverrides ov;
    int (*run)(const ddc::PipelineConfig&, std::ostream&) = nullptr;

    auto* pipeline = app.add_subcommand("pipeline", "run the full design procedure");
    add_common_options(pipeline, ov);
    pipeline->callback([&] { run = ddc::cmd_pipeline; });

    auto* collect = app.add_subcommand("collect", "excite the plant and record data matrices");
    add_common_options(collect, ov);
    collect->callback([&] { run = ddc::cmd_collect; });

    auto* synthesize = app.add_subcommand("synthesize", "solve the per-subsystem LMIs");
    add_common_options(synthesize, ov);
    synthesize->callback([&] { run = ddc::cmd_synthesize; });

    auto* simulate = app.add_subcommand("simulate", "run the velocity-tracking loop");
    add_common_options(simulate, ov);
    simulate->callback([&] { run = ddc::cmd_simulate; });

    auto* verify = app.add_subcommand("verify", "re-check stored data and certificates");
    add_common_options(verify, ov);
    verify->callback([&] { run = ddc::cmd_verify; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : ddc::exit_other;
    }

    try {
        return run(resolve_config(ov), std::cout);
    } catch (const ddc::RankDeficient& err) {
        std::cerr << "error: " << err.what() << "\n";
        return ddc::exit_rank_failure;
    } catch (const ddc::UnstableRollout& err) {
        std::cerr << "error: " << err.what() << " (step " << err.step() << ")\n";
        return ddc::exit_simulation_divergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return ddc::exit_other;
    }
}
