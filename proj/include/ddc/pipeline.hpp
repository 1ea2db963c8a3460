#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "ddc/evaluation.hpp"
#include "ddc/experiment.hpp"
#include "ddc/plant.hpp"
#include "ddc/synthesis.hpp"

namespace ddc {

/// Process exit codes shared by every command.
enum ExitCode : int {
    exit_ok = 0,
    exit_other = 1,
    exit_rank_failure = 2,
    exit_synthesis_infeasible = 3,
    exit_simulation_divergence = 4,
};

enum class BoundMode { analytic, estimated };

/// Flat configuration for the design procedure. Every key of the config
/// file maps to one field; command-line flags of the same name override.
struct PipelineConfig {
    std::size_t chain_length = 5;
    double mass = 1.0;
    double spring_k = 0.1;
    double drag_b = -0.1;
    double ts = 0.01;
    std::size_t samples = 40; // T
    double amplitude = 1.0;
    unsigned long long seed = 1;
    double v_r = 50.0;
    double duration = 10.0;
    double init_low = 49.0;
    double init_high = 51.0;
    std::size_t max_retries = 10;
    BoundMode bounds = BoundMode::estimated;
    double safety_factor = 1.05;
    std::size_t solver_max_iters = 20000;
    std::size_t solver_restarts = 8;
    double epsilon_margin = 0.0; // 0 selects the per-subsystem default
    std::string out_dir = "out";
    std::size_t jobs = 0; // 0 selects hardware concurrency

    void validate() const;
};

/// Parse `key = value` lines ('#' starts a comment). Unknown keys throw.
PipelineConfig load_config(const std::string& path);
void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Excitation, rollout, and rank verification with the seed-retry loop.
struct CollectionResult {
    PlantModel continuous;
    PlantModel discrete;
    std::vector<SubsystemData> data;
    std::vector<double> x_init;
    std::size_t attempts = 0;
    bool rank_ok = false;
};

CollectionResult run_collection(const PipelineConfig& cfg);

/// Per-subsystem LMI synthesis (concurrently across subsystems).
struct SynthesisRun {
    BoundSet bounds;
    std::vector<SynthesisCertificate> certificates;
    bool all_feasible = false;
};

SynthesisRun run_synthesis(const PipelineConfig& cfg, const PlantModel& discrete,
                           const std::vector<SubsystemData>& data);

BoundSet make_bounds(const PipelineConfig& cfg, const PlantModel& discrete,
                     const std::vector<SubsystemData>& data);

/// Deterministic initial state in [init_low, init_high]^n.
std::vector<double> initial_state(const PipelineConfig& cfg, std::size_t state_dim,
                                  unsigned long long stream);

/// Commands behind the CLI verbs. Each writes its artifacts under
/// cfg.out_dir and returns an ExitCode value.
int cmd_pipeline(const PipelineConfig& cfg, std::ostream& log);
int cmd_collect(const PipelineConfig& cfg, std::ostream& log);
int cmd_synthesize(const PipelineConfig& cfg, std::ostream& log);
int cmd_simulate(const PipelineConfig& cfg, std::ostream& log);
int cmd_verify(const PipelineConfig& cfg, std::ostream& log);

} // namespace ddc
