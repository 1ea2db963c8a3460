#include "ddc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ddc/csv.hpp"
#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"
#include "ddc/representation.hpp"
#include "ddc/sdp.hpp"

namespace ddc {

namespace {

unsigned long long mix_seed(unsigned long long a, unsigned long long b) {
    unsigned long long z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double seeded_unit(unsigned long long& state) {
    state += 0x9e3779b97f4a7c15ull;
    unsigned long long z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) / 9007199254740992.0;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

std::string data_path(const PipelineConfig& cfg, std::size_t i, const char* name) {
    return cfg.out_dir + "/data_" + std::to_string(i + 1) + "_" + name + ".csv";
}

std::string cert_path(const PipelineConfig& cfg, std::size_t i, const char* name) {
    return cfg.out_dir + "/cert_" + std::to_string(i + 1) + "_" + name + ".csv";
}

void write_data_csvs(const PipelineConfig& cfg, const std::vector<SubsystemData>& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        write_matrix_csv(data_path(cfg, i, "U"), data[i].u);
        write_matrix_csv(data_path(cfg, i, "Phi"), data[i].phi);
        write_matrix_csv(data_path(cfg, i, "X0"), data[i].x0);
        write_matrix_csv(data_path(cfg, i, "X1"), data[i].x1);
    }
}

std::vector<SubsystemData> read_data_csvs(const PipelineConfig& cfg, std::size_t count) {
    std::vector<SubsystemData> data(count);
    for (std::size_t i = 0; i < count; ++i) {
        data[i].u = read_matrix_csv(data_path(cfg, i, "U"));
        data[i].phi = read_matrix_csv(data_path(cfg, i, "Phi"));
        data[i].x0 = read_matrix_csv(data_path(cfg, i, "X0"));
        data[i].x1 = read_matrix_csv(data_path(cfg, i, "X1"));
    }
    return data;
}

void write_cert_csvs(const PipelineConfig& cfg, const std::vector<SynthesisCertificate>& certs) {
    for (std::size_t i = 0; i < certs.size(); ++i) {
        write_matrix_csv(cert_path(cfg, i, "Q"), certs[i].q);
        write_matrix_csv(cert_path(cfg, i, "S"), certs[i].s);
        write_matrix_csv(cert_path(cfg, i, "K"), certs[i].k);
    }
}

PlantModel build_discrete_chain(const PipelineConfig& cfg) {
    return discretize_zoh(
        build_spring_mass_chain(cfg.chain_length, cfg.mass, cfg.spring_k, cfg.drag_b), cfg.ts);
}

void ensure_out_dir(const PipelineConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
}

std::string gain_row(const Matrix& k) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < k.rows(); ++i) {
        for (std::size_t j = 0; j < k.cols(); ++j) {
            if (i || j)
                out << ", ";
            out << fmt(k(i, j));
        }
    }
    out << "]";
    return out.str();
}

/// Earliest time from which every velocity stays within 0.5 of the target.
double velocity_convergence_time(const Trace& trace, double v_r, double tol) {
    std::size_t settled = trace.steps();
    for (std::size_t k = trace.steps(); k-- > 0;) {
        double worst = 0.0;
        for (std::size_t i = 0; i < trace.state_dims.size(); ++i)
            worst = std::max(worst, std::abs(trace.states[k][2 * i + 1] - v_r));
        if (worst > tol)
            break;
        settled = k;
    }
    return settled < trace.steps() ? trace.times[settled] : -1.0;
}

void write_report(const PipelineConfig& cfg, const CollectionResult& coll,
                  const SynthesisRun& synth, const Trace* trace, double closed_loop_radius) {
    std::ofstream out(cfg.out_dir + "/report.txt");
    out << "decentralized data-driven synthesis report\n";
    out << "chain: M=" << cfg.chain_length << " mass=" << fmt(cfg.mass)
        << " k=" << fmt(cfg.spring_k) << " b=" << fmt(cfg.drag_b) << " Ts=" << fmt(cfg.ts)
        << "\n";
    out << "experiment: T=" << cfg.samples << " amplitude=" << fmt(cfg.amplitude)
        << " seed=" << cfg.seed << " attempts=" << coll.attempts << "\n";
    out << "bounds: " << (cfg.bounds == BoundMode::analytic ? "analytic" : "estimated")
        << " (safety " << fmt(cfg.safety_factor) << ")\n";
    for (std::size_t i = 0; i < synth.certificates.size(); ++i) {
        const auto& cert = synth.certificates[i];
        const Reconstruction recon = reconstruct(coll.data[i]);
        out << "subsystem " << (i + 1) << ": T=" << coll.data[i].samples()
            << " rank=" << (recon.rank_ok ? "ok" : "FAIL")
            << " residual=" << fmt(recon.residual) << " lambda_max=" << fmt(cert.lambda_max)
            << " lambda_min_S=" << fmt(cert.lambda_min_s)
            << " status=" << (cert.feasible ? "feasible" : "infeasible-at-tolerance")
            << " iterations=" << cert.iterations << " K=" << gain_row(cert.k) << "\n";
    }
    out << "closed loop: spectral_radius=" << fmt(closed_loop_radius) << "\n";
    if (trace) {
        const double settle = velocity_convergence_time(*trace, cfg.v_r, 0.5);
        out << "tracking: v_r=" << fmt(cfg.v_r) << " duration=" << fmt(cfg.duration)
            << " converged_at=" << (settle >= 0.0 ? fmt(settle) + "s" : std::string("never"))
            << "\n";
    }
}

} // namespace

void PipelineConfig::validate() const {
    if (ts <= 0.0)
        throw InvalidParameter("ts must be positive");
    if (samples < 1)
        throw InvalidParameter("samples must be at least 1");
    if (duration <= 0.0)
        throw InvalidParameter("duration must be positive");
    if (chain_length < 2)
        throw InvalidParameter("chain_length must be at least 2");
    if (init_low > init_high)
        throw InvalidParameter("init_low must not exceed init_high");
    if (amplitude < 0.0)
        throw InvalidParameter("amplitude must be nonnegative");
    if (safety_factor < 1.0)
        throw InvalidParameter("safety_factor must be at least 1");
    if (epsilon_margin < 0.0)
        throw InvalidParameter("epsilon_margin must be nonnegative (0 = default)");
}

void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    auto as_size = [&] { return static_cast<std::size_t>(std::stoull(value)); };
    if (key == "chain_length")
        cfg.chain_length = as_size();
    else if (key == "mass")
        cfg.mass = as_double();
    else if (key == "spring_k")
        cfg.spring_k = as_double();
    else if (key == "drag_b")
        cfg.drag_b = as_double();
    else if (key == "ts")
        cfg.ts = as_double();
    else if (key == "samples")
        cfg.samples = as_size();
    else if (key == "amplitude")
        cfg.amplitude = as_double();
    else if (key == "seed")
        cfg.seed = std::stoull(value);
    else if (key == "v_r")
        cfg.v_r = as_double();
    else if (key == "duration")
        cfg.duration = as_double();
    else if (key == "init_low")
        cfg.init_low = as_double();
    else if (key == "init_high")
        cfg.init_high = as_double();
    else if (key == "max_retries")
        cfg.max_retries = as_size();
    else if (key == "bounds") {
        if (value == "analytic")
            cfg.bounds = BoundMode::analytic;
        else if (value == "estimated")
            cfg.bounds = BoundMode::estimated;
        else
            throw InvalidParameter("bounds must be 'analytic' or 'estimated'");
    } else if (key == "safety_factor")
        cfg.safety_factor = as_double();
    else if (key == "solver_max_iters")
        cfg.solver_max_iters = as_size();
    else if (key == "solver_restarts")
        cfg.solver_restarts = as_size();
    else if (key == "epsilon_margin")
        cfg.epsilon_margin = as_double();
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "jobs")
        cfg.jobs = as_size();
    else
        throw InvalidParameter("unknown config key: " + key);
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidParameter("cannot open config file: " + path);
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line " + std::to_string(lineno) + " lacks '='");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        set_config_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

std::vector<double> initial_state(const PipelineConfig& cfg, std::size_t state_dim,
                                  unsigned long long stream) {
    unsigned long long state = mix_seed(cfg.seed, stream);
    std::vector<double> x(state_dim);
    for (double& xi : x)
        xi = cfg.init_low + (cfg.init_high - cfg.init_low) * seeded_unit(state);
    return x;
}

CollectionResult run_collection(const PipelineConfig& cfg) {
    cfg.validate();

    CollectionResult result;
    result.continuous =
        build_spring_mass_chain(cfg.chain_length, cfg.mass, cfg.spring_k, cfg.drag_b);
    result.discrete = discretize_zoh(result.continuous, cfg.ts);
    result.x_init = initial_state(cfg, result.discrete.total_state_dim(), 0xA11);

    // Excitation-plan requirement: T >= (m + l)(n + 1) + n per subsystem;
    // below it the rank condition cannot be guaranteed by any retry.
    for (const auto& sub : result.discrete.subsystems) {
        if (cfg.samples < min_samples_required(sub.input_dim(), sub.phi_dim(),
                                               sub.state_dim())) {
            result.rank_ok = false;
            return result;
        }
    }

    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        ++result.attempts;
        std::vector<Matrix> inputs;
        inputs.reserve(cfg.chain_length);
        for (std::size_t i = 0; i < cfg.chain_length; ++i) {
            ExcitationPlan plan;
            plan.samples = cfg.samples;
            plan.amplitude = cfg.amplitude;
            plan.seed = mix_seed(cfg.seed, 0xE0 + i + 1000 * attempt);
            inputs.push_back(
                generate_excitation(plan, result.discrete.subsystems[i].input_dim()));
        }

        result.data = collect(result.discrete, inputs, result.x_init, cfg.samples);
        result.rank_ok = true;
        for (const auto& d : result.data) {
            if (!check_rank_condition(d)) {
                result.rank_ok = false;
                break;
            }
        }
        if (result.rank_ok)
            break;
    }
    return result;
}

BoundSet make_bounds(const PipelineConfig& cfg, const PlantModel& discrete,
                     const std::vector<SubsystemData>& data) {
    if (cfg.bounds == BoundMode::analytic)
        return chain_analytic_bounds(discrete);
    // Estimated mode: every recorded state sample feeds the ratio estimate.
    std::vector<std::vector<double>> samples;
    const std::size_t t = data.front().samples();
    samples.reserve(t);
    for (std::size_t k = 0; k < t; ++k) {
        std::vector<double> s;
        for (const auto& d : data) {
            const std::vector<double> xk = d.x0.col(k);
            s.insert(s.end(), xk.begin(), xk.end());
        }
        samples.push_back(std::move(s));
    }
    return estimate_bounds(discrete, samples, cfg.safety_factor);
}

SynthesisRun run_synthesis(const PipelineConfig& cfg, const PlantModel& discrete,
                           const std::vector<SubsystemData>& data) {
    SynthesisRun run;
    run.bounds = make_bounds(cfg, discrete, data);
    run.certificates.resize(data.size());

    const std::size_t jobs =
        cfg.jobs > 0 ? cfg.jobs
                     : std::max<std::size_t>(1, std::thread::hardware_concurrency());

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(data.size());
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= data.size())
                return;
            try {
                const LmiProblem problem = build_problem(data[i], run.bounds, i);
                SolverConfig solver;
                solver.max_iters = cfg.solver_max_iters;
                solver.restarts = cfg.solver_restarts;
                solver.seed = mix_seed(cfg.seed, 0x5D + i);
                solver.epsilon_margin = cfg.epsilon_margin > 0.0
                                            ? cfg.epsilon_margin
                                            : default_epsilon_margin(data[i]);
                run.certificates[i] = synthesize(problem, solver);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    std::vector<std::thread> pool;
    const std::size_t nthreads = std::min(jobs, data.size());
    pool.reserve(nthreads);
    for (std::size_t w = 0; w < nthreads; ++w)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);

    run.all_feasible = true;
    for (const auto& cert : run.certificates)
        if (!cert.feasible)
            run.all_feasible = false;
    return run;
}

int cmd_collect(const PipelineConfig& cfg, std::ostream& log) {
    ensure_out_dir(cfg);
    const CollectionResult coll = run_collection(cfg);
    write_data_csvs(cfg, coll.data);
    if (!coll.rank_ok) {
        if (coll.attempts == 0)
            log << "T=" << cfg.samples
                << " is below the excitation requirement (m+l)(n+1)+n; the rank "
                   "condition on [U;Phi;X0] cannot be guaranteed\n";
        else
            log << "rank condition failed for at least one subsystem after " << coll.attempts
                << " attempts (need rank m+l+n on [U;Phi;X0])\n";
        return exit_rank_failure;
    }
    log << "collected T=" << cfg.samples << " samples for " << cfg.chain_length
        << " subsystems in " << coll.attempts << " attempt(s); rank condition ok\n";
    return exit_ok;
}

int cmd_synthesize(const PipelineConfig& cfg, std::ostream& log) {
    ensure_out_dir(cfg);
    const PlantModel discrete = build_discrete_chain(cfg);
    const std::vector<SubsystemData> data = read_data_csvs(cfg, cfg.chain_length);
    for (const auto& d : data) {
        if (!check_rank_condition(d)) {
            log << "stored data fails the rank condition; re-run collect\n";
            return exit_rank_failure;
        }
    }
    const SynthesisRun synth = run_synthesis(cfg, discrete, data);
    write_cert_csvs(cfg, synth.certificates);
    for (std::size_t i = 0; i < synth.certificates.size(); ++i) {
        const auto& cert = synth.certificates[i];
        log << "subsystem " << (i + 1) << ": lambda_max=" << fmt(cert.lambda_max)
            << " lambda_min_S=" << fmt(cert.lambda_min_s) << " K=" << gain_row(cert.k)
            << (cert.feasible ? "" : "  [infeasible-at-tolerance]") << "\n";
    }
    return synth.all_feasible ? exit_ok : exit_synthesis_infeasible;
}

int cmd_simulate(const PipelineConfig& cfg, std::ostream& log) {
    ensure_out_dir(cfg);
    ClosedLoop loop;
    loop.plant = build_discrete_chain(cfg);
    for (std::size_t i = 0; i < cfg.chain_length; ++i) {
        loop.gains.push_back(read_matrix_csv(cert_path(cfg, i, "K")));
        loop.s_blocks.push_back(read_matrix_csv(cert_path(cfg, i, "S")));
    }
    const std::vector<double> x_init =
        initial_state(cfg, loop.plant.total_state_dim(), 0x51);
    try {
        const Trace trace = simulate_tracking(loop, cfg.v_r, x_init, cfg.duration);
        write_trace_csv(cfg.out_dir + "/trace.csv", trace);
        const double settle = velocity_convergence_time(trace, cfg.v_r, 0.5);
        log << "tracking v_r=" << fmt(cfg.v_r) << ": velocities within 0.5 from "
            << (settle >= 0.0 ? fmt(settle) + " s" : std::string("never")) << "\n";
    } catch (const UnstableRollout& err) {
        log << "simulation diverged at step " << err.step() << "\n";
        return exit_simulation_divergence;
    }
    return exit_ok;
}

int cmd_verify(const PipelineConfig& cfg, std::ostream& log) {
    const PlantModel discrete = build_discrete_chain(cfg);
    const std::vector<SubsystemData> data = read_data_csvs(cfg, cfg.chain_length);

    bool rank_ok = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const bool ok = check_rank_condition(data[i]);
        const bool pe = check_pe(vstack({data[i].u, data[i].phi}), data[i].state_dim() + 1);
        const Reconstruction recon = reconstruct(data[i]);
        log << "subsystem " << (i + 1) << ": rank=" << (ok ? "ok" : "FAIL")
            << " pe_order_n+1=" << (pe ? "yes" : "no") << " residual=" << fmt(recon.residual)
            << "\n";
        rank_ok = rank_ok && ok;
    }
    if (!rank_ok)
        return exit_rank_failure;

    const BoundSet bounds = make_bounds(cfg, discrete, data);
    bool certified = true;
    std::vector<Matrix> gains;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Matrix q = read_matrix_csv(cert_path(cfg, i, "Q"));
        const LmiProblem problem = build_problem(data[i], bounds, i);
        const double eps = cfg.epsilon_margin > 0.0 ? cfg.epsilon_margin
                                                    : default_epsilon_margin(data[i]);
        const SymEigResult eig = sym_eig(assemble_lmi(problem, q).symmetrized());
        const Matrix s = (data[i].x0 * q).symmetrized();
        const double lambda_min_s = sym_eig(s).values.back();
        const bool ok = eig.values.front() <= -eps && lambda_min_s > 0.0;
        log << "certificate " << (i + 1) << ": lambda_max=" << fmt(eig.values.front())
            << " (margin " << fmt(eps) << ") lambda_min_S=" << fmt(lambda_min_s)
            << (ok ? " ok" : " FAIL") << "\n";
        certified = certified && ok;
        gains.push_back(read_matrix_csv(cert_path(cfg, i, "K")));
    }
    const double radius = spectral_radius(assemble_closed_loop_matrix(discrete, gains));
    log << "closed loop: spectral_radius=" << fmt(radius) << (radius < 1.0 ? " ok" : " FAIL")
        << "\n";
    if (!certified || radius >= 1.0)
        return exit_synthesis_infeasible;
    return exit_ok;
}

int cmd_pipeline(const PipelineConfig& cfg, std::ostream& log) {
    ensure_out_dir(cfg);

    const CollectionResult coll = run_collection(cfg);
    write_data_csvs(cfg, coll.data);
    if (!coll.rank_ok) {
        if (coll.attempts == 0)
            log << "T=" << cfg.samples
                << " is below the excitation requirement (m+l)(n+1)+n; the rank "
                   "condition on [U;Phi;X0] cannot be guaranteed; aborting\n";
        else
            log << "rank condition failed after " << coll.attempts
                << " attempts (rank of [U;Phi;X0] must be m+l+n); aborting\n";
        return exit_rank_failure;
    }
    log << "step 1-4: data collected (T=" << cfg.samples << ", attempts=" << coll.attempts
        << "), rank condition ok\n";

    const SynthesisRun synth = run_synthesis(cfg, coll.discrete, coll.data);
    write_cert_csvs(cfg, synth.certificates);
    for (std::size_t i = 0; i < synth.certificates.size(); ++i) {
        const auto& cert = synth.certificates[i];
        log << "step 5: subsystem " << (i + 1) << " lambda_max=" << fmt(cert.lambda_max)
            << " K=" << gain_row(cert.k)
            << (cert.feasible ? "" : "  [infeasible-at-tolerance]") << "\n";
    }

    ClosedLoop loop;
    loop.plant = coll.discrete;
    for (const auto& cert : synth.certificates) {
        loop.gains.push_back(cert.k);
        loop.s_blocks.push_back(cert.s);
    }

    double radius = 0.0;
    Trace trace;
    int code = exit_ok;
    if (synth.all_feasible) {
        radius = spectral_radius(assemble_closed_loop_matrix(coll.discrete, loop.gains));
        log << "closed loop spectral radius: " << fmt(radius) << "\n";
        const std::vector<double> x_init =
            initial_state(cfg, coll.discrete.total_state_dim(), 0x51);
        try {
            trace = simulate_tracking(loop, cfg.v_r, x_init, cfg.duration);
            write_trace_csv(cfg.out_dir + "/trace.csv", trace);
            const double settle = velocity_convergence_time(trace, cfg.v_r, 0.5);
            log << "step 6: tracking v_r=" << fmt(cfg.v_r) << ", velocities within 0.5 from "
                << (settle >= 0.0 ? fmt(settle) + " s" : std::string("never")) << "\n";
        } catch (const UnstableRollout& err) {
            log << "step 6: simulation diverged at step " << err.step() << "\n";
            code = exit_simulation_divergence;
        }
    } else {
        log << "synthesis infeasible for at least one subsystem; skipping simulation\n";
        code = exit_synthesis_infeasible;
    }

    write_report(cfg, coll, synth, trace.steps() > 0 ? &trace : nullptr, radius);
    return code;
}

} // namespace ddc
