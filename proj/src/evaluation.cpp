#include "ddc/evaluation.hpp"

#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

Matrix assemble_closed_loop_matrix(const PlantModel& plant, const std::vector<Matrix>& gains) {
    if (gains.size() != plant.subsystem_count())
        throw InvalidParameter("one gain per subsystem required");
    const std::size_t n = plant.total_state_dim();
    Matrix cl(n, n);
    for (std::size_t i = 0; i < plant.subsystem_count(); ++i) {
        const auto& sub = plant.subsystems[i];
        if (gains[i].rows() != sub.input_dim() || gains[i].cols() != sub.state_dim())
            throw InvalidParameter("gain shape mismatch");
        const std::size_t off = plant.state_offset(i);
        cl.set_block(off, off, sub.a + sub.b * gains[i]);
        for (const auto& ic : sub.interconnections) {
            if (!ic.linear)
                throw NonlinearInterconnection(
                    "closed-loop matrix assembly needs linear interconnections");
            cl.set_block(off, plant.state_offset(ic.neighbor), ic.gain * ic.signal_jacobian);
        }
    }
    return cl;
}

namespace {

std::vector<double> slice(const std::vector<double>& v, std::size_t off, std::size_t len) {
    return {v.begin() + off, v.begin() + off + len};
}

std::vector<Matrix> invert_blocks(const std::vector<Matrix>& s_blocks) {
    std::vector<Matrix> inv;
    inv.reserve(s_blocks.size());
    for (const Matrix& s : s_blocks) {
        const SymEigResult eig = sym_eig(s.symmetrized());
        if (eig.values.back() <= 0.0)
            throw SingularS("Lyapunov block is not positive definite");
        inv.push_back(inverse(s.symmetrized()));
    }
    return inv;
}

double lyapunov_value(const std::vector<double>& error, const std::vector<std::size_t>& dims,
                      const std::vector<Matrix>& s_inv) {
    double v = 0.0;
    std::size_t off = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const std::vector<double> ei = slice(error, off, dims[i]);
        v += dot(ei, s_inv[i] * ei);
        off += dims[i];
    }
    return v;
}

} // namespace

LyapunovReport lyapunov_check(const Trace& trace, const std::vector<Matrix>& s_blocks) {
    if (s_blocks.size() != trace.state_dims.size())
        throw InvalidParameter("one Lyapunov block per subsystem required");
    const std::vector<Matrix> s_inv = invert_blocks(s_blocks);

    LyapunovReport report;
    if (trace.steps() < 2)
        return report;
    double prev = lyapunov_value(trace.errors[0], trace.state_dims, s_inv);
    bool first = true;
    for (std::size_t k = 1; k < trace.steps(); ++k) {
        const double cur = lyapunov_value(trace.errors[k], trace.state_dims, s_inv);
        const double delta = cur - prev;
        if (vec_norm(trace.errors[k - 1]) > 1e-9) {
            ++report.checked_steps;
            if (delta >= 0.0)
                ++report.violations;
            if (first || delta > report.max_delta)
                report.max_delta = delta;
            if (first || delta < report.min_delta)
                report.min_delta = delta;
            first = false;
        } else if (delta == 0.0) {
            ++report.boundary_steps;
        }
        prev = cur;
    }
    return report;
}

std::size_t theta_check(const Trace& trace, const BoundSet& bounds) {
    std::size_t violations = 0;
    const std::size_t count = trace.state_dims.size();
    std::vector<std::size_t> state_off(count, 0), phi_off(count, 0);
    for (std::size_t i = 1; i < count; ++i) {
        state_off[i] = state_off[i - 1] + trace.state_dims[i - 1];
        phi_off[i] = phi_off[i - 1] + trace.phi_dims[i - 1];
    }

    for (std::size_t k = 0; k < trace.steps(); ++k) {
        for (std::size_t i = 0; i < count; ++i) {
            double lhs = 0.0;
            for (const auto& [edge, w] : bounds.w) {
                if (edge.first != i)
                    continue;
                const std::size_t j = edge.second;
                const std::vector<double> xj =
                    slice(trace.states[k], state_off[j], trace.state_dims[j]);
                const std::vector<double> wx = w * xj;
                lhs += dot(wx, wx);
            }
            const std::vector<double> phi = slice(trace.phis[k], phi_off[i], trace.phi_dims[i]);
            if (lhs - dot(phi, phi) < -1e-9)
                ++violations;
        }
    }
    return violations;
}

Trace simulate_tracking(const ClosedLoop& loop, double v_r, const std::vector<double>& x_init,
                        double duration) {
    const PlantModel& plant = loop.plant;
    if (plant.mode != PlantMode::discrete)
        throw InvalidParameter("simulate_tracking expects a discrete model");
    if (duration <= 0.0)
        throw InvalidParameter("duration must be positive");
    if (x_init.size() != plant.total_state_dim())
        throw InvalidParameter("initial state dimension mismatch");
    if (loop.gains.size() != plant.subsystem_count() ||
        loop.s_blocks.size() != plant.subsystem_count())
        throw InvalidParameter("closed loop needs one gain and one Lyapunov block per subsystem");
    for (const auto& sub : plant.subsystems)
        if (sub.state_dim() != 2)
            throw InvalidParameter("tracking assumes [position, velocity] subsystems");

    const std::size_t count = plant.subsystem_count();
    const std::size_t steps = static_cast<std::size_t>(std::llround(duration / plant.ts));
    const std::vector<Matrix> s_inv = invert_blocks(loop.s_blocks);

    // Common reference ramp anchored at the mean initial position.
    double s_r0 = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        s_r0 += x_init[plant.state_offset(i)];
    s_r0 /= static_cast<double>(count);

    Trace trace;
    trace.state_dims.assign(count, 2);
    trace.phi_dims.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        trace.phi_dims[i] = plant.subsystems[i].phi_dim();

    std::vector<double> state = x_init;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * plant.ts;
        const double s_r = s_r0 + v_r * t;

        std::vector<double> error(state.size());
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t off = plant.state_offset(i);
            error[off] = state[off] - s_r;
            error[off + 1] = state[off + 1] - v_r;
        }

        std::vector<double> input;
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t off = plant.state_offset(i);
            const std::vector<double> ui = loop.gains[i] * slice(error, off, 2);
            input.insert(input.end(), ui.begin(), ui.end());
        }

        std::vector<double> phi;
        for (std::size_t i = 0; i < count; ++i) {
            const std::vector<double> pi = eval_phi(plant, i, state);
            phi.insert(phi.end(), pi.begin(), pi.end());
        }

        trace.times.push_back(t);
        trace.states.push_back(state);
        trace.errors.push_back(error);
        trace.inputs.push_back(input);
        trace.phis.push_back(std::move(phi));
        trace.lyapunov.push_back(lyapunov_value(error, trace.state_dims, s_inv));

        if (k == steps)
            break;
        state = step_discrete(plant, state, input);
        if (vec_norm(state) > 1e12)
            throw UnstableRollout("tracking state norm exceeded the overflow guard", k + 1);
    }
    return trace;
}

} // namespace ddc
