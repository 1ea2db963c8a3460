#pragma once

#include <cstddef>
#include <vector>

#include "ddc/matrix.hpp"
#include "ddc/plant.hpp"

namespace ddc {

/// A discrete plant under decentralized state feedback u_i = K_i e_i,
/// with the per-subsystem Lyapunov blocks of the certifying design.
struct ClosedLoop {
    PlantModel plant; // discrete
    std::vector<Matrix> gains;
    std::vector<Matrix> s_blocks;
};

/// Time-indexed closed-loop record. Layout vectors give the per-subsystem
/// slices of the stacked states and interconnection signals.
struct Trace {
    std::vector<double> times;
    std::vector<std::vector<double>> states; // absolute stacked states
    std::vector<std::vector<double>> errors; // tracking errors, same layout
    std::vector<std::vector<double>> inputs; // stacked u
    std::vector<std::vector<double>> phis;   // stacked phi
    std::vector<double> lyapunov;            // V over the error states
    std::vector<std::size_t> state_dims;     // n_i
    std::vector<std::size_t> phi_dims;       // ell_i

    std::size_t steps() const { return times.size(); }
};

/// Global closed-loop matrix for linear interconnections: diagonal blocks
/// A_i + B_i K_i, off-diagonal blocks G_ij times the signal Jacobian.
/// Throws NonlinearInterconnection when a channel is not declared linear.
Matrix assemble_closed_loop_matrix(const PlantModel& plant, const std::vector<Matrix>& gains);

struct LyapunovReport {
    std::size_t violations = 0;     // Delta V >= 0 off the origin
    std::size_t checked_steps = 0;  // steps with error norm above the floor
    std::size_t boundary_steps = 0; // Delta V = 0 at the origin
    double max_delta = 0.0;
    double min_delta = 0.0;
};

/// Recompute V(k) = sum_i e_i^T S_i^{-1} e_i along the trace and count
/// nondecreasing steps away from the origin. Throws SingularS if any
/// block is not positive definite.
LyapunovReport lyapunov_check(const Trace& trace, const std::vector<Matrix>& s_blocks);

/// Count (i, k) pairs violating sum_j ||W_ij x_j(k)||^2 >= ||phi_i(k)||^2
/// beyond a 1e-9 slack.
std::size_t theta_check(const Trace& trace, const BoundSet& bounds);

/// Track the constant-velocity reference s_r(k) = s_r(0) + v_r k Ts with
/// s_r(0) the mean initial position: u_i(k) = K_i [s_i - s_r, v_i - v_r].
/// Requires two-state [position, velocity] subsystems.
Trace simulate_tracking(const ClosedLoop& loop, double v_r, const std::vector<double>& x_init,
                        double duration);

} // namespace ddc
