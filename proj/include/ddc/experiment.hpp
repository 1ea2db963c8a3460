#pragma once

#include <cstddef>
#include <vector>

#include "ddc/matrix.hpp"
#include "ddc/plant.hpp"

namespace ddc {

/// Open-loop excitation recipe: T seeded uniform samples in
/// [-amplitude, amplitude] per input channel.
struct ExcitationPlan {
    std::size_t samples = 0; // T
    double amplitude = 1.0;
    unsigned long long seed = 0;
};

/// One subsystem's experiment record: inputs, interconnection inputs, and
/// states over [0, T-1], plus the shifted states over [1, T].
struct SubsystemData {
    Matrix u;   // m x T
    Matrix phi; // ell x T
    Matrix x0;  // n x T
    Matrix x1;  // n x T

    std::size_t state_dim() const { return x0.rows(); }
    std::size_t input_dim() const { return u.rows(); }
    std::size_t phi_dim() const { return phi.rows(); }
    std::size_t samples() const { return u.cols(); }
};

/// Smallest T for which the excitation requirement
/// T >= (m + ell)(n + 1) + n can hold.
std::size_t min_samples_required(std::size_t input_dim, std::size_t phi_dim,
                                 std::size_t state_dim);

/// Seeded input matrix, uniform in [-amplitude, amplitude], deterministic
/// for a fixed plan.
Matrix generate_excitation(const ExcitationPlan& plan, std::size_t input_dim);

/// Roll the discrete plant forward T steps from x_init under the given
/// per-subsystem inputs and record the four data matrices per subsystem.
/// Throws UnstableRollout if the state norm passes 1e12.
std::vector<SubsystemData> collect(const PlantModel& plant, const std::vector<Matrix>& inputs,
                                   const std::vector<double>& x_init, std::size_t samples);

/// Block-Hankel matrix of depth L: row block r holds the signal shifted
/// by r, giving an nL x (T - L + 1) matrix.
Matrix hankel(const Matrix& signal, std::size_t depth);

/// Persistency of excitation of order L: the depth-L Hankel matrix has
/// full row rank nL.
bool check_pe(const Matrix& signal, std::size_t order);

/// Full row rank of the stacked [U; Phi; X0] data matrix.
bool check_rank_condition(const SubsystemData& data);

/// The stacked [U; Phi; X0] matrix itself.
Matrix stack_data(const SubsystemData& data);

} // namespace ddc
