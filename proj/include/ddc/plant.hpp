#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "ddc/matrix.hpp"

namespace ddc {

/// One interconnection channel g_ij(x_j) feeding subsystem i from
/// neighbor j through the gain block G_ij.
struct Interconnection {
    std::size_t neighbor;                                        // index j
    Matrix gain;                                                 // G_ij, n_i x q_ij
    std::function<std::vector<double>(const std::vector<double>&)> signal; // g_ij
    bool linear = false;
    Matrix signal_jacobian; // q_ij x n_j, set when linear
};

/// A_i, B_i and the neighbor channels of one subsystem. Interconnections
/// are kept in ascending neighbor order; that order defines the layout of
/// phi_i.
struct SubsystemModel {
    Matrix a;
    Matrix b;
    std::vector<Interconnection> interconnections;

    std::size_t state_dim() const { return a.rows(); }
    std::size_t input_dim() const { return b.cols(); }
    std::size_t phi_dim() const;
};

enum class PlantMode { continuous, discrete };

/// A large-scale system: subsystems coupled through measurable
/// interconnection signals. Immutable after construction.
struct PlantModel {
    std::vector<SubsystemModel> subsystems;
    PlantMode mode = PlantMode::continuous;
    double ts = 0.0; // sampling interval, meaningful when discrete

    std::size_t subsystem_count() const { return subsystems.size(); }
    std::size_t total_state_dim() const;
    std::size_t state_offset(std::size_t i) const;

    /// Throws InvalidParameter on inconsistent dimensions, self loops,
    /// or interconnection signals with g(0) != 0.
    void validate() const;
};

/// Lipschitz bound matrices W_ij (one per interconnection channel,
/// keyed by the (i, j) edge) with the safety factor used to inflate the
/// estimates.
struct BoundSet {
    std::map<std::pair<std::size_t, std::size_t>, Matrix> w;
    double safety_factor = 1.0;

    const Matrix& at(std::size_t i, std::size_t j) const;
};

/// Continuous-time chain of M masses joined by identical springs.
/// Per-mass state is [position, velocity]; each neighbor feeds the scalar
/// signal g(x_j) = s_j through the gain column [0; k/m]. A zero spring
/// constant produces decoupled subsystems with no interconnections.
PlantModel build_spring_mass_chain(std::size_t mass_count, double mass, double k_spring,
                                   double b_drag);

/// Exact zero-order-hold discretization of every subsystem via the
/// augmented-matrix exponential; interconnection signal maps carry over.
PlantModel discretize_zoh(const PlantModel& plant, double ts);

/// Stack the neighbor signals g_ij(x_j) of subsystem i, in neighbor order.
std::vector<double> eval_phi(const PlantModel& plant, std::size_t i,
                             const std::vector<double>& full_state);

/// State derivative of the continuous model under the given stacked input.
std::vector<double> continuous_dynamics(const PlantModel& plant,
                                        const std::vector<double>& full_state,
                                        const std::vector<double>& full_input);

/// One step of the discrete model under the given stacked input.
std::vector<double> step_discrete(const PlantModel& plant, const std::vector<double>& full_state,
                                  const std::vector<double>& full_input);

/// Estimate W_ij = w_ij * I (embedded into the q_ij x n_j shape) with
/// w_ij = safety_factor * max over samples of ||g_ij(x_j)|| / ||x_j||.
BoundSet estimate_bounds(const PlantModel& plant, const std::vector<std::vector<double>>& samples,
                         double safety_factor);

/// Exact bounds for the chain's position-coupling signal: W_ij = [1, 0].
BoundSet chain_analytic_bounds(const PlantModel& plant);

} // namespace ddc
