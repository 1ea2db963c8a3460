#pragma once

#include <cstddef>
#include <vector>

#include "ddc/matrix.hpp"

namespace ddc {

/// Symmetric matrix family M(z) = constant + sum_k z_k * directions[k].
struct AffineFamily {
    Matrix constant;
    std::vector<Matrix> directions;

    Matrix eval(const std::vector<double>& z) const;
};

/// Knobs for the eigenvalue-minimization solver.
struct SolverConfig {
    std::size_t max_iters = 20000; // per restart
    double epsilon_margin = 1e-6;  // feasibility means lambda_max <= -epsilon_margin
    std::size_t restarts = 8;
    unsigned long long seed = 0;
};

struct MinimizeResult {
    std::vector<double> z;
    double lambda_max = 0.0;
    std::size_t iterations = 0; // total across restarts
    bool feasible = false;      // lambda_max <= -epsilon_margin reached
};

/// Minimize lambda_max(M(z)) by eigenvector-subgradient descent with
/// Polyak steps toward the target -2 * epsilon_margin, restarting from
/// z = 0 and from seeded random points. The step direction averages the
/// subgradients of eigenvalues near the top (softmax weights), which
/// reduces to the plain leading-eigenvector subgradient whenever the
/// spectral gap is wide. Infeasibility is reported through the result,
/// never thrown.
MinimizeResult minimize_lmax(const AffineFamily& family, const SolverConfig& cfg);

/// Recompute lambda_max(M(z)) with the symmetric eigensolver and test it
/// against -epsilon. Independent of any solver state.
bool certify(const AffineFamily& family, const std::vector<double>& z, double epsilon);

} // namespace ddc
