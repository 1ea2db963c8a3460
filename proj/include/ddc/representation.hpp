#pragma once

#include <vector>

#include "ddc/experiment.hpp"
#include "ddc/matrix.hpp"

namespace ddc {

/// The stacked data matrix Y = [U; Phi; X0] together with the block
/// dimensions that define its row layout.
struct StackedData {
    Matrix y;
    std::size_t input_dim = 0;
    std::size_t phi_dim = 0;
    std::size_t state_dim = 0;

    static StackedData from(const SubsystemData& data);
};

/// Least-squares reconstruction of [B* G* A*] from data. With the rank
/// condition satisfied the residual vanishes and the blocks equal the
/// generating system matrices; otherwise rank_ok is false and the residual
/// reports the fit quality.
struct Reconstruction {
    Matrix b_star;
    Matrix g_star;
    Matrix a_star;
    double residual = 0.0;
    bool rank_ok = false;
};

Reconstruction reconstruct(const SubsystemData& data);

/// Minimum-norm solution H2 of Y * H2 = [0; I; 0] (identity in the Phi
/// block rows). Throws RankDeficient when the rank condition fails.
Matrix solve_h2(const SubsystemData& data);

/// Residual ||Y * H1 - [K; 0; I]||_F of the closed-loop data
/// representation identity.
double verify_h1(const SubsystemData& data, const Matrix& h1, const Matrix& k);

/// Data-driven one-step predictor x+ = X1 * pinv(Y) * [u; phi; x].
std::vector<double> predict(const SubsystemData& data, const std::vector<double>& u,
                            const std::vector<double>& phi, const std::vector<double>& x);

} // namespace ddc
