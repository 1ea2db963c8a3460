#include "ddc/representation.hpp"

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

StackedData StackedData::from(const SubsystemData& data) {
    StackedData out;
    out.y = stack_data(data);
    out.input_dim = data.input_dim();
    out.phi_dim = data.phi_dim();
    out.state_dim = data.state_dim();
    return out;
}

Reconstruction reconstruct(const SubsystemData& data) {
    const StackedData stacked = StackedData::from(data);
    const Matrix xi = data.x1 * pinv(stacked.y);

    Reconstruction out;
    out.b_star = xi.block(0, 0, xi.rows(), stacked.input_dim);
    out.g_star = xi.block(0, stacked.input_dim, xi.rows(), stacked.phi_dim);
    out.a_star = xi.block(0, stacked.input_dim + stacked.phi_dim, xi.rows(), stacked.state_dim);
    out.residual = (data.x1 - xi * stacked.y).frobenius_norm();
    out.rank_ok = check_rank_condition(data);
    return out;
}

Matrix solve_h2(const SubsystemData& data) {
    if (!check_rank_condition(data))
        throw RankDeficient("solve_h2 requires the stacked data to have full row rank");
    const StackedData stacked = StackedData::from(data);
    Matrix selector(stacked.y.rows(), stacked.phi_dim);
    for (std::size_t r = 0; r < stacked.phi_dim; ++r)
        selector(stacked.input_dim + r, r) = 1.0;
    return pinv(stacked.y) * selector;
}

double verify_h1(const SubsystemData& data, const Matrix& h1, const Matrix& k) {
    const StackedData stacked = StackedData::from(data);
    if (h1.rows() != data.samples() || h1.cols() != stacked.state_dim)
        throw InvalidParameter("verify_h1 candidate shape mismatch");
    if (k.rows() != stacked.input_dim || k.cols() != stacked.state_dim)
        throw InvalidParameter("verify_h1 gain shape mismatch");
    Matrix target(stacked.y.rows(), stacked.state_dim);
    target.set_block(0, 0, k);
    target.set_block(stacked.input_dim + stacked.phi_dim, 0,
                     Matrix::identity(stacked.state_dim));
    return (stacked.y * h1 - target).frobenius_norm();
}

std::vector<double> predict(const SubsystemData& data, const std::vector<double>& u,
                            const std::vector<double>& phi, const std::vector<double>& x) {
    if (u.size() != data.input_dim() || phi.size() != data.phi_dim() ||
        x.size() != data.state_dim())
        throw InvalidParameter("predict argument dimension mismatch");
    std::vector<double> stacked_in;
    stacked_in.reserve(u.size() + phi.size() + x.size());
    stacked_in.insert(stacked_in.end(), u.begin(), u.end());
    stacked_in.insert(stacked_in.end(), phi.begin(), phi.end());
    stacked_in.insert(stacked_in.end(), x.begin(), x.end());
    return (data.x1 * pinv(stack_data(data))) * stacked_in;
}

} // namespace ddc
