#include "ddc/sdp.hpp"

#include <algorithm>
#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"

namespace ddc {

namespace {

void validate_family(const AffineFamily& family) {
    if (family.constant.rows() == 0 || family.constant.rows() != family.constant.cols())
        throw InvalidParameter("affine family needs a square nonempty constant term");
    if (!family.constant.is_symmetric(1e-12))
        throw InvalidParameter("affine family constant term is not symmetric");
    for (const Matrix& d : family.directions) {
        if (d.rows() != family.constant.rows() || d.cols() != family.constant.cols())
            throw InvalidParameter("affine family direction size mismatch");
        if (!d.is_symmetric(1e-12))
            throw InvalidParameter("affine family direction is not symmetric");
    }
}

// splitmix64; restarts must not depend on library RNG internals.
class SeededUniform {
public:
    explicit SeededUniform(unsigned long long seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}
    double next_symmetric() {
        unsigned long long z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return 2.0 * (static_cast<double>(z >> 11) / 9007199254740992.0) - 1.0;
    }

private:
    unsigned long long state_;
};

} // namespace

Matrix AffineFamily::eval(const std::vector<double>& z) const {
    if (z.size() != directions.size())
        throw InvalidParameter("affine family coordinate count mismatch");
    Matrix m = constant;
    for (std::size_t k = 0; k < directions.size(); ++k) {
        if (z[k] == 0.0)
            continue;
        m += directions[k] * z[k];
    }
    return m;
}

MinimizeResult minimize_lmax(const AffineFamily& family, const SolverConfig& cfg) {
    validate_family(family);
    const std::size_t dim = family.directions.size();
    const double target = -2.0 * cfg.epsilon_margin;

    MinimizeResult best;
    best.z.assign(dim, 0.0);
    best.lambda_max = sym_eig(family.eval(best.z)).values.front();
    best.feasible = best.lambda_max <= -cfg.epsilon_margin;
    if (best.feasible || dim == 0)
        return best;

    SeededUniform rng(cfg.seed);
    const std::size_t restarts = std::max<std::size_t>(1, cfg.restarts);
    for (std::size_t restart = 0; restart < restarts && !best.feasible; ++restart) {
        std::vector<double> z(dim, 0.0);
        if (restart > 0) {
            for (double& zk : z)
                zk = rng.next_symmetric();
        }

        for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
            ++best.iterations;
            const SymEigResult eig = sym_eig(family.eval(z));
            const double f = eig.values.front();
            if (f < best.lambda_max) {
                best.lambda_max = f;
                best.z = z;
            }
            if (f <= -cfg.epsilon_margin) {
                best.feasible = true;
                break;
            }

            // Eigenvector subgradient, softmax-averaged over eigenvalues
            // near the top. lambda_max is nonsmooth exactly where its top
            // eigenvalues cluster; the single-eigenvector subgradient
            // zigzags there, while the temperature-weighted combination
            // keeps making progress and reduces to the plain subgradient
            // whenever the spectral gap is wide.
            const double tau =
                std::max(cfg.epsilon_margin / 20.0, (f - target) / 10.0);
            std::vector<double> grad(dim, 0.0);
            double weight_sum = 0.0;
            std::vector<double> weights(eig.values.size());
            for (std::size_t i = 0; i < eig.values.size(); ++i) {
                weights[i] = std::exp((eig.values[i] - f) / tau);
                weight_sum += weights[i];
            }
            for (std::size_t i = 0; i < eig.values.size(); ++i) {
                const double w = weights[i] / weight_sum;
                if (w < 1e-10)
                    continue;
                const std::vector<double> v = eig.vectors.col(i);
                for (std::size_t k = 0; k < dim; ++k)
                    grad[k] += w * dot(v, family.directions[k] * v);
            }
            const double grad_norm_sq = dot(grad, grad);
            if (grad_norm_sq <= 1e-300)
                break; // flat; this restart cannot progress

            // Polyak step toward the target level.
            const double step = (f - target) / grad_norm_sq;
            for (std::size_t k = 0; k < dim; ++k)
                z[k] -= step * grad[k];
        }
    }
    return best;
}

bool certify(const AffineFamily& family, const std::vector<double>& z, double epsilon) {
    validate_family(family);
    return sym_eig(family.eval(z)).values.front() <= -epsilon;
}

} // namespace ddc
