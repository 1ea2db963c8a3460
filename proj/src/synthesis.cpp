#include "ddc/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "ddc/errors.hpp"
#include "ddc/numerics.hpp"
#include "ddc/representation.hpp"

namespace ddc {

namespace {

// The feasible lambda_max window is anchored by the LMI's identity blocks
// and capped by the per-step contraction of the sampled plant (at
// Ts = 0.01 the optimum sits around -0.02 for the chain); the margin
// default must stay well inside that window.
constexpr double kEpsilonCap = 2e-3;

std::size_t symmetry_constraint_count(std::size_t n) { return n * (n - 1) / 2; }

// Row-major vectorization of a T x n matrix.
std::vector<double> vec(const Matrix& m) { return m.data(); }

Matrix unvec(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = v[r * cols + c];
    return m;
}

} // namespace

double default_epsilon_margin(const SubsystemData& data) {
    const double x1_norm = data.x1.frobenius_norm();
    return std::min(1e-6 * (1.0 + x1_norm * x1_norm), kEpsilonCap);
}

LmiProblem build_problem(const SubsystemData& data, const BoundSet& bounds, std::size_t i) {
    if (!check_rank_condition(data))
        throw RankDeficient("build_problem requires the stacked data to have full row rank");

    LmiProblem problem;
    problem.data = data;
    problem.h2 = solve_h2(data);

    const std::size_t n = data.state_dim();
    const std::size_t t = data.samples();
    const std::size_t ell = data.phi_dim();

    // Bounds on the signals leaving subsystem i, stacked over ascending
    // neighbor index (map iteration order).
    std::vector<Matrix> w_rows;
    for (const auto& [edge, w] : bounds.w) {
        if (edge.second != i)
            continue;
        if (w.cols() != n)
            throw InvalidParameter("bound matrix column count does not match the subsystem");
        w_rows.push_back(w);
    }
    problem.w_stack = w_rows.empty() ? Matrix(0, n) : vstack(w_rows);

    // Column balancing of Y, applied as a variable change Q = D Qs so the
    // nullspace computation sees unit-scale columns.
    const Matrix y = stack_data(data);
    std::vector<double> d(t, 1.0);
    for (std::size_t c = 0; c < t; ++c) {
        const double nrm = vec_norm(y.col(c));
        if (nrm > 0.0)
            d[c] = 1.0 / nrm;
    }

    // Constraint operator on the scaled variables: Phi D Qs = 0 plus the
    // symmetry of X0 D Qs, rows over vec(Qs).
    const std::size_t n_constraints = ell * n + symmetry_constraint_count(n);
    const std::size_t n_vars = t * n;
    Matrix constraints(n_constraints, n_vars);
    std::size_t row = 0;
    for (std::size_t a = 0; a < ell; ++a) {
        for (std::size_t b = 0; b < n; ++b, ++row) {
            for (std::size_t tt = 0; tt < t; ++tt)
                constraints(row, tt * n + b) = data.phi(a, tt) * d[tt];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = r + 1; c < n; ++c, ++row) {
            for (std::size_t tt = 0; tt < t; ++tt) {
                constraints(row, tt * n + c) += data.x0(r, tt) * d[tt];
                constraints(row, tt * n + r) -= data.x0(c, tt) * d[tt];
            }
        }
    }

    // Orthonormal nullspace basis via the eigenvectors of the projector
    // I - C^+ C (eigenvalue one <=> admissible direction).
    std::vector<std::vector<double>> scaled_basis;
    if (n_constraints == 0) {
        scaled_basis.reserve(n_vars);
        for (std::size_t k = 0; k < n_vars; ++k) {
            std::vector<double> e(n_vars, 0.0);
            e[k] = 1.0;
            scaled_basis.push_back(std::move(e));
        }
    } else {
        const Matrix projector =
            (Matrix::identity(n_vars) - pinv(constraints) * constraints).symmetrized();
        const SymEigResult eig = sym_eig(projector);
        for (std::size_t k = 0; k < n_vars; ++k) {
            if (eig.values[k] < 0.5)
                continue;
            scaled_basis.push_back(eig.vectors.col(k));
        }
    }

    // Undo the scaling, refine against the unscaled constraint operator,
    // and re-orthonormalize with modified Gram-Schmidt. The refinement
    // runs twice: near-parallel interconnection rows leave the constraint
    // operator ill-conditioned, and a single projection is accurate only
    // to eps times the condition number.
    Matrix constraints_raw(n_constraints, n_vars);
    for (std::size_t r = 0; r < n_constraints; ++r)
        for (std::size_t c0 = 0; c0 < t; ++c0)
            for (std::size_t b = 0; b < n; ++b)
                constraints_raw(r, c0 * n + b) =
                    constraints(r, c0 * n + b) / d[c0];
    const Matrix constraints_pinv =
        n_constraints == 0 ? Matrix() : pinv(constraints_raw);

    std::vector<std::vector<double>> raw;
    raw.reserve(scaled_basis.size());
    for (const auto& sb : scaled_basis) {
        std::vector<double> nvec(n_vars);
        for (std::size_t tt = 0; tt < t; ++tt)
            for (std::size_t b = 0; b < n; ++b)
                nvec[tt * n + b] = d[tt] * sb[tt * n + b];
        for (int pass = 0; pass < 2 && n_constraints > 0; ++pass) {
            const std::vector<double> residual = constraints_raw * nvec;
            const std::vector<double> correction = constraints_pinv * residual;
            for (std::size_t idx = 0; idx < n_vars; ++idx)
                nvec[idx] -= correction[idx];
        }
        raw.push_back(std::move(nvec));
    }
    for (auto& candidate : raw) {
        for (const Matrix& accepted : problem.basis) {
            const std::vector<double> av = vec(accepted);
            const double proj = dot(candidate, av);
            for (std::size_t idx = 0; idx < candidate.size(); ++idx)
                candidate[idx] -= proj * av[idx];
        }
        const double nrm = vec_norm(candidate);
        if (nrm < 1e-10)
            continue;
        for (double& x : candidate)
            x /= nrm;
        problem.basis.push_back(unvec(candidate, t, n));
    }

    if (problem.basis.empty())
        throw EmptyFeasibleSpace("no admissible direction satisfies the equality constraints");

    problem.offset = Matrix(t, n);
    return problem;
}

namespace {

void check_admissible(const LmiProblem& problem, const Matrix& q) {
    const std::size_t t = problem.data.samples();
    const std::size_t n = problem.data.state_dim();
    if (q.rows() != t || q.cols() != n)
        throw InvalidParameter("decision variable shape mismatch");
    const double scale = 1.0 + problem.data.phi.frobenius_norm() * q.frobenius_norm() +
                         problem.data.x0.frobenius_norm() * q.frobenius_norm();
    if (problem.data.phi_dim() > 0 && (problem.data.phi * q).max_abs() > 1e-8 * scale)
        throw ConstraintViolation("Phi Q = 0 violated beyond tolerance");
    const Matrix s = problem.data.x0 * q;
    if ((s - s.transpose()).max_abs() > 1e-8 * scale)
        throw ConstraintViolation("X0 Q is not symmetric within tolerance");
}

} // namespace

Matrix assemble_lmi(const LmiProblem& problem, const Matrix& q) {
    check_admissible(problem, q);

    const std::size_t n = problem.data.state_dim();
    const std::size_t ell = problem.data.phi_dim();
    const std::size_t p = problem.w_stack.rows();

    const Matrix s = (problem.data.x0 * q).symmetrized();
    const Matrix x1q = problem.data.x1 * q;
    const Matrix x1h2 = problem.data.x1 * problem.h2;
    const Matrix ws = problem.w_stack * s;

    const std::size_t dim = 2 * n + ell + p;
    Matrix m(dim, dim);
    const std::size_t r1 = 0;      // S block
    const std::size_t r2 = n;      // phi block
    const std::size_t r3 = n + ell; // successor block
    const std::size_t r4 = 2 * n + ell; // W block

    m.set_block(r1, r1, -s);
    m.set_block(r1, r3, x1q.transpose());
    m.set_block(r3, r1, x1q);
    m.set_block(r1, r4, ws.transpose());
    m.set_block(r4, r1, ws);
    m.set_block(r2, r2, -Matrix::identity(ell));
    m.set_block(r2, r3, x1h2.transpose());
    m.set_block(r3, r2, x1h2);
    m.set_block(r3, r3, -s);
    m.set_block(r4, r4, -Matrix::identity(p));
    return m;
}

AffineFamily lmi_family(const LmiProblem& problem) {
    AffineFamily family;
    family.constant = assemble_lmi(problem, problem.offset);
    family.directions.reserve(problem.basis.size());
    for (const Matrix& direction : problem.basis) {
        const Matrix shifted = assemble_lmi(problem, problem.offset + direction);
        family.directions.push_back((shifted - family.constant).symmetrized());
    }
    return family;
}

namespace {

// The LMI sees Q only through (U Q, X0 Q), so most admissible directions
// act trivially on the family. An SVD of the direction-image map yields
// an orthonormal basis of the image (a handful of directions instead of
// T n of them, with equalized coordinate scales for the solver) together
// with minimum-norm preimage weights, keeping the reconstructed Q free of
// large null-space components.
struct ReducedFamily {
    AffineFamily family;
    std::vector<std::vector<double>> combos; // rows: weights over problem.basis
};

ReducedFamily reduce_directions(const AffineFamily& full) {
    ReducedFamily out;
    out.family.constant = full.constant;
    const std::size_t side = full.constant.rows();
    const std::size_t count = full.directions.size();

    Matrix image_map(side * side, count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::vector<double>& v = full.directions[k].data();
        for (std::size_t r = 0; r < v.size(); ++r)
            image_map(r, k) = v[r];
    }
    const SvdResult svd_res = svd(image_map);
    const double floor = 1e-9 * (svd_res.sigma.empty() ? 0.0 : svd_res.sigma.front());
    for (std::size_t j = 0; j < svd_res.sigma.size(); ++j) {
        if (svd_res.sigma[j] <= floor)
            break;
        std::vector<double> direction(side * side);
        for (std::size_t r = 0; r < direction.size(); ++r)
            direction[r] = svd_res.u(r, j);
        out.family.directions.push_back(Matrix(side, side, direction).symmetrized());
        std::vector<double> combo(count);
        for (std::size_t k = 0; k < count; ++k)
            combo[k] = svd_res.vt(j, k) / svd_res.sigma[j];
        out.combos.push_back(std::move(combo));
    }
    return out;
}

} // namespace

SynthesisCertificate synthesize(const LmiProblem& problem, const SolverConfig& cfg) {
    const ReducedFamily reduced = reduce_directions(lmi_family(problem));
    const MinimizeResult res = minimize_lmax(reduced.family, cfg);

    // Map the reduced coordinates back into the admissible Q space.
    std::vector<double> basis_weights(problem.basis.size(), 0.0);
    for (std::size_t j = 0; j < res.z.size(); ++j)
        for (std::size_t k = 0; k < problem.basis.size(); ++k)
            basis_weights[k] += res.z[j] * reduced.combos[j][k];
    Matrix q = problem.offset;
    for (std::size_t k = 0; k < problem.basis.size(); ++k)
        if (basis_weights[k] != 0.0)
            q += problem.basis[k] * basis_weights[k];

    SynthesisCertificate cert;
    cert.q = q;
    cert.s = problem.data.x0 * q;
    cert.iterations = res.iterations;

    const SymEigResult m_eig = sym_eig(assemble_lmi(problem, q).symmetrized());
    cert.lambda_max = m_eig.values.front();

    const SymEigResult s_eig = sym_eig(cert.s.symmetrized());
    cert.lambda_min_s = s_eig.values.back();

    cert.feasible = res.feasible && cert.lambda_max <= -cfg.epsilon_margin;
    const double s_floor =
        1e-8 * problem.data.x0.frobenius_norm() * q.frobenius_norm();
    if (cert.feasible && cert.lambda_min_s <= s_floor)
        throw SingularS("certified lambda_max but the Lyapunov block is numerically singular");

    if (cert.feasible) {
        // K = U Q S^{-1}, solved against the symmetric S.
        const Matrix uq = problem.data.u * q;
        cert.k = solve_linear(cert.s.symmetrized(), uq.transpose()).transpose();
    } else {
        cert.k = Matrix(problem.data.input_dim(), problem.data.state_dim());
    }
    return cert;
}

} // namespace ddc
