#pragma once

#include <cstddef>
#include <vector>

#include "ddc/experiment.hpp"
#include "ddc/matrix.hpp"
#include "ddc/plant.hpp"
#include "ddc/sdp.hpp"

namespace ddc {

/// The per-subsystem stabilization feasibility problem: data, the H2
/// parameterization of the interconnection channel, the stacked outgoing
/// bound matrices, and an orthonormal basis of the admissible directions
/// {N : Phi N = 0, X0 N symmetric} for the decision variable Q.
struct LmiProblem {
    SubsystemData data;
    Matrix h2;                 // T x ell
    Matrix w_stack;            // p x n, W_ji stacked over neighbors j
    std::vector<Matrix> basis; // T x n each, orthonormal in the Frobenius sense
    Matrix offset;             // T x n, zero by default
};

/// Outcome of one subsystem synthesis: decision variable, Lyapunov block
/// S = X0 Q, extracted gain, and solver diagnostics.
struct SynthesisCertificate {
    Matrix q;
    Matrix s;
    Matrix k;
    double lambda_max = 0.0;
    double lambda_min_s = 0.0;
    std::size_t iterations = 0;
    bool feasible = false;
};

/// Scale-aware strictness margin for the block LMI:
/// eps = min(1e-6 (1 + ||X1||_F^2), 2e-3). The cap matters: the identity
/// blocks anchor the feasible lambda_max window to a data-independent
/// range (the principal submatrix over a position coordinate and the W
/// rows alone forces eps < 1/(1 + 8 p)), and the per-step contraction of
/// the sampled plant pins the reachable optimum near -0.02 at Ts = 0.01,
/// so the uncapped value is unattainable at the chain's operating scale.
double default_epsilon_margin(const SubsystemData& data);

/// Build the LMI problem for subsystem i: solves the H2 identity, stacks
/// the bounds of the signals leaving subsystem i, and computes the
/// constraint nullspace basis (columns of the stacked data are balanced
/// before the nullspace computation and the scaling undone afterward).
/// Throws RankDeficient if the data fails the rank condition and
/// EmptyFeasibleSpace if no admissible direction exists.
LmiProblem build_problem(const SubsystemData& data, const BoundSet& bounds, std::size_t i);

/// The symmetric block matrix M(Q) of the stabilization condition,
///   [ -S        0        Q^T X1^T   S W^T ]
///   [  0       -I        H2^T X1^T  0     ]
///   [  X1 Q     X1 H2   -S          0     ]
///   [  W S      0        0         -I     ]
/// with S = X0 Q. Q must satisfy the equality constraints to 1e-8
/// (throws ConstraintViolation otherwise).
Matrix assemble_lmi(const LmiProblem& problem, const Matrix& q);

/// The affine family M(offset + sum z_k basis_k) over the basis coordinates.
AffineFamily lmi_family(const LmiProblem& problem);

/// Minimize lambda_max over the admissible set, extract K = U Q S^{-1} on
/// success, and report best-effort diagnostics on failure. Throws
/// SingularS when a certified lambda_max coexists with a numerically
/// singular S (not silently inverted).
SynthesisCertificate synthesize(const LmiProblem& problem, const SolverConfig& cfg);

} // namespace ddc
