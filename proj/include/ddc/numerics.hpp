#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "ddc/matrix.hpp"

namespace ddc {

/// Central tolerance record for the numerical kernels. One knob per
/// routine so test calibration happens in a single place.
struct NumericsConfig {
    double svd_pair_tol = 1e-14;   // relative column-pair coupling threshold
    int svd_max_sweeps = 60;
    double eig_off_tol = 1e-14;    // relative off-diagonal threshold
    int eig_max_sweeps = 60;
    double symmetry_rel_tol = 1e-12;
    int qr_max_iters_per_eig = 60;
    double pade_theta = 0.5;       // scale-and-square until one_norm <= theta
    double exp_overflow_norm = 350.0; // e^350 is near the double range limit
};

const NumericsConfig& default_numerics();

/// Thin singular value decomposition A = U * diag(sigma) * Vt with
/// orthonormal U columns and Vt rows; sigma is nonincreasing.
struct SvdResult {
    Matrix u;                  // rows(A) x k, k = min(rows, cols)
    std::vector<double> sigma; // length k, nonincreasing, nonnegative
    Matrix vt;                 // k x cols(A)
};

/// One-sided Jacobi SVD. Accurate for the small dense matrices used
/// throughout; throws NumericalFailure if sweeps fail to converge.
SvdResult svd(const Matrix& a, const NumericsConfig& cfg = default_numerics());

/// Moore-Penrose pseudoinverse via SVD truncation. Singular values at or
/// below rel_rank_tol * sigma_max are treated as zero; a negative
/// rel_rank_tol selects the scaled-epsilon default used by numeric_rank.
Matrix pinv(const Matrix& a, double rel_rank_tol = -1.0,
            const NumericsConfig& cfg = default_numerics());

/// Symmetric eigendecomposition A = V * diag(values) * V^T.
struct SymEigResult {
    std::vector<double> values; // nonincreasing
    Matrix vectors;             // eigenvectors as columns, orthonormal
};

/// Cyclic Jacobi eigensolver; requires symmetry to cfg.symmetry_rel_tol
/// (throws NotSymmetric otherwise).
SymEigResult sym_eig(const Matrix& a, const NumericsConfig& cfg = default_numerics());

/// Matrix exponential by scaling-and-squaring with a diagonal Pade
/// approximant of order 6. exp(0) = I exactly.
Matrix mat_exp(const Matrix& a, const NumericsConfig& cfg = default_numerics());

/// Number of singular values above max(rows, cols) * eps * sigma_max.
std::size_t numeric_rank(const Matrix& a, const NumericsConfig& cfg = default_numerics());

/// Eigenvalues of a general square real matrix via Hessenberg reduction
/// and the double-shift QR iteration.
std::vector<std::complex<double>> eigenvalues(const Matrix& a,
                                              const NumericsConfig& cfg = default_numerics());

/// Largest eigenvalue modulus of a general square real matrix.
double spectral_radius(const Matrix& a, const NumericsConfig& cfg = default_numerics());

} // namespace ddc
