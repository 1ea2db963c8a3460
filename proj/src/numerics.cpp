#include "ddc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ddc/errors.hpp"

namespace ddc {

const NumericsConfig& default_numerics() {
    static const NumericsConfig cfg{};
    return cfg;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Sorts (sigma, U columns, V columns) by sigma descending.
void sort_by_sigma(std::vector<double>& sigma, Matrix& u, Matrix& v) {
    const std::size_t k = sigma.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
    std::vector<double> s2(k);
    Matrix u2(u.rows(), k), v2(v.rows(), k);
    for (std::size_t j = 0; j < k; ++j) {
        s2[j] = sigma[order[j]];
        u2.set_col(j, u.col(order[j]));
        v2.set_col(j, v.col(order[j]));
    }
    sigma = std::move(s2);
    u = std::move(u2);
    v = std::move(v2);
}

// Replaces zero columns of u (those with sigma below floor) by unit vectors
// orthonormal to every other column, so U keeps orthonormal columns even for
// rank-deficient inputs.
void complete_orthonormal_columns(Matrix& u, const std::vector<double>& sigma, double floor) {
    const std::size_t m = u.rows();
    const std::size_t k = sigma.size();
    for (std::size_t j = 0; j < k; ++j) {
        if (sigma[j] > floor)
            continue;
        // Gram-Schmidt each coordinate axis against the existing columns
        // and keep the one with the largest residual.
        std::vector<double> best;
        double best_norm = 0.0;
        for (std::size_t axis = 0; axis < m; ++axis) {
            std::vector<double> cand(m, 0.0);
            cand[axis] = 1.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (c == j)
                    continue;
                const std::vector<double> uc = u.col(c);
                const double proj = dot(cand, uc);
                for (std::size_t i = 0; i < m; ++i)
                    cand[i] -= proj * uc[i];
            }
            const double nrm = vec_norm(cand);
            if (nrm > best_norm) {
                best_norm = nrm;
                best = std::move(cand);
            }
        }
        if (best_norm > 0.0) {
            for (double& x : best)
                x /= best_norm;
            u.set_col(j, best);
        }
    }
}

} // namespace

SvdResult svd(const Matrix& a, const NumericsConfig& cfg) {
    if (a.empty())
        throw InvalidParameter("svd of an empty matrix");

    // Work on the tall orientation so the Jacobi sweep runs over at most
    // min(rows, cols) columns.
    const bool transposed = a.rows() < a.cols();
    Matrix b = transposed ? a.transpose() : a;
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();

    Matrix v = Matrix::identity(n);

    // Columns whose norm falls below this are numerically zero; forcing
    // them to relative orthogonality is not achievable in floating point.
    const double zero_col = kEps * b.frobenius_norm();

    int sweep = 0;
    bool converged = false;
    for (; sweep < cfg.svd_max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p);
                    const double bq = b(i, q);
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if (app <= zero_col * zero_col || aqq <= zero_col * zero_col)
                    continue;
                if (std::abs(apq) <= cfg.svd_pair_tol * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double bp = b(i, p);
                    const double bq = b(i, q);
                    b(i, p) = c * bp - s * bq;
                    b(i, q) = s * bp + c * bq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw NumericalFailure("svd: Jacobi sweeps did not converge",
                               static_cast<std::size_t>(sweep));

    std::vector<double> sigma(n);
    Matrix u(m, n);
    double sig_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> cj = b.col(j);
        const double nrm = vec_norm(cj);
        sigma[j] = nrm;
        sig_max = std::max(sig_max, nrm);
        if (nrm > 0.0) {
            for (double& x : cj)
                x /= nrm;
            u.set_col(j, cj);
        }
    }
    sort_by_sigma(sigma, u, v);
    // Directions attached to numerically-zero singular values are rounding
    // residue; rebuild them as an orthonormal completion.
    complete_orthonormal_columns(u, sigma, zero_col);

    SvdResult out;
    if (transposed) {
        out.u = v;
        out.vt = u.transpose();
    } else {
        out.u = u;
        out.vt = v.transpose();
    }
    out.sigma = std::move(sigma);
    return out;
}

namespace {

double default_rank_threshold(const Matrix& a, double sigma_max) {
    return static_cast<double>(std::max(a.rows(), a.cols())) * kEps * sigma_max;
}

} // namespace

Matrix pinv(const Matrix& a, double rel_rank_tol, const NumericsConfig& cfg) {
    const SvdResult s = svd(a, cfg);
    const double sig_max = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double threshold = rel_rank_tol < 0.0 ? default_rank_threshold(a, sig_max)
                                                : rel_rank_tol * sig_max;
    // A^+ = V * diag(1/sigma) * U^T over the retained singular values.
    Matrix scaled_v(s.vt.cols(), s.sigma.size()); // V with columns scaled by 1/sigma
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        if (s.sigma[j] <= threshold)
            continue; // column stays zero
        for (std::size_t i = 0; i < s.vt.cols(); ++i)
            scaled_v(i, j) = s.vt(j, i) / s.sigma[j];
    }
    return scaled_v * s.u.transpose();
}

SymEigResult sym_eig(const Matrix& a, const NumericsConfig& cfg) {
    if (a.rows() != a.cols())
        throw NotSymmetric("sym_eig: matrix is not square");
    if (!a.is_symmetric(cfg.symmetry_rel_tol))
        throw NotSymmetric("sym_eig: asymmetry exceeds tolerance");

    const std::size_t n = a.rows();
    Matrix d = a.symmetrized();
    Matrix v = Matrix::identity(n);

    int sweep = 0;
    bool converged = false;
    for (; sweep < cfg.eig_max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off = std::max(off, std::abs(d(i, j)));
        const double scale = std::max(1e-300, d.max_abs());
        if (off <= cfg.eig_off_tol * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = d(p, q);
                if (std::abs(apq) <= cfg.eig_off_tol * scale)
                    continue;
                const double tau = (d(q, q) - d(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double dip = d(i, p);
                    const double diq = d(i, q);
                    d(i, p) = c * dip - s * diq;
                    d(i, q) = s * dip + c * diq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double dpj = d(p, j);
                    const double dqj = d(q, j);
                    d(p, j) = c * dpj - s * dqj;
                    d(q, j) = s * dpj + c * dqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged)
        throw NumericalFailure("sym_eig: Jacobi sweeps did not converge",
                               static_cast<std::size_t>(sweep));

    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i)
        values[i] = d(i, i);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });

    SymEigResult out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = values[order[j]];
        out.vectors.set_col(j, v.col(order[j]));
    }
    return out;
}

Matrix mat_exp(const Matrix& a, const NumericsConfig& cfg) {
    if (a.rows() != a.cols())
        throw InvalidParameter("mat_exp requires a square matrix");
    const std::size_t n = a.rows();
    if (n == 0)
        return Matrix();
    const double norm = a.one_norm();
    if (!std::isfinite(norm) || norm > cfg.exp_overflow_norm)
        throw NumericalFailure("mat_exp: input norm beyond representable range", 0);

    int squarings = 0;
    Matrix x = a;
    while (x.one_norm() > cfg.pade_theta) {
        x *= 0.5;
        ++squarings;
    }

    // Diagonal Pade approximant of order 6:
    //   exp(X) ~ D^{-1} N, N = sum c_k X^k, D = sum (-1)^k c_k X^k.
    static const double coeff[7] = {1.0,         1.0 / 2.0,    5.0 / 44.0, 1.0 / 66.0,
                                    1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
    Matrix power = Matrix::identity(n);
    Matrix num = Matrix::identity(n);
    Matrix den = Matrix::identity(n);
    for (int k = 1; k <= 6; ++k) {
        power = power * x;
        num += power * coeff[k];
        if (k % 2 == 0)
            den += power * coeff[k];
        else
            den -= power * coeff[k];
    }
    Matrix result = solve_linear(den, num);
    for (int k = 0; k < squarings; ++k)
        result = result * result;
    if (!result.all_finite())
        throw NumericalFailure("mat_exp: overflow during squaring",
                               static_cast<std::size_t>(squarings));
    return result;
}

std::size_t numeric_rank(const Matrix& a, const NumericsConfig& cfg) {
    if (a.empty())
        throw InvalidParameter("numeric_rank of an empty matrix");
    const SvdResult s = svd(a, cfg);
    const double sig_max = s.sigma.empty() ? 0.0 : s.sigma.front();
    const double threshold = default_rank_threshold(a, sig_max);
    std::size_t r = 0;
    for (double sig : s.sigma)
        if (sig > threshold)
            ++r;
    return r;
}

namespace {

// Householder reduction to upper Hessenberg form, in place.
void to_hessenberg(Matrix& h) {
    const std::size_t n = h.rows();
    if (n < 3)
        return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        std::vector<double> x(n - k - 1);
        for (std::size_t i = k + 1; i < n; ++i)
            x[i - k - 1] = h(i, k);
        const double alpha = -(x[0] >= 0.0 ? 1.0 : -1.0) * vec_norm(x);
        if (alpha == 0.0)
            continue;
        std::vector<double> v = x;
        v[0] -= alpha;
        const double vnorm = vec_norm(v);
        if (vnorm <= 1e-300)
            continue;
        for (double& t : v)
            t /= vnorm;
        // H <- (I - 2 v v^T) H (I - 2 v v^T), v padded with k+1 zeros.
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i)
                s += v[i - k - 1] * h(i, j);
            s *= 2.0;
            for (std::size_t i = k + 1; i < n; ++i)
                h(i, j) -= s * v[i - k - 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j)
                s += h(i, j) * v[j - k - 1];
            s *= 2.0;
            for (std::size_t j = k + 1; j < n; ++j)
                h(i, j) -= s * v[j - k - 1];
        }
    }
}

void append_block_eigs(const Matrix& h, std::size_t lo, std::size_t hi,
                       std::vector<std::complex<double>>& out) {
    if (hi == lo) {
        out.emplace_back(h(lo, lo), 0.0);
        return;
    }
    // 2x2 block [a b; c d]
    const double a = h(lo, lo), b = h(lo, hi), c = h(hi, lo), d = h(hi, hi);
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = tr * tr / 4.0 - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        out.emplace_back(tr / 2.0 + root, 0.0);
        out.emplace_back(tr / 2.0 - root, 0.0);
    } else {
        const double imag = std::sqrt(-disc);
        out.emplace_back(tr / 2.0, imag);
        out.emplace_back(tr / 2.0, -imag);
    }
}

} // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& a, const NumericsConfig& cfg) {
    if (a.rows() != a.cols())
        throw InvalidParameter("eigenvalues requires a square matrix");
    const std::size_t n = a.rows();
    std::vector<std::complex<double>> out;
    if (n == 0)
        return out;
    out.reserve(n);

    Matrix h = a;
    to_hessenberg(h);

    // Francis double-shift QR on the active trailing block [lo, hi].
    std::size_t hi = n - 1;
    int iters_on_block = 0;
    const int max_iters = cfg.qr_max_iters_per_eig * static_cast<int>(n);
    int total_iters = 0;

    auto subdiag_negligible = [&](std::size_t i) {
        const double s = std::abs(h(i - 1, i - 1)) + std::abs(h(i, i));
        return std::abs(h(i, i - 1)) <= kEps * std::max(s, 1e-300);
    };

    while (true) {
        // Deflate converged eigenvalues off the bottom.
        while (true) {
            if (hi == 0) {
                append_block_eigs(h, 0, 0, out);
                return out;
            }
            if (subdiag_negligible(hi)) {
                append_block_eigs(h, hi, hi, out);
                --hi;
                iters_on_block = 0;
                continue;
            }
            if (hi == 1 || subdiag_negligible(hi - 1)) {
                append_block_eigs(h, hi - 1, hi, out);
                if (hi == 1)
                    return out;
                hi -= 2;
                iters_on_block = 0;
                continue;
            }
            break;
        }

        if (++total_iters > max_iters)
            throw NumericalFailure("eigenvalues: QR iteration did not converge",
                                   static_cast<std::size_t>(total_iters));

        // Find the top of the active block.
        std::size_t lo = hi;
        while (lo > 0 && !subdiag_negligible(lo))
            --lo;

        // Wilkinson-style double shift from the trailing 2x2; use an
        // exceptional shift every 10 stalled iterations.
        double s, p;
        if (++iters_on_block % 11 == 10) {
            const double w = std::abs(h(hi, hi - 1)) + std::abs(h(hi - 1, hi - 2));
            s = 1.5 * w;
            p = w * w;
        } else {
            s = h(hi - 1, hi - 1) + h(hi, hi);
            p = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
        }

        // First column of (H - l1 I)(H - l2 I) restricted to the block.
        double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - s * h(lo, lo) + p;
        double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
        double z = (lo + 2 <= hi) ? h(lo + 2, lo + 1) * h(lo + 1, lo) : 0.0;

        for (std::size_t k = lo; k + 1 <= hi; ++k) {
            // Householder reflector annihilating (y, z) against x.
            std::vector<double> col{x, y, z};
            const bool use3 = k + 2 <= hi;
            if (!use3)
                col.pop_back();
            const double cnorm = vec_norm(col);
            if (cnorm > 1e-300) {
                const double alpha = -(col[0] >= 0.0 ? 1.0 : -1.0) * cnorm;
                std::vector<double> v = col;
                v[0] -= alpha;
                const double vn = vec_norm(v);
                if (vn > 1e-300) {
                    for (double& t : v)
                        t /= vn;
                    const std::size_t r0 = k;
                    const std::size_t rcount = use3 ? 3 : 2;
                    const std::size_t jstart = (k > lo ? k - 1 : lo);
                    for (std::size_t j = jstart; j < n; ++j) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < rcount; ++i)
                            acc += v[i] * h(r0 + i, j);
                        acc *= 2.0;
                        for (std::size_t i = 0; i < rcount; ++i)
                            h(r0 + i, j) -= acc * v[i];
                    }
                    const std::size_t iend = std::min(hi, k + 3);
                    for (std::size_t i = 0; i <= iend; ++i) {
                        double acc = 0.0;
                        for (std::size_t jj = 0; jj < rcount; ++jj)
                            acc += h(i, r0 + jj) * v[jj];
                        acc *= 2.0;
                        for (std::size_t jj = 0; jj < rcount; ++jj)
                            h(i, r0 + jj) -= acc * v[jj];
                    }
                }
            }
            if (k + 1 <= hi)
                x = h(k + 1, k);
            if (k + 2 <= hi)
                y = h(k + 2, k);
            z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
        }
        // Restore Hessenberg structure below the first subdiagonal
        // (bulge chasing leaves only rounding fuzz there).
        for (std::size_t i = lo + 2; i <= hi; ++i)
            for (std::size_t j = lo; j + 2 <= i; ++j)
                h(i, j) = 0.0;
    }
}

double spectral_radius(const Matrix& a, const NumericsConfig& cfg) {
    double best = 0.0;
    for (const auto& ev : eigenvalues(a, cfg))
        best = std::max(best, std::abs(ev));
    return best;
}

} // namespace ddc
