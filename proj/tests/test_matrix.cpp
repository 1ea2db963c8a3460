#include "doctest.h"

#include <cmath>
#include <limits>

#include "ddc/errors.hpp"
#include "ddc/matrix.hpp"
#include "ddc/numerics.hpp"
#include "oracles.hpp"

using ddc::Matrix;

namespace {

double reconstruction_error(const Matrix& a, const ddc::SvdResult& s) {
    Matrix sv(s.sigma.size(), s.sigma.size());
    for (std::size_t i = 0; i < s.sigma.size(); ++i)
        sv(i, i) = s.sigma[i];
    return (a - s.u * sv * s.vt).frobenius_norm();
}

} // namespace

TEST_CASE("matrix construction rejects bad input") {
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), ddc::InvalidParameter);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    ddc::InvalidParameter);
    CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<double>::infinity()}),
                    ddc::InvalidParameter);
    const Matrix m = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(m(1, 0) == 3.0);
}

TEST_CASE("matrix arithmetic and stacking") {
    const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
    const Matrix b = Matrix::from_rows({{0, 1}, {1, 0}});
    CHECK((a * b)(0, 0) == 2.0);
    CHECK((a + b)(0, 1) == 3.0);
    CHECK(a.transpose()(0, 1) == 3.0);
    const Matrix h = ddc::hstack({a, b});
    CHECK(h.cols() == 4);
    CHECK(h(0, 2) == 0.0);
    const Matrix v = ddc::vstack({a, b});
    CHECK(v.rows() == 4);
    CHECK(v(2, 1) == 1.0);
    // Empty blocks compose without special cases.
    const Matrix e(2, 0);
    CHECK(ddc::hstack({e, a}).cols() == 2);
    CHECK((e.transpose() * a).rows() == 0);
}

TEST_CASE("solve_linear solves and flags singular systems") {
    const Matrix a = Matrix::from_rows({{2, 1}, {1, 3}});
    const std::vector<double> rhs{5.0, 10.0};
    const std::vector<double> x = ddc::solve_linear(a, rhs);
    CHECK(std::abs(2 * x[0] + x[1] - 5.0) < 1e-12);
    CHECK(std::abs(x[0] + 3 * x[1] - 10.0) < 1e-12);
    CHECK_THROWS_AS(ddc::solve_linear(Matrix(2, 2), rhs), ddc::NumericalFailure);
}

TEST_CASE("svd of identity and diagonal") {
    const auto s1 = ddc::svd(Matrix::identity(3));
    REQUIRE(s1.sigma.size() == 3);
    for (double sig : s1.sigma)
        CHECK(sig == doctest::Approx(1.0).epsilon(1e-12));

    const Matrix d = Matrix::from_rows({{3, 0}, {0, 0}});
    const auto s2 = ddc::svd(d);
    CHECK(s2.sigma[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s2.sigma[1] == doctest::Approx(0.0));
    CHECK(reconstruction_error(d, s2) < 1e-10 * (1 + d.frobenius_norm()));
}

TEST_CASE("svd of random 5x3 matches characteristic-polynomial oracle") {
    oracle::TestRng rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = rng.matrix(5, 3);
        const auto s = ddc::svd(a);
        const std::vector<double> lam = oracle::sym3_eigenvalues(a.transpose() * a);
        REQUIRE(s.sigma.size() == 3);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(s.sigma[i] ==
                  doctest::Approx(std::sqrt(std::max(0.0, lam[i]))).epsilon(1e-9));
        CHECK(reconstruction_error(a, s) < 1e-10 * (1 + a.frobenius_norm()));
        // Orthonormal factors.
        const Matrix utu = s.u.transpose() * s.u;
        const Matrix vvt = s.vt * s.vt.transpose();
        CHECK((utu - Matrix::identity(3)).max_abs() < 1e-10);
        CHECK((vvt - Matrix::identity(3)).max_abs() < 1e-10);
    }
}

TEST_CASE("pinv trivial cases") {
    const Matrix id3 = Matrix::identity(3);
    CHECK((ddc::pinv(id3) - id3).max_abs() < 1e-12);

    const Matrix z(2, 4);
    const Matrix zp = ddc::pinv(z);
    CHECK(zp.rows() == 4);
    CHECK(zp.cols() == 2);
    CHECK(zp.max_abs() == 0.0);
}

TEST_CASE("pinv of full-row-rank wide matrix is a right inverse") {
    const Matrix a = Matrix::from_rows({{1, 2, 0, -1}, {0, 1, 1, 3}});
    const Matrix p = ddc::pinv(a);
    CHECK((a * p - Matrix::identity(2)).max_abs() < 1e-10);
}

TEST_CASE("pinv satisfies the four Moore-Penrose identities") {
    oracle::TestRng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t r = 2 + trial % 4;
        const std::size_t c = 2 + (trial * 3) % 5;
        const Matrix a = rng.matrix(r, c, -2.0, 2.0);
        const Matrix p = ddc::pinv(a);
        const double scale = 1.0 + a.frobenius_norm();
        CHECK((a * p * a - a).frobenius_norm() < 1e-9 * scale);
        CHECK((p * a * p - p).frobenius_norm() < 1e-9 * scale);
        CHECK(((a * p) - (a * p).transpose()).frobenius_norm() < 1e-9 * scale);
        CHECK(((p * a) - (p * a).transpose()).frobenius_norm() < 1e-9 * scale);
    }
}

TEST_CASE("sym_eig trivial spectra") {
    const auto e1 = ddc::sym_eig(Matrix::from_rows({{2, 0}, {0, -1}}));
    CHECK(e1.values[0] == doctest::Approx(2.0));
    CHECK(e1.values[1] == doctest::Approx(-1.0));

    const auto e2 = ddc::sym_eig(Matrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(e2.values[0] == doctest::Approx(1.0));
    CHECK(e2.values[1] == doctest::Approx(-1.0));
}

TEST_CASE("sym_eig rejects asymmetric input") {
    CHECK_THROWS_AS(ddc::sym_eig(Matrix::from_rows({{1, 2}, {0, 1}})), ddc::NotSymmetric);
}

TEST_CASE("sym_eig satisfies trace identity and reconstruction") {
    oracle::TestRng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix a = rng.symmetric(6, -3.0, 3.0);
        const auto e = ddc::sym_eig(a);
        double evsum = 0.0;
        for (double lam : e.values)
            evsum += lam;
        CHECK(evsum == doctest::Approx(a.trace()).epsilon(1e-10));

        Matrix lam(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            lam(i, i) = e.values[i];
        const Matrix rec = e.vectors * lam * e.vectors.transpose();
        CHECK((rec - a).frobenius_norm() < 1e-9 * a.frobenius_norm());

        // Residual of each eigenpair.
        for (std::size_t k = 0; k < 6; ++k) {
            const auto v = e.vectors.col(k);
            const auto av = a * v;
            double resid = 0.0;
            for (std::size_t i = 0; i < 6; ++i)
                resid = std::max(resid, std::abs(av[i] - e.values[k] * v[i]));
            CHECK(resid < 1e-9 * (1 + a.frobenius_norm()));
        }
    }
}

TEST_CASE("mat_exp basics") {
    const Matrix z(3, 3);
    CHECK((ddc::mat_exp(z) - Matrix::identity(3)).max_abs() == 0.0);

    const Matrix one(1, 1, {1.0});
    CHECK(ddc::mat_exp(one)(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("mat_exp matches truncated Taylor series on small norms") {
    oracle::TestRng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a = rng.matrix(4, 4, -0.5, 0.5);
        if (a.one_norm() > 1.0)
            a *= 1.0 / a.one_norm();
        const Matrix expected = oracle::taylor_exp(a, 30);
        CHECK((ddc::mat_exp(a) - expected).max_abs() < 1e-10);
    }
}

TEST_CASE("mat_exp of commuting matrices multiplies") {
    oracle::TestRng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix a(4, 4), b(4, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            a(i, i) = rng.uniform(-1.0, 1.0);
            b(i, i) = rng.uniform(-1.0, 1.0);
        }
        const Matrix lhs = ddc::mat_exp(a + b);
        const Matrix rhs = ddc::mat_exp(a) * ddc::mat_exp(b);
        CHECK((lhs - rhs).max_abs() < 1e-10);
    }
}

TEST_CASE("mat_exp flags overflow-range input") {
    Matrix big(2, 2);
    big(0, 0) = 1e4;
    big(1, 1) = 1e4;
    CHECK_THROWS_AS(ddc::mat_exp(big), ddc::NumericalFailure);
}

TEST_CASE("numeric_rank on exact cases") {
    CHECK(ddc::numeric_rank(Matrix::identity(4)) == 4);

    // Outer product of two vectors has rank one by construction.
    const Matrix u = ddc::col_matrix({1.0, -2.0, 0.5});
    const Matrix v = ddc::col_matrix({3.0, 1.0, 1.0, -1.0});
    CHECK(ddc::numeric_rank(u * v.transpose()) == 1);
}

TEST_CASE("numeric_rank invariant under row permutation and good conditioning") {
    oracle::TestRng rng(13);
    const Matrix a = rng.matrix(4, 6);
    const std::size_t r = ddc::numeric_rank(a);

    Matrix perm(4, 4);
    perm(0, 2) = perm(1, 0) = perm(2, 3) = perm(3, 1) = 1.0;
    CHECK(ddc::numeric_rank(perm * a) == r);

    // Well-conditioned invertible multiplier.
    const Matrix m = Matrix::from_rows(
        {{2, 0.1, 0, 0}, {0.1, 1.5, 0, 0}, {0, 0, 1, 0.2}, {0, 0, 0.2, 3}});
    CHECK(ddc::numeric_rank(m * a) == r);
}

TEST_CASE("spectral_radius on known spectra") {
    CHECK(ddc::spectral_radius(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ddc::spectral_radius(Matrix::from_rows({{0.5, 0}, {0, -0.9}})) ==
          doctest::Approx(0.9).epsilon(1e-10));

    // Scaled rotation: complex pair of modulus 0.8.
    const double theta = 0.7;
    const Matrix rot = Matrix::from_rows({{0.8 * std::cos(theta), -0.8 * std::sin(theta)},
                                          {0.8 * std::sin(theta), 0.8 * std::cos(theta)}});
    CHECK(ddc::spectral_radius(rot) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("eigenvalues of a larger nonsymmetric matrix match its trace") {
    oracle::TestRng rng(21);
    const Matrix a = rng.matrix(8, 8, -2.0, 2.0);
    const auto evs = ddc::eigenvalues(a);
    REQUIRE(evs.size() == 8);
    std::complex<double> sum{0.0, 0.0};
    for (const auto& ev : evs)
        sum += ev;
    CHECK(sum.real() == doctest::Approx(a.trace()).epsilon(1e-8));
    CHECK(std::abs(sum.imag()) < 1e-8);
}
