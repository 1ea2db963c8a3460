#include "ddc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ddc/errors.hpp"

namespace ddc {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw InvalidParameter("matrix entries length does not match rows*cols");
    if (!all_finite())
        throw InvalidParameter("matrix constructed with non-finite entries");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> entries;
    entries.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c)
            throw InvalidParameter("ragged row in matrix literal");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(entries));
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    Matrix out = *this;
    out += rhs;
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    Matrix out = *this;
    out -= rhs;
    return out;
}

Matrix Matrix::operator-() const {
    Matrix out = *this;
    for (double& x : out.data_)
        x = -x;
    return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw InvalidParameter("matrix addition shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] += rhs.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw InvalidParameter("matrix subtraction shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k)
        data_[k] -= rhs.data_[k];
    return *this;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_)
        throw InvalidParameter("matrix product shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out(i, j) += aik * rhs(k, j);
        }
    }
    return out;
}

Matrix Matrix::operator*(double s) const {
    Matrix out = *this;
    out *= s;
    return out;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_)
        x *= s;
    return *this;
}

std::vector<double> Matrix::operator*(const std::vector<double>& v) const {
    if (cols_ != v.size())
        throw InvalidParameter("matrix-vector product shape mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j)
            acc += (*this)(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

double Matrix::frobenius_norm() const {
    double acc = 0.0;
    for (double x : data_)
        acc += x * x;
    return std::sqrt(acc);
}

double Matrix::one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double colsum = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            colsum += std::abs((*this)(i, j));
        best = std::max(best, colsum);
    }
    return best;
}

double Matrix::max_abs() const {
    double best = 0.0;
    for (double x : data_)
        best = std::max(best, std::abs(x));
    return best;
}

double Matrix::asymmetry() const {
    if (rows_ != cols_)
        throw InvalidParameter("asymmetry requires a square matrix");
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
    return worst / std::max(1.0, max_abs());
}

bool Matrix::is_symmetric(double rel_tol) const {
    return rows_ == cols_ && asymmetry() <= rel_tol;
}

Matrix Matrix::symmetrized() const {
    if (rows_ != cols_)
        throw InvalidParameter("symmetrized requires a square matrix");
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return out;
}

double Matrix::trace() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
        acc += (*this)(i, i);
    return acc;
}

Matrix Matrix::block(std::size_t row0, std::size_t col0, std::size_t nrows,
                     std::size_t ncols) const {
    if (row0 + nrows > rows_ || col0 + ncols > cols_)
        throw InvalidParameter("block extraction out of range");
    Matrix out(nrows, ncols);
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < ncols; ++j)
            out(i, j) = (*this)(row0 + i, col0 + j);
    return out;
}

void Matrix::set_block(std::size_t row0, std::size_t col0, const Matrix& m) {
    if (row0 + m.rows() > rows_ || col0 + m.cols() > cols_)
        throw InvalidParameter("block assignment out of range");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            (*this)(row0 + i, col0 + j) = m(i, j);
}

std::vector<double> Matrix::row(std::size_t i) const {
    std::vector<double> out(cols_);
    for (std::size_t j = 0; j < cols_; ++j)
        out[j] = (*this)(i, j);
    return out;
}

std::vector<double> Matrix::col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        out[i] = (*this)(i, j);
    return out;
}

void Matrix::set_col(std::size_t j, const std::vector<double>& v) {
    if (v.size() != rows_)
        throw InvalidParameter("column assignment length mismatch");
    for (std::size_t i = 0; i < rows_; ++i)
        (*this)(i, j) = v[i];
}

bool Matrix::all_finite() const {
    for (double x : data_)
        if (!std::isfinite(x))
            return false;
    return true;
}

Matrix operator*(double s, const Matrix& m) { return m * s; }

Matrix hstack(const std::vector<Matrix>& blocks) {
    if (blocks.empty())
        return Matrix();
    std::size_t rows = blocks.front().rows();
    std::size_t cols = 0;
    for (const Matrix& b : blocks) {
        if (b.rows() != rows)
            throw InvalidParameter("hstack row count mismatch");
        cols += b.cols();
    }
    Matrix out(rows, cols);
    std::size_t c0 = 0;
    for (const Matrix& b : blocks) {
        out.set_block(0, c0, b);
        c0 += b.cols();
    }
    return out;
}

Matrix vstack(const std::vector<Matrix>& blocks) {
    if (blocks.empty())
        return Matrix();
    std::size_t cols = blocks.front().cols();
    std::size_t rows = 0;
    for (const Matrix& b : blocks) {
        if (b.cols() != cols)
            throw InvalidParameter("vstack column count mismatch");
        rows += b.rows();
    }
    Matrix out(rows, cols);
    std::size_t r0 = 0;
    for (const Matrix& b : blocks) {
        out.set_block(r0, 0, b);
        r0 += b.rows();
    }
    return out;
}

Matrix col_matrix(const std::vector<double>& v) {
    Matrix out(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i)
        out(i, 0) = v[i];
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw InvalidParameter("dot length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

double vec_norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

Matrix solve_linear(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols())
        throw InvalidParameter("solve_linear requires a square matrix");
    if (a.rows() != b.rows())
        throw InvalidParameter("solve_linear rhs row mismatch");
    const std::size_t n = a.rows();
    Matrix lu = a;
    Matrix x = b;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                piv = i;
            }
        }
        if (best <= 1e-300)
            throw NumericalFailure("solve_linear: singular matrix", k);
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(lu(k, j), lu(piv, j));
            for (std::size_t j = 0; j < x.cols(); ++j)
                std::swap(x(k, j), x(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            if (f == 0.0)
                continue;
            for (std::size_t j = k; j < n; ++j)
                lu(i, j) -= f * lu(k, j);
            for (std::size_t j = 0; j < x.cols(); ++j)
                x(i, j) -= f * x(k, j);
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double acc = x(kk, j);
            for (std::size_t m = kk + 1; m < n; ++m)
                acc -= lu(kk, m) * x(m, j);
            x(kk, j) = acc / lu(kk, kk);
        }
    }
    return x;
}

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
    Matrix x = solve_linear(a, col_matrix(b));
    return x.col(0);
}

Matrix inverse(const Matrix& a) { return solve_linear(a, Matrix::identity(a.rows())); }

} // namespace ddc
