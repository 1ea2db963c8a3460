#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ddc {

/// Dense real matrix with row-major storage and value semantics.
///
/// The carrier type for every data block, system matrix, and LMI block in
/// the toolkit. Entries are validated to be finite when constructed from
/// user-provided data. Zero-sized dimensions are allowed so that empty
/// interconnection blocks compose cleanly.
class Matrix {
public:
    Matrix() = default;

    /// rows x cols zero matrix.
    Matrix(std::size_t rows, std::size_t cols);

    /// Construct from row-major entries; throws InvalidParameter on a size
    /// mismatch or any non-finite entry.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols);

    /// Row-by-row literal, e.g. Matrix::from_rows({{1, 2}, {3, 4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Matrix transpose() const;

    Matrix operator+(const Matrix& rhs) const;
    Matrix operator-(const Matrix& rhs) const;
    Matrix operator-() const;
    Matrix operator*(const Matrix& rhs) const;
    Matrix operator*(double s) const;
    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    std::vector<double> operator*(const std::vector<double>& v) const;

    double frobenius_norm() const;
    double one_norm() const;  // max absolute column sum
    double max_abs() const;

    /// Max |a_ij - a_ji| relative to max(1, max_abs()).
    double asymmetry() const;
    bool is_symmetric(double rel_tol) const;
    /// (A + A^T) / 2.
    Matrix symmetrized() const;

    double trace() const;

    Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows, std::size_t ncols) const;
    void set_block(std::size_t row0, std::size_t col0, const Matrix& m);

    std::vector<double> row(std::size_t i) const;
    std::vector<double> col(std::size_t j) const;
    void set_col(std::size_t j, const std::vector<double>& v);

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(double s, const Matrix& m);

/// Stack blocks left to right; all blocks must share a row count.
Matrix hstack(const std::vector<Matrix>& blocks);
/// Stack blocks top to bottom; all blocks must share a column count.
Matrix vstack(const std::vector<Matrix>& blocks);

/// Column vector as an n x 1 matrix.
Matrix col_matrix(const std::vector<double>& v);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double vec_norm(const std::vector<double>& v);

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Throws NumericalFailure if A is singular to working precision.
std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b);
Matrix solve_linear(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

} // namespace ddc
