#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "pinsync/errors.hpp"

namespace pinsync {

using Complex = std::complex<double>;

/**
 * @brief Dense real matrix with row-major storage.
 *
 * The universal numeric carrier of the library. All entries must be finite;
 * constructors that take data enforce this.
 */
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {
        if (rows == 0 || cols == 0)
            throw dimension_error("matrix dimensions must be positive");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows == 0 || cols == 0)
            throw dimension_error("matrix dimensions must be positive");
        if (a_.size() != rows * cols)
            throw dimension_error("entry count does not match rows*cols");
        check_finite();
    }

    DenseMatrix(std::initializer_list<std::initializer_list<double>> init) {
        rows_ = init.size();
        if (rows_ == 0) throw dimension_error("matrix dimensions must be positive");
        cols_ = init.begin()->size();
        if (cols_ == 0) throw dimension_error("matrix dimensions must be positive");
        a_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw dimension_error("ragged initializer list");
            a_.insert(a_.end(), row.begin(), row.end());
        }
        check_finite();
    }

    static DenseMatrix zero(std::size_t rows, std::size_t cols) { return DenseMatrix(rows, cols); }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix diagonal(const std::vector<double>& d) {
        DenseMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return a_; }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    DenseMatrix& operator-=(const DenseMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    DenseMatrix& operator*=(double s) {
        for (double& v : a_) v *= s;
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
    friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
    friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
    friend DenseMatrix operator-(DenseMatrix a) { return a *= -1.0; }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        if (a.cols_ != b.rows_)
            throw dimension_error("matrix product shape mismatch");
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        if (x.size() != cols_)
            throw dimension_error("matrix-vector shape mismatch");
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Maximum absolute column sum.
    double one_norm() const {
        double m = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    bool all_finite() const {
        return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    void check_finite() const {
        if (!all_finite())
            throw validation_error("matrix entries must be finite");
    }

    void require_same_shape(const DenseMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw dimension_error("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

/// Kronecker product; block (i,j) of the result is a(i,j) * B.
inline DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    c(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return c;
}

/// Solves A X = B by LU factorization with partial pivoting.
inline DenseMatrix lu_solve(DenseMatrix a, DenseMatrix b) {
    if (!a.square())
        throw dimension_error("lu_solve requires a square coefficient matrix");
    const std::size_t n = a.rows();
    if (b.rows() != n)
        throw dimension_error("lu_solve right-hand side shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) == 0.0)
            throw convergence_error("singular matrix in lu_solve");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            if (m == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= m * b(k, j);
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(ri, j);
            for (std::size_t k = ri + 1; k < n; ++k) s -= a(ri, k) * b(k, j);
            b(ri, j) = s / a(ri, ri);
        }
    }
    return b;
}

inline double vector_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

} // namespace pinsync
