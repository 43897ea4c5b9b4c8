#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace cssp {

/// Dense row-major matrix of doubles. All entries are required to be finite;
/// construction from data and the file readers enforce this.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const std::vector<double>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& entries() const { return data_; }

    DenseMatrix transposed() const;
    DenseMatrix column(std::size_t j) const;

    double frobenius_norm() const;
    double trace() const;

    /// Max |M - M^T| entry relative to the largest absolute entry (0 for empty).
    double asymmetry() const;
    bool is_symmetric(double rel_tol = 1e-10) const;

    /// this * other
    DenseMatrix multiply(const DenseMatrix& other) const;
    /// this^T * this  (the induced Gram matrix)
    DenseMatrix gram() const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator-=(const DenseMatrix& other);
    DenseMatrix& operator*=(double scalar);

    /// Principal submatrix with rows and columns restricted to `idx`.
    DenseMatrix submatrix(const std::vector<std::size_t>& idx) const;
    /// All rows, columns restricted to `idx`.
    DenseMatrix columns_of(const std::vector<std::size_t>& idx) const;

    // Plain-text I/O. CSV is one row per line, comma separated. The whitespace
    // format has a "rows cols" header line followed by rows of reals.
    static DenseMatrix read_csv(const std::string& path);
    static DenseMatrix read_whitespace(const std::string& path);
    void write_csv(const std::string& path) const;
    void write_whitespace(const std::string& path) const;

    static DenseMatrix read_csv(std::istream& in);
    static DenseMatrix read_whitespace(std::istream& in);
    void write_csv(std::ostream& out) const;
    void write_whitespace(std::ostream& out) const;

private:
    void check_finite() const;

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace cssp
