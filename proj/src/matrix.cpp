#include "cssp/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cssp {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (!std::isfinite(fill)) throw std::invalid_argument("DenseMatrix: non-finite entry");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("DenseMatrix: entries length != rows*cols");
    check_finite();
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const std::vector<double>& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

void DenseMatrix::check_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) throw std::invalid_argument("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseMatrix DenseMatrix::column(std::size_t j) const {
    DenseMatrix c(rows_, 1);
    for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
}

double DenseMatrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double DenseMatrix::trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

double DenseMatrix::asymmetry() const {
    if (rows_ != cols_) throw std::invalid_argument("asymmetry: matrix not square");
    double max_abs = 0.0, max_diff = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            max_abs = std::max(max_abs, std::abs((*this)(i, j)));
            max_diff = std::max(max_diff, std::abs((*this)(i, j) - (*this)(j, i)));
        }
    return max_abs == 0.0 ? 0.0 : max_diff / max_abs;
}

bool DenseMatrix::is_symmetric(double rel_tol) const {
    return rows_ == cols_ && asymmetry() <= rel_tol;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& other) const {
    if (cols_ != other.rows_) throw std::invalid_argument("multiply: shape mismatch");
    DenseMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
        }
    return out;
}

DenseMatrix DenseMatrix::gram() const {
    DenseMatrix g(cols_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t a = 0; a < cols_; ++a) {
            const double v = (*this)(i, a);
            if (v == 0.0) continue;
            for (std::size_t b = a; b < cols_; ++b) g(a, b) += v * (*this)(i, b);
        }
    for (std::size_t a = 0; a < cols_; ++a)
        for (std::size_t b = 0; b < a; ++b) g(a, b) = g(b, a);
    return g;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("operator+=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
        throw std::invalid_argument("operator-=: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double scalar) {
    for (double& v : data_) v *= scalar;
    return *this;
}

DenseMatrix DenseMatrix::submatrix(const std::vector<std::size_t>& idx) const {
    DenseMatrix s(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        if (idx[a] >= rows_ || idx[a] >= cols_)
            throw std::out_of_range("submatrix: index out of range");
        for (std::size_t b = 0; b < idx.size(); ++b) s(a, b) = (*this)(idx[a], idx[b]);
    }
    return s;
}

DenseMatrix DenseMatrix::columns_of(const std::vector<std::size_t>& idx) const {
    DenseMatrix c(rows_, idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
        if (idx[b] >= cols_) throw std::out_of_range("columns_of: index out of range");
        for (std::size_t i = 0; i < rows_; ++i) c(i, b) = (*this)(i, idx[b]);
    }
    return c;
}

namespace {

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

DenseMatrix DenseMatrix::read_csv(const std::string& path) {
    auto in = open_in(path);
    return read_csv(in);
}

DenseMatrix DenseMatrix::read_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t row_cols = 0;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                data.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("csv: bad value '" + cell + "' at row " +
                                         std::to_string(rows + 1));
            }
            ++row_cols;
        }
        if (rows == 0)
            cols = row_cols;
        else if (row_cols != cols)
            throw std::runtime_error("csv: ragged row " + std::to_string(rows + 1));
        ++rows;
    }
    return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix DenseMatrix::read_whitespace(const std::string& path) {
    auto in = open_in(path);
    return read_whitespace(in);
}

DenseMatrix DenseMatrix::read_whitespace(std::istream& in) {
    std::size_t rows = 0, cols = 0;
    if (!(in >> rows >> cols)) throw std::runtime_error("matrix: missing 'rows cols' header");
    std::vector<double> data(rows * cols);
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!(in >> data[i]))
            throw std::runtime_error("matrix: expected " + std::to_string(data.size()) +
                                     " entries, got " + std::to_string(i));
    std::string extra;
    if (in >> extra)
        throw std::runtime_error("matrix: trailing content after " +
                                 std::to_string(data.size()) + " entries: '" + extra + "'");
    return DenseMatrix(rows, cols, std::move(data));
}

void DenseMatrix::write_csv(const std::string& path) const {
    auto out = open_out(path);
    write_csv(out);
}

void DenseMatrix::write_csv(std::ostream& out) const {
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) out << ',';
            out << fmt_full((*this)(i, j));
        }
        out << '\n';
    }
}

void DenseMatrix::write_whitespace(const std::string& path) const {
    auto out = open_out(path);
    write_whitespace(out);
}

void DenseMatrix::write_whitespace(std::ostream& out) const {
    out << rows_ << ' ' << cols_ << '\n';
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) out << ' ';
            out << fmt_full((*this)(i, j));
        }
        out << '\n';
    }
}

}  // namespace cssp
