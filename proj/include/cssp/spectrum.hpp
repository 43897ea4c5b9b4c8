#pragma once

#include <cstddef>
#include <vector>

namespace cssp {

/// Relative threshold below which eigenvalues count as numerically zero.
inline constexpr double kRankRelTol = 1e-10;

/// Ordered eigenvalue list of a Gram/kernel matrix: lambda_1 >= ... >= lambda_n >= 0.
/// `rank` counts the values above kRankRelTol * lambda_1. Negative inputs within
/// the same tolerance are clamped to zero; anything more negative is rejected.
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    std::size_t rank() const { return rank_; }
    double operator[](std::size_t i) const { return values_[i]; }  // 0-based
    const std::vector<double>& values() const { return values_; }

    double total() const;                 // trace = sum of all values
    double tail_sum(std::size_t k) const; // sum of values[k..]
    double rank_tolerance() const;        // absolute zero threshold

    Spectrum scaled(double c) const;

private:
    std::vector<double> values_;
    std::size_t rank_ = 0;
};

/// Best rank-k squared-Frobenius / trace-norm approximation error: the sum of
/// the eigenvalues past the k-th. Throws std::out_of_range for k > n.
double opt_k(const Spectrum& spectrum, std::size_t k);

}  // namespace cssp
