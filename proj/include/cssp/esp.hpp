#pragma once

#include <cstddef>
#include <vector>

#include "cssp/spectrum.hpp"

namespace cssp {

// Elementary symmetric polynomials e_0..e_n of a spectrum, stored as
// mantissa * 2^exponent pairs so that entries spanning hundreds of orders
// of magnitude stay representable. e_k(lambda) = sum over k-subsets T of
// prod_{i in T} lambda_i. Eigenvalues at or below the spectrum's rank
// tolerance are treated as exact zeros, so e_k = 0 for every k > rank.
class EspTable {
public:
    std::size_t size() const { return mantissa_.size(); }  // n + 1 entries

    // Scaled entry: true e_k = e(k) * exp(scale_log(k)). Mantissas lie in
    // [1, 2) except for exact zeros.
    double e(std::size_t k) const { return mantissa_.at(k); }
    double scale_log(std::size_t k) const;

    // Unscaled value; overflows to +inf for large spectra, by design only
    // used at desk scale and in tests.
    double value(std::size_t k) const;

    // log(e_k); -inf for e_k = 0.
    double log_value(std::size_t k) const;

    // e_num / e_den formed through exponent arithmetic. Requires e_den > 0.
    double ratio(std::size_t num, std::size_t den) const;

private:
    friend EspTable esp(const Spectrum& spectrum);

    std::vector<double> mantissa_;
    std::vector<long> exp2_;
};

// Coefficient recurrence over the factors (1 + lambda_i x), renormalized
// per entry after every update.
EspTable esp(const Spectrum& spectrum);

// Exact expected squared-error of a size-k DPP sample drawn from the
// kernel with this spectrum: (k+1) * e_{k+1} / e_k. Requires k < rank.
double kdpp_expected_error(const Spectrum& spectrum, std::size_t k);

// Consecutive expected-error ratios f(k)/f(k-1) for k = 1..rank-1; each is
// at most 1 up to round-off (Newton's inequalities).
std::vector<double> newton_ratio_check(const Spectrum& spectrum);

// Minimal discrete second difference of k -> f(k), reported but never
// asserted: convexity of f is an open conjecture.
struct ConvexityReport {
    double min_second_difference;
    std::size_t argmin_k;   // the middle index of the minimizing triple
    bool violation_found;   // min < -1e-9 * f(0) (scale-relative)
};
ConvexityReport convexity_probe(const Spectrum& spectrum);

}  // namespace cssp
