#include "cssp/spectrum.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cssp {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    const double top = values_.empty() ? 0.0 : values_.front();
    if (!std::isfinite(top)) throw std::invalid_argument("Spectrum: non-finite value");
    const double tol = kRankRelTol * std::abs(top);
    double prev = std::numeric_limits<double>::infinity();
    for (double& v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("Spectrum: non-finite value");
        if (v < 0.0) {
            if (v < -tol)
                throw std::invalid_argument("Spectrum: negative value " + std::to_string(v) +
                                            " below clamp tolerance");
            v = 0.0;
        }
        if (v > prev * (1.0 + 1e-12) + tol)
            throw std::invalid_argument("Spectrum: values not non-increasing");
        if (v > prev) v = prev;  // round-off ties
        prev = v;
    }
    rank_ = 0;
    for (double v : values_)
        if (v > tol) ++rank_;
}

double Spectrum::total() const { return tail_sum(0); }

double Spectrum::tail_sum(std::size_t k) const {
    double s = 0.0;
    for (std::size_t i = values_.size(); i > k; --i) s += values_[i - 1];
    return s;
}

double Spectrum::rank_tolerance() const {
    return values_.empty() ? 0.0 : kRankRelTol * values_.front();
}

Spectrum Spectrum::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("Spectrum::scaled: factor must be positive");
    std::vector<double> v = values_;
    for (double& x : v) x *= c;
    return Spectrum(std::move(v));
}

double opt_k(const Spectrum& spectrum, std::size_t k) {
    if (k > spectrum.size())
        throw std::out_of_range("opt_k: k > n (" + std::to_string(k) + " > " +
                                std::to_string(spectrum.size()) + ")");
    return spectrum.tail_sum(k);
}

}  // namespace cssp
