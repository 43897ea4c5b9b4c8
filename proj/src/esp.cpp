#include "cssp/esp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cssp {
namespace {

constexpr double kLn2 = 0.6931471805599453;

// Non-negative real as mantissa * 2^exp2 with mantissa in [1,2) or zero.
struct ScaledNonneg {
    double m = 0.0;
    long e2 = 0;

    static ScaledNonneg from(double v) {
        ScaledNonneg s;
        if (v > 0.0) {
            int ex = 0;
            const double f = std::frexp(v, &ex);  // f in [0.5, 1)
            s.m = 2.0 * f;
            s.e2 = ex - 1;
        }
        return s;
    }

    void normalize() {
        if (m <= 0.0) {
            m = 0.0;
            e2 = 0;
            return;
        }
        int ex = 0;
        const double f = std::frexp(m, &ex);
        m = 2.0 * f;
        e2 += ex - 1;
    }
};

ScaledNonneg add(const ScaledNonneg& a, const ScaledNonneg& b) {
    if (a.m == 0.0) return b;
    if (b.m == 0.0) return a;
    const ScaledNonneg& hi = (a.e2 >= b.e2) ? a : b;
    const ScaledNonneg& lo = (a.e2 >= b.e2) ? b : a;
    const long diff = hi.e2 - lo.e2;
    ScaledNonneg out = hi;
    if (diff <= 128) {
        out.m = hi.m + std::ldexp(lo.m, static_cast<int>(-diff));
        out.normalize();
    }
    return out;  // the low term is below 2^-128 relative: absorbed
}

ScaledNonneg mul(const ScaledNonneg& a, double scalar) {
    ScaledNonneg out;
    if (a.m == 0.0 || scalar == 0.0) return out;
    int ex = 0;
    const double f = std::frexp(scalar, &ex);
    out.m = a.m * (2.0 * f);
    out.e2 = a.e2 + ex - 1;
    out.normalize();
    return out;
}

}  // namespace

double EspTable::scale_log(std::size_t k) const {
    return static_cast<double>(exp2_.at(k)) * kLn2;
}

double EspTable::value(std::size_t k) const {
    return std::ldexp(mantissa_.at(k), static_cast<int>(exp2_.at(k)));
}

double EspTable::log_value(std::size_t k) const {
    const double m = mantissa_.at(k);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(m) + scale_log(k);
}

double EspTable::ratio(std::size_t num, std::size_t den) const {
    const double dm = mantissa_.at(den);
    if (dm == 0.0) throw std::domain_error("EspTable::ratio: zero denominator e_" +
                                           std::to_string(den));
    const double nm = mantissa_.at(num);
    if (nm == 0.0) return 0.0;
    const long diff = exp2_[num] - exp2_[den];
    return std::ldexp(nm / dm, static_cast<int>(diff));
}

EspTable esp(const Spectrum& spectrum) {
    const std::size_t n = spectrum.size();
    const double tol = spectrum.rank_tolerance();

    std::vector<ScaledNonneg> c(n + 1);
    c[0] = ScaledNonneg::from(1.0);
    std::size_t deg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = spectrum[i];
        if (lam <= tol) continue;  // numerically zero: factor (1 + 0x)
        ++deg;
        for (std::size_t k = deg; k >= 1; --k) c[k] = add(c[k], mul(c[k - 1], lam));
    }

    EspTable t;
    t.mantissa_.resize(n + 1);
    t.exp2_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        t.mantissa_[k] = c[k].m;
        t.exp2_[k] = c[k].e2;
    }
    return t;
}

double kdpp_expected_error(const Spectrum& spectrum, std::size_t k) {
    if (k >= spectrum.rank())
        throw std::domain_error("kdpp_expected_error: k = " + std::to_string(k) +
                                " must be below rank " +
                                std::to_string(spectrum.rank()));
    const EspTable t = esp(spectrum);
    return static_cast<double>(k + 1) * t.ratio(k + 1, k);
}

std::vector<double> newton_ratio_check(const Spectrum& spectrum) {
    const std::size_t r = spectrum.rank();
    if (r < 2)
        throw std::domain_error("newton_ratio_check: needs rank >= 2, got " +
                                std::to_string(r));
    const EspTable t = esp(spectrum);
    std::vector<double> ratios;
    ratios.reserve(r - 1);
    double prev = 1.0 * t.ratio(1, 0);  // f(0) = e_1/e_0
    for (std::size_t k = 1; k < r; ++k) {
        const double cur = static_cast<double>(k + 1) * t.ratio(k + 1, k);
        ratios.push_back(cur / prev);
        prev = cur;
    }
    return ratios;
}

ConvexityReport convexity_probe(const Spectrum& spectrum) {
    const std::size_t r = spectrum.rank();
    if (r < 3)
        throw std::domain_error("convexity_probe: needs rank >= 3, got " +
                                std::to_string(r));
    const EspTable t = esp(spectrum);
    std::vector<double> f(r);  // f(k) for k = 0..r-1
    for (std::size_t k = 0; k < r; ++k)
        f[k] = static_cast<double>(k + 1) * t.ratio(k + 1, k);

    ConvexityReport rep{std::numeric_limits<double>::infinity(), 0, false};
    for (std::size_t k = 1; k + 1 < r; ++k) {
        const double dd = f[k + 1] + f[k - 1] - 2.0 * f[k];
        if (dd < rep.min_second_difference) {
            rep.min_second_difference = dd;
            rep.argmin_k = k;
        }
    }
    rep.violation_found = rep.min_second_difference < -1e-9 * f[0];
    return rep;
}

}  // namespace cssp
