#include "cssp/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cssp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

void validate_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error(std::string(who) + ": alpha must be positive");
}

// Sequential projection-DPP sampling on the chosen eigenvectors. `v` is the
// n x m matrix whose columns are the selected (orthonormal) eigenvectors;
// each round picks an item with probability proportional to its squared row
// norm, conditions the remaining subspace on that choice, and re-orthonormalizes.
// Exactly m items come out.
std::vector<std::size_t> project_and_pick(DenseMatrix v, SplitMix64& rng) {
    const std::size_t n = v.rows();
    std::size_t m = v.cols();
    std::vector<std::size_t> out;
    out.reserve(m);

    std::vector<double> p(n);
    while (m > 0) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double w = 0.0;
            for (std::size_t c = 0; c < m; ++c) w += v(j, c) * v(j, c);
            p[j] = w;
            total += w;
        }
        if (!(total > 0.0))
            throw std::runtime_error("sample: projection weights vanished");

        // Renormalized inverse-cdf walk; total tracks m up to round-off.
        const double u = rng.next_double() * total;
        double acc = 0.0;
        std::size_t pick = n;
        for (std::size_t j = 0; j < n; ++j) {
            acc += p[j];
            if (u < acc) {
                pick = j;
                break;
            }
        }
        if (pick == n) {  // u landed on the round-off tail: take the last live row
            for (std::size_t j = n; j-- > 0;)
                if (p[j] > 0.0) {
                    pick = j;
                    break;
                }
        }
        out.push_back(pick);

        // Eliminate row `pick`: pivot on its largest-magnitude coordinate,
        // sweep it out of the other columns, then drop the pivot column.
        std::size_t piv = 0;
        for (std::size_t c = 1; c < m; ++c)
            if (std::abs(v(pick, c)) > std::abs(v(pick, piv))) piv = c;
        const double vp = v(pick, piv);
        if (vp == 0.0) throw std::runtime_error("sample: degenerate pivot");
        for (std::size_t c = 0; c < m; ++c) {
            if (c == piv) continue;
            const double f = v(pick, c) / vp;
            if (f == 0.0) continue;
            for (std::size_t i = 0; i < n; ++i) v(i, c) -= f * v(i, piv);
        }
        // Move the last column into the pivot slot and shrink.
        if (piv != m - 1)
            for (std::size_t i = 0; i < n; ++i) v(i, piv) = v(i, m - 1);
        --m;

        // Modified Gram-Schmidt on the survivors.
        for (std::size_t c = 0; c < m; ++c) {
            double norm2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm2 += v(i, c) * v(i, c);
            const double norm = std::sqrt(norm2);
            if (!(norm > 0.0))
                throw std::runtime_error("sample: lost a dimension while conditioning");
            for (std::size_t i = 0; i < n; ++i) v(i, c) /= norm;
            for (std::size_t d = c + 1; d < m; ++d) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += v(i, c) * v(i, d);
                for (std::size_t i = 0; i < n; ++i) v(i, d) -= dot * v(i, c);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

DenseMatrix gather_columns(const DenseMatrix& basis, const std::vector<std::size_t>& idx) {
    DenseMatrix v(basis.rows(), idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c)
        for (std::size_t i = 0; i < basis.rows(); ++i) v(i, c) = basis(i, idx[c]);
    return v;
}

}  // namespace

DppConfig DppConfig::random_size(Eigensystem es, double alpha) {
    validate_alpha(alpha, "DppConfig");
    DppConfig c;
    c.eigen = std::move(es);
    c.alpha = alpha;
    return c;
}

DppConfig DppConfig::with_size(Eigensystem es, std::size_t k) {
    if (k > es.spectrum.rank())
        throw std::domain_error("DppConfig: fixed size " + std::to_string(k) +
                                " exceeds rank " + std::to_string(es.spectrum.rank()));
    DppConfig c;
    c.eigen = std::move(es);
    c.fixed_size = k;
    return c;
}

double dpp_expected_size(const Spectrum& spectrum, double alpha) {
    validate_alpha(alpha, "dpp_expected_size");
    double s = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        s += spectrum[i] / (spectrum[i] + alpha);
    return s;
}

double dpp_expected_error(const Spectrum& spectrum, double alpha) {
    validate_alpha(alpha, "dpp_expected_error");
    return alpha * dpp_expected_size(spectrum, alpha);
}

std::vector<double> dpp_size_pmf(const Spectrum& spectrum, double alpha) {
    validate_alpha(alpha, "dpp_size_pmf");
    std::vector<double> pmf{1.0};
    pmf.reserve(spectrum.size() + 1);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double p = spectrum[i] / (spectrum[i] + alpha);
        pmf.push_back(0.0);
        for (std::size_t j = pmf.size() - 1; j >= 1; --j)
            pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
        pmf[0] *= (1.0 - p);
    }
    return pmf;
}

std::vector<std::size_t> sample_dpp_indices(const DppConfig& config, SplitMix64& rng) {
    if (config.fixed_size)
        throw std::invalid_argument("sample_dpp: config is fixed-size; use sample_kdpp");
    validate_alpha(config.alpha, "sample_dpp");
    const Spectrum& sp = config.eigen.spectrum;

    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double p = sp[i] / (sp[i] + config.alpha);
        if (rng.next_double() < p) chosen.push_back(i);
    }
    if (chosen.empty()) return {};
    return project_and_pick(gather_columns(config.eigen.basis, chosen), rng);
}

std::vector<std::size_t> sample_kdpp_indices(const DppConfig& config, SplitMix64& rng) {
    if (!config.fixed_size)
        throw std::invalid_argument("sample_kdpp: config lacks a fixed size");
    const Spectrum& sp = config.eigen.spectrum;
    const std::size_t n = sp.size();
    const std::size_t k = *config.fixed_size;
    if (k > sp.rank())
        throw std::domain_error("sample_kdpp: k exceeds rank");
    if (k == 0) return {};

    // Prefix table of log e_r(lambda_1..lambda_i); eigenvalues at or below
    // the rank tolerance are exact zeros here.
    const double tol = sp.rank_tolerance();
    std::vector<double> lg(n);
    for (std::size_t i = 0; i < n; ++i)
        lg[i] = (sp[i] > tol) ? std::log(sp[i]) : kNegInf;

    std::vector<std::vector<double>> L(k + 1, std::vector<double>(n + 1, kNegInf));
    for (std::size_t i = 0; i <= n; ++i) L[0][i] = 0.0;
    for (std::size_t r = 1; r <= k; ++r)
        for (std::size_t i = 1; i <= n; ++i)
            L[r][i] = log_sum_exp(L[r][i - 1], lg[i - 1] + L[r - 1][i - 1]);

    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::size_t need = k;
    for (std::size_t i = n; i >= 1 && need > 0; --i) {
        if (i == need) {  // all remaining items are forced
            for (std::size_t j = i; j >= 1; --j) chosen.push_back(j - 1);
            need = 0;
            break;
        }
        const double logp = lg[i - 1] + L[need - 1][i - 1] - L[need][i];
        if (rng.next_double() < std::exp(logp)) {
            chosen.push_back(i - 1);
            --need;
        }
    }
    if (need != 0) throw std::runtime_error("sample_kdpp: recurrence ran dry");
    std::sort(chosen.begin(), chosen.end());
    return project_and_pick(gather_columns(config.eigen.basis, chosen), rng);
}

SubsetSample sample_dpp(const DppConfig& config, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SubsetSample s;
    s.indices = sample_dpp_indices(config, rng);
    s.sampler_id = "dpp";
    s.seed = seed;
    return s;
}

SubsetSample sample_kdpp(const DppConfig& config, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SubsetSample s;
    s.indices = sample_kdpp_indices(config, rng);
    s.sampler_id = "kdpp";
    s.seed = seed;
    return s;
}

}  // namespace cssp
