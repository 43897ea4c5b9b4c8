#include "cssp/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cssp {
namespace {

void require_rank(const Spectrum& spectrum, const char* who) {
    if (spectrum.rank() == 0)
        throw std::domain_error(std::string(who) + ": zero spectrum");
}

double t_of(const Spectrum& spectrum, std::size_t s) {
    // s + tail/lambda_{s+1}; callers guarantee s < rank.
    return static_cast<double>(s) + spectrum.tail_sum(s) / spectrum[s];
}

void check_phi_window(const Spectrum& spectrum, std::size_t s, std::size_t k,
                      const char* who) {
    require_rank(spectrum, who);
    if (s >= spectrum.rank())
        throw std::out_of_range(std::string(who) + ": order s=" + std::to_string(s) +
                                " not below rank " + std::to_string(spectrum.rank()));
    if (k <= s)
        throw std::out_of_range(std::string(who) + ": need s < k, got s=" +
                                std::to_string(s) + " k=" + std::to_string(k));
    const double ts = t_of(spectrum, s);
    if (!(static_cast<double>(k) < ts))
        throw std::out_of_range(std::string(who) + ": k=" + std::to_string(k) +
                                " not below t_s=" + std::to_string(ts));
}

double threshold(double epsilon) {
    // (7/eps^4) ln^2(1/eps); infinite at eps = 0 so nothing is admissible.
    if (epsilon == 0.0) return std::numeric_limits<double>::infinity();
    const double l = std::log(1.0 / epsilon);
    return 7.0 / (epsilon * epsilon * epsilon * epsilon) * l * l;
}

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

StableRankProfile stable_rank_profile(const Spectrum& spectrum) {
    require_rank(spectrum, "stable_rank_profile");
    StableRankProfile prof;
    prof.sr.reserve(spectrum.rank());
    prof.t.reserve(spectrum.rank());
    for (std::size_t s = 0; s < spectrum.rank(); ++s) {
        prof.sr.push_back(spectrum.tail_sum(s) / spectrum[s]);
        prof.t.push_back(static_cast<double>(s) + prof.sr.back());
    }
    return prof;
}

double gamma_factor(const Spectrum& spectrum, std::size_t s, std::size_t k) {
    check_phi_window(spectrum, s, k, "gamma_factor");
    const double ts = t_of(spectrum, s);
    const double ks = static_cast<double>(k - s);
    return std::sqrt(1.0 + 2.0 * ks / (ts - static_cast<double>(k)));
}

double phi(const Spectrum& spectrum, std::size_t s, std::size_t k) {
    check_phi_window(spectrum, s, k, "phi");
    const double ks = static_cast<double>(k - s);
    return (1.0 + static_cast<double>(s) / ks) * gamma_factor(spectrum, s, k);
}

double psi(const Spectrum& spectrum, std::size_t s, std::size_t k) {
    require_rank(spectrum, "psi");
    const std::size_t n = spectrum.size();
    if (spectrum.rank() < n)
        throw std::domain_error("psi: spectrum is rank deficient (lambda_n = 0)");
    if (s >= k || k >= n)
        throw std::out_of_range("psi: need s < k < n, got s=" + std::to_string(s) +
                                " k=" + std::to_string(k) + " n=" + std::to_string(n));
    const double ks = static_cast<double>(k - s);
    return (spectrum[s] / spectrum[n - 1]) * (1.0 + static_cast<double>(s) / ks);
}

double lemma1_alpha(const Spectrum& spectrum, std::size_t s, std::size_t k,
                    double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw std::domain_error("lemma1_alpha: epsilon must lie in [0, 1)");
    const double g = gamma_factor(spectrum, s, k);  // validates the window
    const double opt = opt_k(spectrum, k);
    return g * opt / ((1.0 - epsilon) * static_cast<double>(k - s));
}

bool lemma2_applicable(std::size_t s, std::size_t k, double t_s, double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 0.5))
        throw std::domain_error("lemma2_applicable: epsilon must lie in (0, 1/2]");
    const double kk = static_cast<double>(k);
    return static_cast<double>(s) + threshold(epsilon) <= kk && kk <= t_s - 1.0;
}

EnvelopeResult master_envelope(const Spectrum& spectrum, std::size_t k,
                               double epsilon, bool enforce_threshold) {
    require_rank(spectrum, "master_envelope");
    if (k >= spectrum.rank())
        throw std::domain_error("master_envelope: k=" + std::to_string(k) +
                                " must be below rank " +
                                std::to_string(spectrum.rank()));
    if (!(epsilon >= 0.0 && epsilon <= 0.5))
        throw std::domain_error("master_envelope: epsilon must lie in [0, 1/2]");

    const double thr = enforce_threshold ? threshold(epsilon)
                                         : -std::numeric_limits<double>::infinity();
    EnvelopeResult res;
    res.value = std::numeric_limits<double>::infinity();
    const std::size_t s_max = std::min<std::size_t>(k, spectrum.rank());
    for (std::size_t s = 0; s < s_max; ++s) {
        const double ts = t_of(spectrum, s);
        const double kk = static_cast<double>(k);
        if (!(kk < ts)) continue;
        if (enforce_threshold &&
            !(static_cast<double>(s) + thr <= kk && kk <= ts - 1.0))
            continue;
        const double v = phi(spectrum, s, k);
        if (v < res.value) {
            res.value = v;
            res.arg_s = s;
        }
    }
    if (!res.arg_s) {
        res.value = static_cast<double>(k) + 1.0;
        res.fallback = true;
        return res;
    }
    const double boost = (1.0 + 2.0 * epsilon) * (1.0 + 2.0 * epsilon);
    res.value *= boost;
    return res;
}

namespace {

void check_decay_params(DecayKind kind, const DecayParams& p, double c,
                        const char* who) {
    if (!(p.gamma >= 1.0))
        throw std::domain_error(std::string(who) + ": gamma must be >= 1");
    if (!(c > 0.0)) throw std::domain_error(std::string(who) + ": c must be > 0");
    if (kind == DecayKind::poly) {
        if (!(p.rate > 1.0))
            throw std::domain_error(std::string(who) + ": poly decay needs p > 1");
    } else {
        if (!(p.rate > 0.0 && p.rate < 1.0))
            throw std::domain_error(std::string(who) +
                                    ": exponential decay needs delta in (0,1)");
    }
}

}  // namespace

double decay_bound(DecayKind kind, const DecayParams& params, std::size_t k,
                   double c) {
    check_decay_params(kind, params, c, "decay_bound");
    if (kind == DecayKind::poly) return c * params.gamma * params.rate;
    return c * params.gamma * (1.0 + params.rate * static_cast<double>(k));
}

double decay_stable_rank_floor(DecayKind kind, const DecayParams& params,
                               std::size_t s) {
    check_decay_params(kind, params, 1.0, "decay_stable_rank_floor");
    if (kind == DecayKind::poly)
        return (static_cast<double>(s) + 1.0) / (2.0 * params.gamma * (params.rate - 1.0)) -
               1.0 / params.gamma;
    return 1.0 / (2.0 * params.gamma * params.rate);
}

void write_curves_csv(std::ostream& out, const std::vector<BoundCurve>& curves) {
    out << "k,value,family,s_or_params,window_flag\n";
    for (const auto& c : curves) {
        if (c.ks.size() != c.values.size() || c.ks.size() != c.in_window.size())
            throw std::invalid_argument("write_curves_csv: ragged curve '" +
                                        c.family + "'");
        if (c.params.find(',') != std::string::npos)
            throw std::invalid_argument("write_curves_csv: comma in params '" +
                                        c.params + "'");
        for (std::size_t i = 0; i < c.ks.size(); ++i)
            out << c.ks[i] << ',' << fmt12(c.values[i]) << ',' << c.family << ','
                << c.params << ',' << (c.in_window[i] ? 1 : 0) << '\n';
    }
}

}  // namespace cssp
