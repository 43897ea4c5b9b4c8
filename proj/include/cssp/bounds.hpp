#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cssp/spectrum.hpp"

namespace cssp {

// Stable ranks of every order: sr[s] = (sum_{i>s} lambda_i) / lambda_{s+1}
// and t[s] = s + sr[s], for s = 0..rank-1 (indices are 0-based, so
// lambda_{s+1} in 1-based writing is spectrum[s] here).
struct StableRankProfile {
    std::vector<double> sr;
    std::vector<double> t;

    std::size_t orders() const { return sr.size(); }
};

StableRankProfile stable_rank_profile(const Spectrum& spectrum);

// gamma_s(k) = sqrt(1 + 2(k-s)/(t_s - k)), defined on s < k < t_s.
double gamma_factor(const Spectrum& spectrum, std::size_t s, std::size_t k);

// phi_s(k) = (1 + s/(k-s)) * gamma_s(k), defined on the same window.
double phi(const Spectrum& spectrum, std::size_t s, std::size_t k);

// Diagnostic condition-number bound (1 + s/(k-s)) * lambda_{s+1}/lambda_n;
// requires a full-rank spectrum and s < k < n. Not part of any envelope.
double psi(const Spectrum& spectrum, std::size_t s, std::size_t k);

// The alpha schedule alpha = gamma_s(k) * OPT_k / ((1-eps)(k-s)). With this
// alpha the DPP expected error is at most phi_s(k)/(1-eps) * OPT_k and the
// expected size is at most k - eps(k-s)/gamma_s(k); both sides are closed
// form, so the guarantee is checked exactly in the tests.
double lemma1_alpha(const Spectrum& spectrum, std::size_t s, std::size_t k,
                    double epsilon);

// Size-concentration window: s + (7/eps^4) ln^2(1/eps) <= k <= t_s - 1,
// with eps in (0, 1/2].
bool lemma2_applicable(std::size_t s, std::size_t k, double t_s, double epsilon);

// (1+2eps)^2 * min over admissible s of phi_s(k). Admissible: s < k < t_s,
// and inside the lemma2 window when enforce_threshold is set. When nothing
// is admissible (including the eps = 0, threshold-on combination, whose
// window is empty), falls back to the worst-case value k+1 and flags it.
struct EnvelopeResult {
    double value = 0.0;
    std::optional<std::size_t> arg_s;  // smallest minimizer; empty on fallback
    bool fallback = false;
};

EnvelopeResult master_envelope(const Spectrum& spectrum, std::size_t k,
                               double epsilon, bool enforce_threshold);

// Approximation-factor ceilings for spectra with known decay rates, and the
// matching stable-rank floors. The absolute constant of the underlying
// theorem is a caller choice; 61 is the explicit constant carried through
// the proof.
inline constexpr double kDecayDefaultC = 61.0;

enum class DecayKind { poly, exponential };

struct DecayParams {
    double rate;   // p for poly (> 1), delta for exponential (in (0,1))
    double gamma;  // >= 1
};

double decay_bound(DecayKind kind, const DecayParams& params, std::size_t k,
                   double c = kDecayDefaultC);

// Floors: poly -> (1/(2 gamma)) (s+1)/(p-1) - 1/gamma; exponential ->
// 1/(2 gamma delta), valid while k <= n - ln2/delta (the caller owns the k
// window).
double decay_stable_rank_floor(DecayKind kind, const DecayParams& params,
                               std::size_t s);

// One bound family evaluated over a k-grid. `in_window` marks the entries
// where the family's own validity window held (an envelope fallback or an
// out-of-window placeholder clears it).
struct BoundCurve {
    std::string family;  // phi | psi | envelope | decay_poly | decay_exp | worst_case
    std::string params;  // e.g. "s=2" or "p=2;gamma=1.5" (no commas: lands in one CSV field)
    std::vector<std::size_t> ks;
    std::vector<double> values;
    std::vector<bool> in_window;
};

// CSV with header k,value,family,s_or_params,window_flag; 12 significant
// digits.
void write_curves_csv(std::ostream& out, const std::vector<BoundCurve>& curves);

}  // namespace cssp
