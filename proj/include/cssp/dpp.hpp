#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cssp/eigen.hpp"
#include "cssp/rng.hpp"
#include "cssp/spectrum.hpp"

namespace cssp {

// Configuration of the determinantal sampler on DPP(K/alpha), or its
// fixed-size restriction (a k-DPP) when fixed_size holds k.
struct DppConfig {
    Eigensystem eigen;  // spectrum + orthonormal eigenbasis of the kernel
    double alpha = 1.0;
    std::optional<std::size_t> fixed_size;

    static DppConfig random_size(Eigensystem es, double alpha);
    static DppConfig with_size(Eigensystem es, std::size_t k);
};

struct SubsetSample {
    std::vector<std::size_t> indices;  // distinct, ascending
    std::string sampler_id;            // "dpp" or "kdpp"
    std::uint64_t seed = 0;            // stream seed that produced the draw
    std::optional<double> projection_error;
    std::optional<double> nystrom_error;
};

// Expected subset size of DPP(K/alpha): sum_i lambda_i / (lambda_i + alpha).
double dpp_expected_size(const Spectrum& spectrum, double alpha);

// Exact expected squared error of DPP(K/alpha): alpha * expected size.
double dpp_expected_error(const Spectrum& spectrum, double alpha);

// Poisson-binomial size distribution over {0..n} with success probabilities
// lambda_i / (lambda_i + alpha).
std::vector<double> dpp_size_pmf(const Spectrum& spectrum, double alpha);

// Exact two-phase samplers. Phase 1 picks an eigenvector subset (Bernoulli
// per eigenvalue for the DPP; the e_k backward recurrence for the k-DPP);
// phase 2 runs projection-DPP sampling on the chosen eigenvectors. The seed
// names one generator stream; derive per-trial seeds with
// SplitMix64::derive_stream for batches.
SubsetSample sample_dpp(const DppConfig& config, std::uint64_t seed);
SubsetSample sample_kdpp(const DppConfig& config, std::uint64_t seed);

// Same, driving an existing generator (consumes a variable amount of it).
std::vector<std::size_t> sample_dpp_indices(const DppConfig& config, SplitMix64& rng);
std::vector<std::size_t> sample_kdpp_indices(const DppConfig& config, SplitMix64& rng);

}  // namespace cssp
