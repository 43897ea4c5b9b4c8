#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cssp/gram.hpp"
#include "cssp/matrix.hpp"
#include "cssp/rng.hpp"

namespace cssp {

// Multi-block simplex instance: t blocks of sizes l_1..l_t, each block i
// holding the l_i corners of a centered unit regular simplex scaled by
// alpha_i and lifted by beta_i along a fresh orthogonal direction v_i.
// Block subspaces are mutually orthogonal; with the scalar cascade below,
// every size-k_i subset (k_i = l_1+...+l_i - 1) has error at least
// (1-delta) * l_i times the best rank-k_i error.
struct LowerBoundSpec {
    std::size_t t = 1;                // number of blocks; must equal l.size()
    std::vector<std::size_t> l;       // block sizes, each >= 2
    double delta = 0.1;               // target slack in (0,1)
    double rho = 1e-2;                // geometric schedule ratio in (0,1)
};

struct LowerBoundInstance {
    DenseMatrix a;                    // m x n, n = sum l_i; seeded rotation over
                                      // the leading n + t coordinates, rest zero
    std::vector<std::size_t> k;       // declared subset sizes k_i (ascending)
    std::vector<double> target_ratio; // (1-delta) * l_i
    std::vector<double> alpha;        // final scalar schedule
    std::vector<double> beta;
    std::vector<bool> certified;      // brute force ran and passed at k_i
};

// Builds the instance: schedule alpha_1 = 1, beta_i = rho alpha_i,
// alpha_{i+1} = rho beta_i, capped so that the cascade condition
// alpha_{c+1}^2 <= (delta/4) l_c beta_c^2 / sum_{i>c} l_i always holds.
// Blocks with a feasible subset count are then certified by brute force;
// each failure halves that block's beta (rebuilding the tail of the
// schedule), up to 20 times before giving up.
LowerBoundInstance gen_lower_bound(const LowerBoundSpec& spec, std::size_t m,
                                   std::uint64_t seed);

// Prescribed-spectrum generators.
struct SpectrumSpec {
    enum class Kind { flat_with_drops, poly, exponential, explicit_values };
    Kind kind = Kind::explicit_values;
    std::size_t n = 0;

    // flat_with_drops: levels[j] holds from 1-based index breaks[j-1] on;
    // breaks[j] is the first index of levels[j+1].
    std::vector<double> levels;
    std::vector<std::size_t> breaks;

    // poly: lambda_i = r_i i^-rate; exponential: lambda_i = r_i (1-rate)^i,
    // with r_i uniform in [c1, c2] and a running min keeping the sequence
    // non-increasing.
    double rate = 2.0;
    double c1 = 1.0;
    double c2 = 1.0;

    std::vector<double> values;  // explicit_values
};

std::vector<double> make_spectrum(const SpectrumSpec& spec, SplitMix64& rng);

// A = U diag(sqrt(lambda)) V^T with U (m x n) and V (n x n) orthonormalized
// Gaussian draws; eigensym(A^T A) reproduces lambda to ~1e-8 relative.
// Bit-identical for equal (spec, m, n, seed).
DenseMatrix gen_shaped_matrix(const SpectrumSpec& spec, std::size_t m,
                              std::size_t n, std::uint64_t seed);

// Kernels over data points stored as matrix rows.
struct KernelSpec {
    enum class Kind { linear, rbf };
    Kind kind = Kind::linear;
    double sigma = 1.0;  // rbf bandwidth, entries exp(-dist^2 / sigma^2)
};

GramInstance build_kernel(const DenseMatrix& points, const KernelSpec& spec);

// Sparse libsvm text: "label idx:val idx:val ..." per line, 1-based strictly
// increasing indices; feature dimension = max index seen anywhere.
struct LibsvmData {
    DenseMatrix points;          // one row per line
    std::vector<double> labels;
};

LibsvmData read_libsvm(const std::string& path);
LibsvmData read_libsvm(std::istream& in);

// Human-readable "key value" manifest block shared by the gen/verify
// commands. Keys keep insertion order; values are raw strings.
using KvBlock = std::vector<std::pair<std::string, std::string>>;

void write_kv_block(std::ostream& out, const KvBlock& kv);
KvBlock read_kv_block(std::istream& in);
std::string kv_get(const KvBlock& kv, const std::string& key);          // throws if absent
std::string kv_get_or(const KvBlock& kv, const std::string& key, std::string fallback);

// Manifest payload for a generated lower-bound instance.
KvBlock lower_bound_manifest(const LowerBoundSpec& spec, std::size_t m,
                             std::uint64_t seed, const LowerBoundInstance& inst);
struct LowerBoundManifest {
    LowerBoundSpec spec;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> k;
    std::vector<double> target_ratio;
};
LowerBoundManifest parse_lower_bound_manifest(const KvBlock& kv);

}  // namespace cssp
