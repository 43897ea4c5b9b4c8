#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cssp/gram.hpp"

namespace cssp {

// One selected column subset with its measured squared projection error.
// `indices` keeps the method's natural order: pick order for greedy (so it
// aligns with per_step_errors), ascending for the samplers and brute force.
struct SelectionResult {
    std::vector<std::size_t> indices;
    double error = 0.0;                   // projection_error at `indices`
    std::vector<double> per_step_errors;  // greedy only: error after each pick
    std::string method_id;
    std::optional<std::uint64_t> seed;    // stochastic methods only
};

// Exact greedy: each step adds the column minimizing the updated error,
// ties broken by lowest index. Runs on a residual kernel kept current with
// rank-one Schur updates, so a step costs O(n^2) instead of a fresh
// pseudo-inverse per candidate. per_step_errors is non-increasing, strictly
// positive until the picked columns span the kernel, then 0.
SelectionResult greedy_select(const GramInstance& instance, std::size_t k);

inline constexpr double kEnumBudgetDefault = 1e6;

// Thrown instead of silently approximating when C(n,k) exceeds the budget.
class EnumerationBudgetError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact minimizer of the projection error over all size-k subsets, first
// lexicographic subset on ties. k = 0 returns the empty set with error
// tr(K).
SelectionResult brute_force_optimum(const GramInstance& instance, std::size_t k,
                                    double budget = kEnumBudgetDefault);

// One k-DPP draw over the instance's kernel with its measured error.
SelectionResult kdpp_select(const GramInstance& instance, std::size_t k,
                            std::uint64_t seed);

enum class Method { kdpp, greedy, brute_force };

Method method_from_id(const std::string& id);  // throws on unknown id
std::string method_id(Method method);

// Mean approximation factor Er(S)/OPT_k with its standard error of the mean.
struct FactorEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample stddev / sqrt(trials); 0 when trials=1
    std::size_t trials = 0;
    std::string method_id;
};

// Deterministic methods evaluate once (SE 0, trials reported as 1). k-DPP
// runs `trials` independent draws seeded with derive_stream(master_seed,
// trial); trials execute in parallel and the reported numbers do not depend
// on the thread schedule. Throws std::domain_error when k >= rank, where
// OPT_k vanishes and the factor is undefined.
FactorEstimate estimate_factor(const GramInstance& instance, std::size_t k,
                               Method method, std::size_t trials,
                               std::uint64_t master_seed);

}  // namespace cssp
