#include "cssp/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "cssp/dpp.hpp"
#include "cssp/rng.hpp"
#include "cssp/spectrum.hpp"

namespace cssp {
namespace {

double binomial_count(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (c > 1e18) return c;
    }
    return c;
}

std::string count_str(double c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", c);
    return buf;
}

}  // namespace

SelectionResult greedy_select(const GramInstance& instance, std::size_t k) {
    const std::size_t n = instance.n();
    if (k < 1 || k > n)
        throw std::out_of_range("greedy_select: k must lie in [1, n]");

    DenseMatrix r = instance.kernel();  // residual kernel after the picks so far
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, r(i, i));
    const double floor = kRankRelTol * max_diag;
    const double trace_floor = kRankRelTol * r.trace();

    SelectionResult res;
    res.method_id = "greedy";
    res.indices.reserve(k);
    res.per_step_errors.reserve(k);
    std::vector<bool> picked(n, false);
    double residual_trace = r.trace();

    for (std::size_t step = 0; step < k; ++step) {
        double best_gain = -1.0;
        std::size_t best = n;
        for (std::size_t c = 0; c < n; ++c) {
            if (picked[c]) continue;
            double gain = 0.0;
            if (r(c, c) > floor) {
                double col2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) col2 += r(i, c) * r(i, c);
                gain = col2 / r(c, c);
            }
            if (gain > best_gain) {  // strict: lowest index wins exact ties
                best_gain = gain;
                best = c;
            }
        }
        picked[best] = true;
        res.indices.push_back(best);

        if (best_gain > 0.0) {
            const double d = r(best, best);
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = r(i, best);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) r(i, j) -= col[i] * col[j] / d;
            residual_trace = std::max(0.0, residual_trace - best_gain);
        }
        if (residual_trace <= trace_floor) residual_trace = 0.0;
        res.per_step_errors.push_back(residual_trace);
    }

    res.error = instance.projection_error(res.indices);
    return res;
}

SelectionResult brute_force_optimum(const GramInstance& instance, std::size_t k,
                                    double budget) {
    const std::size_t n = instance.n();
    if (k > n) throw std::out_of_range("brute_force_optimum: k exceeds n");
    const double count = binomial_count(n, k);
    if (count > budget)
        throw EnumerationBudgetError(
            "brute_force_optimum: C(" + std::to_string(n) + "," +
            std::to_string(k) + ") = " + count_str(count) +
            " subsets exceed the enumeration budget " + count_str(budget));

    SelectionResult res;
    res.method_id = "brute_force";
    if (k == 0) {
        res.error = instance.kernel().trace();
        return res;
    }

    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        const double err = instance.projection_error(s);
        if (err < best) {  // strict: lexicographically first minimizer wins
            best = err;
            res.indices = s;
        }
        std::size_t i = k;
        while (i > 0 && s[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    res.error = best;
    return res;
}

SelectionResult kdpp_select(const GramInstance& instance, std::size_t k,
                            std::uint64_t seed) {
    const DppConfig config = DppConfig::with_size(instance.eigensystem(), k);
    const SubsetSample sample = sample_kdpp(config, seed);

    SelectionResult res;
    res.method_id = "kdpp";
    res.seed = seed;
    res.indices = sample.indices;
    res.error = instance.projection_error(res.indices);
    return res;
}

Method method_from_id(const std::string& id) {
    if (id == "kdpp") return Method::kdpp;
    if (id == "greedy") return Method::greedy;
    if (id == "brute_force") return Method::brute_force;
    throw std::invalid_argument("unknown method '" + id +
                                "' (expected kdpp, greedy, or brute_force)");
}

std::string method_id(Method method) {
    switch (method) {
        case Method::kdpp: return "kdpp";
        case Method::greedy: return "greedy";
        case Method::brute_force: return "brute_force";
    }
    throw std::logic_error("method_id: unreachable");
}

FactorEstimate estimate_factor(const GramInstance& instance, std::size_t k,
                               Method method, std::size_t trials,
                               std::uint64_t master_seed) {
    const Spectrum& spectrum = instance.spectrum();
    if (k >= spectrum.rank())
        throw std::domain_error(
            "estimate_factor: OPT_k vanishes at k >= rank, factor undefined");
    const double opt = opt_k(spectrum, k);

    FactorEstimate est;
    est.method_id = method_id(method);

    if (method != Method::kdpp) {
        const SelectionResult res = method == Method::greedy
                                        ? greedy_select(instance, k)
                                        : brute_force_optimum(instance, k);
        est.mean = res.error / opt;
        est.std_error = 0.0;
        est.trials = 1;
        return est;
    }

    if (trials < 1)
        throw std::invalid_argument("estimate_factor: trials must be >= 1");
    const DppConfig config = DppConfig::with_size(instance.eigensystem(), k);

    std::vector<double> factors(trials, 0.0);
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(
                                     std::thread::hardware_concurrency(), trials));
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto run = [&](std::size_t first) {
        try {
            for (std::size_t t = first; t < trials; t += workers) {
                const SubsetSample s =
                    sample_kdpp(config, SplitMix64::derive_stream(master_seed, t));
                factors[t] = instance.projection_error(s.indices) / opt;
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    double sum = 0.0;
    for (double f : factors) sum += f;
    const double mean = sum / static_cast<double>(trials);
    double var = 0.0;
    for (double f : factors) var += (f - mean) * (f - mean);

    est.mean = mean;
    est.std_error = trials > 1 ? std::sqrt(var / static_cast<double>(trials - 1)) /
                                     std::sqrt(static_cast<double>(trials))
                               : 0.0;
    est.trials = trials;
    return est;
}

}  // namespace cssp
