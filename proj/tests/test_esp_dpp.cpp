#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "cssp/dpp.hpp"
#include "cssp/eigen.hpp"
#include "cssp/esp.hpp"
#include "cssp/gram.hpp"
#include "cssp/matrix.hpp"
#include "cssp/rng.hpp"
#include "cssp/spectrum.hpp"
#include "oracles.hpp"

using cssp::DenseMatrix;
using cssp::DppConfig;
using cssp::Spectrum;

namespace {

DenseMatrix random_psd(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    DenseMatrix b(n + 1, n);
    for (std::size_t i = 0; i < n + 1; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = nd(gen);
    return b.gram();
}

// Exact DPP(K/alpha) distribution over all subsets by enumeration.
std::map<std::vector<std::size_t>, double> enumerate_dpp(const DenseMatrix& k,
                                                         double alpha) {
    std::map<std::vector<std::size_t>, double> probs;
    double z = 0.0;
    for (const auto& s : oracle::all_subsets(k.rows())) {
        const double det = s.empty() ? 1.0 : oracle::lu_det(k.submatrix(s));
        const double w = det * std::pow(alpha, -static_cast<double>(s.size()));
        probs[s] = w;
        z += w;
    }
    for (auto& [s, w] : probs) w /= z;
    return probs;
}

// Exact k-DPP(K) distribution over size-k subsets by enumeration.
std::map<std::vector<std::size_t>, double> enumerate_kdpp(const DenseMatrix& k,
                                                          std::size_t kk) {
    std::map<std::vector<std::size_t>, double> probs;
    double z = 0.0;
    for (const auto& s : oracle::combinations(k.rows(), kk)) {
        const double det = oracle::lu_det(k.submatrix(s));
        probs[s] = det;
        z += det;
    }
    for (auto& [s, w] : probs) w /= z;
    return probs;
}

}  // namespace

TEST_CASE("esp hand expansions") {
    auto t1 = cssp::esp(Spectrum({1.0, 1.0, 1.0}));
    REQUIRE(t1.size() == 4);
    CHECK(t1.value(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t1.value(1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(t1.value(2) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(t1.value(3) == doctest::Approx(1.0).epsilon(1e-14));

    auto t2 = cssp::esp(Spectrum({2.0, 1.0}));
    CHECK(t2.value(1) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(t2.value(2) == doctest::Approx(2.0).epsilon(1e-14));

    auto t3 = cssp::esp(Spectrum({4.0, 1.0}));
    CHECK(t3.value(1) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(t3.value(2) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("esp zeroes entries beyond the rank") {
    Spectrum s({5.0, 5.0, 2.5e-10, 0.0});  // rank 2: third value below tolerance
    REQUIRE(s.rank() == 2);
    auto t = cssp::esp(s);
    CHECK(t.value(2) == doctest::Approx(25.0).epsilon(1e-13));
    CHECK(t.e(3) == 0.0);
    CHECK(t.e(4) == 0.0);
    CHECK(std::isinf(t.log_value(3)));
}

TEST_CASE("esp survives spectra that overflow raw doubles") {
    // Flat spectrum of 500 copies of 100: e_k = C(500,k) * 100^k, far beyond
    // double range near k = 250 (about 1e650). Check in log space against
    // lgamma.
    std::vector<double> v(500, 100.0);
    auto t = cssp::esp(Spectrum(std::move(v)));
    const auto log_binom = [](double n, double k) {
        return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
    };
    for (std::size_t k : {1u, 10u, 250u, 499u, 500u}) {
        const double expect = log_binom(500, static_cast<double>(k)) +
                              static_cast<double>(k) * std::log(100.0);
        CHECK(t.log_value(k) == doctest::Approx(expect).epsilon(1e-11));
    }
    // Ratios stay finite even where values overflow.
    CHECK(std::isinf(t.value(250)));
    CHECK(t.ratio(250, 249) > 0.0);
    CHECK(std::isfinite(t.ratio(250, 249)));
}

TEST_CASE("esp scaling covariance") {
    Spectrum base({3.0, 2.0, 0.5, 0.1});
    auto tb = cssp::esp(base);
    auto tc = cssp::esp(base.scaled(7.0));
    for (std::size_t k = 0; k <= 4; ++k)
        CHECK(tc.log_value(k) ==
              doctest::Approx(tb.log_value(k) + k * std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("expected kdpp error closed form") {
    CHECK(cssp::kdpp_expected_error(Spectrum({4.0, 1.0}), 1) ==
          doctest::Approx(1.6).epsilon(1e-13));
    CHECK(cssp::kdpp_expected_error(Spectrum({4.0, 1.0}), 0) ==
          doctest::Approx(5.0).epsilon(1e-13));
    CHECK(cssp::kdpp_expected_error(Spectrum({2.0, 1.0}), 1) ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-13));
    CHECK_THROWS_AS(cssp::kdpp_expected_error(Spectrum({4.0, 1.0}), 2),
                    std::domain_error);
    // Scales linearly with the spectrum.
    Spectrum s({5.0, 3.0, 1.0});
    CHECK(cssp::kdpp_expected_error(s.scaled(4.0), 2) ==
          doctest::Approx(4.0 * cssp::kdpp_expected_error(s, 2)).epsilon(1e-12));
}

TEST_CASE("expected kdpp error equals subset enumeration") {
    for (unsigned seed : {3u, 17u}) {
        DenseMatrix k = random_psd(6, seed);
        auto inst = cssp::GramInstance::from_kernel(k);
        const Spectrum& sp = inst.spectrum();
        for (std::size_t kk = 1; kk + 1 <= sp.rank(); ++kk) {
            double z = 0.0, acc = 0.0;
            for (const auto& s : oracle::combinations(6, kk)) {
                const double det = oracle::lu_det(k.submatrix(s));
                z += det;
                acc += det * oracle::subset_error(k, s);
            }
            const double lib = cssp::kdpp_expected_error(sp, kk);
            CHECK(lib == doctest::Approx(acc / z).epsilon(1e-10));
        }
    }
}

TEST_CASE("newton ratios never exceed one") {
    auto r1 = cssp::newton_ratio_check(Spectrum({1.0, 1.0, 1.0}));
    REQUIRE(r1.size() == 2);
    CHECK(r1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(r1[1] == doctest::Approx(0.5).epsilon(1e-13));

    auto r2 = cssp::newton_ratio_check(Spectrum({4.0, 1.0}));
    REQUIRE(r2.size() == 1);
    CHECK(r2[0] == doctest::Approx(0.32).epsilon(1e-13));

    std::mt19937 gen(9);
    std::uniform_real_distribution<double> ud(0.1, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> v(8);
        for (double& x : v) x = ud(gen);
        std::sort(v.rbegin(), v.rend());
        for (double r : cssp::newton_ratio_check(Spectrum(std::move(v))))
            CHECK(r <= 1.0 + 1e-9);
    }
    CHECK_THROWS_AS(cssp::newton_ratio_check(Spectrum({2.0})), std::domain_error);
}

TEST_CASE("convexity probe reports but never throws on long spectra") {
    auto rep = cssp::convexity_probe(Spectrum({1.0, 1.0, 1.0, 1.0}));
    CHECK(std::isfinite(rep.min_second_difference));
    auto rep2 = cssp::convexity_probe(Spectrum({8.0, 4.0, 2.0, 1.0}));
    CHECK(std::isfinite(rep2.min_second_difference));
    CHECK_THROWS_AS(cssp::convexity_probe(Spectrum({2.0, 1.0})), std::domain_error);
}

TEST_CASE("dpp expectation closed forms") {
    CHECK(cssp::dpp_expected_size(Spectrum({1.0, 1.0}), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cssp::dpp_expected_size(Spectrum({3.0, 1.0}), 1.0) ==
          doctest::Approx(1.25).epsilon(1e-14));
    CHECK(cssp::dpp_expected_error(Spectrum({4.0, 1.0}), 1.0) ==
          doctest::Approx(1.3).epsilon(1e-14));
    CHECK(cssp::dpp_expected_error(Spectrum({1.0}), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // Huge alpha drives the expected size to zero.
    CHECK(cssp::dpp_expected_size(Spectrum({2.0, 1.0}), 1e12 * 2.0) <= 2e-12);
    CHECK_THROWS_AS(cssp::dpp_expected_size(Spectrum({1.0}), 0.0), std::domain_error);
    CHECK_THROWS_AS(cssp::dpp_expected_error(Spectrum({1.0}), -1.0), std::domain_error);
}

TEST_CASE("dpp size pmf fixed cases and enumeration") {
    auto pmf = cssp::dpp_size_pmf(Spectrum({4.0, 1.0}), 1.0);
    REQUIRE(pmf.size() == 3);
    CHECK(pmf[0] == doctest::Approx(0.1).epsilon(1e-13));
    CHECK(pmf[1] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(pmf[2] == doctest::Approx(0.4).epsilon(1e-13));

    auto single = cssp::dpp_size_pmf(Spectrum({1.0}), 1.0);
    CHECK(single[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(single[1] == doctest::Approx(0.5).epsilon(1e-14));

    auto flat = cssp::dpp_size_pmf(Spectrum({1.0, 1.0, 1.0}), 1.0);
    CHECK(flat[0] == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(flat[1] == doctest::Approx(0.375).epsilon(1e-13));
    CHECK(flat[2] == doctest::Approx(0.375).epsilon(1e-13));
    CHECK(flat[3] == doctest::Approx(0.125).epsilon(1e-13));

    DenseMatrix k = random_psd(6, 101);
    auto inst = cssp::GramInstance::from_kernel(k);
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto exact = enumerate_dpp(k, alpha);
        std::vector<double> marginal(7, 0.0);
        for (const auto& [s, p] : exact) marginal[s.size()] += p;
        auto lib = cssp::dpp_size_pmf(inst.spectrum(), alpha);
        double total = 0.0;
        for (std::size_t i = 0; i <= 6; ++i) {
            CHECK(lib[i] == doctest::Approx(marginal[i]).epsilon(1e-9).scale(1.0));
            total += lib[i];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("dpp expected error equals subset enumeration") {
    for (unsigned seed : {8u, 15u}) {
        DenseMatrix k = random_psd(6, seed);
        auto inst = cssp::GramInstance::from_kernel(k);
        for (double alpha : {0.5, 1.0, 3.0}) {
            auto exact = enumerate_dpp(k, alpha);
            double err = 0.0, size = 0.0;
            for (const auto& [s, p] : exact) {
                err += p * oracle::subset_error(k, s);
                size += p * static_cast<double>(s.size());
            }
            CHECK(cssp::dpp_expected_error(inst.spectrum(), alpha) ==
                  doctest::Approx(err).epsilon(1e-10));
            CHECK(cssp::dpp_expected_size(inst.spectrum(), alpha) ==
                  doctest::Approx(size).epsilon(1e-10));
        }
    }
}

TEST_CASE("rng streams are deterministic and distinct") {
    cssp::SplitMix64 a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(cssp::SplitMix64::derive_stream(42, 0) != cssp::SplitMix64::derive_stream(42, 1));
    CHECK(cssp::SplitMix64::derive_stream(42, 0) != cssp::SplitMix64::derive_stream(43, 0));
    cssp::SplitMix64 c(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(c.next_index(5) < 5);
    }
}

TEST_CASE("dpp sampler on identity kernel matches independent coin flips") {
    auto es = cssp::eigensym(DenseMatrix::identity(3));
    auto cfg = DppConfig::random_size(std::move(es), 1.0);
    const int trials = 100000;
    std::vector<int> hits(3, 0);
    for (int t = 0; t < trials; ++t) {
        auto s = cssp::sample_dpp(cfg, cssp::SplitMix64::derive_stream(999, t));
        for (std::size_t j : s.indices) ++hits[j];
    }
    const double se = std::sqrt(0.25 / trials);
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(hits[j] / static_cast<double>(trials) - 0.5) <= 3 * se);
}

TEST_CASE("dpp sampler on diagonal kernel keeps marginals independent") {
    const std::vector<double> lam{4.0, 1.0, 0.25};
    auto es = cssp::eigensym(DenseMatrix::diagonal(lam));
    auto cfg = DppConfig::random_size(std::move(es), 1.0);
    const int trials = 100000;
    std::vector<int> hits(3, 0);
    for (int t = 0; t < trials; ++t) {
        auto s = cssp::sample_dpp(cfg, cssp::SplitMix64::derive_stream(5150, t));
        for (std::size_t j : s.indices) ++hits[j];
    }
    // Eigenvalues are sorted descending, so item marginals follow sorted lam.
    std::vector<double> want{4.0 / 5.0, 1.0 / 2.0, 0.25 / 1.25};
    for (int j = 0; j < 3; ++j) {
        const double p = want[j];
        const double se = std::sqrt(p * (1 - p) / trials);
        CHECK(std::abs(hits[j] / static_cast<double>(trials) - p) <= 3 * se);
    }
}

TEST_CASE("kdpp sampler fixed cases") {
    // Orthogonal columns with squared norms 4 and 1, k = 1.
    auto es = cssp::eigensym(DenseMatrix(2, 2, {4.0, 0.0, 0.0, 1.0}));
    auto cfg = DppConfig::with_size(std::move(es), 1);
    const int trials = 100000;
    int first = 0;
    for (int t = 0; t < trials; ++t) {
        auto s = cssp::sample_kdpp(cfg, cssp::SplitMix64::derive_stream(77, t));
        REQUIRE(s.indices.size() == 1);
        if (s.indices[0] == 0) ++first;
    }
    const double se = std::sqrt(0.8 * 0.2 / trials);
    CHECK(std::abs(first / static_cast<double>(trials) - 0.8) <= 3 * se);

    // Identity kernel, k = 2: uniform over the six pairs.
    auto es4 = cssp::eigensym(DenseMatrix::identity(4));
    auto cfg4 = DppConfig::with_size(std::move(es4), 2);
    std::map<std::vector<std::size_t>, double> emp;
    for (int t = 0; t < trials; ++t) {
        auto s = cssp::sample_kdpp(cfg4, cssp::SplitMix64::derive_stream(1234, t));
        REQUIRE(s.indices.size() == 2);
        emp[s.indices] += 1.0 / trials;
    }
    REQUIRE(emp.size() == 6);
    for (const auto& [s, f] : emp) CHECK(std::abs(f - 1.0 / 6.0) <= 0.01);
}

TEST_CASE("dpp sampler total variation against enumeration") {
    DenseMatrix k = random_psd(5, 2024);
    auto inst = cssp::GramInstance::from_kernel(k);
    auto cfg = DppConfig::random_size(inst.eigensystem(), 1.0);
    auto exact = enumerate_dpp(k, 1.0);

    const int trials = 200000;
    std::map<std::vector<std::size_t>, double> emp;
    for (int t = 0; t < trials; ++t) {
        auto idx = cssp::sample_dpp(cfg, cssp::SplitMix64::derive_stream(31337, t));
        emp[idx.indices] += 1.0 / trials;
    }
    CHECK(oracle::tv_distance(exact, emp) <= 0.02);
}

TEST_CASE("kdpp sampler total variation against enumeration") {
    DenseMatrix k = random_psd(6, 555);
    auto inst = cssp::GramInstance::from_kernel(k);
    auto cfg = DppConfig::with_size(inst.eigensystem(), 3);
    auto exact = enumerate_kdpp(k, 3);

    const int trials = 200000;
    std::map<std::vector<std::size_t>, double> emp;
    for (int t = 0; t < trials; ++t) {
        auto idx = cssp::sample_kdpp(cfg, cssp::SplitMix64::derive_stream(90210, t));
        REQUIRE(idx.indices.size() == 3);
        emp[idx.indices] += 1.0 / trials;
    }
    CHECK(oracle::tv_distance(exact, emp) <= 0.02);
}

TEST_CASE("kdpp subset distribution is scale invariant") {
    DenseMatrix k = random_psd(4, 71);
    auto inst = cssp::GramInstance::from_kernel(k);
    auto exact = enumerate_kdpp(k, 2);

    DenseMatrix scaled = k;
    scaled *= 37.0;
    auto cfg = DppConfig::with_size(cssp::eigensym(scaled), 2);
    const int trials = 100000;
    std::map<std::vector<std::size_t>, double> emp;
    for (int t = 0; t < trials; ++t)
        emp[cssp::sample_kdpp(cfg, cssp::SplitMix64::derive_stream(4096, t)).indices] +=
            1.0 / trials;
    CHECK(oracle::tv_distance(exact, emp) <= 0.02);
}

TEST_CASE("sampler configuration errors") {
    auto es = cssp::eigensym(DenseMatrix::identity(3));
    CHECK_THROWS_AS(DppConfig::random_size(es, 0.0), std::domain_error);
    CHECK_THROWS_AS(DppConfig::with_size(es, 4), std::domain_error);

    auto fixed = DppConfig::with_size(es, 2);
    CHECK_THROWS_AS(cssp::sample_dpp(fixed, 1), std::invalid_argument);
    auto open = DppConfig::random_size(es, 1.0);
    CHECK_THROWS_AS(cssp::sample_kdpp(open, 1), std::invalid_argument);

    // Same seed, same draw.
    auto a = cssp::sample_kdpp(fixed, 352);
    auto b = cssp::sample_kdpp(fixed, 352);
    CHECK(a.indices == b.indices);
    CHECK(a.sampler_id == "kdpp");
    CHECK(a.seed == 352);
}
