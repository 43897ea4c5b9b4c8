#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cssp/eigen.hpp"
#include "cssp/gram.hpp"
#include "cssp/matrix.hpp"
#include "cssp/spectrum.hpp"
#include "oracles.hpp"

using cssp::DenseMatrix;
using cssp::Spectrum;

namespace {

DenseMatrix random_psd(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    DenseMatrix b(n + 2, n);
    for (std::size_t i = 0; i < n + 2; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = nd(gen);
    return b.gram();
}

DenseMatrix rotated_diag(const std::vector<double>& d, double theta) {
    // 2D rotation embedded in the leading block, identity elsewhere.
    const std::size_t n = d.size();
    DenseMatrix r = DenseMatrix::identity(n);
    r(0, 0) = std::cos(theta);
    r(0, 1) = -std::sin(theta);
    r(1, 0) = std::sin(theta);
    r(1, 1) = std::cos(theta);
    return r.multiply(DenseMatrix::diagonal(d)).multiply(r.transposed());
}

}  // namespace

TEST_CASE("matrix construction and validation") {
    DenseMatrix m(2, 3, 1.5);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 1.5);

    CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, inf}), std::invalid_argument);
    CHECK_THROWS_AS(DenseMatrix(1, 1, {std::nan("")}), std::invalid_argument);
}

TEST_CASE("matrix product against hand values") {
    DenseMatrix a(2, 3, {1, 2, 3, 4, 5, 6});
    DenseMatrix b(3, 2, {7, 8, 9, 10, 11, 12});
    DenseMatrix c = a.multiply(b);
    CHECK(c.rows() == 2);
    CHECK(c.cols() == 2);
    CHECK(c(0, 0) == doctest::Approx(58).epsilon(1e-14));
    CHECK(c(0, 1) == doctest::Approx(64).epsilon(1e-14));
    CHECK(c(1, 0) == doctest::Approx(139).epsilon(1e-14));
    CHECK(c(1, 1) == doctest::Approx(154).epsilon(1e-14));
    CHECK_THROWS_AS(b.multiply(DenseMatrix(3, 1, 0.0)), std::invalid_argument);
}

TEST_CASE("gram equals transpose times self") {
    std::mt19937 gen(7);
    std::normal_distribution<double> nd;
    DenseMatrix a(4, 3);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) a(i, j) = nd(gen);
    DenseMatrix g = a.gram();
    DenseMatrix ref = a.transposed().multiply(a);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(g(i, j) == doctest::Approx(ref(i, j)).epsilon(1e-13));
    CHECK(g.is_symmetric());
}

TEST_CASE("submatrix and column selection") {
    DenseMatrix k(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    DenseMatrix s = k.submatrix({0, 2});
    CHECK(s.rows() == 2);
    CHECK(s(0, 0) == 1);
    CHECK(s(0, 1) == 3);
    CHECK(s(1, 0) == 7);
    CHECK(s(1, 1) == 9);
    DenseMatrix c = k.columns_of({1});
    CHECK(c.rows() == 3);
    CHECK(c.cols() == 1);
    CHECK(c(2, 0) == 8);
    CHECK_THROWS_AS(k.submatrix({3}), std::out_of_range);
}

TEST_CASE("csv io round trip and error reporting") {
    DenseMatrix m(2, 2, {1.0, -0.25, 1e-17, 3.5});
    std::ostringstream out;
    m.write_csv(out);
    std::istringstream in(out.str());
    DenseMatrix back = DenseMatrix::read_csv(in);
    REQUIRE(back.rows() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(back(i, j) == m(i, j));

    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(DenseMatrix::read_csv(ragged), std::runtime_error);
    std::istringstream bad("1,zebra\n");
    CHECK_THROWS_AS(DenseMatrix::read_csv(bad), std::runtime_error);
}

TEST_CASE("whitespace io round trip and header check") {
    DenseMatrix m(2, 3, {1, 2, 3, 4, 5, 6});
    std::ostringstream out;
    m.write_whitespace(out);
    std::istringstream in(out.str());
    DenseMatrix back = DenseMatrix::read_whitespace(in);
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    CHECK(back(1, 2) == 6);

    std::istringstream missing("1 2 3\n4 5 6\n");  // header says 1x2, junk follows
    CHECK_THROWS_AS(DenseMatrix::read_whitespace(missing), std::runtime_error);
}

TEST_CASE("spectrum ordering and clamping rules") {
    Spectrum s({4.0, 2.0, 2.0, 0.5});
    CHECK(s.size() == 4);
    CHECK(s.rank() == 4);
    CHECK(s.total() == doctest::Approx(8.5).epsilon(1e-15));
    CHECK(s.tail_sum(2) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(cssp::opt_k(s, 0) == doctest::Approx(8.5).epsilon(1e-15));
    CHECK(cssp::opt_k(s, 4) == 0.0);
    CHECK_THROWS_AS(cssp::opt_k(s, 5), std::out_of_range);

    CHECK_THROWS_AS(Spectrum({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Spectrum({1.0, -1.0}), std::invalid_argument);

    Spectrum clamped({1.0, -1e-12});  // within 1e-10 relative: clamps to zero
    CHECK(clamped[1] == 0.0);
    CHECK(clamped.rank() == 1);

    Spectrum zeros({5.0, 5.0, 2.5e-10, 0.0});
    CHECK(zeros.rank() == 2);
    CHECK(zeros.tail_sum(4) == 0.0);
}

TEST_CASE("spectrum scaling") {
    Spectrum s({3.0, 1.0});
    Spectrum t = s.scaled(2.0);
    CHECK(t[0] == 6.0);
    CHECK(t[1] == 2.0);
    CHECK_THROWS_AS(s.scaled(0.0), std::invalid_argument);
}

TEST_CASE("eigensym on identity and diagonal inputs") {
    auto es = cssp::eigensym(DenseMatrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(es.spectrum[i] == doctest::Approx(1.0).epsilon(1e-14));

    auto es2 = cssp::eigensym(DenseMatrix::diagonal({1.0, 4.0}));
    CHECK(es2.spectrum[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(es2.spectrum[1] == doctest::Approx(1.0).epsilon(1e-14));
    // Column 0 must match the larger eigenvalue: basis vector e_2.
    CHECK(std::abs(es2.basis(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigensym two by two hand oracle") {
    // [[2,1],[1,2]] has eigenpairs (3, (1,1)/sqrt2) and (1, (1,-1)/sqrt2).
    DenseMatrix m(2, 2, {2, 1, 1, 2});
    auto es = cssp::eigensym(m);
    CHECK(es.spectrum[0] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(es.spectrum[1] == doctest::Approx(1.0).epsilon(1e-13));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double dot0 = inv_sqrt2 * (es.basis(0, 0) + es.basis(1, 0));
    const double dot1 = inv_sqrt2 * (es.basis(0, 1) - es.basis(1, 1));
    CHECK(std::abs(dot0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(dot1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigensym rotated diagonal recovers spectrum") {
    DenseMatrix m = rotated_diag({4.0, 1.0, 0.25}, 0.3);
    auto es = cssp::eigensym(m);
    CHECK(es.spectrum[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(es.spectrum[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es.spectrum[2] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("eigensym reconstruction and orthonormality on random psd") {
    for (unsigned seed : {1u, 2u, 3u}) {
        DenseMatrix m = random_psd(6, seed);
        auto es = cssp::eigensym(m);
        const std::size_t n = 6;

        DenseMatrix vt = es.basis.transposed();
        DenseMatrix lv(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                lv(i, j) = es.spectrum[i] * vt(i, j);
        DenseMatrix rec = es.basis.multiply(lv);
        rec -= m;
        CHECK(rec.frobenius_norm() <= 1e-9 * m.frobenius_norm());

        DenseMatrix gram = vt.multiply(es.basis);
        gram -= DenseMatrix::identity(n);
        CHECK(gram.frobenius_norm() <= 1e-10);

        CHECK(es.spectrum.total() == doctest::Approx(m.trace()).epsilon(1e-12));
        for (std::size_t i = 0; i + 1 < n; ++i)
            CHECK(es.spectrum[i] >= es.spectrum[i + 1]);

        // Determinant cross-check through an independent elimination route.
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= es.spectrum[i];
        CHECK(prod == doctest::Approx(oracle::lu_det(m)).epsilon(1e-9));
    }
}

TEST_CASE("eigensym rejects bad shapes") {
    CHECK_THROWS_AS(cssp::eigensym(DenseMatrix(2, 3, 0.0)), std::invalid_argument);
    DenseMatrix asym(2, 2, {1.0, 5.0, -5.0, 1.0});
    CHECK_THROWS_AS(cssp::eigensym(asym), std::invalid_argument);
}

TEST_CASE("trace norm handles indefinite matrices") {
    DenseMatrix m = rotated_diag({3.0, -2.0, 0.0}, 1.1);
    CHECK(cssp::trace_norm_sym(m) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(cssp::trace_norm_sym(DenseMatrix(3, 3, 0.0)) == 0.0);
}

TEST_CASE("pseudo inverse truncates the null space") {
    // Rank-1 kernel [[1,1],[1,1]] has pseudo-inverse [[.25,.25],[.25,.25]].
    DenseMatrix k(2, 2, {1, 1, 1, 1});
    DenseMatrix p = cssp::psd_pseudo_inverse(k);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(p(i, j) == doctest::Approx(0.25).epsilon(1e-12));
    // K P K == K.
    DenseMatrix kpk = k.multiply(p).multiply(k);
    kpk -= k;
    CHECK(kpk.frobenius_norm() <= 1e-12);
}

TEST_CASE("projection error fixed cases") {
    auto id2 = cssp::GramInstance::from_columns(DenseMatrix::identity(2));
    CHECK(id2.projection_error({0}) == doctest::Approx(1.0).epsilon(1e-12));

    // Duplicate column: selecting either one captures both.
    DenseMatrix dup(2, 2, {1, 1, 2, 2});
    auto gd = cssp::GramInstance::from_columns(dup);
    CHECK(gd.projection_error({0}) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // Orthogonal columns with squared norms (4, 1).
    DenseMatrix ortho(2, 2, {2, 0, 0, 1});
    auto go = cssp::GramInstance::from_columns(ortho);
    CHECK(go.projection_error({0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(go.projection_error({}) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("projection error agrees with elimination oracle") {
    std::mt19937 gen(11);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 5; ++rep) {
        DenseMatrix a(7, 5);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 5; ++j) a(i, j) = nd(gen);
        auto inst = cssp::GramInstance::from_columns(a);
        for (const auto& s :
             {std::vector<std::size_t>{1}, {0, 3}, {2, 4, 1}, {0, 1, 2, 3, 4}}) {
            const double lib = inst.projection_error(s);
            const double ref = oracle::subset_error(inst.kernel(), s);
            CHECK(lib == doctest::Approx(ref).epsilon(1e-9).scale(inst.kernel().trace()));
        }
    }
}

TEST_CASE("projection error is monotone under subset growth") {
    DenseMatrix k = random_psd(6, 21);
    auto inst = cssp::GramInstance::from_kernel(k);
    std::vector<std::size_t> s;
    double prev = inst.projection_error(s);
    for (std::size_t j : {3, 0, 5, 1, 4, 2}) {
        s.push_back(j);
        const double cur = inst.projection_error(s);
        CHECK(cur <= prev + 1e-10 * k.trace());
        prev = cur;
    }
    CHECK(prev <= 1e-9 * k.trace());  // full subset captures everything
}

TEST_CASE("columns form and kernel form share the error") {
    std::mt19937 gen(5);
    std::normal_distribution<double> nd;
    DenseMatrix a(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) a(i, j) = nd(gen);
    auto from_cols = cssp::GramInstance::from_columns(a);
    auto from_kern = cssp::GramInstance::from_kernel(a.gram());
    for (const auto& s : {std::vector<std::size_t>{2}, {0, 4}, {1, 2, 5}}) {
        const double pc = from_cols.projection_error(s);
        const double pk = from_kern.projection_error(s);
        CHECK(pc == doctest::Approx(pk).epsilon(1e-8));
    }
}

TEST_CASE("nystrom error matches projection error and fixed endpoints") {
    DenseMatrix k = random_psd(5, 33);
    auto inst = cssp::GramInstance::from_kernel(k);
    CHECK(inst.nystrom_error({}) == doctest::Approx(k.trace()).epsilon(1e-10));
    std::vector<std::size_t> all{0, 1, 2, 3, 4};
    CHECK(inst.nystrom_error(all) <= 1e-8 * k.trace());
    for (const auto& s : {std::vector<std::size_t>{1, 3}, {0}, {2, 4, 1}}) {
        const double ny = inst.nystrom_error(s);
        const double pr = inst.projection_error(s);
        CHECK(ny == doctest::Approx(pr).epsilon(1e-8));
    }
}

TEST_CASE("optimal rank-k error lower bounds every subset") {
    DenseMatrix k = random_psd(7, 44);
    auto inst = cssp::GramInstance::from_kernel(k);
    const Spectrum& sp = inst.spectrum();
    for (std::size_t kk = 1; kk <= 4; ++kk) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : oracle::combinations(7, kk))
            best = std::min(best, inst.projection_error(s));
        CHECK(cssp::opt_k(sp, kk) <= best * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("gram instance rejects bad inputs lazily and eagerly") {
    DenseMatrix asym(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK_THROWS_AS(cssp::GramInstance::from_kernel(asym), std::invalid_argument);

    auto indefinite = cssp::GramInstance::from_kernel(DenseMatrix::diagonal({1.0, -1.0}));
    CHECK_THROWS_AS(indefinite.spectrum(), std::invalid_argument);

    auto ok = cssp::GramInstance::from_kernel(DenseMatrix::identity(3));
    CHECK_THROWS_AS(ok.projection_error({3}), std::out_of_range);
    CHECK_THROWS_AS(ok.projection_error({1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(ok.columns(), std::logic_error);
}

TEST_CASE("rank deficient subsets fall back to the span") {
    // Third column is the sum of the first two; adding it to S changes nothing.
    DenseMatrix a(3, 3, {1, 0, 1, 0, 1, 1, 0, 0, 0});
    auto inst = cssp::GramInstance::from_columns(a);
    const double two = inst.projection_error({0, 1});
    const double three = inst.projection_error({0, 1, 2});
    CHECK(two == doctest::Approx(three).epsilon(1e-10).scale(1.0));
    CHECK(two <= 1e-10);
}
