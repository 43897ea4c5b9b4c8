#pragma once

#include <memory>
#include <vector>

#include "cssp/eigen.hpp"
#include "cssp/matrix.hpp"
#include "cssp/spectrum.hpp"

namespace cssp {

/// A column-subset / kernel approximation instance. Holds either the column
/// matrix A (kernel induced as A^T A) or the kernel K directly. Logically
/// immutable: the eigendecomposition is materialized once, on first use,
/// behind a shared thread-safe cache, so instances are cheap to copy and
/// safe to share across threads.
///
/// The kernel form must be symmetric (checked at construction). Positive
/// semidefiniteness is enforced the first time the spectrum is materialized:
/// eigenvalues below -tol (tol = kRankRelTol * lambda_1) are rejected there.
class GramInstance {
public:
    static GramInstance from_columns(DenseMatrix a);
    static GramInstance from_kernel(DenseMatrix k);

    /// Number of columns of A / order of K.
    std::size_t n() const { return kernel_.rows(); }

    bool has_columns() const { return has_columns_; }
    /// Valid only when has_columns().
    const DenseMatrix& columns() const;
    const DenseMatrix& kernel() const { return kernel_; }

    const Spectrum& spectrum() const;
    const Eigensystem& eigensystem() const;

    /// ||A - P_S A||_F^2 computed from the kernel alone:
    /// tr(K) - tr(K_{:,S} (K_{S,S})^+ K_{S,:}). Indices are 0-based,
    /// duplicates rejected. Result clamped at zero; the empty set gives
    /// tr(K).
    double projection_error(const std::vector<std::size_t>& s) const;

    /// Trace norm of K - C B^+ C^T with C = K_{:,S}, B = K_{S,S}, obtained
    /// by eigendecomposing the difference and summing |lambda_i|. Agrees
    /// with projection_error to within 1e-8 relative on PSD kernels but is
    /// computed along this independent route on purpose.
    double nystrom_error(const std::vector<std::size_t>& s) const;

private:
    struct Cache;

    explicit GramInstance(DenseMatrix kernel, DenseMatrix cols, bool has_cols);
    void check_indices(const std::vector<std::size_t>& s, const char* who) const;

    DenseMatrix kernel_;
    DenseMatrix columns_;
    bool has_columns_ = false;
    std::shared_ptr<Cache> cache_;
};

}  // namespace cssp
