#pragma once

#include "cssp/matrix.hpp"
#include "cssp/spectrum.hpp"

namespace cssp {

// Eigendecomposition of a symmetric matrix.  `spectrum` holds the
// eigenvalues sorted in non-increasing order (negatives within the rank
// tolerance clamped to zero); column j of `basis` is the orthonormal
// eigenvector matching spectrum[j], so M == basis * diag * basis^T.
struct Eigensystem {
  Spectrum spectrum;
  DenseMatrix basis;
};

// Cyclic Jacobi eigensolver.  Requires a square matrix that is symmetric
// to within 1e-10 relative asymmetry; the input is symmetrized before
// iterating.  Sweeps stop once the off-diagonal Frobenius mass drops
// below 1e-12 * ||M||_F.
Eigensystem eigensym(const DenseMatrix& m);

// Eigenvalues only; same contract as eigensym.
Spectrum eigenvalues(const DenseMatrix& m);

// Sum of |lambda_i| over the spectrum of a symmetric matrix.  This is the
// trace norm and is computed from a full eigendecomposition, not from any
// structural shortcut.
double trace_norm_sym(const DenseMatrix& m);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix.  Eigenvalues at
// or below kRankRelTol * lambda_1 are truncated to zero rather than
// inverted.
DenseMatrix psd_pseudo_inverse(const DenseMatrix& m);

}  // namespace cssp
