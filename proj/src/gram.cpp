#include "cssp/gram.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <string>

namespace cssp {

struct GramInstance::Cache {
    std::once_flag once;
    std::unique_ptr<Eigensystem> es;
};

GramInstance::GramInstance(DenseMatrix kernel, DenseMatrix cols, bool has_cols)
    : kernel_(std::move(kernel)),
      columns_(std::move(cols)),
      has_columns_(has_cols),
      cache_(std::make_shared<Cache>()) {}

GramInstance GramInstance::from_columns(DenseMatrix a) {
    if (a.rows() == 0 || a.cols() == 0)
        throw std::invalid_argument("GramInstance: empty column matrix");
    DenseMatrix k = a.gram();
    return GramInstance(std::move(k), std::move(a), true);
}

GramInstance GramInstance::from_kernel(DenseMatrix k) {
    if (k.rows() == 0) throw std::invalid_argument("GramInstance: empty kernel");
    if (k.rows() != k.cols())
        throw std::invalid_argument("GramInstance: kernel must be square");
    if (!k.is_symmetric())
        throw std::invalid_argument("GramInstance: kernel must be symmetric");
    return GramInstance(std::move(k), DenseMatrix(), false);
}

const DenseMatrix& GramInstance::columns() const {
    if (!has_columns_)
        throw std::logic_error("GramInstance: no column matrix on a kernel instance");
    return columns_;
}

const Eigensystem& GramInstance::eigensystem() const {
    std::call_once(cache_->once, [this] {
        cache_->es = std::make_unique<Eigensystem>(eigensym(kernel_));
    });
    return *cache_->es;
}

const Spectrum& GramInstance::spectrum() const { return eigensystem().spectrum; }

void GramInstance::check_indices(const std::vector<std::size_t>& s,
                                 const char* who) const {
    std::vector<bool> seen(n(), false);
    for (std::size_t i : s) {
        if (i >= n())
            throw std::out_of_range(std::string(who) + ": index " + std::to_string(i) +
                                    " out of range for n=" + std::to_string(n()));
        if (seen[i])
            throw std::invalid_argument(std::string(who) + ": duplicate index " +
                                        std::to_string(i));
        seen[i] = true;
    }
}

double GramInstance::projection_error(const std::vector<std::size_t>& s) const {
    check_indices(s, "projection_error");
    if (s.empty()) return kernel_.trace();

    const DenseMatrix c = kernel_.columns_of(s);   // n x |S|
    const DenseMatrix b_pinv = psd_pseudo_inverse(kernel_.submatrix(s));
    const DenseMatrix g = c.gram();                // C^T C, |S| x |S|

    // tr(C B^+ C^T) = tr(B^+ C^T C) = sum_{a,b} B^+(a,b) G(b,a).
    double captured = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = 0; b < s.size(); ++b) captured += b_pinv(a, b) * g(b, a);
    return std::max(0.0, kernel_.trace() - captured);
}

double GramInstance::nystrom_error(const std::vector<std::size_t>& s) const {
    check_indices(s, "nystrom_error");
    if (s.empty()) return trace_norm_sym(kernel_);

    const std::size_t n_ = n();
    const DenseMatrix c = kernel_.columns_of(s);   // n x |S|
    const DenseMatrix b_pinv = psd_pseudo_inverse(kernel_.submatrix(s));

    // K - C B^+ C^T, then the trace norm of that difference. The difference
    // is symmetric in exact arithmetic; mirroring the upper triangle removes
    // the round-off asymmetry that would otherwise dominate near-zero
    // differences.
    const DenseMatrix cb = c.multiply(b_pinv);     // n x |S|
    DenseMatrix diff(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
            double acc = 0.0;
            for (std::size_t a = 0; a < s.size(); ++a)
                acc += 0.5 * (cb(i, a) * c(j, a) + cb(j, a) * c(i, a));
            const double v = 0.5 * (kernel_(i, j) + kernel_(j, i)) - acc;
            diff(i, j) = v;
            diff(j, i) = v;
        }
    return trace_norm_sym(diff);
}

}  // namespace cssp
