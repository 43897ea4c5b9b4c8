#include "cssp/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cssp/spectrum.hpp"

namespace cssp {
namespace {

constexpr double kCertBudget = 20000.0;  // max subsets enumerated per k_i
constexpr int kMaxHalvings = 20;

// Box-Muller pairs over the splitmix stream; caches the second deviate.
class GaussianSource {
public:
    explicit GaussianSource(SplitMix64& rng) : rng_(rng) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const double u1 = 1.0 - rng_.next_double();  // (0, 1]
        const double u2 = rng_.next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586 * u2;
        spare_ = r * std::sin(t);
        have_ = true;
        return r * std::cos(t);
    }

private:
    SplitMix64& rng_;
    bool have_ = false;
    double spare_ = 0.0;
};

// Orthonormalizes the columns in place (modified Gram-Schmidt, two passes
// against drift). Throws if the draw is numerically rank deficient.
void orthonormalize_columns(DenseMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    for (std::size_t c = 0; c < n; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < c; ++p) {
                double dot = 0.0;
                for (std::size_t i = 0; i < m; ++i) dot += a(i, p) * a(i, c);
                for (std::size_t i = 0; i < m; ++i) a(i, c) -= dot * a(i, p);
            }
        }
        double norm2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) norm2 += a(i, c) * a(i, c);
        const double norm = std::sqrt(norm2);
        if (!(norm > 1e-12))
            throw std::runtime_error("orthonormalize: rank-deficient draw");
        for (std::size_t i = 0; i < m; ++i) a(i, c) /= norm;
    }
}

DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols, SplitMix64& rng) {
    GaussianSource g(rng);
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a(i, j) = g.next();
    orthonormalize_columns(a);
    return a;
}

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

// Minimum of Er(S)/opt over all size-k subsets, via the kernel-form error.
double min_subset_ratio(const GramInstance& inst, std::size_t k, double opt) {
    const std::size_t n = inst.n();
    std::vector<std::size_t> s(k);
    for (std::size_t i = 0; i < k; ++i) s[i] = i;
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        best = std::min(best, inst.projection_error(s) / opt);
        std::size_t i = k;
        while (i > 0 && s[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++s[i - 1];
        for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return best;
}

void validate_lower_bound_spec(const LowerBoundSpec& spec) {
    if (spec.t == 0 || spec.t != spec.l.size())
        throw std::invalid_argument("gen_lower_bound: t must equal the number of block sizes");
    for (std::size_t li : spec.l)
        if (li < 2) throw std::invalid_argument("gen_lower_bound: block sizes must be >= 2");
    if (!(spec.delta > 0.0 && spec.delta < 1.0))
        throw std::invalid_argument("gen_lower_bound: delta must lie in (0,1)");
    if (!(spec.rho > 0.0 && spec.rho < 1.0))
        throw std::invalid_argument("gen_lower_bound: rho must lie in (0,1)");
}

// Scalar cascade for a given per-block halving count. Keeps the sufficient
// condition alpha_{c+1}^2 <= (delta/4) l_c beta_c^2 / sum_{i>c} l_i true by
// capping each alpha.
void build_schedule(const LowerBoundSpec& spec, const std::vector<int>& halvings,
                    std::vector<double>& alpha, std::vector<double>& beta) {
    const std::size_t t = spec.t;
    alpha.assign(t, 0.0);
    beta.assign(t, 0.0);
    std::vector<double> tail(t, 0.0);  // sum of block sizes after c
    for (std::size_t c = t; c-- > 1;)
        tail[c - 1] = tail[c] + static_cast<double>(spec.l[c]);

    alpha[0] = 1.0;
    for (std::size_t c = 0; c < t; ++c) {
        beta[c] = spec.rho * alpha[c] * std::ldexp(1.0, -halvings[c]);
        if (c + 1 < t) {
            const double cap = 0.99 * std::sqrt((spec.delta / 4.0) *
                                                static_cast<double>(spec.l[c]) *
                                                beta[c] * beta[c] / tail[c]);
            alpha[c + 1] = std::min(spec.rho * beta[c], cap);
        }
    }
}

// Unrotated layout: block i uses rows [base, base+l_i) for the simplex
// coordinates and row base+l_i for v_i. The seeded rotation q acts on the
// occupied d = sum l_i + t leading dimensions; rows past d stay zero.
DenseMatrix build_lower_bound_matrix(const LowerBoundSpec& spec, std::size_t m,
                                     const std::vector<double>& alpha,
                                     const std::vector<double>& beta,
                                     const DenseMatrix& q) {
    const std::size_t t = spec.t;
    std::size_t n = 0;
    for (std::size_t li : spec.l) n += li;
    const std::size_t d = n + t;

    DenseMatrix raw(d, n);
    std::size_t base = 0, col = 0;
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t l = spec.l[i];
        const double ln = static_cast<double>(l);
        const double unit = 1.0 / std::sqrt(1.0 - 1.0 / ln);  // corner normalizer
        for (std::size_t j = 0; j < l; ++j, ++col) {
            for (std::size_t r = 0; r < l; ++r) {
                const double e = (r == j ? 1.0 : 0.0) - 1.0 / ln;
                raw(base + r, col) = alpha[i] * unit * e;
            }
            raw(base + l, col) = beta[i];
        }
        base += l + 1;
    }

    const DenseMatrix spun = q.multiply(raw);
    DenseMatrix out(m, n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = spun(i, j);
    return out;
}

std::string join_list(const std::vector<std::size_t>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    return out.str();
}

std::string join_list(const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    return out.str();
}

template <typename T>
std::vector<T> split_list(const std::string& s, const std::string& what) {
    std::istringstream in(s);
    std::vector<T> out;
    T v;
    while (in >> v) out.push_back(v);
    if (!in.eof())
        throw std::runtime_error("manifest: malformed list in '" + what + "': " + s);
    return out;
}

}  // namespace

LowerBoundInstance gen_lower_bound(const LowerBoundSpec& spec, std::size_t m,
                                   std::uint64_t seed) {
    validate_lower_bound_spec(spec);
    const std::size_t t = spec.t;
    std::size_t n = 0;
    for (std::size_t li : spec.l) n += li;
    if (m < n + t)
        throw std::invalid_argument("gen_lower_bound: ambient dimension " +
                                    std::to_string(m) + " below required " +
                                    std::to_string(n + t));

    SplitMix64 rng = SplitMix64::stream(seed, 0);
    const DenseMatrix q = random_orthonormal(n + t, n + t, rng);

    LowerBoundInstance inst;
    inst.k.resize(t);
    inst.target_ratio.resize(t);
    std::size_t acc = 0;
    for (std::size_t i = 0; i < t; ++i) {
        acc += spec.l[i];
        inst.k[i] = acc - 1;
        inst.target_ratio[i] = (1.0 - spec.delta) * static_cast<double>(spec.l[i]);
    }

    std::vector<int> halvings(t, 0);
    while (true) {
        build_schedule(spec, halvings, inst.alpha, inst.beta);
        inst.a = build_lower_bound_matrix(spec, m, inst.alpha, inst.beta, q);
        inst.certified.assign(t, false);

        const GramInstance gram = GramInstance::from_columns(inst.a);
        bool all_ok = true;
        for (std::size_t i = 0; i < t; ++i) {
            if (binomial_count(n, inst.k[i]) > kCertBudget) continue;  // cascade holds by construction
            const double opt = opt_k(gram.spectrum(), inst.k[i]);
            const double ratio = min_subset_ratio(gram, inst.k[i], opt);
            if (ratio >= inst.target_ratio[i]) {
                inst.certified[i] = true;
                continue;
            }
            if (++halvings[i] > kMaxHalvings)
                throw std::runtime_error(
                    "gen_lower_bound: certification failed at k=" +
                    std::to_string(inst.k[i]) + " after " +
                    std::to_string(kMaxHalvings) + " shrink steps (ratio " +
                    std::to_string(ratio) + " < target " +
                    std::to_string(inst.target_ratio[i]) + ")");
            all_ok = false;
            break;
        }
        if (all_ok) return inst;
    }
}

std::vector<double> make_spectrum(const SpectrumSpec& spec, SplitMix64& rng) {
    if (spec.n == 0) throw std::invalid_argument("make_spectrum: n must be positive");
    std::vector<double> v(spec.n);
    switch (spec.kind) {
        case SpectrumSpec::Kind::flat_with_drops: {
            if (spec.levels.empty() || spec.levels.size() != spec.breaks.size() + 1)
                throw std::invalid_argument(
                    "make_spectrum: need one more level than break indices");
            for (std::size_t j = 0; j + 1 < spec.levels.size(); ++j)
                if (!(spec.levels[j + 1] < spec.levels[j]))
                    throw std::invalid_argument("make_spectrum: levels must decrease");
            if (!(spec.levels.back() >= 0.0))
                throw std::invalid_argument("make_spectrum: levels must be nonnegative");
            for (std::size_t j = 0; j < spec.breaks.size(); ++j) {
                const std::size_t b = spec.breaks[j];
                if (b < 2 || b > spec.n || (j > 0 && b <= spec.breaks[j - 1]))
                    throw std::invalid_argument(
                        "make_spectrum: break indices must be increasing and in [2, n]");
            }
            std::size_t level = 0;
            for (std::size_t i = 1; i <= spec.n; ++i) {
                while (level < spec.breaks.size() && i >= spec.breaks[level]) ++level;
                v[i - 1] = spec.levels[level];
            }
            break;
        }
        case SpectrumSpec::Kind::poly:
        case SpectrumSpec::Kind::exponential: {
            const bool poly = spec.kind == SpectrumSpec::Kind::poly;
            if (poly && !(spec.rate > 0.0))
                throw std::invalid_argument("make_spectrum: poly decay needs p > 0");
            if (!poly && !(spec.rate > 0.0 && spec.rate < 1.0))
                throw std::invalid_argument("make_spectrum: exp decay needs delta in (0,1)");
            if (!(spec.c1 > 0.0 && spec.c1 <= spec.c2))
                throw std::invalid_argument("make_spectrum: need 0 < c1 <= c2");
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i <= spec.n; ++i) {
                const double r = spec.c1 + (spec.c2 - spec.c1) * rng.next_double();
                const double base =
                    poly ? std::pow(static_cast<double>(i), -spec.rate)
                         : std::pow(1.0 - spec.rate, static_cast<double>(i));
                v[i - 1] = std::min(prev, r * base);
                prev = v[i - 1];
            }
            break;
        }
        case SpectrumSpec::Kind::explicit_values: {
            if (spec.values.size() != spec.n)
                throw std::invalid_argument("make_spectrum: explicit values length != n");
            for (std::size_t i = 0; i < spec.n; ++i)
                if (!(spec.values[i] >= 0.0) ||
                    (i > 0 && spec.values[i] > spec.values[i - 1]))
                    throw std::invalid_argument(
                        "make_spectrum: explicit values must be non-increasing and >= 0");
            v = spec.values;
            break;
        }
    }
    return v;
}

DenseMatrix gen_shaped_matrix(const SpectrumSpec& spec, std::size_t m,
                              std::size_t n, std::uint64_t seed) {
    if (spec.n != n)
        throw std::invalid_argument("gen_shaped_matrix: spec.n != n");
    if (m < n) throw std::invalid_argument("gen_shaped_matrix: need m >= n");

    SplitMix64 rng = SplitMix64::stream(seed, 1);
    const std::vector<double> lambda = make_spectrum(spec, rng);
    const DenseMatrix u = random_orthonormal(m, n, rng);
    const DenseMatrix v = random_orthonormal(n, n, rng);

    DenseMatrix ud = u;  // scale column j by sqrt(lambda_j)
    for (std::size_t j = 0; j < n; ++j) {
        if (!(lambda[j] >= 0.0))
            throw std::invalid_argument("gen_shaped_matrix: negative eigenvalue requested");
        const double s = std::sqrt(lambda[j]);
        for (std::size_t i = 0; i < m; ++i) ud(i, j) *= s;
    }
    return ud.multiply(v.transposed());
}

GramInstance build_kernel(const DenseMatrix& points, const KernelSpec& spec) {
    if (points.rows() == 0 || points.cols() == 0)
        throw std::invalid_argument("build_kernel: empty data");
    if (spec.kind == KernelSpec::Kind::linear)
        return GramInstance::from_columns(points.transposed());

    if (!(spec.sigma > 0.0))
        throw std::invalid_argument("build_kernel: rbf bandwidth must be positive");
    const std::size_t n = points.rows(), d = points.cols();
    const double inv = 1.0 / (spec.sigma * spec.sigma);
    DenseMatrix k(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double dist2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = points(i, c) - points(j, c);
                dist2 += diff * diff;
            }
            const double val = std::exp(-dist2 * inv);
            k(i, j) = val;
            k(j, i) = val;
        }
    }
    return GramInstance::from_kernel(std::move(k));
}

LibsvmData read_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_libsvm: cannot open " + path);
    return read_libsvm(in);
}

LibsvmData read_libsvm(std::istream& in) {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::vector<double> labels;
    std::size_t dim = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        const std::string where = "libsvm line " + std::to_string(lineno);

        double label = 0.0;
        if (!(ls >> label)) throw std::runtime_error(where + ": bad label");

        std::vector<std::pair<std::size_t, double>> feats;
        std::string tok;
        std::size_t prev = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error(where + ": expected idx:val, got '" + tok + "'");
            std::size_t idx = 0;
            double val = 0.0;
            try {
                std::size_t used = 0;
                idx = std::stoul(tok.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument("trailing");
                const std::string vs = tok.substr(colon + 1);
                val = std::stod(vs, &used);
                if (used != vs.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error(where + ": non-numeric token '" + tok + "'");
            }
            if (idx == 0)
                throw std::runtime_error(where + ": feature indices are 1-based");
            if (idx <= prev)
                throw std::runtime_error(where + ": indices must strictly increase");
            prev = idx;
            dim = std::max(dim, idx);
            feats.emplace_back(idx, val);
        }
        labels.push_back(label);
        rows.push_back(std::move(feats));
    }

    DenseMatrix points(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [idx, val] : rows[r]) points(r, idx - 1) = val;
    return LibsvmData{std::move(points), std::move(labels)};
}

void write_kv_block(std::ostream& out, const KvBlock& kv) {
    for (const auto& [key, value] : kv) out << key << ' ' << value << '\n';
}

KvBlock read_kv_block(std::istream& in) {
    KvBlock kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        const auto sep = line.find_first_of(" \t", start);
        if (sep == std::string::npos) {
            kv.emplace_back(line.substr(start), "");
            continue;
        }
        const auto vstart = line.find_first_not_of(" \t", sep);
        const auto vend = line.find_last_not_of(" \t\r");
        kv.emplace_back(line.substr(start, sep - start),
                        vstart == std::string::npos
                            ? ""
                            : line.substr(vstart, vend - vstart + 1));
    }
    return kv;
}

std::string kv_get(const KvBlock& kv, const std::string& key) {
    for (const auto& [k, v] : kv)
        if (k == key) return v;
    throw std::runtime_error("manifest: missing key '" + key + "'");
}

std::string kv_get_or(const KvBlock& kv, const std::string& key, std::string fallback) {
    for (const auto& [k, v] : kv)
        if (k == key) return v;
    return fallback;
}

KvBlock lower_bound_manifest(const LowerBoundSpec& spec, std::size_t m,
                             std::uint64_t seed, const LowerBoundInstance& inst) {
    std::vector<std::size_t> cert(inst.certified.size());
    for (std::size_t i = 0; i < cert.size(); ++i) cert[i] = inst.certified[i] ? 1 : 0;
    std::ostringstream delta, rho;
    delta.precision(17);
    rho.precision(17);
    delta << spec.delta;
    rho << spec.rho;
    return KvBlock{
        {"type", "lower_bound"},
        {"blocks", std::to_string(spec.t)},
        {"sizes", join_list(spec.l)},
        {"delta", delta.str()},
        {"rho", rho.str()},
        {"m", std::to_string(m)},
        {"seed", std::to_string(seed)},
        {"k", join_list(inst.k)},
        {"targets", join_list(inst.target_ratio)},
        {"certified", join_list(cert)},
    };
}

LowerBoundManifest parse_lower_bound_manifest(const KvBlock& kv) {
    if (kv_get(kv, "type") != "lower_bound")
        throw std::runtime_error("manifest: type is not lower_bound");
    LowerBoundManifest man;
    man.spec.t = split_list<std::size_t>(kv_get(kv, "blocks"), "blocks").at(0);
    man.spec.l = split_list<std::size_t>(kv_get(kv, "sizes"), "sizes");
    man.spec.delta = split_list<double>(kv_get(kv, "delta"), "delta").at(0);
    man.spec.rho = split_list<double>(kv_get(kv, "rho"), "rho").at(0);
    man.m = split_list<std::size_t>(kv_get(kv, "m"), "m").at(0);
    man.seed = static_cast<std::uint64_t>(
        std::stoull(kv_get(kv, "seed")));
    man.k = split_list<std::size_t>(kv_get(kv, "k"), "k");
    man.target_ratio = split_list<double>(kv_get(kv, "targets"), "targets");
    if (man.k.size() != man.target_ratio.size())
        throw std::runtime_error("manifest: k/targets length mismatch");
    return man;
}

}  // namespace cssp
