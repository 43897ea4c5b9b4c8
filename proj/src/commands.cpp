#include "cssp/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cssp/dpp.hpp"
#include "cssp/esp.hpp"
#include "cssp/rng.hpp"

namespace cssp {

std::string csv_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
}

namespace {

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

}  // namespace

std::vector<ConfigEntry> read_config_stream(std::istream& in) {
    std::vector<ConfigEntry> entries;
    std::string section;
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const std::string body = strip(line);
        if (body.empty() || body.front() == '#' || body.front() == ';') continue;
        if (body.front() == '[') {
            if (body.back() != ']' || body.size() < 3)
                throw std::invalid_argument("config line " +
                                            std::to_string(lineno) +
                                            ": malformed section header");
            section = strip(body.substr(1, body.size() - 2));
            continue;
        }
        ConfigEntry entry;
        entry.section = section;
        const auto eq = body.find('=');
        std::string key_part, value_part;
        if (eq != std::string::npos) {
            key_part = strip(body.substr(0, eq));
            value_part = strip(body.substr(eq + 1));
        } else {
            const auto ws = body.find_first_of(" \t");
            key_part = strip(body.substr(0, ws));
            value_part = ws == std::string::npos ? "" : strip(body.substr(ws));
        }
        if (key_part.empty() || key_part.find_first_of(" \t") != std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": missing key");
        entry.key = key_part;
        entry.values = split_ws(value_part);
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    return read_config_stream(in);
}

namespace {

int source_count(const SourceSpec& src) {
    return static_cast<int>(!src.matrix_file.empty()) +
           static_cast<int>(!src.kernel_file.empty()) +
           static_cast<int>(!src.libsvm_file.empty()) +
           static_cast<int>(!src.spectrum_file.empty()) +
           static_cast<int>(!src.shape.empty());
}

void require_one_source(const SourceSpec& src) {
    if (source_count(src) != 1)
        throw std::invalid_argument(
            "config: exactly one of --matrix, --kernel-file, --libsvm, "
            "--spectrum-file, --shape must be given");
}

SpectrumSpec shape_spec(const SourceSpec& src) {
    SpectrumSpec spec;
    if (src.shape == "flat_with_drops")
        spec.kind = SpectrumSpec::Kind::flat_with_drops;
    else if (src.shape == "poly")
        spec.kind = SpectrumSpec::Kind::poly;
    else if (src.shape == "exp")
        spec.kind = SpectrumSpec::Kind::exponential;
    else
        throw std::invalid_argument("config: unknown --shape '" + src.shape +
                                    "' (flat_with_drops, poly, exp)");
    if (src.n == 0)
        throw std::invalid_argument("config: --shape requires --n > 0");
    spec.n = src.n;
    spec.levels = src.levels;
    spec.breaks = src.breaks;
    spec.rate = src.rate;
    spec.c1 = src.c1;
    spec.c2 = src.c2;
    return spec;
}

KernelSpec kernel_spec(const SourceSpec& src) {
    KernelSpec spec;
    if (src.kernel_kind == "linear")
        spec.kind = KernelSpec::Kind::linear;
    else if (src.kernel_kind == "rbf")
        spec.kind = KernelSpec::Kind::rbf;
    else
        throw std::invalid_argument("config: unknown --kernel '" +
                                    src.kernel_kind + "' (linear, rbf)");
    spec.sigma = src.sigma;
    return spec;
}

}  // namespace

GramInstance resolve_instance(const SourceSpec& src) {
    require_one_source(src);
    if (!src.matrix_file.empty())
        return GramInstance::from_columns(DenseMatrix::read_whitespace(src.matrix_file));
    if (!src.kernel_file.empty())
        return GramInstance::from_kernel(DenseMatrix::read_whitespace(src.kernel_file));
    if (!src.libsvm_file.empty())
        return build_kernel(read_libsvm(src.libsvm_file).points, kernel_spec(src));
    if (!src.shape.empty()) {
        const SpectrumSpec spec = shape_spec(src);
        const std::size_t m = src.m == 0 ? src.n : src.m;
        return GramInstance::from_columns(gen_shaped_matrix(spec, m, spec.n, src.seed));
    }
    throw std::invalid_argument(
        "config: --spectrum-file carries eigenvalues only and cannot serve as "
        "an instance source here");
}

Spectrum resolve_spectrum(const SourceSpec& src) {
    require_one_source(src);
    if (!src.spectrum_file.empty()) {
        const DenseMatrix v = DenseMatrix::read_whitespace(src.spectrum_file);
        if (v.rows() != 1 && v.cols() != 1)
            throw std::invalid_argument(
                "config: --spectrum-file must be a 1 x n or n x 1 matrix");
        return Spectrum(v.entries());
    }
    if (!src.shape.empty()) {
        const SpectrumSpec spec = shape_spec(src);
        SplitMix64 rng = SplitMix64::stream(src.seed, 1);  // gen_shaped_matrix stream
        return Spectrum(make_spectrum(spec, rng));
    }
    return resolve_instance(src).spectrum();
}

void run_bounds(const BoundsJob& job, std::ostream& out) {
    const Spectrum& sp = job.spectrum;
    const std::size_t rank = sp.rank();
    if (rank < 2)
        throw std::invalid_argument("bounds: spectrum rank below 2 leaves no k < rank");

    std::size_t k_max = job.k_max == 0 ? std::min<std::size_t>(rank - 1, 60)
                                       : std::min(job.k_max, rank - 1);
    if (job.k_min < 1 || job.k_min > k_max)
        throw std::invalid_argument("bounds: empty k range after clipping to rank-1");
    const std::size_t k_min = job.k_min;

    const StableRankProfile profile = stable_rank_profile(sp);
    const bool full_rank = rank == sp.size();

    std::vector<std::size_t> s_list = job.s_list;
    if (s_list.empty())
        for (std::size_t s = 0; s < k_max; ++s) s_list.push_back(s);
    for (std::size_t s : s_list)
        if (s >= rank)
            throw std::invalid_argument("bounds: requested s = " + std::to_string(s) +
                                        " is at or beyond the rank");

    std::vector<BoundCurve> curves;

    BoundCurve opt{"opt", "", {}, {}, {}};
    BoundCurve worst{"worst_case", "", {}, {}, {}};
    BoundCurve env{"envelope", "eps=" + csv_real(job.eps), {}, {}, {}};
    BoundCurve envarg{"envelope_arg_s", "eps=" + csv_real(job.eps), {}, {}, {}};
    for (std::size_t k = k_min; k <= k_max; ++k) {
        opt.ks.push_back(k);
        opt.values.push_back(opt_k(sp, k));
        opt.in_window.push_back(true);

        worst.ks.push_back(k);
        worst.values.push_back(static_cast<double>(k + 1));
        worst.in_window.push_back(true);

        const EnvelopeResult e = master_envelope(sp, k, job.eps, job.lemma2_gate);
        env.ks.push_back(k);
        env.values.push_back(e.value);
        env.in_window.push_back(!e.fallback);
        if (e.arg_s) {
            envarg.ks.push_back(k);
            envarg.values.push_back(static_cast<double>(*e.arg_s));
            envarg.in_window.push_back(true);
        }
    }
    curves.push_back(std::move(opt));
    curves.push_back(std::move(worst));
    curves.push_back(std::move(env));
    if (!envarg.ks.empty()) curves.push_back(std::move(envarg));

    for (std::size_t s : s_list) {
        BoundCurve phi_c{"phi", "s=" + std::to_string(s), {}, {}, {}};
        for (std::size_t k = std::max(k_min, s + 1); k <= k_max; ++k) {
            if (!(static_cast<double>(k) < profile.t[s])) break;
            phi_c.ks.push_back(k);
            phi_c.values.push_back(phi(sp, s, k));
            phi_c.in_window.push_back(true);
        }
        if (!phi_c.ks.empty()) curves.push_back(std::move(phi_c));

        if (!full_rank) continue;
        BoundCurve psi_c{"psi", "s=" + std::to_string(s), {}, {}, {}};
        for (std::size_t k = std::max(k_min, s + 1); k <= k_max; ++k) {
            psi_c.ks.push_back(k);
            psi_c.values.push_back(psi(sp, s, k));
            psi_c.in_window.push_back(true);
        }
        if (!psi_c.ks.empty()) curves.push_back(std::move(psi_c));
    }

    // Profile rows: the k column holds the order s.
    BoundCurve sr{"stable_rank", "", {}, {}, {}};
    BoundCurve ts{"t_s", "", {}, {}, {}};
    for (std::size_t s = 0; s < profile.orders(); ++s) {
        sr.ks.push_back(s);
        sr.values.push_back(profile.sr[s]);
        sr.in_window.push_back(true);
        ts.ks.push_back(s);
        ts.values.push_back(profile.t[s]);
        ts.in_window.push_back(true);
    }
    curves.push_back(std::move(sr));
    curves.push_back(std::move(ts));

    write_curves_csv(out, curves);
}

void run_experiment(const ExperimentJob& job, std::ostream& out) {
    if (job.methods.empty())
        throw std::invalid_argument("experiment: at least one method is required");
    if (job.trials < 1)
        throw std::invalid_argument("experiment: trials must be >= 1");

    const Spectrum& sp = job.instance.spectrum();
    const std::size_t rank = sp.rank();
    if (rank < 2)
        throw std::invalid_argument("experiment: spectrum rank below 2 leaves no k < rank");
    const std::size_t k_max =
        job.k_max == 0 ? std::min<std::size_t>(rank - 1, 60) : job.k_max;
    if (job.k_min < 1 || job.k_min > k_max)
        throw std::invalid_argument("experiment: empty k range");

    out << "k,method,mean_factor,std_error,trials,exact_kdpp_factor,degenerate,"
           "envelope,worst_case,decay_bound\n";

    for (std::size_t k = job.k_min; k <= k_max; ++k) {
        const bool degenerate = k >= rank;
        std::string exact, envelope, worst, decay;
        if (!degenerate) {
            exact = csv_real(kdpp_expected_error(sp, k) / opt_k(sp, k));
            if (job.envelope_eps)
                envelope = csv_real(master_envelope(sp, k, *job.envelope_eps, false).value);
            if (job.worst_case_overlay) worst = csv_real(static_cast<double>(k + 1));
            if (job.decay)
                decay = csv_real(decay_bound(job.decay->kind, job.decay->params, k,
                                          job.decay->c));
        }
        for (std::size_t slot = 0; slot < job.methods.size(); ++slot) {
            out << k << ',' << method_id(job.methods[slot]) << ',';
            if (degenerate) {
                out << ",,,,1,,,\n";
                continue;
            }
            const std::uint64_t seed = SplitMix64::derive_stream(
                SplitMix64::derive_stream(job.master_seed, k), slot);
            const FactorEstimate est =
                estimate_factor(job.instance, k, job.methods[slot], job.trials, seed);
            out << csv_real(est.mean) << ',' << csv_real(est.std_error) << ','
                << est.trials << ',' << exact << ",0," << envelope << ',' << worst
                << ',' << decay << '\n';
        }
    }
}

VerifyReport run_verify_lower(const GramInstance& instance,
                              const LowerBoundManifest& manifest,
                              std::vector<std::size_t> ks, double budget) {
    if (ks.empty()) ks = manifest.k;
    if (ks.empty())
        throw std::invalid_argument("verify-lower: no subset sizes to check");

    const Spectrum& sp = instance.spectrum();
    VerifyReport report;
    for (std::size_t k : ks) {
        VerifyRow row;
        row.k = k;
        for (std::size_t i = 0; i < manifest.k.size(); ++i)
            if (manifest.k[i] == k) {
                row.declared = true;
                row.target = manifest.target_ratio[i];
                break;
            }
        const double opt = opt_k(sp, k);
        const double err = brute_force_optimum(instance, k, budget).error;
        row.min_ratio = opt > 0.0 ? err / opt
                                  : std::numeric_limits<double>::quiet_NaN();
        row.pass = row.declared && opt > 0.0 && row.min_ratio >= *row.target;
        if (row.declared && !row.pass) report.all_pass = false;
        report.rows.push_back(row);
    }
    return report;
}

void print_verify_report(const VerifyReport& report, std::ostream& out) {
    for (const VerifyRow& row : report.rows) {
        out << "k=" << row.k << " min_ratio=" << csv_real(row.min_ratio);
        if (row.declared)
            out << " target=" << csv_real(*row.target) << (row.pass ? " PASS" : " FAIL");
        else
            out << " undeclared";
        out << '\n';
    }
    out << "verify-lower: " << (report.all_pass ? "PASS" : "FAIL") << '\n';
}

}  // namespace cssp
