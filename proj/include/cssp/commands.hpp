#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cssp/bounds.hpp"
#include "cssp/gram.hpp"
#include "cssp/instance_gen.hpp"
#include "cssp/selectors.hpp"
#include "cssp/spectrum.hpp"

namespace cssp {

// Instance and spectrum sources shared by the subcommands. Exactly one of
// the file fields or `shape` must be set; anything else is a config error.
// `shape` draws a prescribed-spectrum matrix (m x n, m defaulting to n) and
// consumes the same generator stream as gen_shaped_matrix, so a bounds run
// on the shape and an experiment run on the generated matrix agree.
struct SourceSpec {
    std::string matrix_file;    // dense columns, whitespace format
    std::string kernel_file;    // symmetric kernel, whitespace format
    std::string libsvm_file;    // points; paired with kernel_kind / sigma
    std::string spectrum_file;  // eigenvalues as a 1 x n or n x 1 matrix
    std::string shape;          // flat_with_drops | poly | exp

    std::vector<double> levels;        // flat_with_drops
    std::vector<std::size_t> breaks;   // flat_with_drops, 1-based
    double rate = 2.0;                 // poly exponent or exp decay delta
    double c1 = 1.0, c2 = 1.0;         // decay prefactor range
    std::size_t n = 0, m = 0;          // shape sizes; m = 0 means m = n

    std::string kernel_kind = "linear";  // linear | rbf (libsvm source)
    double sigma = 1.0;

    std::uint64_t seed = 0;  // shape draw seed
};

GramInstance resolve_instance(const SourceSpec& src);

// Shared CSV/report number format: 12 significant digits.
std::string csv_real(double v);

// One config-file assignment. `key = v1 v2 ...` (or `key v1 v2 ...`); a bare
// key on its own line carries no values, which is how flags are switched on.
// `section` is the most recent `[name]` header, empty before the first one.
struct ConfigEntry {
    std::string section;
    std::string key;
    std::vector<std::string> values;
};

// Parses the flat-section key-value format used by `--config`. Blank lines
// and `#`/`;` comments are skipped. Malformed lines (empty key, unterminated
// section header) raise invalid_argument with the line number; an unreadable
// path raises runtime_error. Entry order is file order.
std::vector<ConfigEntry> read_config_file(const std::string& path);
std::vector<ConfigEntry> read_config_stream(std::istream& in);

// Accepts spectrum_file and shape directly; other sources go through the
// instance's eigendecomposition.
Spectrum resolve_spectrum(const SourceSpec& src);

// Long-format bound table: one row per (family, k) in the write_curves_csv
// schema. Families: opt, worst_case, envelope (+ envelope_arg_s rows where
// a minimizer exists), phi and psi per requested s, and the stable-rank
// profile as stable_rank / t_s rows whose k column holds the order s.
struct BoundsJob {
    Spectrum spectrum;
    std::vector<std::size_t> s_list;  // empty: every s in [0, k_max)
    std::size_t k_min = 1;
    std::size_t k_max = 0;  // 0: min(rank - 1, 60)
    double eps = 0.0;
    bool lemma2_gate = false;  // envelope restricted to the concentration window
};

void run_bounds(const BoundsJob& job, std::ostream& out);

struct DecayOverlay {
    DecayKind kind;
    DecayParams params;
    double c = kDecayDefaultC;
};

// Per-(k, method) factor table. Rows with k >= rank carry degenerate=1 and
// empty numeric cells; every other row holds the Monte Carlo mean, its
// standard error, and the exact k-DPP factor for that k. Output is
// deterministic in master_seed and independent of thread schedule.
struct ExperimentJob {
    explicit ExperimentJob(GramInstance inst) : instance(std::move(inst)) {}

    GramInstance instance;
    std::vector<Method> methods;
    std::size_t k_min = 1;
    std::size_t k_max = 0;  // 0: min(rank - 1, 60)
    std::size_t trials = 1000;
    std::uint64_t master_seed = 0;
    std::optional<double> envelope_eps;  // adds the envelope overlay column
    bool worst_case_overlay = false;
    std::optional<DecayOverlay> decay;
};

void run_experiment(const ExperimentJob& job, std::ostream& out);

struct VerifyRow {
    std::size_t k = 0;
    double min_ratio = 0.0;
    std::optional<double> target;  // declared rows only
    bool declared = false;
    bool pass = false;  // declared rows only; undeclared rows never fail
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    bool all_pass = true;  // over declared rows
};

// Brute-force min_{|S|=k} Er(S)/OPT_k against the manifest targets. `ks`
// empty means the manifest's declared list; extra values are computed and
// reported as undeclared.
VerifyReport run_verify_lower(const GramInstance& instance,
                              const LowerBoundManifest& manifest,
                              std::vector<std::size_t> ks,
                              double budget = kEnumBudgetDefault);

void print_verify_report(const VerifyReport& report, std::ostream& out);

}  // namespace cssp
