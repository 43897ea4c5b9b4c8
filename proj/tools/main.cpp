#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cssp/commands.hpp"
#include "cssp/dpp.hpp"
#include "cssp/esp.hpp"
#include "cssp/instance_gen.hpp"
#include "cssp/selectors.hpp"

namespace {

void add_config_option(CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path, "key=value config file; flags win");
}

bool flag_on(const cssp::ConfigEntry& entry) {
    if (entry.values.empty()) return true;
    if (entry.values.size() == 1) {
        const std::string& v = entry.values.front();
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    }
    throw std::invalid_argument("config: flag '" + entry.key +
                                "' expects true/false");
}

// Expands `--config FILE` before CLI11 parses: every config key becomes the
// matching flag appended to argv unless the command line already carries it,
// so explicit flags always win. A command-line source flag also suppresses
// every config source key (the exclusive group is replaced, not merged), and
// the same holds for sample's --alpha / --k pair.
std::vector<std::string> apply_config(const CLI::App& app,
                                      std::vector<std::string> args) {
    if (args.empty() || args.front().empty() || args.front().front() == '-')
        return args;
    const std::string sub_name = args.front();
    const CLI::App* sub = app.get_subcommand_no_throw(sub_name);
    if (sub == nullptr) return args;

    std::string config_path;
    std::vector<std::string> given;
    for (std::size_t i = 1; i < args.size(); ++i) {
        const std::string& tok = args[i];
        if (tok.rfind("--", 0) != 0) continue;
        const std::string name = tok.substr(0, tok.find('='));
        given.push_back(name);
        if (name != "--config") continue;
        if (tok.size() > name.size())
            config_path = tok.substr(name.size() + 1);
        else if (i + 1 < args.size())
            config_path = args[i + 1];
    }
    if (config_path.empty()) return args;
    const auto has = [&given](const std::string& name) {
        return std::find(given.begin(), given.end(), name) != given.end();
    };

    static const std::vector<std::string> kSourceKeys = {
        "matrix", "kernel-file", "libsvm", "spectrum-file", "shape"};
    bool cli_source = false;
    for (const std::string& key : kSourceKeys)
        cli_source = cli_source || has("--" + key);
    const bool cli_mode =
        sub_name == "sample" && (has("--alpha") || has("--k"));

    for (const cssp::ConfigEntry& entry : cssp::read_config_file(config_path)) {
        if (!entry.section.empty() && entry.section != sub_name) continue;
        if (entry.key == "config") continue;
        const std::string flag = "--" + entry.key;
        const CLI::Option* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr)
            throw std::invalid_argument("config: unknown key '" + entry.key +
                                        "' for subcommand '" + sub_name + "'");
        if (has(flag)) continue;
        const bool source_key = std::find(kSourceKeys.begin(), kSourceKeys.end(),
                                          entry.key) != kSourceKeys.end();
        if (source_key && cli_source) continue;
        if (cli_mode && (entry.key == "alpha" || entry.key == "k")) continue;
        if (opt->get_expected_min() == 0) {
            if (flag_on(entry)) args.push_back(flag);
            continue;
        }
        if (entry.values.empty())
            throw std::invalid_argument("config: key '" + entry.key +
                                        "' needs a value");
        if (entry.values.size() == 1) {
            args.push_back(flag + "=" + entry.values.front());
        } else {
            args.push_back(flag);
            args.insert(args.end(), entry.values.begin(), entry.values.end());
        }
    }
    return args;
}

void add_shape_options(CLI::App* cmd, cssp::SourceSpec& src) {
    cmd->add_option("--shape", src.shape,
                    "generated spectrum: flat_with_drops|poly|exp");
    cmd->add_option("--n", src.n, "spectrum size for --shape");
    cmd->add_option("--m", src.m, "ambient rows for --shape (default n)");
    cmd->add_option("--levels", src.levels, "flat_with_drops level values");
    cmd->add_option("--breaks", src.breaks,
                    "flat_with_drops 1-based first index of each next level");
    cmd->add_option("--rate", src.rate, "poly exponent p, or exp decay delta");
    cmd->add_option("--c1", src.c1, "decay prefactor lower bound");
    cmd->add_option("--c2", src.c2, "decay prefactor upper bound");
}

void add_source_options(CLI::App* cmd, cssp::SourceSpec& src) {
    cmd->add_option("--matrix", src.matrix_file,
                    "dense column matrix file (whitespace format)");
    cmd->add_option("--kernel-file", src.kernel_file,
                    "symmetric kernel matrix file (whitespace format)");
    cmd->add_option("--libsvm", src.libsvm_file, "libsvm data file");
    cmd->add_option("--kernel", src.kernel_kind,
                    "kernel over libsvm points: linear|rbf");
    cmd->add_option("--sigma", src.sigma, "rbf bandwidth");
    cmd->add_option("--spectrum-file", src.spectrum_file,
                    "eigenvalue list as a 1 x n or n x 1 matrix file");
    add_shape_options(cmd, src);
}

void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    fn(out);
}

std::string join_indices(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? " " : "") + cssp::csv_real(v[i]);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"column subset selection and Nystrom approximation harness",
                 "cssp"};
    app.require_subcommand(1);
    int rc = 0;
    std::string config_path;  // one subcommand parses per run

    // bounds
    auto* bounds = app.add_subcommand(
        "bounds", "bound curves and stable-rank profile as long-format CSV");
    cssp::SourceSpec bounds_src;
    std::vector<std::size_t> bounds_s;
    std::size_t bounds_kmin = 1, bounds_kmax = 0;
    double bounds_eps = 0.0;
    bool bounds_gate = false;
    std::string bounds_out;
    std::uint64_t bounds_seed = 0;
    add_config_option(bounds, config_path);
    add_source_options(bounds, bounds_src);
    bounds->add_option("--seed", bounds_seed, "shape draw seed");
    bounds->add_option("--s-list", bounds_s,
                       "orders s for phi/psi curves (default: 0..k_max-1)");
    bounds->add_option("--k-min", bounds_kmin, "first subset size");
    bounds->add_option("--k-max", bounds_kmax,
                       "last subset size (default min(rank-1, 60))");
    bounds->add_option("--eps", bounds_eps, "envelope oversampling epsilon");
    bounds->add_flag("--lemma2-gate", bounds_gate,
                     "restrict the envelope to the size-concentration window");
    bounds->add_option("--out", bounds_out, "output CSV path (default stdout)");
    bounds->callback([&]() {
        bounds_src.seed = bounds_seed;
        cssp::BoundsJob job;
        job.spectrum = cssp::resolve_spectrum(bounds_src);
        job.s_list = bounds_s;
        job.k_min = bounds_kmin;
        job.k_max = bounds_kmax;
        job.eps = bounds_eps;
        job.lemma2_gate = bounds_gate;
        with_output(bounds_out,
                    [&](std::ostream& out) { cssp::run_bounds(job, out); });
    });

    // experiment
    auto* exp = app.add_subcommand(
        "experiment", "approximation-factor sweep as per-(k, method) CSV");
    cssp::SourceSpec exp_src;
    std::vector<std::string> exp_methods;
    std::size_t exp_kmin = 1, exp_kmax = 0, exp_trials = 1000;
    std::uint64_t exp_seed = 0;
    double exp_env_eps = 0.0, exp_decay_rate = 0.0, exp_decay_gamma = 1.0;
    double exp_decay_c = cssp::kDecayDefaultC;
    bool exp_worst = false;
    std::string exp_decay_kind, exp_out;
    add_config_option(exp, config_path);
    add_source_options(exp, exp_src);
    exp->add_option("--method", exp_methods,
                    "methods to run: kdpp|greedy|brute_force (repeatable)");
    exp->add_option("--k-min", exp_kmin, "first subset size");
    exp->add_option("--k-max", exp_kmax,
                    "last subset size (default min(rank-1, 60))");
    exp->add_option("--trials", exp_trials, "Monte Carlo trials per stochastic cell");
    exp->add_option("--seed", exp_seed, "master seed (also seeds --shape)");
    auto* env_opt =
        exp->add_option("--overlay-eps", exp_env_eps,
                        "emit the master envelope column at this epsilon");
    exp->add_flag("--overlay-worst", exp_worst, "emit the k+1 worst-case column");
    exp->add_option("--overlay-decay-kind", exp_decay_kind,
                    "decay ceiling overlay: poly|exp");
    exp->add_option("--overlay-decay-rate", exp_decay_rate,
                    "decay overlay rate (p or delta)");
    exp->add_option("--overlay-decay-gamma", exp_decay_gamma,
                    "decay overlay gamma (>= 1)");
    exp->add_option("--overlay-decay-c", exp_decay_c,
                    "decay overlay absolute constant");
    exp->add_option("--out", exp_out, "output CSV path (default stdout)");
    exp->callback([&]() {
        exp_src.seed = exp_seed;
        cssp::ExperimentJob job{cssp::resolve_instance(exp_src)};
        for (const std::string& id : exp_methods)
            job.methods.push_back(cssp::method_from_id(id));
        job.k_min = exp_kmin;
        job.k_max = exp_kmax;
        job.trials = exp_trials;
        job.master_seed = exp_seed;
        if (env_opt->count() > 0) job.envelope_eps = exp_env_eps;
        job.worst_case_overlay = exp_worst;
        if (!exp_decay_kind.empty()) {
            cssp::DecayOverlay overlay;
            if (exp_decay_kind == "poly")
                overlay.kind = cssp::DecayKind::poly;
            else if (exp_decay_kind == "exp")
                overlay.kind = cssp::DecayKind::exponential;
            else
                throw std::invalid_argument(
                    "config: --overlay-decay-kind must be poly or exp");
            overlay.params = cssp::DecayParams{exp_decay_rate, exp_decay_gamma};
            overlay.c = exp_decay_c;
            job.decay = overlay;
        }
        with_output(exp_out,
                    [&](std::ostream& out) { cssp::run_experiment(job, out); });
    });

    // gen
    auto* gen = app.add_subcommand(
        "gen", "write a generated matrix plus its manifest");
    cssp::SourceSpec gen_src;
    std::string gen_type, gen_out, gen_manifest;
    std::vector<std::size_t> gen_l;
    double gen_delta = 0.1, gen_rho = 1e-2;
    std::size_t gen_m = 0;
    std::uint64_t gen_seed = 0;
    add_config_option(gen, config_path);
    gen->add_option("--type", gen_type, "lower-bound | shaped")->required();
    gen->add_option("--out", gen_out, "matrix output path")->required();
    gen->add_option("--manifest", gen_manifest,
                    "manifest path (default <out>.manifest)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--l", gen_l, "lower-bound block sizes");
    gen->add_option("--delta", gen_delta, "lower-bound target slack");
    gen->add_option("--rho", gen_rho, "lower-bound scale ratio");
    gen->add_option("--gen-m", gen_m,
                    "lower-bound ambient rows (default sum l_i + t)");
    add_shape_options(gen, gen_src);
    gen->callback([&]() {
        const std::string manifest_path =
            gen_manifest.empty() ? gen_out + ".manifest" : gen_manifest;
        if (gen_type == "lower-bound") {
            if (gen_l.empty())
                throw std::invalid_argument("config: --type lower-bound needs --l");
            cssp::LowerBoundSpec spec;
            spec.t = gen_l.size();
            spec.l = gen_l;
            spec.delta = gen_delta;
            spec.rho = gen_rho;
            std::size_t need = spec.t;
            for (std::size_t li : spec.l) need += li;
            const std::size_t m = gen_m == 0 ? need : gen_m;
            const auto inst = cssp::gen_lower_bound(spec, m, gen_seed);
            inst.a.write_whitespace(gen_out);
            with_output(manifest_path, [&](std::ostream& out) {
                cssp::write_kv_block(out,
                                     cssp::lower_bound_manifest(spec, m, gen_seed, inst));
            });
        } else if (gen_type == "shaped") {
            gen_src.seed = gen_seed;
            const cssp::GramInstance inst = cssp::resolve_instance(gen_src);
            inst.columns().write_whitespace(gen_out);
            cssp::KvBlock kv{{"type", "shaped"},
                             {"shape", gen_src.shape},
                             {"n", std::to_string(gen_src.n)},
                             {"m", std::to_string(inst.columns().rows())},
                             {"seed", std::to_string(gen_seed)}};
            with_output(manifest_path,
                        [&](std::ostream& out) { cssp::write_kv_block(out, kv); });
        } else {
            throw std::invalid_argument("config: --type must be lower-bound or shaped");
        }
    });

    // verify-lower
    auto* verify = app.add_subcommand(
        "verify-lower", "brute-force check of a lower-bound instance's targets");
    std::string verify_matrix, verify_manifest;
    std::vector<std::size_t> verify_ks;
    double verify_budget = cssp::kEnumBudgetDefault;
    add_config_option(verify, config_path);
    verify->add_option("--matrix", verify_matrix, "matrix file")->required();
    verify->add_option("--manifest", verify_manifest, "manifest file")->required();
    verify->add_option("--k", verify_ks,
                       "subset sizes to check (default: manifest list)");
    verify->add_option("--budget", verify_budget, "enumeration budget");
    verify->callback([&]() {
        std::ifstream mf(verify_manifest);
        if (!mf)
            throw std::runtime_error("cannot open manifest " + verify_manifest);
        const auto manifest =
            cssp::parse_lower_bound_manifest(cssp::read_kv_block(mf));
        const auto instance = cssp::GramInstance::from_columns(
            cssp::DenseMatrix::read_whitespace(verify_matrix));
        const auto report =
            cssp::run_verify_lower(instance, manifest, verify_ks, verify_budget);
        cssp::print_verify_report(report, std::cout);
        rc = report.all_pass ? 0 : 3;
    });

    // select
    auto* select = app.add_subcommand(
        "select", "run one selection method and report the subset");
    cssp::SourceSpec sel_src;
    std::string sel_method, sel_out;
    std::size_t sel_k = 0;
    std::uint64_t sel_seed = 0;
    double sel_budget = cssp::kEnumBudgetDefault;
    add_config_option(select, config_path);
    add_source_options(select, sel_src);
    select->add_option("--method", sel_method, "kdpp|greedy|brute_force")->required();
    select->add_option("--k", sel_k, "subset size")->required();
    select->add_option("--seed", sel_seed, "sampler seed (also seeds --shape)");
    select->add_option("--budget", sel_budget, "brute-force enumeration budget");
    select->add_option("--out", sel_out, "output path (default stdout)");
    select->callback([&]() {
        sel_src.seed = sel_seed;
        const cssp::GramInstance instance = cssp::resolve_instance(sel_src);
        const cssp::Method method = cssp::method_from_id(sel_method);
        cssp::SelectionResult res;
        switch (method) {
            case cssp::Method::greedy:
                res = cssp::greedy_select(instance, sel_k);
                break;
            case cssp::Method::brute_force:
                res = cssp::brute_force_optimum(instance, sel_k, sel_budget);
                break;
            case cssp::Method::kdpp:
                res = cssp::kdpp_select(instance, sel_k, sel_seed);
                break;
        }
        cssp::KvBlock kv{{"method", res.method_id},
                         {"k", std::to_string(sel_k)},
                         {"error", cssp::csv_real(res.error)},
                         {"indices", join_indices(res.indices)}};
        if (!res.per_step_errors.empty())
            kv.emplace_back("per_step_errors", join_reals(res.per_step_errors));
        if (res.seed) kv.emplace_back("seed", std::to_string(*res.seed));
        with_output(sel_out,
                    [&](std::ostream& out) { cssp::write_kv_block(out, kv); });
    });

    // sample
    auto* sample = app.add_subcommand(
        "sample", "draw subsets from the DPP or k-DPP over the instance");
    cssp::SourceSpec smp_src;
    std::size_t smp_k = 0, smp_draws = 1;
    double smp_alpha = 0.0;
    std::uint64_t smp_seed = 0;
    std::string smp_out;
    add_config_option(sample, config_path);
    add_source_options(sample, smp_src);
    auto* alpha_opt = sample->add_option(
        "--alpha", smp_alpha, "rescaling of the random-size DPP (picks DPP mode)");
    auto* k_opt =
        sample->add_option("--k", smp_k, "fixed sample size (picks k-DPP mode)");
    sample->add_option("--draws", smp_draws, "number of draws");
    sample->add_option("--seed", smp_seed, "master seed (also seeds --shape)");
    sample->add_option("--out", smp_out, "output path (default stdout)");
    sample->callback([&]() {
        if ((alpha_opt->count() > 0) == (k_opt->count() > 0))
            throw std::invalid_argument(
                "config: pass exactly one of --alpha (DPP) or --k (k-DPP)");
        if (smp_draws < 1)
            throw std::invalid_argument("config: --draws must be >= 1");
        smp_src.seed = smp_seed;
        const cssp::GramInstance instance = cssp::resolve_instance(smp_src);
        const bool fixed = k_opt->count() > 0;
        const cssp::DppConfig config =
            fixed ? cssp::DppConfig::with_size(instance.eigensystem(), smp_k)
                  : cssp::DppConfig::random_size(instance.eigensystem(), smp_alpha);

        cssp::KvBlock kv{{"sampler", fixed ? "kdpp" : "dpp"}};
        if (fixed) {
            kv.emplace_back("k", std::to_string(smp_k));
            if (smp_k < instance.spectrum().rank())
                kv.emplace_back("expected_error",
                                cssp::csv_real(cssp::kdpp_expected_error(
                                    instance.spectrum(), smp_k)));
        } else {
            kv.emplace_back("alpha", cssp::csv_real(smp_alpha));
            kv.emplace_back("expected_size",
                            cssp::csv_real(cssp::dpp_expected_size(
                                instance.spectrum(), smp_alpha)));
            kv.emplace_back("expected_error",
                            cssp::csv_real(cssp::dpp_expected_error(
                                instance.spectrum(), smp_alpha)));
        }
        kv.emplace_back("seed", std::to_string(smp_seed));
        kv.emplace_back("draws", std::to_string(smp_draws));
        for (std::size_t d = 0; d < smp_draws; ++d) {
            const cssp::SubsetSample s =
                fixed ? cssp::sample_kdpp(
                            config, cssp::SplitMix64::derive_stream(smp_seed, d))
                      : cssp::sample_dpp(
                            config, cssp::SplitMix64::derive_stream(smp_seed, d));
            kv.emplace_back("draw_" + std::to_string(d), join_indices(s.indices));
        }
        with_output(smp_out,
                    [&](std::ostream& out) { cssp::write_kv_block(out, kv); });
    });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config(app, std::move(args));
        std::reverse(args.begin(), args.end());  // CLI11 vector-parse order
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const cssp::EnumerationBudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
