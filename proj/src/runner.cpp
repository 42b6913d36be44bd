#include "chainlab/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "chainlab/io.hpp"
#include "chainlab/orlicz.hpp"
#include "chainlab/version.hpp"

namespace chainlab {

namespace {

struct GlobalOptions {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int threads = 1;
};

std::optional<std::uint64_t> env_seed() {
    const char* value = std::getenv("CHAINING_LAB_SEED");
    if (value == nullptr) return std::nullopt;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end == value || *end != '\0') {
        throw ConfigInvalid("CHAINING_LAB_SEED: not an unsigned integer: '" + std::string(value) +
                            "'");
    }
    return static_cast<std::uint64_t>(parsed);
}

// Precedence: --seed flag, then the config file, then CHAINING_LAB_SEED.
std::uint64_t resolve_seed(const GlobalOptions& global, bool config_has_seed,
                           std::uint64_t config_seed) {
    if (global.seed_set) return global.seed;
    if (config_has_seed) return config_seed;
    if (auto env = env_seed()) return *env;
    return 0;
}

// Output payload + manifest. JSON payloads also go to stdout; tabular CSV
// only goes to a file unless no --out was given.
void emit_outputs(const GlobalOptions& global, const std::string& payload,
                  const std::string& digest_source, std::uint64_t seed,
                  std::chrono::steady_clock::time_point start, bool payload_to_stdout) {
    if (payload_to_stdout) {
        std::cout << payload << "\n";
    }
    if (global.out.empty()) {
        if (!payload_to_stdout) std::cout << payload;
        return;
    }
    atomic_write_file(global.out, payload);

    const double duration =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    JsonObjectWriter manifest;
    manifest.add_string("config_digest", content_digest(digest_source));
    manifest.add_string("tool_version", kToolVersion);
    manifest.add_number("duration_seconds", duration);
    manifest.add_integer("seed", seed);
    manifest.add_raw("outputs", JsonObjectWriter::render_string_array({global.out}));
    atomic_write_file(global.out + ".manifest.json", manifest.dump() + "\n");
}

PointSubset subset_or_full(const std::vector<int>& indices, int space_size) {
    return indices.empty() ? PointSubset::full(space_size) : PointSubset(indices);
}

struct GammaArgs {
    std::string space_path;
    std::vector<int> subset;
    double alpha = 2.0;
    std::string method = "exact";
    int cap = 12;
};

int run_gamma(const GlobalOptions& global, const GammaArgs& args,
              std::chrono::steady_clock::time_point start) {
    const FiniteMetricSpace space = load_space_file(args.space_path);
    const PointSubset subset = subset_or_full(args.subset, space.size());

    GammaResult result;
    if (args.method == "exact") {
        GammaExactOptions options;
        options.cap = args.cap;
        options.threads = global.threads;
        result = gamma_exact(space, subset, args.alpha, options);
    } else if (args.method == "greedy") {
        result = gamma_greedy(space, subset, args.alpha);
    } else {
        throw ConfigInvalid("--method must be 'exact' or 'greedy'");
    }

    JsonObjectWriter out;
    out.add_number("gamma", result.value);
    out.add_number("alpha", args.alpha);
    out.add_string("method", args.method);
    out.add_integer("witness", static_cast<std::uint64_t>(result.witness));
    out.add_string("witness_label", space.label(result.witness));
    out.add_integer("subset_size", static_cast<std::uint64_t>(subset.size()));
    out.add_integer("levels", static_cast<std::uint64_t>(result.sequence.levels.size()));

    std::ostringstream digest;
    digest << "gamma " << args.space_path << " alpha=" << format_g17(args.alpha)
           << " method=" << args.method;
    for (int i : subset.members()) digest << " " << i;
    emit_outputs(global, out.dump() + "\n", digest.str(), 0, start, true);
    return 0;
}

struct MergeArgs {
    std::string space_path;
    std::vector<int> t1;
    std::vector<int> t2;
    double alpha = 2.0;
    int cap = 12;
};

AdmissibleSequence sequence_for(const FiniteMetricSpace& space, const PointSubset& subset,
                                double alpha, int cap, int threads) {
    if (subset.size() <= cap) {
        GammaExactOptions options;
        options.cap = cap;
        options.threads = threads;
        return gamma_exact(space, subset, alpha, options).sequence;
    }
    return gamma_greedy(space, subset, alpha).sequence;
}

int run_merge(const GlobalOptions& global, const MergeArgs& args,
              std::chrono::steady_clock::time_point start) {
    const FiniteMetricSpace space = load_space_file(args.space_path);
    if (args.t1.empty() || args.t2.empty()) {
        throw ConfigInvalid("--t1 and --t2 must be nonempty index lists");
    }
    const PointSubset t1(args.t1);
    const PointSubset t2(args.t2);
    const AdmissibleSequence seq_a = sequence_for(space, t1, args.alpha, args.cap, global.threads);
    const AdmissibleSequence seq_b = sequence_for(space, t2, args.alpha, args.cap, global.threads);
    const SubadditivityCertificate cert = subadditivity_certificate(space, t1, seq_a, t2, seq_b);

    JsonObjectWriter out;
    out.add_number("merged_value", cert.merged_value);
    out.add_number("value_A", cert.value_a);
    out.add_number("value_B", cert.value_b);
    out.add_number("diameter_union", cert.diameter_union);
    out.add_number("alpha", cert.alpha);
    out.add_number("construction_bound", cert.construction_bound);
    out.add_number("lemma_bound_3", cert.lemma_bound_3);
    if (cert.lemma_bound_9) {
        out.add_number("lemma_bound_9", *cert.lemma_bound_9);
    }
    out.add_raw("construction_bound_holds", "true");
    out.add_raw("lemma_bound_3_holds",
                cert.merged_value <= cert.lemma_bound_3 ? "true" : "false");
    if (cert.lemma_bound_9) {
        out.add_raw("lemma_bound_9_holds",
                    cert.merged_value <= *cert.lemma_bound_9 ? "true" : "false");
    }

    std::ostringstream digest;
    digest << "merge " << args.space_path << " alpha=" << format_g17(args.alpha) << " t1=";
    for (int i : t1.members()) digest << i << ",";
    digest << " t2=";
    for (int i : t2.members()) digest << i << ",";
    emit_outputs(global, out.dump() + "\n", digest.str(), 0, start, true);
    return 0;
}

struct OrliczArgs {
    std::string samples_path;
    double alpha = 2.0;
    double tol = 1e-9;
};

int run_orlicz(const GlobalOptions& global, const OrliczArgs& args,
               std::chrono::steady_clock::time_point start) {
    const std::vector<double> samples = load_samples_file(args.samples_path);
    const OrliczEstimate estimate = psi_alpha_empirical(samples, args.alpha, args.tol);

    JsonObjectWriter out;
    out.add_number("norm", estimate.norm_value);
    out.add_number("alpha", estimate.alpha);
    out.add_integer("n", estimate.sample_size);

    std::ostringstream digest;
    digest << "orlicz " << args.samples_path << " alpha=" << format_g17(args.alpha)
           << " tol=" << format_g17(args.tol);
    emit_outputs(global, out.dump() + "\n", digest.str(), 0, start, true);
    return 0;
}

int run_simulate_tail(const GlobalOptions& global, const std::string& config_path,
                      std::chrono::steady_clock::time_point start) {
    const std::string text = read_text_file(config_path);
    TailConfig config = parse_tail_config(text);
    config.seed = resolve_seed(global, config.seed_set, config.seed);
    const TailReport report = tail_experiment(config, global.threads);
    emit_outputs(global, tail_report_csv(report), text, config.seed, start, false);
    return 0;
}

int run_simulate_covariance(const GlobalOptions& global, const std::string& config_path,
                            std::chrono::steady_clock::time_point start) {
    const std::string text = read_text_file(config_path);
    CovarianceConfig config = parse_covariance_config(text);
    config.seed = resolve_seed(global, config.seed_set, config.seed);
    const TailReport report = corollary_experiment(config, global.threads);
    emit_outputs(global, tail_report_csv(report), text, config.seed, start, false);
    return 0;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

int run_rate(const GlobalOptions& global, const std::string& report_path,
             std::chrono::steady_clock::time_point start) {
    const std::string text = read_text_file(report_path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigInvalid("report: empty CSV");
    const std::vector<std::string> header = split_csv_line(line);
    int n_col = -1, level_col = -1, quantile_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "n") n_col = static_cast<int>(i);
        if (header[i] == "level") level_col = static_cast<int>(i);
        if (header[i] == "quantile") quantile_col = static_cast<int>(i);
    }
    if (n_col < 0 || level_col < 0 || quantile_col < 0) {
        throw ConfigInvalid("report: CSV needs n, level and quantile columns");
    }

    std::vector<std::pair<int, double>> medians;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() <= static_cast<std::size_t>(std::max({n_col, level_col, quantile_col}))) {
            throw ConfigInvalid("report: short CSV row '" + line + "'");
        }
        try {
            if (std::stod(fields[static_cast<std::size_t>(level_col)]) != 0.5) continue;
            medians.emplace_back(std::stoi(fields[static_cast<std::size_t>(n_col)]),
                                 std::stod(fields[static_cast<std::size_t>(quantile_col)]));
        } catch (const std::exception&) {
            throw ConfigInvalid("report: malformed CSV row '" + line + "'");
        }
    }
    const RateFit fit = rate_regression(medians);

    JsonObjectWriter out;
    out.add_number("slope", fit.slope);
    out.add_number("stderr", fit.std_error);
    out.add_integer("points", static_cast<std::uint64_t>(fit.points));
    emit_outputs(global, out.dump() + "\n", text, 0, start, true);
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("chainlab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
    const auto start = std::chrono::steady_clock::now();

    CLI::App app{"generic-chaining functionals, Orlicz norms and quadratic-process "
                 "concentration experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    auto* seed_opt = app.add_option("--seed", global.seed, "master seed (overrides config)");
    app.add_option("--out", global.out, "output file path (manifest written alongside)");
    app.add_option("--threads", global.threads, "worker threads; never changes results")
        ->check(CLI::Range(1, 1024));

    GammaArgs gamma_args;
    auto* gamma_cmd = app.add_subcommand("gamma", "gamma_alpha of a metric-space subset");
    gamma_cmd->add_option("--space", gamma_args.space_path, "metric space JSON file")->required();
    gamma_cmd->add_option("--subset", gamma_args.subset, "point indices (default: all)");
    gamma_cmd->add_option("--alpha", gamma_args.alpha, "alpha >= 1 (default 2)");
    gamma_cmd->add_option("--method", gamma_args.method, "exact|greedy (default exact)");
    gamma_cmd->add_option("--cap", gamma_args.cap, "exact-enumeration cap (default 12)");

    MergeArgs merge_args;
    auto* merge_cmd =
        app.add_subcommand("merge", "merge admissible sequences and certify subadditivity");
    merge_cmd->add_option("--space", merge_args.space_path, "metric space JSON file")->required();
    merge_cmd->add_option("--t1", merge_args.t1, "indices of T1")->required();
    merge_cmd->add_option("--t2", merge_args.t2, "indices of T2")->required();
    merge_cmd->add_option("--alpha", merge_args.alpha, "alpha >= 1 (default 2)");
    merge_cmd->add_option("--cap", merge_args.cap, "exact gamma cap per side (default 12)");

    OrliczArgs orlicz_args;
    auto* orlicz_cmd = app.add_subcommand("orlicz", "empirical psi_alpha norm of samples");
    orlicz_cmd->add_option("--samples", orlicz_args.samples_path, "newline-delimited decimals")
        ->required();
    orlicz_cmd->add_option("--alpha", orlicz_args.alpha, "alpha >= 1")->required();
    orlicz_cmd->add_option("--tol", orlicz_args.tol, "relative bisection tolerance");

    std::string tail_config_path;
    auto* tail_cmd = app.add_subcommand("simulate-tail", "quadratic-process tail experiment");
    tail_cmd->add_option("--config", tail_config_path, "experiment config JSON")->required();

    std::string cov_config_path;
    auto* cov_cmd =
        app.add_subcommand("simulate-covariance", "sample-covariance corollary experiment");
    cov_cmd->add_option("--config", cov_config_path, "experiment config JSON")->required();

    std::string rate_report_path;
    auto* rate_cmd = app.add_subcommand("rate", "log-log rate regression of a report CSV");
    rate_cmd->add_option("--report", rate_report_path, "CSV produced by simulate-*")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    global.seed_set = seed_opt->count() > 0;

    try {
        if (gamma_cmd->parsed()) return run_gamma(global, gamma_args, start);
        if (merge_cmd->parsed()) return run_merge(global, merge_args, start);
        if (orlicz_cmd->parsed()) return run_orlicz(global, orlicz_args, start);
        if (tail_cmd->parsed()) return run_simulate_tail(global, tail_config_path, start);
        if (cov_cmd->parsed()) return run_simulate_covariance(global, cov_config_path, start);
        if (rate_cmd->parsed()) return run_rate(global, rate_report_path, start);
        throw UnknownSubcommand("no subcommand given");
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace chainlab
