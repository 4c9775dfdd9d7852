// fahtp_cli: fit FAHTP to CSV data or run the simulation experiments.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 solver error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fahtp/experiment.hpp>
#include <fahtp/fit.hpp>

namespace {

int exit_code(fahtp::ErrorCode code)
{
    using fahtp::ErrorCode;
    switch (code) {
        case ErrorCode::invalid_argument: return 1;
        case ErrorCode::parse_error:
        case ErrorCode::dimension_mismatch:
        case ErrorCode::io_error:
        case ErrorCode::degenerate_column: return 2;
        default: return 3;
    }
}

std::string text(double v) { return fahtp::io::format_double(v); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sparse regression with hard thresholding pursuit and tuning-free model selection"};
    app.require_subcommand(1);

    // Shared solver settings; unset options keep each command's defaults.
    std::optional<long> s_max;
    std::optional<double> kappa, k_const;
    std::optional<int> max_iter;
    std::optional<std::uint64_t> seed;
    bool fixed_iters = false;
    unsigned jobs = 1;
    std::string out;

    auto add_solver_flags = [&](CLI::App* cmd) {
        cmd->add_option("--s-max", s_max, "Largest model size on the path")->check(CLI::PositiveNumber);
        cmd->add_option("--kappa", kappa, "Minimum-signal ratio threshold (default 2)");
        cmd->add_option("--k-const", k_const, "Penalty constant K of the information criterion (default 3)");
        cmd->add_option("--max-iter", max_iter, "HTP iteration limit (default 100)")->check(CLI::PositiveNumber);
        cmd->add_flag("--fixed-iters", fixed_iters, "Run exactly --max-iter HTP steps without the stop rule");
        cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* fit = app.add_subcommand("fit", "Fit FAHTP to X and y given as CSV files");
    std::string x_path, y_path;
    bool header = false, no_normalize = false;
    std::optional<double> split;
    fit->add_option("x", x_path, "CSV of the design, n rows by p columns")->required();
    fit->add_option("y", y_path, "CSV of the response, n rows by 1 column")->required();
    fit->add_flag("--header", header, "Both files start with a header row");
    fit->add_flag("--no-normalize", no_normalize, "Use the columns as given instead of scaling to norm sqrt(n)");
    fit->add_option("--split", split, "Hold out this fraction of rows and report test MSE")
        ->check(CLI::Range(0.0, 1.0));
    fit->add_option("--seed", seed, "Seed of the train/test split (default 0)");
    fit->add_option("--out", out, "Report CSV path (default: standard output)");
    add_solver_flags(fit);

    auto* exp = app.add_subcommand("experiment", "Run a simulation experiment");
    std::string name, config;
    std::optional<int> replications;
    std::vector<std::string> sets;
    exp->add_option("name", name, "min_signal_path, adaptive_benefit or sample_size_sweep");
    exp->add_option("--config", config, "Key-value configuration file")->check(CLI::ExistingFile);
    exp->add_option("--set", sets, "Override one configuration key, as key=value (repeatable)");
    exp->add_option("--replications", replications, "Replications per sweep point")->check(CLI::PositiveNumber);
    exp->add_option("--seed", seed, "Base seed");
    exp->add_option("--out", out, "Output directory")->required();
    add_solver_flags(exp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*fit) {
            fahtp::FitOptions opts;
            if (s_max) opts.s_max = *s_max;
            if (kappa) opts.kappa = *kappa;
            if (k_const) opts.k_const = *k_const;
            if (max_iter) opts.max_iter = *max_iter;
            if (seed) opts.seed = *seed;
            opts.fixed_iterations = fixed_iters;
            opts.normalize = !no_normalize;
            opts.test_fraction = split;
            opts.jobs = jobs;
            const auto report = fahtp::fit_csv(x_path, y_path, header, opts);
            if (out.empty()) {
                fahtp::write_fit_report("/dev/stdout", report);
            } else {
                fahtp::write_fit_report(out, report);
                std::cerr << "support size " << report.selection.final_s << ", report written to " << out << "\n";
            }
            return 0;
        }

        std::vector<fahtp::io::Setting> file;
        if (!config.empty()) file = fahtp::io::read_key_values(config);
        std::vector<fahtp::io::Setting> overrides;
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
                return 1;
            }
            overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (replications) overrides.emplace_back("replications", std::to_string(*replications));
        if (seed) overrides.emplace_back("base_seed", std::to_string(*seed));
        if (s_max) overrides.emplace_back("s_max", std::to_string(*s_max));
        if (kappa) overrides.emplace_back("kappa", text(*kappa));
        if (k_const) overrides.emplace_back("k_const", text(*k_const));
        if (max_iter) overrides.emplace_back("max_iter", std::to_string(*max_iter));
        if (fixed_iters) overrides.emplace_back("fixed_iters", "true");

        std::optional<fahtp::ExperimentKind> kind;
        if (!name.empty()) kind = fahtp::parse_experiment_kind(name);
        const auto spec = fahtp::resolve_spec(kind, file, overrides);
        const auto outcome = fahtp::cmd_experiment(spec, out, jobs);
        std::size_t failures = 0;
        for (const auto& r : outcome.replications)
            for (const auto& m : r.methods) failures += m.failed ? 1 : 0;
        std::cerr << fahtp::to_string(spec.kind) << ": " << outcome.replications.size() << " replications, "
                  << failures << " failed fits, outputs in " << out << "\n";
        return 0;
    } catch (const fahtp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
}
