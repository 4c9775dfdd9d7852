#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "datagen.hpp"
#include "io/csv.hpp"
#include "io/keyvalue.hpp"
#include "io/svg.hpp"
#include "metrics.hpp"
#include "selection.hpp"

namespace fahtp {

inline constexpr const char* artifact_version = "fahtp 1.0.0";
inline constexpr int schema_version = 1;

enum class ExperimentKind { min_signal_path, adaptive_benefit, sample_size_sweep };

inline const char* to_string(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::min_signal_path: return "min_signal_path";
        case ExperimentKind::adaptive_benefit: return "adaptive_benefit";
        case ExperimentKind::sample_size_sweep: return "sample_size_sweep";
    }
    return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string& s)
{
    for (auto k : {ExperimentKind::min_signal_path, ExperimentKind::adaptive_benefit,
                   ExperimentKind::sample_size_sweep}) {
        if (s == to_string(k)) return k;
    }
    detail::fail(ErrorCode::invalid_argument,
                 "unknown experiment '" + s + "' (min_signal_path, adaptive_benefit, sample_size_sweep)");
}

/// Resolved experiment configuration. Field names match the configuration-file keys.
///
/// Sweep variable per experiment:
///   min_signal_path    none (one point); the path runs to path_max with fixed iterations
///   adaptive_benefit   k, coefficient magnitudes uniform on [k/4 u, coef_hi u]
///   sample_size_sweep  n
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::adaptive_benefit;
    int replications = 50;
    std::uint64_t base_seed = 1;

    Index n = 300;
    Index p = 1000;
    Index s_star = 10;
    std::string design = "iid"; ///< iid | ar1
    double rho = 0.5;
    std::string coef_law = "threshold"; ///< threshold | two_sided
    double coef_lo = 2.0;
    double coef_hi = 10.0;
    bool random_sign = true;
    bool two_point = false;
    std::string noise = "gaussian"; ///< gaussian | snr
    double sigma = 1.0;
    double snr = 10.0;

    std::vector<double> sweep;
    /// Largest model size FAHTP selects from; 0 means min(2 s_star, default_s_max(n, p)).
    Index s_max = 0;
    /// Length of the recorded path in min_signal_path.
    Index path_max = 30;
    double kappa = default_kappa;
    double k_const = default_k_const;
    int max_iter = 100;
    bool fixed_iters = false;
};

inline const char* sweep_variable(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::adaptive_benefit: return "k";
        case ExperimentKind::sample_size_sweep: return "n";
        default: return "none";
    }
}

inline ExperimentSpec default_spec(ExperimentKind kind)
{
    ExperimentSpec s;
    s.kind = kind;
    switch (kind) {
        case ExperimentKind::min_signal_path:
            s.max_iter = 20;
            s.fixed_iters = true;
            s.sweep = {0.0};
            break;
        case ExperimentKind::adaptive_benefit:
            s.p = 2000;
            s.s_star = 30;
            s.coef_hi = 4.0;
            for (int k = 1; k <= 16; ++k) s.sweep.push_back(k);
            break;
        case ExperimentKind::sample_size_sweep:
            s.replications = 100;
            s.p = 2000;
            s.s_star = 30;
            s.design = "ar1";
            s.coef_law = "two_sided";
            s.coef_lo = 1.0;
            s.coef_hi = 5.0;
            s.noise = "snr";
            for (int n = 300; n <= 1300; n += 100) s.sweep.push_back(n);
            break;
    }
    return s;
}

namespace detail {

/// Keys that an experiment's configuration may set.
inline const std::vector<std::string>& setting_keys(ExperimentKind kind)
{
    static const std::vector<std::string> path_keys = {
        "replications", "base_seed", "n", "p", "s_star", "design", "rho", "coef_law", "coef_lo", "coef_hi",
        "random_sign", "two_point", "noise", "sigma", "snr", "s_max", "path_max", "kappa", "k_const",
        "max_iter", "fixed_iters"};
    static const std::vector<std::string> benefit_keys = {
        "replications", "base_seed", "n", "p", "s_star", "design", "rho", "coef_hi", "two_point",
        "noise", "sigma", "snr", "sweep", "s_max", "kappa", "k_const", "max_iter", "fixed_iters"};
    static const std::vector<std::string> sweep_keys = {
        "replications", "base_seed", "p", "s_star", "design", "rho", "coef_law", "coef_lo", "coef_hi",
        "random_sign", "two_point", "noise", "sigma", "snr", "sweep", "s_max", "kappa", "k_const",
        "max_iter", "fixed_iters"};
    switch (kind) {
        case ExperimentKind::min_signal_path: return path_keys;
        case ExperimentKind::adaptive_benefit: return benefit_keys;
        default: return sweep_keys;
    }
}

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (value.empty() || ec != std::errc() || ptr != end) {
        fail(ErrorCode::invalid_argument, "setting '" + key + "': '" + value + "' is not a valid number");
    }
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(ErrorCode::invalid_argument, "setting '" + key + "': expected true or false, got '" + value + "'");
}

inline std::string parse_choice(const std::string& key, const std::string& value,
                                std::initializer_list<const char*> allowed)
{
    for (const char* a : allowed)
        if (value == a) return value;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    fail(ErrorCode::invalid_argument, "setting '" + key + "': '" + value + "' is not one of " + list);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto field = io::detail::trim(std::string_view(value).substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        out.push_back(parse_number<double>(key, std::string(field)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string join(const std::vector<double>& values)
{
    std::string out;
    for (double v : values) out += (out.empty() ? "" : ",") + io::format_double(v);
    return out;
}

} // namespace detail

/// Applies one key = value setting. Keys outside the experiment's schema are rejected.
inline void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value)
{
    using namespace detail;
    const auto& keys = setting_keys(spec.kind);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        fail(ErrorCode::invalid_argument,
             "setting '" + key + "' does not apply to experiment " + to_string(spec.kind));
    }
    if (key == "replications") spec.replications = parse_number<int>(key, value);
    else if (key == "base_seed") spec.base_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "n") spec.n = parse_number<Index>(key, value);
    else if (key == "p") spec.p = parse_number<Index>(key, value);
    else if (key == "s_star") spec.s_star = parse_number<Index>(key, value);
    else if (key == "design") spec.design = parse_choice(key, value, {"iid", "ar1"});
    else if (key == "rho") spec.rho = parse_number<double>(key, value);
    else if (key == "coef_law") spec.coef_law = parse_choice(key, value, {"threshold", "two_sided"});
    else if (key == "coef_lo") spec.coef_lo = parse_number<double>(key, value);
    else if (key == "coef_hi") spec.coef_hi = parse_number<double>(key, value);
    else if (key == "random_sign") spec.random_sign = parse_bool(key, value);
    else if (key == "two_point") spec.two_point = parse_bool(key, value);
    else if (key == "noise") spec.noise = parse_choice(key, value, {"gaussian", "snr"});
    else if (key == "sigma") spec.sigma = parse_number<double>(key, value);
    else if (key == "snr") spec.snr = parse_number<double>(key, value);
    else if (key == "sweep") spec.sweep = parse_list(key, value);
    else if (key == "s_max") spec.s_max = parse_number<Index>(key, value);
    else if (key == "path_max") spec.path_max = parse_number<Index>(key, value);
    else if (key == "kappa") spec.kappa = parse_number<double>(key, value);
    else if (key == "k_const") spec.k_const = parse_number<double>(key, value);
    else if (key == "max_iter") spec.max_iter = parse_number<int>(key, value);
    else if (key == "fixed_iters") spec.fixed_iters = parse_bool(key, value);
}

/// The resolved configuration as key = value pairs, in schema order.
inline std::vector<io::Setting> settings_of(const ExperimentSpec& s)
{
    const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    const std::map<std::string, std::string> all = {
        {"replications", std::to_string(s.replications)}, {"base_seed", std::to_string(s.base_seed)},
        {"n", std::to_string(s.n)}, {"p", std::to_string(s.p)}, {"s_star", std::to_string(s.s_star)},
        {"design", s.design}, {"rho", io::format_double(s.rho)}, {"coef_law", s.coef_law},
        {"coef_lo", io::format_double(s.coef_lo)}, {"coef_hi", io::format_double(s.coef_hi)},
        {"random_sign", b(s.random_sign)}, {"two_point", b(s.two_point)}, {"noise", s.noise},
        {"sigma", io::format_double(s.sigma)}, {"snr", io::format_double(s.snr)},
        {"sweep", detail::join(s.sweep)}, {"s_max", std::to_string(s.s_max)},
        {"path_max", std::to_string(s.path_max)}, {"kappa", io::format_double(s.kappa)},
        {"k_const", io::format_double(s.k_const)}, {"max_iter", std::to_string(s.max_iter)},
        {"fixed_iters", b(s.fixed_iters)}};
    std::vector<io::Setting> out = {{"experiment", to_string(s.kind)}};
    for (const auto& key : detail::setting_keys(s.kind)) out.emplace_back(key, all.at(key));
    return out;
}

/// Model-size bound used for selection at sample size n.
inline Index selection_s_max(const ExperimentSpec& spec, Index n)
{
    const Index cap = std::min(n, spec.p);
    if (spec.s_max > 0) return std::min(spec.s_max, cap);
    return std::max<Index>(1, std::min({2 * spec.s_star, default_s_max(n, spec.p), cap}));
}

/// Scenario of one sweep point. The seed is filled in per replication.
inline ScenarioConfig scenario_at(const ExperimentSpec& spec, double point)
{
    ScenarioConfig c;
    c.n = spec.kind == ExperimentKind::sample_size_sweep ? static_cast<Index>(point) : spec.n;
    c.p = spec.p;
    c.s_star = spec.s_star;
    if (spec.design == "ar1") c.design = Ar1{spec.rho};
    if (spec.kind == ExperimentKind::adaptive_benefit) {
        c.coef_law = ThresholdUniform{point / 4.0, spec.coef_hi};
    } else if (spec.coef_law == "two_sided") {
        c.coef_law = TwoSidedUniform{spec.coef_lo, spec.coef_hi, spec.random_sign};
    } else {
        c.coef_law = ThresholdUniform{spec.coef_lo, spec.coef_hi};
    }
    c.two_point = spec.two_point;
    if (spec.noise == "snr") c.noise = SnrCalibrated{spec.snr};
    else c.noise = GaussianNoise{spec.sigma};
    return c;
}

inline void validate(const ExperimentSpec& spec)
{
    using detail::require;
    require(spec.replications >= 1, "replications must be at least 1");
    require(!spec.sweep.empty(), "sweep must list at least one point");
    require(spec.kappa > 1.0, "kappa must exceed 1");
    require(spec.max_iter >= 1, "max_iter must be at least 1");
    require(spec.s_max >= 0, "s_max must be nonnegative");
    for (double v : spec.sweep) {
        if (spec.kind == ExperimentKind::sample_size_sweep) {
            require(v >= 1 && v == std::floor(v), "sample sizes in sweep must be positive integers");
        }
        if (spec.kind == ExperimentKind::adaptive_benefit) require(v >= 0, "k in sweep must be nonnegative");
        validate(scenario_at(spec, v));
    }
    if (spec.kind == ExperimentKind::min_signal_path) {
        require(spec.path_max >= 1 && spec.path_max <= std::min(spec.n, spec.p), "path_max outside [1, min(n, p)]");
    }
}

/// Defaults, then the file's settings, then command-line settings. A file must carry
/// schema_version; its experiment key is used only when no kind is given explicitly.
inline ExperimentSpec resolve_spec(std::optional<ExperimentKind> kind, const std::vector<io::Setting>& file,
                                   const std::vector<io::Setting>& overrides)
{
    std::optional<ExperimentKind> from_file;
    bool versioned = file.empty();
    for (const auto& [k, v] : file) {
        if (k == "experiment") from_file = parse_experiment_kind(v);
        if (k == "schema_version") {
            if (v != std::to_string(schema_version)) {
                detail::fail(ErrorCode::invalid_argument, "unsupported schema_version " + v);
            }
            versioned = true;
        }
    }
    if (!versioned) detail::fail(ErrorCode::invalid_argument, "configuration file lacks schema_version");
    if (!kind) kind = from_file;
    if (!kind) detail::fail(ErrorCode::invalid_argument, "no experiment named");

    ExperimentSpec spec = default_spec(*kind);
    for (const auto& [k, v] : file)
        if (k != "experiment" && k != "schema_version") apply_setting(spec, k, v);
    for (const auto& [k, v] : overrides) apply_setting(spec, k, v);
    validate(spec);
    return spec;
}

inline std::uint64_t replication_seed(std::uint64_t base_seed, double point, int replication)
{
    return CounterRng::derive(base_seed, {std::bit_cast<std::uint64_t>(point + 0.0),
                                          static_cast<std::uint64_t>(replication)});
}

struct MethodOutcome {
    std::string method;
    bool failed = false;
    std::string error;
    Index size = 0;
    EvalReport eval;
};

struct ReplicationOutcome {
    double point = 0.0;
    int replication = 0;
    std::uint64_t seed = 0;
    double beta_min = 0.0;
    double sigma = 0.0;
    Index s_max = 0;
    bool selected = false;
    Index s_hat = 0;
    std::optional<Index> s_tilde;
    double sigma_hat = 0.0;
    std::vector<MethodOutcome> methods;
    /// min_signal_path only: lambda_min(s) and IC(s), and lambda_{s,t} per s.
    std::vector<double> lambda_path;
    std::vector<double> ic_path;
    std::vector<std::vector<double>> lambda_trace;
};

inline ReplicationOutcome run_replication(const ExperimentSpec& spec, double point, int replication)
{
    ReplicationOutcome out;
    out.point = point;
    out.replication = replication;
    out.seed = replication_seed(spec.base_seed, point, replication);
    ScenarioConfig cfg = scenario_at(spec, point);
    cfg.seed = out.seed;
    const Scenario sc = generate_scenario(cfg);
    out.beta_min = sc.truth.beta_min;
    out.sigma = sc.truth.sigma;
    out.s_max = selection_s_max(spec, cfg.n);

    const bool record = spec.kind == ExperimentKind::min_signal_path;
    const Index path_len = record ? std::max(out.s_max, std::min(spec.path_max, std::min(cfg.n, cfg.p))) : out.s_max;

    auto outcome = [&](const char* name, const SparseEstimate& est) {
        MethodOutcome m;
        m.method = name;
        m.size = static_cast<Index>(est.support.size());
        m.eval = evaluate(est, sc.truth);
        return m;
    };
    auto failure = [](const char* name, const Error& e) {
        MethodOutcome m;
        m.method = name;
        m.failed = true;
        m.error = to_string(e.code());
        return m;
    };

    try {
        PathOptions po;
        po.max_iter = spec.max_iter;
        po.fixed_iterations = spec.fixed_iters;
        po.trace = record;
        const SolutionPath path = build_path(sc.data, path_len, spec.k_const, po);
        if (record) {
            for (const auto& e : path.entries) {
                out.lambda_path.push_back(e.lambda_min);
                out.ic_path.push_back(e.ic);
                std::vector<double> trace;
                for (const auto& rec : e.trace.iterations) trace.push_back(rec.min_signal);
                out.lambda_trace.push_back(std::move(trace));
            }
        }
        const SolutionPath sel_path = path_len > out.s_max ? truncate_path(path, out.s_max) : path;
        const FahtpSelection sel = select_from_path(sel_path, sc.data, spec.kappa);
        out.selected = true;
        out.s_hat = sel.s_hat;
        out.s_tilde = sel.s_tilde;
        out.sigma_hat = sel.sigma_hat;
        out.methods.push_back(outcome("fahtp", sel.final_estimate));
        out.methods.push_back(outcome("ic", sel_path.at(sel.s_hat).estimate));
    } catch (const Error& e) {
        out.methods.push_back(failure("fahtp", e));
        out.methods.push_back(failure("ic", e));
    }
    try {
        out.methods.push_back(outcome("oracle", oracle_estimator(sc.data, sc.truth)));
    } catch (const Error& e) {
        out.methods.push_back(failure("oracle", e));
    }
    return out;
}

struct ExperimentOutcome {
    ExperimentSpec spec;
    /// Canonical order: sweep point (as listed), then replication.
    std::vector<ReplicationOutcome> replications;
};

inline ExperimentOutcome run_experiment(const ExperimentSpec& spec, unsigned jobs = 1)
{
    validate(spec);
    ExperimentOutcome out;
    out.spec = spec;
    const auto reps = static_cast<std::size_t>(spec.replications);
    out.replications.resize(spec.sweep.size() * reps);
    parallel_for(out.replications.size(), jobs, [&](std::size_t i) {
        out.replications[i] = run_replication(spec, spec.sweep[i / reps], static_cast<int>(i % reps));
    });
    return out;
}

namespace detail {

inline std::string opt_index(bool present, Index v) { return present ? std::to_string(v) : ""; }

inline void write_results(const std::string& path, const ExperimentOutcome& o)
{
    io::CsvWriter w(path);
    w.row({"experiment", "sweep_variable", "sweep_value", "replication", "seed", "method", "failed", "error",
           "size", "ee", "se", "tpr", "fpr", "mcc", "tp", "fp", "tn", "fn", "s_max", "s_hat", "s_tilde",
           "sigma_hat", "beta_min", "sigma"});
    const std::string name = to_string(o.spec.kind);
    const std::string var = sweep_variable(o.spec.kind);
    for (const auto& r : o.replications) {
        for (const auto& m : r.methods) {
            const auto num = [&](double v) { return m.failed ? std::string() : io::format_double(v); };
            const auto cnt = [&](Index v) { return m.failed ? std::string() : std::to_string(v); };
            w.row({name, var, io::format_double(r.point), std::to_string(r.replication), std::to_string(r.seed),
                   m.method, m.failed ? "1" : "0", m.error, cnt(m.size), num(m.eval.ee), cnt(m.eval.se),
                   num(m.eval.tpr), num(m.eval.fpr), num(m.eval.mcc), cnt(m.eval.tp), cnt(m.eval.fp),
                   cnt(m.eval.tn), cnt(m.eval.fn), std::to_string(r.s_max), opt_index(r.selected, r.s_hat),
                   opt_index(r.s_tilde.has_value(), r.s_tilde.value_or(0)),
                   r.selected ? io::format_double(r.sigma_hat) : "", io::format_double(r.beta_min),
                   io::format_double(r.sigma)});
        }
    }
}

struct PointSummary {
    double point = 0.0;
    std::string method;
    std::size_t failures = 0;
    std::optional<EvalSummary> summary;
};

inline std::vector<PointSummary> summarize_outcome(const ExperimentOutcome& o)
{
    std::vector<PointSummary> out;
    const auto reps = static_cast<std::size_t>(o.spec.replications);
    for (std::size_t k = 0; k < o.spec.sweep.size(); ++k) {
        for (const char* method : {"fahtp", "ic", "oracle"}) {
            PointSummary ps;
            ps.point = o.spec.sweep[k];
            ps.method = method;
            std::vector<EvalReport> reports;
            for (std::size_t r = 0; r < reps; ++r) {
                for (const auto& m : o.replications[k * reps + r].methods) {
                    if (m.method != method) continue;
                    if (m.failed) ++ps.failures;
                    else reports.push_back(m.eval);
                }
            }
            if (!reports.empty()) ps.summary = aggregate(reports);
            out.push_back(std::move(ps));
        }
    }
    return out;
}

inline void write_summary(const std::string& path, const ExperimentOutcome& o, const std::vector<PointSummary>& rows)
{
    io::CsvWriter w(path);
    std::vector<std::string> header = {"experiment", "sweep_variable", "sweep_value", "method", "count", "failures"};
    for (const char* metric : {"ee", "se", "tpr", "fpr", "mcc"})
        for (const char* stat : {"mean", "median", "sd"}) header.push_back(std::string(metric) + "_" + stat);
    header.push_back("exact_recovery");
    header.push_back("correct_size");
    w.row(header);
    for (const auto& ps : rows) {
        std::vector<std::string> row = {to_string(o.spec.kind), sweep_variable(o.spec.kind),
                                        io::format_double(ps.point), ps.method,
                                        std::to_string(ps.summary ? ps.summary->count : 0),
                                        std::to_string(ps.failures)};
        const auto put = [&](const MetricSummary* m) {
            for (double v : {m ? m->mean : NAN, m ? m->median : NAN, m ? m->sd : NAN}) row.push_back(io::format_double(v));
        };
        const EvalSummary* s = ps.summary ? &*ps.summary : nullptr;
        put(s ? &s->ee : nullptr);
        put(s ? &s->se : nullptr);
        put(s ? &s->tpr : nullptr);
        put(s ? &s->fpr : nullptr);
        put(s ? &s->mcc : nullptr);
        row.push_back(io::format_double(s ? s->exact_recovery : NAN));
        row.push_back(io::format_double(s ? s->correct_size : NAN));
        w.row(row);
    }
}

inline void write_manifest(const std::string& path, const ExperimentOutcome& o)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
    out << "# " << artifact_version << "\n";
    out << "# rng " << CounterRng::name << " v" << CounterRng::version
        << "; replication seed = derive(base_seed, bits(sweep_value), replication)\n";
    out << "# resolved configuration; usable as --config for an identical rerun\n";
    out << "schema_version = " << schema_version << "\n";
    for (const auto& [k, v] : settings_of(o.spec)) out << k << " = " << v << "\n";
    if (!out) fail(ErrorCode::io_error, "write failed on '" + path + "'");
}

inline void write_lambda_files(const std::string& dir, const ExperimentOutcome& o)
{
    io::CsvWriter path_csv(dir + "/lambda_path.csv");
    path_csv.row({"replication", "s", "lambda_min", "ic", "beta_min", "unit"});
    io::CsvWriter trace_csv(dir + "/lambda_trace.csv");
    trace_csv.row({"replication", "s", "t", "lambda_min"});
    for (const auto& r : o.replications) {
        const double unit = r.sigma * std::sqrt(2.0 * std::log(static_cast<double>(o.spec.p)) /
                                                static_cast<double>(o.spec.n));
        for (std::size_t i = 0; i < r.lambda_path.size(); ++i) {
            path_csv.row({std::to_string(r.replication), std::to_string(i + 1), io::format_double(r.lambda_path[i]),
                          io::format_double(r.ic_path[i]), io::format_double(r.beta_min), io::format_double(unit)});
            for (std::size_t t = 0; t < r.lambda_trace[i].size(); ++t) {
                trace_csv.row({std::to_string(r.replication), std::to_string(i + 1), std::to_string(t),
                               io::format_double(r.lambda_trace[i][t])});
            }
        }
    }
}

inline void write_plots(const std::string& dir, const ExperimentOutcome& o, const std::vector<PointSummary>& rows)
{
    if (o.spec.kind == ExperimentKind::min_signal_path) {
        const auto& first = o.replications.front();
        if (first.lambda_path.empty()) return;
        const auto s_star = static_cast<std::size_t>(o.spec.s_star);
        const std::size_t len = first.lambda_path.size();

        io::LinePlot trace{"Minimum signal over iterations (replication 0)", "iteration", "minimum signal", {}, {}};
        std::vector<std::size_t> shown = {std::max<std::size_t>(1, s_star / 2), s_star, s_star + 1, 2 * s_star, len};
        std::sort(shown.begin(), shown.end());
        shown.erase(std::unique(shown.begin(), shown.end()), shown.end());
        for (std::size_t s : shown) {
            if (s < 1 || s > len) continue;
            io::Series series{"s = " + std::to_string(s), {}, {}};
            const auto& lam = first.lambda_trace[s - 1];
            for (std::size_t t = 1; t < lam.size(); ++t) {
                series.x.push_back(static_cast<double>(t));
                series.y.push_back(lam[t]);
            }
            trace.series.push_back(std::move(series));
        }
        trace.lines.push_back({"true minimum signal", first.beta_min});
        io::write_svg(dir + "/lambda_trace.svg", trace);

        io::LinePlot by_size{"Minimum signal by model size", "model size s", "minimum signal", {}, {}};
        io::Series rep0{"replication 0", {}, {}}, median{"median over replications", {}, {}};
        for (std::size_t i = 0; i < len; ++i) {
            std::vector<double> column;
            for (const auto& r : o.replications)
                if (i < r.lambda_path.size()) column.push_back(r.lambda_path[i]);
            rep0.x.push_back(static_cast<double>(i + 1));
            rep0.y.push_back(first.lambda_path[i]);
            median.x.push_back(static_cast<double>(i + 1));
            median.y.push_back(summarize(column).median);
        }
        by_size.series = {rep0, median};
        by_size.lines.push_back({"true minimum signal (replication 0)", first.beta_min});
        io::write_svg(dir + "/lambda_path.svg", by_size);
        return;
    }

    struct Panel {
        const char* file;
        const char* label;
        double (*get)(const EvalSummary&);
    };
    const Panel panels[] = {
        {"ee", "median estimation error", [](const EvalSummary& s) { return s.ee.median; }},
        {"se", "mean sparsity error", [](const EvalSummary& s) { return s.se.mean; }},
        {"tpr", "mean true positive rate", [](const EvalSummary& s) { return s.tpr.mean; }},
        {"fpr", "mean false positive rate", [](const EvalSummary& s) { return s.fpr.mean; }},
        {"mcc", "mean MCC", [](const EvalSummary& s) { return s.mcc.mean; }},
    };
    for (const auto& panel : panels) {
        io::LinePlot plot{std::string(to_string(o.spec.kind)) + ": " + panel.label, sweep_variable(o.spec.kind),
                          panel.label, {}, {}};
        for (const char* method : {"fahtp", "ic", "oracle"}) {
            io::Series series{method, {}, {}};
            for (const auto& ps : rows) {
                if (ps.method != method) continue;
                series.x.push_back(ps.point);
                series.y.push_back(ps.summary ? panel.get(*ps.summary) : NAN);
            }
            plot.series.push_back(std::move(series));
        }
        io::write_svg(dir + "/" + panel.file + ".svg", plot);
    }
}

inline void prepare_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(std::filesystem::path(dir) / "plots", ec);
    if (ec) fail(ErrorCode::io_error, "cannot create output directory '" + dir + "': " + ec.message());
}

} // namespace detail

/// Writes results.csv, summary.csv, manifest.txt and plots/*.svg into dir; min_signal_path
/// adds lambda_path.csv and lambda_trace.csv.
inline void write_outputs(const ExperimentOutcome& o, const std::string& dir)
{
    detail::prepare_directory(dir);
    const auto rows = detail::summarize_outcome(o);
    detail::write_results(dir + "/results.csv", o);
    detail::write_summary(dir + "/summary.csv", o, rows);
    detail::write_manifest(dir + "/manifest.txt", o);
    if (o.spec.kind == ExperimentKind::min_signal_path) detail::write_lambda_files(dir, o);
    detail::write_plots(dir + "/plots", o, rows);
}

inline ExperimentOutcome cmd_experiment(const ExperimentSpec& spec, const std::string& dir, unsigned jobs = 1)
{
    validate(spec);
    detail::prepare_directory(dir);
    ExperimentOutcome o = run_experiment(spec, jobs);
    write_outputs(o, dir);
    return o;
}

} // namespace fahtp
