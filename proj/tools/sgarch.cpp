// Command-line front end: estimate, simulate, diagnose, compare, replicate-table9.

#include "sgarch/baseline.hpp"
#include "sgarch/diagnostics.hpp"
#include "sgarch/estimate.hpp"
#include "sgarch/io.hpp"
#include "sgarch/simulate.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sgarch;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kData = 3 };

struct InputOptions {
    std::string path;
    std::string column = "return";
};

struct ModelOptions {
    std::string variant = "basic";
    double delta = 0.005;
    bool beta_equal = false;
    bool alpha_equal = false;
    bool gamma_equal = false;
};

struct OptimizerOptions {
    int n_starts = 2;
    int max_evaluations = 4000;
    int max_restarts = 8;
    double tolerance = 1e-8;
    unsigned threads = 0;
};

void add_input(CLI::App* app, InputOptions& in) {
    app->add_option("--input", in.path, "Delimited series file with a one-line header")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--column", in.column, "Column kind: price or return")
        ->check(CLI::IsMember({"price", "return"}));
}

void add_model(CLI::App* app, ModelOptions& m) {
    app->add_option("--variant", m.variant,
                    "basic, asym, nonlin-asym, gjr, news, qgarch, heston-nandi, vgarch");
    app->add_option("--delta", m.delta, "Jump size in log-return units");
    app->add_flag("--beta-equal", m.beta_equal, "Impose beta+ = beta-");
    app->add_flag("--alpha-equal", m.alpha_equal, "Impose alpha+ = alpha-");
    app->add_flag("--gamma-equal", m.gamma_equal, "Impose gamma+ = gamma-");
}

void add_optimizer(CLI::App* app, OptimizerOptions& o) {
    app->add_option("--n-starts", o.n_starts, "Perturbed starting points")->check(CLI::PositiveNumber);
    app->add_option("--max-evaluations", o.max_evaluations, "Objective evaluations per simplex run")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-restarts", o.max_restarts, "Simplex restarts")->check(CLI::NonNegativeNumber);
    app->add_option("--tolerance", o.tolerance, "Log-likelihood spread for convergence")
        ->check(CLI::PositiveNumber);
    app->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

ModelSpec make_spec(const ModelOptions& m) {
    if (!(m.delta > 0.0) || !std::isfinite(m.delta)) {
        throw ConfigError("--delta must be positive");
    }
    ModelSpec spec;
    try {
        spec.variant = parse_variant(m.variant);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    spec.delta = m.delta;
    spec.beta_equal = m.beta_equal;
    spec.alpha_equal = m.alpha_equal;
    spec.gamma_equal = m.gamma_equal;
    if (spec.gamma_equal && !has_gamma(spec.variant)) {
        throw ConfigError("--gamma-equal needs a variant with gamma");
    }
    return spec;
}

FitConfig make_fit_config(const OptimizerOptions& o, std::uint64_t seed) {
    FitConfig c;
    c.n_starts = o.n_starts;
    c.max_evaluations = o.max_evaluations;
    c.max_restarts = o.max_restarts;
    c.tolerance = o.tolerance;
    c.threads = o.threads;
    c.seed = seed;
    return c;
}

ReturnSeries load_input(const InputOptions& in, std::size_t min_length) {
    ReturnSeries s = load_series(in.path, parse_column_kind(in.column));
    if (s.returns.size() < min_length) {
        throw DataError(in.path + ": need at least " + std::to_string(min_length) +
                        " returns, found " + std::to_string(s.returns.size()));
    }
    return s;
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
    } else {
        write_text_atomic(out, content);
    }
}

Json statistics_json(const SeriesStatistics& s) {
    return {{"n", s.n},
            {"mean", s.mean},
            {"std_dev", s.std_dev},
            {"annualized_mean", s.annualized_mean},
            {"annualized_std", s.annualized_std},
            {"skewness", s.skewness},
            {"kurtosis", s.kurtosis}};
}

ParamSet parse_param_list(const std::vector<double>& v) {
    if (v.size() != 8) {
        throw ConfigError("--params takes 8 values: omega+ omega- beta+ beta- alpha+ alpha- gamma+ gamma-");
    }
    std::array<double, 8> a{};
    std::copy(v.begin(), v.end(), a.begin());
    return from_array(a);
}

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
    InputOptions input;
    ModelOptions model;
    OptimizerOptions optimizer;
    std::uint64_t seed = 1;
    std::size_t bootstrap = 0;
    bool test_alpha = false;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const ModelSpec spec = make_spec(a.model);
    if (a.bootstrap != 0 && a.bootstrap < 50) {
        throw ConfigError("--bootstrap needs B >= 50");
    }
    if (a.test_alpha && spec.alpha_equal) {
        throw ConfigError("--test-alpha-equality is incompatible with --alpha-equal");
    }
    const ReturnSeries series = load_input(a.input, 100);
    const FitConfig config = make_fit_config(a.optimizer, a.seed);
    // Replicates are warm-started at the fit, so one start suffices.
    FitConfig refit = config;
    refit.n_starts = 1;
    FitResult fit = fit_mle(spec, series.returns, config);
    if (a.bootstrap > 0) {
        if (!fit.converged) {
            throw std::runtime_error("fit did not converge; bootstrap skipped");
        }
        const BootstrapResult b = bootstrap_se(fit, a.bootstrap, derive_seed(a.seed, 1), refit);
        fit.se = b.se;
    }
    Json report = fit_to_json(fit, a.seed);
    report["input"] = {{"path", a.input.path},
                       {"column", a.input.column},
                       {"statistics", statistics_json(compute_statistics(series.returns))}};
    if (a.bootstrap > 0) {
        report["bootstrap_replicates"] = a.bootstrap;
    }
    if (a.test_alpha) {
        const std::size_t B = a.bootstrap > 0 ? a.bootstrap : 200;
        const EqualityTestResult t =
            test_alpha_equality(spec, series.returns, B, derive_seed(a.seed, 2), config, refit);
        report["alpha_equality_test"] = {{"statistic", t.statistic},
                                         {"p_value", t.p_value},
                                         {"replicates", B},
                                         {"dropped", t.dropped}};
    }
    emit(a.out, report.dump(2) + "\n");
    return fit.converged ? kOk : kOther;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string fit_path;
    ModelOptions model;
    std::vector<double> params;
    std::vector<double> lambda0;
    bool table9 = false;
    std::size_t steps = 5000;
    std::size_t paths = 1;
    double s0 = 100.0;
    std::uint64_t seed = 1;
    std::string out;
};

std::string path_csv(const SimulatedPath& sim) {
    Table t{{"step", "return", "price", "lambda_plus", "lambda_minus"}, {}};
    t.rows.reserve(sim.path.size());
    for (std::size_t i = 0; i < sim.path.size(); ++i) {
        t.rows.push_back({std::to_string(i + 1), format_double(sim.path.returns[i]),
                          format_double(sim.prices[i + 1]), format_double(sim.path.lambda_plus[i]),
                          format_double(sim.path.lambda_minus[i])});
    }
    return render_csv(t);
}

int run_simulate(const SimulateArgs& a) {
    ModelSpec spec;
    ParamSet p;
    std::optional<Intensities> lam0;
    if (a.table9) {
        spec = table9_gjr_spec();
        p = table9_gjr_params();
        lam0 = Intensities{5.0, 5.0};
    } else if (!a.fit_path.empty()) {
        const FitResult fit = fit_from_json(read_json(a.fit_path));
        spec = fit.spec;
        p = fit.params;
        lam0 = fit.lambda0;
    } else {
        spec = make_spec(a.model);
        p = parse_param_list(a.params);
    }
    if (!a.lambda0.empty()) {
        if (a.lambda0.size() != 2) {
            throw ConfigError("--lambda0 takes two values");
        }
        lam0 = Intensities{a.lambda0[0], a.lambda0[1]};
    }
    try {
        validate(p, spec, true);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const Intensities start = lam0 ? *lam0 : default_lambda0(spec, p);
    if (a.steps < 1 || a.paths < 1) {
        throw ConfigError("--steps and --paths must be positive");
    }
    if (a.paths == 1) {
        emit(a.out, path_csv(simulate_path(spec, p, a.steps, start, a.s0, a.seed)));
        return kOk;
    }
    if (a.out.empty()) {
        throw ConfigError("--out must name a directory when --paths > 1");
    }
    fs::create_directories(a.out);
    std::vector<std::string> files(a.paths);
    parallel_for(a.paths, [&](std::size_t k) {
        files[k] = path_csv(simulate_path(spec, p, a.steps, start, a.s0, derive_seed(a.seed, k)));
    });
    for (std::size_t k = 0; k < a.paths; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%05zu.csv", k);
        write_text_atomic(fs::path(a.out) / name, files[k]);
    }
    return kOk;
}

// ---- diagnose ---------------------------------------------------------------

struct DiagnoseArgs {
    InputOptions input;
    std::string fit_path;
    std::size_t max_lag = 20;
    std::string out;
};

int run_diagnose(const DiagnoseArgs& a) {
    if (a.max_lag < 1) {
        throw ConfigError("--max-lag must be >= 1");
    }
    if (a.out.empty()) {
        throw ConfigError("--out must name an output directory");
    }
    const ReturnSeries series = load_input(a.input, a.max_lag + 3);
    fs::create_directories(a.out);
    Json summary;
    summary["statistics"] = statistics_json(compute_statistics(series.returns));
    Table q{{"pair", "id", "max_lag", "q"}, {}};
    auto pairs = standard_conditional_pairs();
    for (auto& extra : auxiliary_pairs()) {
        pairs.push_back(extra);
    }
    for (const auto& np : pairs) {
        const auto rows = correlogram_table(series.returns, a.max_lag, np.pair);
        write_text_atomic(fs::path(a.out) / ("correlogram_" + np.id + ".csv"),
                          render_csv(correlogram_to_table(rows)));
        std::string qv;
        try {
            qv = format_double(modified_ljung_box(series.returns, a.max_lag, np.pair));
        } catch (const std::domain_error&) {
            qv = "";
        }
        q.rows.push_back({"\"" + np.name + "\"", np.id, std::to_string(a.max_lag), qv});
    }
    write_text_atomic(fs::path(a.out) / "ljung_box.csv", render_csv(q));

    if (!a.fit_path.empty()) {
        const FitResult fit = fit_from_json(read_json(a.fit_path));
        const InferredMoments m = inferred_moments(fit, series.returns);
        const bool dated = !series.dates.empty();
        Table t{dated ? std::vector<std::string>{"step", "date", "cond_mean", "cond_var"}
                      : std::vector<std::string>{"step", "cond_mean", "cond_var"},
                {}};
        for (std::size_t i = 0; i < m.cond_mean.size(); ++i) {
            std::vector<std::string> row{std::to_string(i + 1)};
            if (dated) {
                row.push_back(series.dates[i]);
            }
            row.push_back(format_double(m.cond_mean[i]));
            row.push_back(format_double(m.cond_var[i]));
            t.rows.push_back(std::move(row));
        }
        write_text_atomic(fs::path(a.out) / "moments.csv", render_csv(t));
        summary["fit_loglik_recomputed"] = refit_loglik(fit, series.returns);
        summary["moments_cond_mean_ar1"] = ar1_coefficient(m.cond_mean);
    }
    write_text_atomic(fs::path(a.out) / "summary.json", summary.dump(2) + "\n");
    std::cout << render_csv(q);
    return kOk;
}

// ---- compare ----------------------------------------------------------------

struct CompareArgs {
    InputOptions input;
    double delta = 0.005;
    OptimizerOptions optimizer;
    std::uint64_t seed = 1;
    std::string out;
};

int run_compare(const CompareArgs& a) {
    if (!(a.delta > 0.0) || !std::isfinite(a.delta)) {
        throw ConfigError("--delta must be positive");
    }
    const ReturnSeries series = load_input(a.input, 100);
    const FitConfig config = make_fit_config(a.optimizer, a.seed);
    const ModelComparison cmp = compare_nested_models(series.returns, a.delta, config);
    Table t{{"model", "variant", "beta_equal", "alpha_equal", "gamma_equal", "neg_loglik",
             "converged"},
            {}};
    auto row = [&](const char* name, const FitResult& f) {
        t.rows.push_back({name, std::string(to_string(f.spec.variant)),
                          f.spec.beta_equal ? "1" : "0", f.spec.alpha_equal ? "1" : "0",
                          f.spec.gamma_equal ? "1" : "0", format_double(-f.loglik),
                          f.converged ? "1" : "0"});
    };
    row("I", cmp.model_i);
    row("II", cmp.model_ii);
    row("III", cmp.model_iii);
    row("IV", cmp.model_iv);
    GjrGarchConfig gc;
    gc.seed = a.seed;
    gc.threads = a.optimizer.threads;
    const GjrGarchFit base = fit_gjr_garch_gaussian(series.returns, gc);
    // Continuous Gaussian density: not on the same scale as the Skellam likelihoods.
    t.rows.push_back({"baseline", "arma11-gjr-garch", "", "", "", format_double(-base.loglik),
                      base.converged ? "1" : "0"});
    emit(a.out, render_csv(t));
    return kOk;
}

// ---- replicate-table9 -------------------------------------------------------

struct Table9Args {
    std::size_t paths = 100;
    std::size_t steps = 5000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out;
};

std::vector<EnsembleStatistic> table9_request() {
    std::vector<EnsembleStatistic> req;
    for (const auto& np : standard_conditional_pairs()) {
        for (std::size_t lag : {1, 2, 3, 4, 5, 20}) {
            req.push_back({np.id, EnsembleStatistic::Kind::Correlation, np.pair, lag});
        }
    }
    const auto std_pairs = standard_conditional_pairs();
    req.push_back({"q20_" + std_pairs[0].id, EnsembleStatistic::Kind::LjungBox, std_pairs[0].pair, 20});
    req.push_back({"q20_" + std_pairs[1].id, EnsembleStatistic::Kind::LjungBox, std_pairs[1].pair, 20});
    return req;
}

int run_table9(const Table9Args& a) {
    if (a.paths < 2 || a.steps < 30) {
        throw ConfigError("need --paths >= 2 and --steps >= 30");
    }
    const auto summary = simulate_ensemble(table9_gjr_spec(), table9_gjr_params(), a.steps, a.paths,
                                           {5.0, 5.0}, a.seed, table9_request(), a.threads);
    Table t{{"statistic", "lag", "mean", "sd", "se", "n_valid"}, {}};
    for (const auto& s : summary) {
        t.rows.push_back({s.statistic.name, std::to_string(s.statistic.lag), format_double(s.mean),
                          format_double(s.sd), format_double(s.se), std::to_string(s.n_valid)});
    }
    emit(a.out, render_csv(t));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GARCH Poisson-intensity (Skellam) return models"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Fit an intensity model by maximum likelihood");
    add_input(c_est, est.input);
    add_model(c_est, est.model);
    add_optimizer(c_est, est.optimizer);
    c_est->add_option("--seed", est.seed, "Master seed");
    c_est->add_option("--bootstrap", est.bootstrap, "Parametric bootstrap replicates (0 = none)");
    c_est->add_flag("--test-alpha-equality", est.test_alpha, "Bootstrap test of alpha+ = alpha-");
    c_est->add_option("--out", est.out, "Fit report path (default stdout)");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate return paths");
    c_sim->add_option("--fit", sim.fit_path, "Simulate from a saved fit report")->check(CLI::ExistingFile);
    add_model(c_sim, sim.model);
    c_sim->add_option("--params", sim.params, "omega+ omega- beta+ beta- alpha+ alpha- gamma+ gamma-")
        ->expected(8);
    c_sim->add_option("--lambda0", sim.lambda0, "Initial intensities (plus minus)")->expected(2);
    c_sim->add_flag("--table9", sim.table9, "Use the GJR simulation preset");
    c_sim->add_option("--steps", sim.steps, "Steps per path");
    c_sim->add_option("--paths", sim.paths, "Number of paths (> 1 writes a directory)");
    c_sim->add_option("--s0", sim.s0, "Initial price");
    c_sim->add_option("--seed", sim.seed, "Master seed");
    c_sim->add_option("--out", sim.out, "Output file, or directory for several paths");

    DiagnoseArgs diag;
    auto* c_diag = app.add_subcommand("diagnose", "Correlograms, Ljung-Box statistics, inferred moments");
    add_input(c_diag, diag.input);
    c_diag->add_option("--fit", diag.fit_path, "Saved fit report for inferred moments")
        ->check(CLI::ExistingFile);
    c_diag->add_option("--max-lag", diag.max_lag, "Largest lag");
    c_diag->add_option("--out", diag.out, "Output directory")->required();

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Likelihoods of the four nested models and the baseline");
    add_input(c_cmp, cmp.input);
    c_cmp->add_option("--delta", cmp.delta, "Jump size in log-return units");
    add_optimizer(c_cmp, cmp.optimizer);
    c_cmp->add_option("--seed", cmp.seed, "Master seed");
    c_cmp->add_option("--out", cmp.out, "Output table (default stdout)");

    Table9Args t9;
    auto* c_t9 = app.add_subcommand("replicate-table9", "Conditional-correlation ensemble of the GJR preset");
    c_t9->add_option("--paths", t9.paths, "Number of paths");
    c_t9->add_option("--steps", t9.steps, "Steps per path");
    c_t9->add_option("--seed", t9.seed, "Master seed");
    c_t9->add_option("--threads", t9.threads, "Worker threads (0 = all cores)");
    c_t9->add_option("--out", t9.out, "Output table (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (c_est->parsed()) {
            return run_estimate(est);
        }
        if (c_sim->parsed()) {
            return run_simulate(sim);
        }
        if (c_diag->parsed()) {
            return run_diagnose(diag);
        }
        if (c_cmp->parsed()) {
            return run_compare(cmp);
        }
        if (c_t9->parsed()) {
            return run_table9(t9);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
