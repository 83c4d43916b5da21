#include "csdsvm/cli/commands.hpp"

#include "csdsvm/cli/boxplot.hpp"
#include "csdsvm/cli/csv_io.hpp"
#include "csdsvm/cli/model_io.hpp"
#include "csdsvm/model_select.hpp"
#include "csdsvm/simgen.hpp"
#include "csdsvm/solver.hpp"
#include "csdsvm/stats.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace csdsvm::cli {

namespace {

std::map<std::string, std::string> parse_options(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value in '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return kv;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& f : split_fields(text)) out.push_back(parse_double(f, what));
    return out;
}

KernelSpec make_kernel(const std::string& kind, const std::optional<double>& sigma) {
    if (kind == "linear") {
        if (sigma) throw UsageError("--sigma is not valid with --kernel linear");
        return KernelSpec::linear();
    }
    if (!sigma) throw UsageError("--kernel rbf requires --sigma");
    if (!(*sigma > 0.0)) throw UsageError("--sigma must be positive");
    return KernelSpec::rbf(*sigma);
}

struct LoadedData {
    Dataset data;
    CensoringModel cens;
};

LoadedData load_training(const std::string& path, const std::string& censoring,
                         const std::optional<double>& tau_flag) {
    TrainingTable table = read_training_csv(path);
    if (table.times.size() == 0) throw UsageError("training CSV has no data rows");
    double tau = 0.0;
    if (tau_flag) {
        tau = *tau_flag;
    } else if (auto h = censoring_horizon(censoring)) {
        tau = *h;
    } else {
        tau = table.times.maxCoeff();
        if (!(tau > 0.0)) tau = 1.0;
    }
    Dataset data = [&] {
        try {
            return Dataset(std::move(table.covariates), std::move(table.times),
                           std::move(table.status), tau);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    CensoringModel cens = parse_censoring(
        censoring, std::span<const double>(data.times().data(), static_cast<std::size_t>(data.size())));
    return {std::move(data), std::move(cens)};
}

bool parse_on_off(const std::string& s) {
    if (s == "on") return true;
    if (s == "off") return false;
    throw UsageError("--intercept must be on or off");
}

int cmd_fit(const std::string& data_path, const std::string& kernel_kind,
            const std::optional<double>& sigma, double lambda, const std::string& censoring,
            const std::string& intercept, const std::optional<double>& tau,
            const std::string& out_path, std::ostream& out) {
    const KernelSpec kernel = make_kernel(kernel_kind, sigma);
    if (!(lambda > 0.0)) throw UsageError("--lambda must be positive");
    const bool with_intercept = parse_on_off(intercept);
    auto [data, cens] = load_training(data_path, censoring, tau);
    if (with_intercept && data.size() < 2) {
        throw UsageError("fitting with an intercept needs at least two rows");
    }
    const FittedModel model = fit(data, kernel, lambda, cens, {with_intercept, 1.0});
    const double risk = censored_empirical_risk(predict(model, data.covariates()), data, cens);
    save_model(out_path, model, data_digest(data));
    out << "n=" << data.size() << " d=" << data.dim()
        << " training_censored_risk=" << format_double(risk) << '\n';
    return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, std::ostream& out) {
    const ModelFile file = load_model(model_path);
    const Eigen::MatrixXd query = read_query_csv(data_path);
    if (query.cols() != file.model.dim()) {
        throw UsageError("query has " + std::to_string(query.cols()) +
                         " covariates but the model expects " + std::to_string(file.model.dim()));
    }
    const Eigen::VectorXd f = predict(file.model, query);
    write_file_atomic(out_path, predictions_csv(query, f));
    out << "predicted " << query.rows() << " rows\n";
    return kOk;
}

int cmd_cv(const std::string& data_path, const std::string& kernel_kind,
           const std::string& sigmas, const std::string& lambdas, int folds, std::uint64_t seed,
           const std::string& censoring, const std::string& intercept,
           const std::optional<double>& tau, const std::string& report_path,
           const std::string& model_path, std::ostream& out) {
    if (kernel_kind != "linear" && kernel_kind != "rbf") {
        throw UsageError("--kernel must be linear or rbf");
    }
    const bool with_intercept = parse_on_off(intercept);
    auto [data, cens] = load_training(data_path, censoring, tau);
    const KernelKind kind = kernel_kind == "linear" ? KernelKind::Linear : KernelKind::Rbf;
    HyperGrid grid = HyperGrid::defaults(kind, data.dim());
    if (!sigmas.empty()) {
        if (kind == KernelKind::Linear) throw UsageError("--sigmas is not valid with --kernel linear");
        grid.sigmas = parse_list(sigmas, "--sigmas");
    }
    if (!lambdas.empty()) grid.lambdas = parse_list(lambdas, "--lambdas");
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (folds < 2 || folds > data.size()) throw UsageError("--folds must be in [2, n]");

    const CvResult cv = grid_search_cv(data, grid, folds, cens, seed, {with_intercept, false});
    if (!report_path.empty()) {
        std::ostringstream csv;
        write_cv_report_csv(csv, cv.report);
        write_file_atomic(report_path, csv.str());
    }
    out << "chosen kernel=" << cv.kernel.name();
    if (kind == KernelKind::Rbf) out << " sigma=" << format_double(cv.kernel.sigma());
    out << " lambda=" << format_double(cv.lambda)
        << " mean_val_risk=" << format_double(cv.report.best().mean_risk) << '\n';
    if (!model_path.empty()) {
        const FittedModel model = fit(data, cv.kernel, cv.lambda, cens, {with_intercept, 1.0});
        save_model(model_path, model, data_digest(data));
    }
    return kOk;
}

int cmd_simulate(const std::string& setting_name, const std::string& sizes_text, int reps,
                 std::uint64_t seed, const std::string& method, const std::string& censoring_case,
                 int folds, long test_size, const std::string& sigmas, const std::string& lambdas,
                 const std::string& out_path, std::ostream& out, std::ostream& err) {
    const SimSetting setting = [&] {
        try {
            return SimSetting::from_name(setting_name);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }();
    std::vector<Eigen::Index> sizes;
    for (double s : parse_list(sizes_text, "--sizes")) {
        if (s < 2 || s != std::floor(s)) throw UsageError("--sizes entries must be integers >= 2");
        sizes.push_back(static_cast<Eigen::Index>(s));
    }
    if (reps < 1) throw UsageError("--reps must be at least 1");
    if (folds < 2) throw UsageError("--folds must be at least 2");
    if (test_size < 1) throw UsageError("--test-size must be positive");

    ExperimentConfig config;
    if (method == "rbf") {
        config.method = KernelKind::Rbf;
    } else if (method == "linear") {
        config.method = KernelKind::Linear;
    } else {
        throw UsageError("--method must be rbf or linear");
    }
    if (censoring_case == "known") {
        config.censoring_case = CensoringCase::Known;
    } else if (censoring_case == "estimated") {
        config.censoring_case = CensoringCase::Estimated;
    } else {
        throw UsageError("--censoring-case must be known or estimated");
    }
    config.folds = folds;
    config.test_size = test_size;
    if (!sigmas.empty() || !lambdas.empty()) {
        HyperGrid grid = HyperGrid::defaults(config.method, setting.dim());
        if (!sigmas.empty()) grid.sigmas = parse_list(sigmas, "--sigmas");
        if (!lambdas.empty()) grid.lambdas = parse_list(lambdas, "--lambdas");
        try {
            grid.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        config.grid = grid;
    }

    const ExperimentResult result = run_experiment(setting, sizes, reps, config, seed);
    std::ostringstream csv;
    write_results_csv(csv, result);
    write_file_atomic(out_path, csv.str());

    out << "setting=" << setting.name() << " method=" << method
        << " censoring=" << censoring_case << " bayes_risk=" << format_double(result.bayes_risk)
        << '\n';
    for (Eigen::Index n : sizes) {
        const auto risks = result.risks(n);
        out << "n=" << n << " median_risk="
            << (risks.empty() ? std::string("NA") : format_double(stats::median(risks)))
            << " reps=" << risks.size() << '\n';
    }
    if (result.failed_reps > 0) {
        err << result.failed_reps << " repetition(s) failed";
        for (const auto& row : result.rows) {
            if (row.failed()) {
                err << "; first error (n=" << row.n << ", rep=" << row.rep << "): " << row.error;
                break;
            }
        }
        err << '\n';
    }
    if (result.flagged) {
        err << "more than 5% of repetitions failed\n";
        return kNumerical;
    }
    return kOk;
}

int cmd_plot(const std::string& in_path, const std::string& out_path, const std::string& title,
             std::ostream& out) {
    const auto records = read_results_csv(in_path);
    if (records.empty()) throw UsageError("results file has no rows");

    // Boxes are keyed by (method, censoring case, n); cases are only spelled
    // out in labels when the file mixes them.
    using Key = std::tuple<std::string, std::string, long>;
    std::map<Key, std::vector<double>> groups;
    std::set<std::string> cases;
    std::set<double> bayes;
    for (const auto& r : records) {
        cases.insert(r.censoring_case);
        auto& values = groups[{r.method, r.censoring_case, r.n}];
        if (std::isfinite(r.risk)) values.push_back(r.risk);
        if (std::isfinite(r.bayes_risk)) bayes.insert(r.bayes_risk);
    }
    BoxplotChart chart;
    chart.title = title.empty() ? records.front().setting : title;
    for (const auto& [key, values] : groups) {
        if (values.empty()) continue;
        const auto& [method, ccase, n] = key;
        std::string label = method;
        if (cases.size() > 1) label += " (" + ccase + ")";
        label += " n=" + std::to_string(n);
        chart.boxes.push_back(box_stats(label, values));
    }
    if (chart.boxes.empty()) throw UsageError("results file has no finite risks");
    chart.reference_lines.assign(bayes.begin(), bayes.end());
    write_file_atomic(out_path, render_boxplot_svg(chart));
    out << "wrote " << chart.boxes.size() << " boxes to " << out_path << '\n';
    return kOk;
}

}  // namespace

std::optional<double> censoring_horizon(const std::string& spec) {
    if (spec.rfind("uniform:", 0) != 0) return std::nullopt;
    const std::string rest = spec.substr(8);
    return parse_double(rest.substr(0, rest.find(',')), "uniform censoring horizon");
}

CensoringModel parse_censoring(const std::string& spec, std::span<const double> times) {
    try {
        if (spec.rfind("uniform:", 0) == 0) {
            const std::string rest = spec.substr(8);
            const auto comma = rest.find(',');
            const double tau = parse_double(rest.substr(0, comma), "uniform censoring horizon");
            double floor = kDefaultDensityFloor;
            if (comma != std::string::npos) {
                for (const auto& [k, v] : parse_options(rest.substr(comma + 1))) {
                    if (k != "floor") throw UsageError("unknown uniform censoring option '" + k + "'");
                    floor = parse_double(v, "floor");
                }
            }
            return CensoringModel::uniform(tau, floor);
        }
        if (spec == "kde" || spec.rfind("kde:", 0) == 0) {
            double beta = 2.0;
            double floor = kDefaultDensityFloor;
            if (spec.size() > 4) {
                for (const auto& [k, v] : parse_options(spec.substr(4))) {
                    if (k == "beta") {
                        beta = parse_double(v, "beta");
                    } else if (k == "floor") {
                        floor = parse_double(v, "floor");
                    } else {
                        throw UsageError("unknown kde option '" + k + "'");
                    }
                }
            }
            return fit_kde(times, BandwidthRule::silverman(beta), floor);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--censoring: ") + e.what());
    }
    throw UsageError("--censoring must be uniform:<tau> or kde[:beta=<b>,floor=<f>], got '" +
                     spec + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Current-status survival regression with inverse-censoring-weighted kernel machines"};
    app.require_subcommand(1);

    std::string data_path, out_path, kernel_kind = "rbf", censoring, intercept = "on";
    std::optional<double> sigma, tau;
    double lambda = 0.0;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a model on a training CSV (z1..zd,c,delta)");
    fit_cmd->add_option("--data", data_path, "Training CSV")->required();
    fit_cmd->add_option("--kernel", kernel_kind, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    fit_cmd->add_option("--sigma", sigma, "RBF width");
    fit_cmd->add_option("--lambda", lambda, "Regularization constant")->required();
    fit_cmd->add_option("--censoring", censoring, "uniform:<tau> or kde[:beta=<b>,floor=<f>]")->required();
    fit_cmd->add_option("--intercept", intercept, "on or off");
    fit_cmd->add_option("--tau", tau, "Horizon; defaults to the uniform tau or the largest time");
    fit_cmd->add_option("--out", out_path, "Model JSON output")->required();

    std::string model_path;
    auto* predict_cmd = app.add_subcommand("predict", "Predict for a CSV of covariates (z1..zd)");
    predict_cmd->add_option("--model", model_path, "Model JSON")->required();
    predict_cmd->add_option("--data", data_path, "Query CSV")->required();
    predict_cmd->add_option("--out", out_path, "Predictions CSV output")->required();

    std::string sigmas, lambdas, report_path, cv_model_path;
    int folds = 5;
    std::uint64_t seed = 1;
    auto* cv_cmd = app.add_subcommand("cv", "Cross-validated grid search on a training CSV");
    cv_cmd->add_option("--data", data_path, "Training CSV")->required();
    cv_cmd->add_option("--kernel", kernel_kind, "linear or rbf")->check(CLI::IsMember({"linear", "rbf"}));
    cv_cmd->add_option("--sigmas", sigmas, "Comma-separated RBF widths");
    cv_cmd->add_option("--lambdas", lambdas, "Comma-separated regularization constants");
    cv_cmd->add_option("--folds", folds, "Number of folds");
    cv_cmd->add_option("--seed", seed, "Fold assignment seed");
    cv_cmd->add_option("--censoring", censoring, "uniform:<tau> or kde[:beta=<b>,floor=<f>]")->required();
    cv_cmd->add_option("--intercept", intercept, "on or off");
    cv_cmd->add_option("--tau", tau, "Horizon; defaults to the uniform tau or the largest time");
    cv_cmd->add_option("--report", report_path, "CV report CSV output");
    cv_cmd->add_option("--out", cv_model_path, "Write the full-data refit of the chosen cell");

    std::string setting, sizes = "50,100,200,400,800", method = "rbf", censoring_case = "known";
    int reps = 100;
    long test_size = 10000;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation study");
    sim_cmd->add_option("--setting", setting, "weibull, multiweibull, multilognormal or triangle")->required();
    sim_cmd->add_option("--sizes", sizes, "Comma-separated training sizes");
    sim_cmd->add_option("--reps", reps, "Repetitions per size");
    sim_cmd->add_option("--seed", seed, "Master seed");
    sim_cmd->add_option("--method", method, "rbf or linear");
    sim_cmd->add_option("--censoring-case", censoring_case, "known or estimated");
    sim_cmd->add_option("--folds", folds, "Cross-validation folds");
    sim_cmd->add_option("--test-size", test_size, "Test-set size per repetition");
    sim_cmd->add_option("--sigmas", sigmas, "Override the RBF width grid");
    sim_cmd->add_option("--lambdas", lambdas, "Override the lambda grid");
    sim_cmd->add_option("--out", out_path, "Results CSV output")->required();

    std::string in_path, title;
    auto* plot_cmd = app.add_subcommand("plot", "Boxplot SVG of a simulation results CSV");
    plot_cmd->add_option("--in", in_path, "Results CSV")->required();
    plot_cmd->add_option("--out", out_path, "SVG output")->required();
    plot_cmd->add_option("--title", title, "Chart title");

    std::vector<const char*> argv{"csdsvm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (fit_cmd->parsed()) {
            return cmd_fit(data_path, kernel_kind, sigma, lambda, censoring, intercept, tau,
                           out_path, out);
        }
        if (predict_cmd->parsed()) return cmd_predict(model_path, data_path, out_path, out);
        if (cv_cmd->parsed()) {
            return cmd_cv(data_path, kernel_kind, sigmas, lambdas, folds, seed, censoring,
                          intercept, tau, report_path, cv_model_path, out);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(setting, sizes, reps, seed, method, censoring_case, folds,
                                test_size, sigmas, lambdas, out_path, out, err);
        }
        if (plot_cmd->parsed()) return cmd_plot(in_path, out_path, title, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ModelFormatError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace csdsvm::cli
