// Command-line front end: train / predict / region / breakdown / cv.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasibility
// reported as a result (breakdown detection is an outcome, not a crash).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trimsvm/dual_geometry.hpp"
#include "trimsvm/errors.hpp"
#include "trimsvm/model_select.hpp"
#include "trimsvm/param_region.hpp"
#include "trimsvm/robustness_lab.hpp"
#include "trimsvm/trainer.hpp"

namespace {

using namespace trimsvm;

struct CommonOpts {
    std::string kernel_name = "gaussian";
    double gamma = -1;  // <0: median heuristic
    std::uint64_t seed = 0;
    bool strict_levels = false;
};

void add_kernel_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--kernel", opts.kernel_name, "kernel: linear or gaussian")
        ->check(CLI::IsMember({"linear", "gaussian"}))
        ->capture_default_str();
    cmd->add_option("--gamma", opts.gamma, "gaussian width (default: median heuristic)");
    cmd->add_option("--seed", opts.seed, "random seed")->capture_default_str();
    cmd->add_flag("--strict-levels", opts.strict_levels,
                  "error out when nu*m or mu*m is not an integer instead of snapping");
}

KernelSpec resolve_kernel(const CommonOpts& opts, const Matrix& X) {
    if (opts.kernel_name == "linear") return KernelSpec::linear();
    const double g = opts.gamma > 0 ? opts.gamma : median_heuristic_gamma(X, opts.seed);
    return KernelSpec::gaussian(g);
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw error("cannot open for writing: " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw error("cannot rename " + tmp + " to " + path);
}

// Every CSV output opens with the resolved configuration and a timestamp
// line; comparisons between runs are made modulo the timestamp line.
std::string csv_header(const std::string& config_echo) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    std::ostringstream out;
    out << "# config: " << config_echo << '\n';
    out << "# timestamp: " << buf << '\n';
    return out.str();
}

int run_train(const std::string& data_path, const std::string& label_col,
              const std::string& out_path, double nu, double mu, int restarts, bool standardize_on,
              const CommonOpts& opts) {
    Dataset d = load_csv(data_path, label_col);
    std::optional<ScalerStats> scaler;
    if (standardize_on) {
        auto [scaled, stats] = standardize(d);
        d = std::move(scaled);
        scaler = std::move(stats);
    }
    TrainConfig cfg;
    cfg.nu = nu;
    cfg.mu = mu;
    cfg.kernel = resolve_kernel(opts, d.features);
    cfg.seed = opts.seed;
    cfg.restarts = restarts;
    cfg.integrality = opts.strict_levels ? LevelPolicy::Strict : LevelPolicy::Snap;
    Model model = train(d, cfg);
    model.scaler = scaler;
    save_model(model, out_path);
    std::cerr << "trained: objective " << model.objective << ", " << model.support_idx.size()
              << " support vectors, " << model.trace.size() << " outer iterations\n";
    return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& label_col, const std::string& out_path) {
    Model model = load_model(model_path);
    Dataset d = load_csv(data_path, label_col);
    Prediction pred = predict(model, d.features);
    std::ostringstream out;
    std::ostringstream echo;
    echo << "predict model=" << model_path << " data=" << data_path;
    out << csv_header(echo.str());
    out << "id,score,label\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i)
        out << d.ids[static_cast<std::size_t>(i)] << ',' << pred.scores(i) << ','
            << pred.labels[static_cast<std::size_t>(i)] << '\n';
    write_atomic(out_path, out.str());
    return 0;
}

int run_region(double label_ratio_prime, std::int64_t m, std::optional<double> mu_bar,
               std::size_t n_points, const std::string& out_path, const CommonOpts& opts) {
    std::optional<Rat> mb;
    if (mu_bar) mb = rationalize(*mu_bar);
    const Rat rp = rationalize(label_ratio_prime);
    const LambdaRegions regions = lambda_regions(rp, mb);
    const bool bounded = opts.kernel_name == "gaussian";

    auto points = grid([&](Rat nu, Rat mu) { return regions.in_up(nu, mu); }, m, n_points);

    std::ostringstream out;
    std::ostringstream echo;
    echo << "region label_ratio=" << label_ratio_prime << " m=" << m << " kernel="
         << opts.kernel_name << " points=" << points.size();
    if (mu_bar) echo << " mu_bar=" << *mu_bar;
    out << csv_header(echo.str());
    out << "nu,mu,classification,in_lambda_low,in_lambda_up\n";
    for (const auto& [nu, mu] : points) {
        std::string cls;
        try {
            cls = classification_name(classify(nu, mu, rp, bounded));
        } catch (const mu_too_large_error&) {
            cls = "mu_too_large";
        }
        out << nu.to_double() << ',' << mu.to_double() << ',' << cls << ','
            << (regions.in_low(nu, mu) ? 1 : 0) << ',' << (regions.in_up(nu, mu) ? 1 : 0) << '\n';
    }
    write_atomic(out_path, out.str());
    return 0;
}

int run_breakdown(Eigen::Index spiral_m, double noise_sd, const std::string& mode_name,
                  double outlier_scale, int trials, std::size_t n_points,
                  const std::string& out_path, const CommonOpts& opts) {
    Dataset train_set = spiral(spiral_m, noise_sd, opts.seed);
    Dataset test_set = spiral(spiral_m, noise_sd, opts.seed + 1);

    ContaminationSpec spec;
    spec.seed = opts.seed;
    spec.outlier_scale = outlier_scale;
    if (mode_name == "replace")
        spec.mode = ContaminationMode::ReplacePositiveWithOutliers;
    else if (mode_name == "flip")
        spec.mode = ContaminationMode::FlipPositiveLabels;
    else
        spec.mode = ContaminationMode::AdversarialFlipNegatives;

    const Rat rp = rationalize(label_ratio(train_set));
    const LambdaRegions regions = lambda_regions(rp);
    auto lattice = grid([&](Rat nu, Rat mu) { return regions.in_up(nu, mu); },
                        static_cast<std::int64_t>(spiral_m), n_points);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [nu, mu] : lattice) pts.emplace_back(nu.to_double(), mu.to_double());

    TrainConfig cfg;
    cfg.kernel = resolve_kernel(opts, train_set.features);
    cfg.integrality = opts.strict_levels ? LevelPolicy::Strict : LevelPolicy::Snap;

    SweepResult result = breakdown_sweep(train_set, pts, spec, trials, cfg, test_set);
    std::ostringstream echo;
    echo << "breakdown spiral_m=" << spiral_m << " noise_sd=" << noise_sd << " mode=" << mode_name
         << " outlier_scale=" << outlier_scale << " trials=" << trials << " seed=" << opts.seed;
    write_atomic(out_path, csv_header(echo.str()) + sweep_to_csv(result));
    return 0;
}

int run_cv(const std::string& data_path, const std::string& label_col, int folds,
           std::size_t n_points, bool standardize_on, const std::string& out_path,
           const CommonOpts& opts) {
    Dataset d = load_csv(data_path, label_col);
    if (standardize_on) d = standardize(d).first;
    const Rat rp = rationalize(label_ratio(d));
    const LambdaRegions regions = lambda_regions(rp);
    auto lattice = grid([&](Rat nu, Rat mu) { return regions.in_up(nu, mu); },
                        static_cast<std::int64_t>(d.size()), n_points);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [nu, mu] : lattice) pts.emplace_back(nu.to_double(), mu.to_double());

    TrainConfig cfg;
    cfg.kernel = resolve_kernel(opts, d.features);
    cfg.integrality = opts.strict_levels ? LevelPolicy::Strict : LevelPolicy::Snap;
    CvTable table = grid_search_cv(d, pts, folds, cfg, opts.seed);

    std::ostringstream echo;
    echo << "cv data=" << data_path << " folds=" << folds << " grid=" << pts.size()
         << " kernel=" << opts.kernel_name << " seed=" << opts.seed;
    write_atomic(out_path, csv_header(echo.str()) + cv_to_csv(table));
    std::cerr << "chosen nu=" << table.chosen_nu << " mu=" << table.chosen_mu << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust kernel SVM with trimmed-loss training and breakdown-point analysis"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string data_path, model_path, out_path, label_col = "label";
    double nu = 0.5, mu = 0.1;
    int restarts = 1, trials = 5, folds = 5;
    bool no_standardize = false;
    double label_ratio_prime = 0.5, mu_bar = -1, noise_sd = 0.05, outlier_scale = 1e4;
    std::int64_t region_m = 200;
    Eigen::Index spiral_m = 200;
    std::size_t n_points = 1000000;
    std::string mode_name = "replace";

    CLI::App* train_cmd = app.add_subcommand("train", "fit a robust SVM and save it as JSON");
    train_cmd->add_option("data", data_path, "training CSV")->required();
    train_cmd->add_option("-o,--output", out_path, "model file")->required();
    train_cmd->add_option("--label", label_col, "label column name")->capture_default_str();
    train_cmd->add_option("--nu", nu, "margin level nu")->required();
    train_cmd->add_option("--mu", mu, "trimming level mu")->capture_default_str();
    train_cmd->add_option("--restarts", restarts, "extra randomized starts")->capture_default_str();
    train_cmd->add_flag("--no-standardize", no_standardize, "skip feature standardization");
    add_kernel_flags(train_cmd, opts);

    CLI::App* predict_cmd = app.add_subcommand("predict", "score a CSV with a saved model");
    predict_cmd->add_option("model", model_path, "model JSON")->required();
    predict_cmd->add_option("data", data_path, "input CSV")->required();
    predict_cmd->add_option("-o,--output", out_path, "output CSV")->required();
    predict_cmd->add_option("--label", label_col, "label column name")->capture_default_str();

    CLI::App* region_cmd = app.add_subcommand("region", "admissible (nu, mu) lattice with classification");
    region_cmd->add_option("--label-ratio", label_ratio_prime, "contaminated label ratio r'")->required();
    region_cmd->add_option("--m", region_m, "sample size defining the lattice")->capture_default_str();
    region_cmd->add_option("--mu-bar", mu_bar, "known outlier-ratio upper bound");
    region_cmd->add_option("--points", n_points, "max grid points")->capture_default_str();
    region_cmd->add_option("-o,--output", out_path, "output CSV")->required();
    add_kernel_flags(region_cmd, opts);

    CLI::App* breakdown_cmd = app.add_subcommand("breakdown", "contamination sweep over the (nu, mu) lattice");
    breakdown_cmd->add_option("--spiral-m", spiral_m, "spiral sample size")->capture_default_str();
    breakdown_cmd->add_option("--noise-sd", noise_sd, "spiral noise sd")->capture_default_str();
    breakdown_cmd->add_option("--mode", mode_name, "replace | flip | adversarial")
        ->check(CLI::IsMember({"replace", "flip", "adversarial"}))
        ->capture_default_str();
    breakdown_cmd->add_option("--outlier-scale", outlier_scale, "outlier box half-width")->capture_default_str();
    breakdown_cmd->add_option("--trials", trials, "trials per grid point")->capture_default_str();
    breakdown_cmd->add_option("--points", n_points, "max grid points")->capture_default_str();
    breakdown_cmd->add_option("-o,--output", out_path, "output CSV")->required();
    add_kernel_flags(breakdown_cmd, opts);

    CLI::App* cv_cmd = app.add_subcommand("cv", "grid-search cross validation over the admissible region");
    cv_cmd->add_option("data", data_path, "training CSV")->required();
    cv_cmd->add_option("--label", label_col, "label column name")->capture_default_str();
    cv_cmd->add_option("--folds", folds, "number of folds")->capture_default_str();
    cv_cmd->add_option("--points", n_points, "max grid points")->capture_default_str();
    cv_cmd->add_flag("--no-standardize", no_standardize, "skip feature standardization");
    cv_cmd->add_option("-o,--output", out_path, "output CSV")->required();
    add_kernel_flags(cv_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (train_cmd->parsed())
            return run_train(data_path, label_col, out_path, nu, mu, restarts, !no_standardize, opts);
        if (predict_cmd->parsed()) return run_predict(model_path, data_path, label_col, out_path);
        if (region_cmd->parsed())
            return run_region(label_ratio_prime, region_m,
                              mu_bar >= 0 ? std::optional<double>(mu_bar) : std::nullopt, n_points,
                              out_path, opts);
        if (breakdown_cmd->parsed())
            return run_breakdown(spiral_m, noise_sd, mode_name, outlier_scale, trials, n_points,
                                 out_path, opts);
        if (cv_cmd->parsed())
            return run_cv(data_path, label_col, folds, n_points, !no_standardize, out_path, opts);
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 4;
    } catch (const missing_file_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const empty_file_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const dimension_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const non_finite_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const single_class_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const too_few_samples_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
