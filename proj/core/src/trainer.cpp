#include "trimsvm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "trimsvm/errors.hpp"

namespace trimsvm {

namespace {

Vector labels_to_vector(const std::vector<int>& labels) {
    Vector y(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i)) = labels[i];
    return y;
}

struct Iterate {
    Vector alpha;
    Vector beta;
    double b = 0, rho = 0;
    std::vector<int> eta;
    double objective = std::numeric_limits<double>::infinity();
    bool rho_b_fallback = false;
};

}  // namespace

std::vector<int> update_eta(const Vector& margins, Eigen::Index mu_count) {
    const Eigen::Index m = margins.size();
    if (mu_count < 0 || mu_count > m) throw error("mu count out of range");
    std::vector<int> eta(static_cast<std::size_t>(m), 1);
    const auto sigma = descending_order(margins);
    for (Eigen::Index i = 0; i < mu_count; ++i) eta[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])] = 0;
    return eta;
}

qp::QpProblem build_subproblem(const Matrix& K, const Vector& y, const std::vector<int>& eta,
                               double nu) {
    const Eigen::Index m = K.rows();
    if (y.size() != m || static_cast<Eigen::Index>(eta.size()) != m)
        throw dimension_error("subproblem dimension mismatch");
    qp::QpProblem p;
    p.Q = (y * y.transpose()).cwiseProduct(K);
    Vector one_minus_eta(m);
    for (Eigen::Index i = 0; i < m; ++i) one_minus_eta(i) = 1.0 - eta[static_cast<std::size_t>(i)];
    p.c = -(p.Q * one_minus_eta) / static_cast<double>(m);
    p.upper = Vector::Constant(m, 1.0 / static_cast<double>(m));
    p.y = y;
    p.d = y.dot(one_minus_eta) / static_cast<double>(m);
    p.s = nu;
    return p;
}

Vector recover_alpha(const Vector& beta, const std::vector<int>& eta, const Vector& y) {
    const Eigen::Index m = beta.size();
    if (y.size() != m || static_cast<Eigen::Index>(eta.size()) != m)
        throw dimension_error("recover_alpha dimension mismatch");
    const double inv_m = 1.0 / static_cast<double>(m);
    Vector alpha(m);
    for (Eigen::Index i = 0; i < m; ++i)
        alpha(i) = y(i) * (beta(i) - (1.0 - eta[static_cast<std::size_t>(i)]) * inv_m);
    return alpha;
}

RhoB recover_rho_b(const Vector& beta, const Vector& alpha, const Matrix& K, const Vector& y,
                   double box) {
    const Eigen::Index m = beta.size();
    const double margin = 1e-8 * box;
    Vector f = K * alpha;  // f(x_i)

    // For y=+1: b - rho = -f_i on free coords, with one-sided bounds at the
    // box ends. For y=-1: b + rho = -f_i likewise.
    struct Side {
        double sum = 0;
        int nfree = 0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
    };
    Side t_side, s_side;  // t = b - rho (+ class), s = b + rho (- class)
    for (Eigen::Index i = 0; i < m; ++i) {
        Side& side = y(i) > 0 ? t_side : s_side;
        const double v = -f(i);
        if (beta(i) > margin && beta(i) < box - margin) {
            side.sum += v;
            ++side.nfree;
        } else if (y(i) > 0) {
            // + class: beta=0 gives t >= v, beta=box gives t <= v
            if (beta(i) <= margin)
                side.lo = std::max(side.lo, v);
            else
                side.hi = std::min(side.hi, v);
        } else {
            // - class: beta=box gives s >= v, beta=0 gives s <= v
            if (beta(i) >= box - margin)
                side.lo = std::max(side.lo, v);
            else
                side.hi = std::min(side.hi, v);
        }
    }
    RhoB out;
    auto resolve = [&](const Side& side) -> double {
        if (side.nfree > 0) return side.sum / side.nfree;
        out.fallback = true;
        if (std::isinf(side.lo) && std::isinf(side.hi)) return 0;
        if (std::isinf(side.lo)) return side.hi;
        if (std::isinf(side.hi)) return side.lo;
        return 0.5 * (side.lo + side.hi);
    };
    const double t = resolve(t_side);
    const double s = resolve(s_side);
    out.b = 0.5 * (s + t);
    out.rho = 0.5 * (s - t);
    return out;
}

Model train(const Dataset& d, const TrainConfig& cfg) {
    return train_with_gram(d, gram(cfg.kernel, d.features), cfg);
}

Model train_with_gram(const Dataset& d, const GramMatrix& gm, const TrainConfig& cfg) {
    const Eigen::Index m = d.size();
    if (gm.entries.rows() != m) throw dimension_error("Gram size != dataset size");
    Eigen::Index pos = 0;
    for (int yi : d.labels) pos += (yi > 0);
    if (pos == 0 || pos == m) throw single_class_error();

    const Eigen::Index k_nu = level_count(cfg.nu, m, cfg.integrality);
    const Eigen::Index k_mu = level_count(cfg.mu, m, cfg.integrality);
    if (!(0 <= k_mu && k_mu < k_nu && k_nu < m))
        throw degenerate_levels_error("levels must satisfy 0 <= mu < nu < 1 after snapping");
    const double nu_eff = static_cast<double>(k_nu) / static_cast<double>(m);
    const double mu_eff = static_cast<double>(k_mu) / static_cast<double>(m);
    const double box = 1.0 / static_cast<double>(m);

    const Matrix& K = gm.entries;
    const Vector y = labels_to_vector(d.labels);

    Iterate best_overall;
    std::vector<double> best_trace;
    TrainStatus best_status = TrainStatus::Converged;

    for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
        std::vector<int> eta(static_cast<std::size_t>(m), 1);
        if (restart > 0 && k_mu > 0) {
            std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(restart));
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
            std::shuffle(idx.begin(), idx.end(), rng);
            for (Eigen::Index i = 0; i < k_mu; ++i) eta[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 0;
        }

        Iterate cur;
        std::vector<double> trace;
        std::set<std::vector<int>> seen;
        TrainStatus status = TrainStatus::IterLimit;

        for (int outer = 0; outer < cfg.max_outer_iter; ++outer) {
            seen.insert(eta);
            qp::QpProblem sub = build_subproblem(K, y, eta, nu_eff);
            if (!qp::feasible(sub))
                throw infeasible_error("robust SVM subproblem is infeasible (primal unbounded)");
            qp::QpSolution sol = qp::solve(sub, cfg.tol_qp);
            if (sol.status == qp::QpStatus::Infeasible)
                throw infeasible_error("robust SVM subproblem is infeasible (primal unbounded)");

            Vector alpha = recover_alpha(sol.beta, eta, y);
            RhoB rb = recover_rho_b(sol.beta, alpha, K, y, box);
            Vector margins = negative_margins(alpha, rb.b, K, y);
            double obj = primal_objective(rkhs_norm_sq(alpha, K), nu_eff, mu_eff, margins,
                                          LevelPolicy::Strict);

            if (obj > cur.objective + 1e-10 * std::max(1.0, std::abs(cur.objective))) {
                // Objective change is below the solver's noise floor; keep the
                // previous iterate.
                status = TrainStatus::Converged;
                break;
            }
            const double prev = cur.objective;
            cur = Iterate{std::move(alpha), sol.beta, rb.b, rb.rho, eta, obj, rb.fallback};
            trace.push_back(obj);

            if (std::isfinite(prev) && prev - obj < cfg.tol_objective * std::max(1.0, std::abs(obj))) {
                status = TrainStatus::Converged;
                break;
            }
            std::vector<int> next_eta = update_eta(margins, k_mu);
            if (next_eta == eta || seen.count(next_eta)) {
                status = TrainStatus::Converged;
                break;
            }
            eta = std::move(next_eta);
        }

        if (cur.objective < best_overall.objective) {
            best_overall = std::move(cur);
            best_trace = std::move(trace);
            best_status = status;
        }
    }

    Model model;
    model.alpha = best_overall.alpha;
    model.b = best_overall.b;
    model.rho = best_overall.rho;
    model.eta = best_overall.eta;
    model.kernel = gm.kernel;
    model.nu = nu_eff;
    model.mu = mu_eff;
    model.objective = best_overall.objective;
    model.trace = best_trace;
    model.status = best_status;
    model.rho_b_fallback = best_overall.rho_b_fallback;

    const double sup_tol = 1e-6 * box;
    for (Eigen::Index i = 0; i < m; ++i)
        if (std::abs(model.alpha(i)) > sup_tol) model.support_idx.push_back(i);
    model.train_rows = model.support_idx;
    if (d.dim() > 0) {
        model.train_features.resize(static_cast<Eigen::Index>(model.train_rows.size()), d.dim());
        for (std::size_t r = 0; r < model.train_rows.size(); ++r)
            model.train_features.row(static_cast<Eigen::Index>(r)) = d.features.row(model.train_rows[r]);
    }
    return model;
}

Prediction predict(const Model& model, const Matrix& X_new) {
    Matrix X = X_new;
    if (model.scaler) X = apply_scaler(X_new, *model.scaler);
    Vector a(static_cast<Eigen::Index>(model.train_rows.size()));
    for (std::size_t r = 0; r < model.train_rows.size(); ++r)
        a(static_cast<Eigen::Index>(r)) = model.alpha(model.train_rows[r]);
    Prediction pred;
    if (model.train_rows.empty()) {
        pred.scores = Vector::Constant(X.rows(), model.b);
    } else {
        pred.scores = eval_cross(model.kernel, model.train_features, X) * a;
        pred.scores.array() += model.b;
    }
    pred.labels.resize(static_cast<std::size_t>(pred.scores.size()));
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i)
        pred.labels[static_cast<std::size_t>(i)] = pred.scores(i) >= 0 ? +1 : -1;
    return pred;
}

namespace {

nlohmann::json kernel_to_json(const KernelSpec& k) {
    nlohmann::json j;
    switch (k.kind) {
        case KernelKind::Linear: j["kind"] = "linear"; break;
        case KernelKind::Gaussian: j["kind"] = "gaussian"; break;
        case KernelKind::Precomputed: j["kind"] = "precomputed"; break;
    }
    j["gamma"] = k.gamma;
    j["bounded"] = k.bounded();
    return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    KernelSpec k;
    const std::string kind = j.at("kind");
    if (kind == "linear")
        k.kind = KernelKind::Linear;
    else if (kind == "gaussian")
        k.kind = KernelKind::Gaussian;
    else if (kind == "precomputed")
        k.kind = KernelKind::Precomputed;
    else
        throw error("unknown kernel kind '" + kind + "'");
    k.gamma = j.at("gamma");
    k.declared_bounded = j.at("bounded");
    return k;
}

}  // namespace

std::string to_json(const Model& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["m"] = model.alpha.size();
    j["kernel"] = kernel_to_json(model.kernel);
    j["nu"] = model.nu;
    j["mu"] = model.mu;
    j["b"] = model.b;
    j["rho"] = model.rho;
    j["objective"] = model.objective;
    j["trace"] = model.trace;
    j["status"] = model.status == TrainStatus::Converged ? "converged" : "iter_limit";
    j["rho_b_fallback"] = model.rho_b_fallback;

    nlohmann::json support = nlohmann::json::array();
    for (std::size_t r = 0; r < model.train_rows.size(); ++r) {
        const Eigen::Index i = model.train_rows[r];
        nlohmann::json entry;
        entry["index"] = i;
        entry["alpha"] = model.alpha(i);
        std::vector<double> row(model.train_features.cols());
        for (Eigen::Index c = 0; c < model.train_features.cols(); ++c)
            row[static_cast<std::size_t>(c)] = model.train_features(static_cast<Eigen::Index>(r), c);
        entry["x"] = row;
        support.push_back(entry);
    }
    j["support"] = support;

    std::vector<Eigen::Index> eta_zero;
    for (std::size_t i = 0; i < model.eta.size(); ++i)
        if (model.eta[i] == 0) eta_zero.push_back(static_cast<Eigen::Index>(i));
    j["eta_zero"] = eta_zero;

    if (model.scaler) {
        nlohmann::json sc;
        sc["mean"] = std::vector<double>(model.scaler->mean.data(),
                                         model.scaler->mean.data() + model.scaler->mean.size());
        sc["sd"] = std::vector<double>(model.scaler->sd.data(),
                                       model.scaler->sd.data() + model.scaler->sd.size());
        sc["zero_variance"] = model.scaler->zero_variance;
        j["scaler"] = sc;
    } else {
        j["scaler"] = nullptr;
    }
    return j.dump(2);
}

Model model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format_version").get<int>() != 1) throw error("unsupported model format version");
    Model model;
    const Eigen::Index m = j.at("m");
    model.alpha = Vector::Zero(m);
    model.kernel = kernel_from_json(j.at("kernel"));
    model.nu = j.at("nu");
    model.mu = j.at("mu");
    model.b = j.at("b");
    model.rho = j.at("rho");
    model.objective = j.at("objective");
    model.trace = j.at("trace").get<std::vector<double>>();
    model.status = j.at("status") == "converged" ? TrainStatus::Converged : TrainStatus::IterLimit;
    model.rho_b_fallback = j.at("rho_b_fallback");

    const auto& support = j.at("support");
    Eigen::Index dim = 0;
    if (!support.empty()) dim = static_cast<Eigen::Index>(support.front().at("x").size());
    model.train_features.resize(static_cast<Eigen::Index>(support.size()), dim);
    for (std::size_t r = 0; r < support.size(); ++r) {
        const Eigen::Index i = support[r].at("index");
        model.alpha(i) = support[r].at("alpha");
        model.train_rows.push_back(i);
        model.support_idx.push_back(i);
        const auto& row = support[r].at("x");
        for (Eigen::Index c = 0; c < dim; ++c)
            model.train_features(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }

    model.eta.assign(static_cast<std::size_t>(m), 1);
    for (const auto& i : j.at("eta_zero")) model.eta[i.get<std::size_t>()] = 0;

    if (!j.at("scaler").is_null()) {
        const auto& sc = j.at("scaler");
        ScalerStats stats;
        auto mean = sc.at("mean").get<std::vector<double>>();
        auto sd = sc.at("sd").get<std::vector<double>>();
        stats.mean = Eigen::Map<Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        stats.sd = Eigen::Map<Vector>(sd.data(), static_cast<Eigen::Index>(sd.size()));
        stats.zero_variance = sc.at("zero_variance").get<std::vector<bool>>();
        model.scaler = stats;
    }
    return model;
}

void save_model(const Model& model, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw error("cannot open for writing: " + tmp);
        out << to_json(model) << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw error("cannot rename " + tmp + " to " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw missing_file_error(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

}  // namespace trimsvm
