#include "trimsvm/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "trimsvm/errors.hpp"

namespace trimsvm {

std::vector<std::vector<Eigen::Index>> stratified_kfold(const Dataset& d, int k,
                                                        std::uint64_t seed) {
    if (k < 2) throw error("k must be >= 2");
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        (d.labels[static_cast<std::size_t>(i)] > 0 ? pos : neg).push_back(i);
    if (static_cast<int>(pos.size()) < k || static_cast<int>(neg.size()) < k)
        throw too_few_samples_error("each class needs at least k members");

    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
    // round-robin per class keeps per-fold class counts within 1
    for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

namespace {

Dataset take_rows(const Dataset& d, const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), d.dim());
    out.labels.reserve(rows.size());
    out.ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = d.features.row(rows[r]);
        out.labels.push_back(d.labels[static_cast<std::size_t>(rows[r])]);
        out.ids.push_back(d.ids.empty() ? static_cast<std::int64_t>(rows[r])
                                        : d.ids[static_cast<std::size_t>(rows[r])]);
    }
    out.feature_names = d.feature_names;
    return out;
}

}  // namespace

CvTable grid_search_cv(const Dataset& d, const std::vector<std::pair<double, double>>& grid, int k,
                       const TrainConfig& cfg_template, std::uint64_t seed) {
    if (grid.empty()) throw error("empty parameter grid");
    const auto folds = stratified_kfold(d, k, seed);

    CvTable table;
    bool any_success = false;
    for (const auto& [nu, mu] : grid) {
        CvCell cell;
        cell.nu = nu;
        cell.mu = mu;
        std::vector<double> errors;
        for (int f = 0; f < k; ++f) {
            std::vector<Eigen::Index> train_rows;
            for (int g = 0; g < k; ++g)
                if (g != f)
                    train_rows.insert(train_rows.end(), folds[static_cast<std::size_t>(g)].begin(),
                                      folds[static_cast<std::size_t>(g)].end());
            std::sort(train_rows.begin(), train_rows.end());
            const Dataset train_set = take_rows(d, train_rows);
            const Dataset val_set = take_rows(d, folds[static_cast<std::size_t>(f)]);

            TrainConfig cfg = cfg_template;
            cfg.nu = nu;
            cfg.mu = mu;
            cfg.seed = seed + 7919ULL * static_cast<std::uint64_t>(f);
            double err;
            try {
                Model model = train(train_set, cfg);
                Prediction pred = predict(model, val_set.features);
                Eigen::Index wrong = 0;
                for (Eigen::Index i = 0; i < val_set.size(); ++i)
                    wrong += pred.labels[static_cast<std::size_t>(i)] !=
                             val_set.labels[static_cast<std::size_t>(i)];
                err = static_cast<double>(wrong) / static_cast<double>(val_set.size());
                any_success = true;
            } catch (const infeasible_error&) {
                err = 1.0;
                ++cell.failed_folds;
            } catch (const degenerate_levels_error&) {
                // a lattice point valid at full m can snap to mu >= nu on the
                // smaller fold; score it like an infeasible fold
                err = 1.0;
                ++cell.failed_folds;
            }
            errors.push_back(err);
        }
        cell.mean_error = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
        double ss = 0;
        for (double e : errors) ss += (e - cell.mean_error) * (e - cell.mean_error);
        cell.sd_error = errors.size() > 1 ? std::sqrt(ss / (errors.size() - 1)) : 0.0;
        table.cells.push_back(cell);
    }
    if (!any_success) throw infeasible_error("every fold of every grid point was infeasible");

    const CvCell* best = &table.cells.front();
    for (const CvCell& c : table.cells) {
        if (c.mean_error < best->mean_error ||
            (c.mean_error == best->mean_error &&
             (c.nu < best->nu || (c.nu == best->nu && c.mu < best->mu))))
            best = &c;
    }
    table.chosen_nu = best->nu;
    table.chosen_mu = best->mu;
    return table;
}

std::string cv_to_csv(const CvTable& table) {
    std::ostringstream out;
    out << "nu,mu,mean_error,sd_error,failed_folds,chosen\n";
    out.precision(17);
    for (const CvCell& c : table.cells)
        out << c.nu << ',' << c.mu << ',' << c.mean_error << ',' << c.sd_error << ','
            << c.failed_folds << ',' << (c.nu == table.chosen_nu && c.mu == table.chosen_mu ? 1 : 0)
            << '\n';
    return out.str();
}

}  // namespace trimsvm
