#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trimsvm/dataset.hpp"
#include "trimsvm/trainer.hpp"

namespace trimsvm {

/// Disjoint index folds with per-class counts balanced within 1.
/// Deterministic given the seed. Requires every class to have >= k members.
std::vector<std::vector<Eigen::Index>> stratified_kfold(const Dataset& d, int k,
                                                        std::uint64_t seed);

struct CvCell {
    double nu = 0, mu = 0;
    double mean_error = 0;
    double sd_error = 0;
    int failed_folds = 0;  // infeasible folds, scored as error 1.0
};

struct CvTable {
    std::vector<CvCell> cells;
    double chosen_nu = 0, chosen_mu = 0;
};

/// k-fold grid search. An infeasible fold scores error 1.0 so a parameter
/// choice that breaks down can never win. Ties on mean error go to smaller
/// nu, then smaller mu. Throws only if every fold of every grid point fails.
CvTable grid_search_cv(const Dataset& d, const std::vector<std::pair<double, double>>& grid, int k,
                       const TrainConfig& cfg_template, std::uint64_t seed);

std::string cv_to_csv(const CvTable& table);

}  // namespace trimsvm
