#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trimsvm/dataset.hpp"
#include "trimsvm/trainer.hpp"

namespace trimsvm {

/// Two interleaved Archimedean spirals (radius proportional to angle, 1.5
/// turns), m/2 points per class, labels +1/-1, i.i.d. Gaussian coordinate
/// noise. Deterministic given the seed.
Dataset spiral(Eigen::Index m, double noise_sd, std::uint64_t seed);

enum class ContaminationMode {
    ReplacePositiveWithOutliers,  // overwrite `count` positive rows with box-uniform outliers
    FlipPositiveLabels,           // relabel `count` positives as -1
    AdversarialFlipNegatives,     // relabel the first `count` negatives as +1
};

struct ContaminationSpec {
    ContaminationMode mode = ContaminationMode::ReplacePositiveWithOutliers;
    Eigen::Index count = 0;
    double outlier_scale = 1e4;  // box half-width around the centroid (replacement mode)
    std::uint64_t seed = 0;
};

Dataset contaminate(const Dataset& d, const ContaminationSpec& spec);

/// Number of rows of d retained unchanged in d_prime, matched by sample id
/// and content; |D' intersect D| >= m - count certifies D_count membership.
Eigen::Index contamination_distance(const Dataset& d, const Dataset& d_prime);

/// The eta that keeps every sample except `count` of the still-negative rows
/// of the flipped dataset (the construction used to prove hull emptiness
/// beyond the key inequality).
std::vector<int> adversarial_eta(const Dataset& d_flipped, Eigen::Index count);

struct SweepRecord {
    double nu = 0, mu = 0;
    double max_norm_f = 0;
    double max_abs_b = 0;
    double max_test_error = 0;
    int unbounded_count = 0;  // trials that hit an infeasible subproblem
    int trials = 0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::uint64_t seed = 0;
};

SweepResult breakdown_sweep(const Dataset& d_clean, const std::vector<std::pair<double, double>>& grid,
                            const ContaminationSpec& spec_template, int trials,
                            const TrainConfig& cfg_template, const Dataset& test_set);

std::string sweep_to_csv(const SweepResult& result);

}  // namespace trimsvm
