#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trimsvm/types.hpp"

namespace trimsvm {

/// Labeled binary classification dataset. Labels are always +1/-1; ids are
/// stable sample identifiers that survive standardization and contamination
/// (contaminated rows get fresh ids or keep their id with changed content,
/// see contamination_distance).
struct Dataset {
    Matrix features;              // m x d
    std::vector<int> labels;      // each +1 or -1
    std::vector<std::int64_t> ids;
    std::vector<std::string> feature_names;
    // Recorded mapping when the input labels were not already {+1,-1}:
    // first = token mapped to +1, second = token mapped to -1.
    std::optional<std::pair<std::string, std::string>> label_mapping;

    Eigen::Index size() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

/// Per-feature standardization statistics (sample standard deviation,
/// n-1 denominator). Zero-variance columns keep sd == 0 and are flagged.
struct ScalerStats {
    Vector mean;
    Vector sd;
    std::vector<bool> zero_variance;
};

Dataset load_csv(const std::string& path, const std::string& label_column);
Dataset load_csv(const std::string& path, Eigen::Index label_column);
Dataset load_libsvm(const std::string& path);
void save_csv(const Dataset& d, const std::string& path);

std::pair<Dataset, ScalerStats> standardize(const Dataset& d);
Matrix apply_scaler(const Matrix& X, const ScalerStats& stats);
Matrix invert_scaler(const Matrix& Z, const ScalerStats& stats);

/// Minority class fraction, in [0, 1/2].
double label_ratio(const Dataset& d);

}  // namespace trimsvm
