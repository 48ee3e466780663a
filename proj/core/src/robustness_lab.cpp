#include "trimsvm/robustness_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "trimsvm/errors.hpp"
#include "trimsvm/kernel.hpp"

namespace trimsvm {

Dataset spiral(Eigen::Index m, double noise_sd, std::uint64_t seed) {
    if (m < 4 || m % 2 != 0) throw error("spiral needs an even m >= 4");
    if (noise_sd < 0) throw error("noise_sd must be nonnegative");
    const Eigen::Index half = m / 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    Dataset d;
    d.features.resize(m, 2);
    d.labels.resize(static_cast<std::size_t>(m));
    d.ids.resize(static_cast<std::size_t>(m));
    d.feature_names = {"x1", "x2"};

    // theta in [pi/2, pi/2 + 3pi] (1.5 turns), radius proportional to theta;
    // the second spiral is the first rotated by pi.
    const double theta0 = M_PI / 2, span = 3 * M_PI;
    for (Eigen::Index i = 0; i < m; ++i) {
        const bool positive = i < half;
        const Eigen::Index j = positive ? i : i - half;
        const double t = half > 1 ? static_cast<double>(j) / static_cast<double>(half - 1) : 0.0;
        const double theta = theta0 + span * t;
        const double radius = theta / (theta0 + span);
        const double phase = positive ? 0.0 : M_PI;
        d.features(i, 0) = radius * std::cos(theta + phase);
        d.features(i, 1) = radius * std::sin(theta + phase);
        if (noise_sd > 0) {
            d.features(i, 0) += noise_sd * noise(rng);
            d.features(i, 1) += noise_sd * noise(rng);
        }
        d.labels[static_cast<std::size_t>(i)] = positive ? +1 : -1;
        d.ids[static_cast<std::size_t>(i)] = i;
    }
    return d;
}

Dataset contaminate(const Dataset& d, const ContaminationSpec& spec) {
    const Eigen::Index m = d.size();
    std::vector<Eigen::Index> pool;
    for (Eigen::Index i = 0; i < m; ++i) {
        const int cls = spec.mode == ContaminationMode::AdversarialFlipNegatives ? -1 : +1;
        if (d.labels[static_cast<std::size_t>(i)] == cls) pool.push_back(i);
    }
    if (spec.count < 0 || spec.count > static_cast<Eigen::Index>(pool.size()))
        throw count_too_large_error("contamination count exceeds the class size");

    Dataset out = d;
    if (spec.count == 0) return out;

    std::vector<Eigen::Index> chosen;
    if (spec.mode == ContaminationMode::AdversarialFlipNegatives) {
        chosen.assign(pool.begin(), pool.begin() + spec.count);  // first negatives by index
    } else {
        std::mt19937_64 rng(spec.seed);
        std::shuffle(pool.begin(), pool.end(), rng);
        chosen.assign(pool.begin(), pool.begin() + spec.count);
        std::sort(chosen.begin(), chosen.end());
    }

    switch (spec.mode) {
        case ContaminationMode::FlipPositiveLabels:
        case ContaminationMode::AdversarialFlipNegatives:
            for (Eigen::Index i : chosen)
                out.labels[static_cast<std::size_t>(i)] = -d.labels[static_cast<std::size_t>(i)];
            break;
        case ContaminationMode::ReplacePositiveWithOutliers: {
            if (!(spec.outlier_scale > 0)) throw error("outlier_scale must be positive");
            const Vector centroid = d.features.colwise().mean();
            std::mt19937_64 rng(spec.seed + 0x9e3779b97f4a7c15ULL);
            std::uniform_real_distribution<double> u(-spec.outlier_scale, spec.outlier_scale);
            std::int64_t fresh_id = *std::max_element(d.ids.begin(), d.ids.end()) + 1;
            for (Eigen::Index i : chosen) {
                for (Eigen::Index c = 0; c < d.dim(); ++c) out.features(i, c) = centroid(c) + u(rng);
                out.ids[static_cast<std::size_t>(i)] = fresh_id++;
            }
            break;
        }
    }
    return out;
}

Eigen::Index contamination_distance(const Dataset& d, const Dataset& d_prime) {
    std::unordered_map<std::int64_t, Eigen::Index> by_id;
    for (Eigen::Index i = 0; i < d.size(); ++i) by_id.emplace(d.ids[static_cast<std::size_t>(i)], i);
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < d_prime.size(); ++j) {
        auto it = by_id.find(d_prime.ids[static_cast<std::size_t>(j)]);
        if (it == by_id.end()) continue;
        const Eigen::Index i = it->second;
        if (d.labels[static_cast<std::size_t>(i)] == d_prime.labels[static_cast<std::size_t>(j)] &&
            (d.features.row(i) - d_prime.features.row(j)).cwiseAbs().maxCoeff() == 0.0)
            ++kept;
    }
    return kept;
}

std::vector<int> adversarial_eta(const Dataset& d_flipped, Eigen::Index count) {
    std::vector<int> eta(static_cast<std::size_t>(d_flipped.size()), 1);
    Eigen::Index zeroed = 0;
    for (Eigen::Index i = 0; i < d_flipped.size() && zeroed < count; ++i) {
        if (d_flipped.labels[static_cast<std::size_t>(i)] == -1) {
            eta[static_cast<std::size_t>(i)] = 0;
            ++zeroed;
        }
    }
    if (zeroed < count) throw count_too_large_error("fewer negatives than requested zeros");
    return eta;
}

SweepResult breakdown_sweep(const Dataset& d_clean, const std::vector<std::pair<double, double>>& grid,
                            const ContaminationSpec& spec_template, int trials,
                            const TrainConfig& cfg_template, const Dataset& test_set) {
    if (grid.empty()) throw error("empty parameter grid");
    if (trials < 1) throw error("trials must be >= 1");
    const Eigen::Index m = d_clean.size();

    SweepResult result;
    result.seed = spec_template.seed;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        SweepRecord rec;
        rec.nu = grid[g].first;
        rec.mu = grid[g].second;
        rec.trials = trials;
        const Eigen::Index count = static_cast<Eigen::Index>(std::llround(rec.mu * static_cast<double>(m)));
        for (int t = 0; t < trials; ++t) {
            ContaminationSpec spec = spec_template;
            spec.count = count;
            spec.seed = spec_template.seed + 1000003ULL * g + static_cast<std::uint64_t>(t);
            Dataset d_prime = contaminate(d_clean, spec);

            TrainConfig cfg = cfg_template;
            cfg.nu = rec.nu;
            cfg.mu = rec.mu;
            cfg.seed = spec.seed;
            try {
                GramMatrix gm = gram(cfg.kernel, d_prime.features);
                Model model = train_with_gram(d_prime, gm, cfg);
                rec.max_norm_f = std::max(rec.max_norm_f, std::sqrt(rkhs_norm_sq(model.alpha, gm)));
                rec.max_abs_b = std::max(rec.max_abs_b, std::abs(model.b));
                Prediction pred = predict(model, test_set.features);
                Eigen::Index wrong = 0;
                for (Eigen::Index i = 0; i < test_set.size(); ++i)
                    wrong += pred.labels[static_cast<std::size_t>(i)] !=
                             test_set.labels[static_cast<std::size_t>(i)];
                rec.max_test_error =
                    std::max(rec.max_test_error, static_cast<double>(wrong) / test_set.size());
            } catch (const infeasible_error&) {
                ++rec.unbounded_count;
            }
        }
        result.records.push_back(rec);
    }
    return result;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "nu,mu,max_norm_f,max_abs_b,max_test_error,unbounded_count\n";
    out.precision(17);
    for (const SweepRecord& r : result.records)
        out << r.nu << ',' << r.mu << ',' << r.max_norm_f << ',' << r.max_abs_b << ','
            << r.max_test_error << ',' << r.unbounded_count << '\n';
    return out.str();
}

}  // namespace trimsvm
