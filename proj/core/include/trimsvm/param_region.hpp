#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trimsvm/rational.hpp"

namespace trimsvm {

/// Breakdown-point classification of a (nu, mu) pair at label ratio r.
enum class Classification {
    FullBreakdownMu,            // breakdown point of (f, b) equals mu
    FunctionOnlyMu_BiasLower,   // f breaks at mu, b only bounded below by mu - l/m
    BelowMu,                    // breakdown point below mu
};

std::string classification_name(Classification c);

struct KeyInequality {
    bool mu_ok = false;   // mu < r/2
    bool holds = false;   // nu - mu <= 2(r - 2mu)
    bool strict = false;  // nu - mu <  2(r - 2mu)
};

KeyInequality key_inequality_holds(Rat nu, Rat mu, Rat r);
KeyInequality key_inequality_holds(double nu, double mu, double r);

/// Smallest l in {0, 1, ...} with 0 <= 2(mu - l/m) < nu - mu < 2(r - 2mu),
/// or nullopt when the strict right inequality fails or no such l exists.
std::optional<std::int64_t> bias_ell(Rat nu, Rat mu, Rat r, std::int64_t m);
std::optional<std::int64_t> bias_ell(double nu, double mu, double r, std::int64_t m);

struct RegionReport {
    Rat nu, mu, r;
    bool mu_lt_half_r = false;
    bool key_inequality = false;
    bool strict_inequality = false;
    std::optional<std::int64_t> bias_ell;  // needs m; filled by classify_report
    Classification classification = Classification::BelowMu;
};

Classification classify(Rat nu, Rat mu, Rat r, bool kernel_bounded);
Classification classify(double nu, double mu, double r, bool kernel_bounded);

RegionReport classify_report(Rat nu, Rat mu, Rat r, bool kernel_bounded,
                             std::optional<std::int64_t> m = std::nullopt);

/// Admissible parameter regions. With an outlier-ratio bound mu_bar given,
/// the regions additionally cap mu at mu_bar and use label-ratio bounds
/// r' -+ mu_bar; without it the worst-case bounds 2r'/3 and min(2r', 1/2)
/// apply with no mu cap.
struct LambdaRegions {
    Rat r_low, r_up;
    std::optional<Rat> mu_cap;

    bool in_low(Rat nu, Rat mu) const;
    bool in_up(Rat nu, Rat mu) const;
};

LambdaRegions lambda_regions(Rat r_prime, std::optional<Rat> mu_bar = std::nullopt);
LambdaRegions lambda_regions(double r_prime, std::optional<double> mu_bar = std::nullopt);

/// Lattice points (i/m, j/m) inside the region, mu-major then nu order,
/// subsampled deterministically to at most n_points. Throws EmptyRegion when
/// no lattice point qualifies.
std::vector<std::pair<Rat, Rat>> grid(const std::function<bool(Rat, Rat)>& region, std::int64_t m,
                                      std::size_t n_points);

}  // namespace trimsvm
