#include "trimsvm/param_region.hpp"

#include <algorithm>
#include <cmath>

namespace trimsvm {

Rat rationalize(double x, std::int64_t max_den) {
    if (!std::isfinite(x)) throw error("cannot rationalize a non-finite value");
    const bool neg = x < 0;
    double v = neg ? -x : x;
    // continued fraction convergents
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    for (int iter = 0; iter < 64; ++iter) {
        const double a_f = std::floor(frac);
        if (a_f > 9e18) break;
        const std::int64_t a = static_cast<std::int64_t>(a_f);
        const std::int64_t p2 = a * p1 + p0;
        const std::int64_t q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double rem = frac - a_f;
        if (rem < 1e-15 * std::max(1.0, v)) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) return Rat(neg ? -p0 : p0, q0);
    return Rat(neg ? -p1 : p1, q1);
}

std::string classification_name(Classification c) {
    switch (c) {
        case Classification::FullBreakdownMu: return "full_breakdown_mu";
        case Classification::FunctionOnlyMu_BiasLower: return "function_only_mu_bias_lower";
        case Classification::BelowMu: return "below_mu";
    }
    return "?";
}

KeyInequality key_inequality_holds(Rat nu, Rat mu, Rat r) {
    if (!(Rat(0) <= mu && mu < nu && nu < Rat(1))) throw error("require 0 <= mu < nu < 1");
    if (!(Rat(0) < r && r <= Rat(1, 2))) throw error("require 0 < r <= 1/2");
    KeyInequality k;
    k.mu_ok = mu < r / Rat(2);
    const Rat lhs = nu - mu;
    const Rat rhs = Rat(2) * (r - Rat(2) * mu);
    k.holds = lhs <= rhs;
    k.strict = lhs < rhs;
    return k;
}

KeyInequality key_inequality_holds(double nu, double mu, double r) {
    return key_inequality_holds(rationalize(nu), rationalize(mu), rationalize(r));
}

std::optional<std::int64_t> bias_ell(Rat nu, Rat mu, Rat r, std::int64_t m) {
    const KeyInequality k = key_inequality_holds(nu, mu, r);
    if (!k.strict) return std::nullopt;
    const Rat diff = nu - mu;
    for (std::int64_t ell = 0;; ++ell) {
        const Rat left = Rat(2) * (mu - Rat(ell, m));
        if (left < Rat(0)) return std::nullopt;  // exhausted 0 <= 2(mu - l/m)
        if (left < diff) return ell;
    }
}

std::optional<std::int64_t> bias_ell(double nu, double mu, double r, std::int64_t m) {
    return bias_ell(rationalize(nu), rationalize(mu), rationalize(r), m);
}

Classification classify(Rat nu, Rat mu, Rat r, bool kernel_bounded) {
    const KeyInequality k = key_inequality_holds(nu, mu, r);
    if (!k.mu_ok) throw mu_too_large_error("mu must be below r/2");
    if (kernel_bounded) return k.holds ? Classification::FullBreakdownMu : Classification::BelowMu;
    const Rat diff = nu - mu;
    const Rat two_mu = Rat(2) * mu;
    const Rat rhs = Rat(2) * (r - two_mu);
    if (two_mu < diff && diff <= rhs) return Classification::FullBreakdownMu;
    if (Rat(0) < diff && diff < std::min(two_mu, rhs)) return Classification::FunctionOnlyMu_BiasLower;
    return Classification::BelowMu;
}

Classification classify(double nu, double mu, double r, bool kernel_bounded) {
    return classify(rationalize(nu), rationalize(mu), rationalize(r), kernel_bounded);
}

RegionReport classify_report(Rat nu, Rat mu, Rat r, bool kernel_bounded,
                             std::optional<std::int64_t> m) {
    RegionReport rep;
    rep.nu = nu;
    rep.mu = mu;
    rep.r = r;
    const KeyInequality k = key_inequality_holds(nu, mu, r);
    rep.mu_lt_half_r = k.mu_ok;
    rep.key_inequality = k.holds;
    rep.strict_inequality = k.strict;
    if (m) rep.bias_ell = bias_ell(nu, mu, r, *m);
    rep.classification = classify(nu, mu, r, kernel_bounded);
    return rep;
}

bool LambdaRegions::in_low(Rat nu, Rat mu) const {
    if (mu < Rat(0)) return false;
    if (mu_cap && mu > *mu_cap) return false;
    const Rat diff = nu - mu;
    return Rat(0) < diff && diff < Rat(2) * (r_low - Rat(2) * mu);
}

bool LambdaRegions::in_up(Rat nu, Rat mu) const {
    if (mu < Rat(0)) return false;
    if (mu_cap && mu > *mu_cap) return false;
    const Rat diff = nu - mu;
    return Rat(0) < diff && diff < Rat(2) * (r_up - Rat(2) * mu);
}

LambdaRegions lambda_regions(Rat r_prime, std::optional<Rat> mu_bar) {
    if (!(Rat(0) < r_prime && r_prime <= Rat(1, 2))) throw error("require 0 < r' <= 1/2");
    LambdaRegions out;
    if (mu_bar) {
        out.r_low = std::max(r_prime - *mu_bar, Rat(0));
        out.r_up = std::min(r_prime + *mu_bar, Rat(1, 2));
        out.mu_cap = *mu_bar;
    } else {
        out.r_low = Rat(2) * r_prime / Rat(3);
        out.r_up = std::min(Rat(2) * r_prime, Rat(1, 2));
    }
    return out;
}

LambdaRegions lambda_regions(double r_prime, std::optional<double> mu_bar) {
    std::optional<Rat> mb;
    if (mu_bar) mb = rationalize(*mu_bar);
    return lambda_regions(rationalize(r_prime), mb);
}

std::vector<std::pair<Rat, Rat>> grid(const std::function<bool(Rat, Rat)>& region, std::int64_t m,
                                      std::size_t n_points) {
    if (n_points < 1) throw error("n_points must be >= 1");
    std::vector<std::pair<Rat, Rat>> all;
    for (std::int64_t j = 0; j < m; ++j) {        // mu = j/m
        for (std::int64_t i = j + 1; i < m; ++i)  // nu = i/m, nu > mu
            if (region(Rat(i, m), Rat(j, m))) all.emplace_back(Rat(i, m), Rat(j, m));
    }
    if (all.empty()) throw empty_region_error("no lattice point lies inside the region");
    if (all.size() <= n_points) return all;
    // deterministic thinning: evenly spaced ranks over the mu-major order
    std::vector<std::pair<Rat, Rat>> out;
    out.reserve(n_points);
    for (std::size_t t = 0; t < n_points; ++t) {
        const std::size_t pos = t * (all.size() - 1) / (n_points - 1 ? n_points - 1 : 1);
        out.push_back(all[pos]);
    }
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& a, const auto& b) {
                              return a.first == b.first && a.second == b.second;
                          }),
              out.end());
    return out;
}

}  // namespace trimsvm
