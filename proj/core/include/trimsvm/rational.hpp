#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "trimsvm/errors.hpp"

namespace trimsvm {

/// Exact rational with int64 numerator/denominator. Comparisons go through
/// 128-bit cross products, so lattice boundary cases (nu - mu == 2(r - 2mu))
/// are decided exactly rather than through floating-point rounding.
struct Rat {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rat() = default;
    Rat(std::int64_t n) : num(n), den(1) {}
    Rat(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend Rat operator+(Rat a, Rat b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
    friend Rat operator-(Rat a, Rat b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
    friend Rat operator*(Rat a, Rat b) { return Rat(a.num * b.num, a.den * b.den); }
    friend Rat operator/(Rat a, Rat b) {
        if (b.num == 0) throw error("rational division by zero");
        return Rat(a.num * b.den, a.den * b.num);
    }
    friend Rat operator-(Rat a) { return Rat(-a.num, a.den); }

    friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }
    friend bool operator!=(Rat a, Rat b) { return !(a == b); }
    friend bool operator<(Rat a, Rat b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator>(Rat a, Rat b) { return b < a; }
    friend bool operator<=(Rat a, Rat b) { return !(b < a); }
    friend bool operator>=(Rat a, Rat b) { return !(a < b); }
};

/// Best rational approximation of x with denominator at most max_den
/// (continued-fraction expansion). Recovers lattice values like 73/100 or
/// i/m exactly from their double representations.
Rat rationalize(double x, std::int64_t max_den = 1'000'000);

}  // namespace trimsvm
