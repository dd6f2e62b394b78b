#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tnsurf {

// Exact rational with the sign carried by the numerator and den > 0.
// Always stored in lowest terms; all rotation-number comparisons in the
// combinatorial layer go through this type, never through doubles.
struct Rational {
    long long num = 0;
    long long den = 1;

    constexpr Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) { normalize(); }
    Rational(long long n) : num(n), den(1) {}

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    Rational operator-() const { return Rational(-num, den); }
    Rational operator+(const Rational& o) const {
        return Rational(num * o.den + o.num * den, den * o.den);
    }
    Rational operator-(const Rational& o) const {
        return Rational(num * o.den - o.num * den, den * o.den);
    }
    Rational operator*(const Rational& o) const {
        return Rational(num * o.num, den * o.den);
    }

    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return num * o.den < o.num * den; }

    bool is_zero() const { return num == 0; }
    double value() const { return double(num) / double(den); }

    // Representative in [0,1): fractional part of the rotation number.
    Rational mod1() const {
        long long r = num % den;
        if (r < 0) r += den;
        return Rational(r, den);
    }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    // Parses "p/q" or "p". Throws std::invalid_argument on malformed input.
    static Rational parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("rational: empty string");
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return Rational(std::stoll(s), 1);
            long long n = std::stoll(s.substr(0, slash));
            long long d = std::stoll(s.substr(slash + 1));
            return Rational(n, d);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("rational: cannot parse '" + s + "'");
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("rational: out of range '" + s + "'");
        }
    }
};

} // namespace tnsurf
