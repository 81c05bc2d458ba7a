#pragma once

// Elements of Q_p at bounded relative precision.
//
// A nonzero number is stored as p^v * u with u a unit known modulo p^N, where
// N is the number of significant base-p digits carried. Valuations are always
// exact: an operation that cannot determine the valuation of its result
// throws PrecisionExhausted instead of guessing.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/error.hpp"

namespace padyn {

inline constexpr int kDefaultPrecision = 64;

/// Stand-in for +infinity in valuation bookkeeping (valuation of an exact zero).
inline constexpr std::int64_t kInfiniteValuation = std::numeric_limits<std::int64_t>::max() / 4;

namespace detail {

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0 || n % 3 == 0) return false;
    for (std::int64_t d = 5; d <= n / d; d += 6) {
        if (n % d == 0 || n % (d + 2) == 0) return false;
    }
    return true;
}

/// p^e for e >= 0, memoized per thread.
inline const mpz_class& prime_power(std::int64_t p, std::int64_t e) {
    thread_local std::map<std::pair<std::int64_t, std::int64_t>, mpz_class> cache;
    auto [it, inserted] = cache.try_emplace({p, e});
    if (inserted) mpz_ui_pow_ui(it->second.get_mpz_t(), static_cast<unsigned long>(p),
                                static_cast<unsigned long>(e));
    return it->second;
}

/// Strips every factor p from `value` (nonzero) and returns how many were removed.
inline std::int64_t remove_factor(mpz_class& value, std::int64_t p) {
    if (value == 0) return 0;
    mpz_class prime(static_cast<unsigned long>(p));
    return static_cast<std::int64_t>(mpz_remove(value.get_mpz_t(), value.get_mpz_t(), prime.get_mpz_t()));
}

inline std::int64_t valuation_of(const mpz_class& value, std::int64_t p) {
    mpz_class copy = value;
    return remove_factor(copy, p);
}

inline mpz_class mod_positive(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

inline mpz_class inverse_mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        fail(ErrorKind::DivisionByZero, "element is not invertible modulo p^N");
    return r;
}

inline void require_prime(std::int64_t p) {
    if (!is_prime(p)) fail(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
}

} // namespace detail

/// |x|_p as either 0 or p^(-exponent). Ordered by size of the norm.
class NormValue {
public:
    static constexpr NormValue zero() noexcept { return NormValue(true, 0); }
    static constexpr NormValue from_exponent(std::int64_t e) noexcept { return NormValue(false, e); }

    constexpr bool is_zero() const noexcept { return zero_; }
    /// e such that the norm is p^(-e); meaningless for zero.
    constexpr std::int64_t exponent() const noexcept { return exponent_; }

    friend constexpr bool operator==(NormValue a, NormValue b) noexcept {
        return a.zero_ == b.zero_ && (a.zero_ || a.exponent_ == b.exponent_);
    }
    friend constexpr std::strong_ordering operator<=>(NormValue a, NormValue b) noexcept {
        if (a.zero_ || b.zero_) return b.zero_ <=> a.zero_;
        return b.exponent_ <=> a.exponent_;
    }
    friend constexpr NormValue operator*(NormValue a, NormValue b) noexcept {
        if (a.zero_ || b.zero_) return zero();
        return from_exponent(a.exponent_ + b.exponent_);
    }

    std::string str(std::int64_t p) const {
        if (zero_) return "0";
        return std::to_string(p) + "^" + std::to_string(-exponent_);
    }

private:
    constexpr NormValue(bool z, std::int64_t e) noexcept : zero_(z), exponent_(e) {}
    bool zero_;
    std::int64_t exponent_;
};

class PAdicNumber {
public:
    /// Exact zero of Q_p.
    /// The 2-adic zero; placeholder for report fields.
    PAdicNumber() = default;

    static PAdicNumber zero(std::int64_t p, int precision = kDefaultPrecision) {
        PAdicNumber z;
        z.prime_ = p;
        z.precision_ = precision;
        return z;
    }

    /// p^valuation * unit, with unit reduced modulo p^precision. A unit divisible
    /// by p is renormalized into the valuation.
    static PAdicNumber from_parts(std::int64_t p, std::int64_t valuation, mpz_class unit, int precision) {
        if (precision < 1) fail(ErrorKind::BadParameter, "precision must be >= 1");
        if (unit == 0) fail(ErrorKind::BadParameter, "unit part must be nonzero");
        PAdicNumber x;
        x.prime_ = p;
        x.precision_ = precision;
        x.zero_ = false;
        x.valuation_ = valuation + detail::remove_factor(unit, p);
        x.unit_ = detail::mod_positive(unit, detail::prime_power(p, precision));
        return x;
    }

    static PAdicNumber from_integer(const mpz_class& n, std::int64_t p, int precision = kDefaultPrecision) {
        if (n == 0) return zero(p, precision);
        return from_parts(p, 0, n, precision);
    }

    static PAdicNumber from_rational(const mpq_class& q, std::int64_t p, int precision = kDefaultPrecision) {
        if (q == 0) return zero(p, precision);
        mpz_class num = q.get_num();
        mpz_class den = q.get_den();
        std::int64_t v = detail::remove_factor(num, p) - detail::remove_factor(den, p);
        const mpz_class& modulus = detail::prime_power(p, precision);
        mpz_class unit = detail::mod_positive(num * detail::inverse_mod(den, modulus), modulus);
        return from_parts(p, v, std::move(unit), precision);
    }

    static PAdicNumber one(std::int64_t p, int precision = kDefaultPrecision) {
        return from_parts(p, 0, mpz_class(1), precision);
    }

    std::int64_t prime() const noexcept { return prime_; }
    bool is_zero() const noexcept { return zero_; }
    /// gamma(x); kInfiniteValuation for zero.
    std::int64_t valuation() const noexcept { return zero_ ? kInfiniteValuation : valuation_; }
    int precision() const noexcept { return precision_; }
    const mpz_class& unit() const noexcept { return unit_; }
    /// Exponent e with x known modulo p^e.
    std::int64_t absolute_precision() const noexcept {
        return zero_ ? kInfiniteValuation : valuation_ + precision_;
    }

    NormValue norm() const noexcept {
        return zero_ ? NormValue::zero() : NormValue::from_exponent(valuation_);
    }

    /// Canonical digits x_0, x_1, ..., x_{N-1}; x_0 != 0. Empty for zero.
    std::vector<std::int64_t> digits() const {
        std::vector<std::int64_t> out;
        if (zero_) return out;
        out.reserve(static_cast<std::size_t>(precision_));
        mpz_class rest = unit_;
        mpz_class digit;
        for (int i = 0; i < precision_; ++i) {
            mpz_fdiv_qr_ui(rest.get_mpz_t(), digit.get_mpz_t(), rest.get_mpz_t(), static_cast<unsigned long>(prime_));
            out.push_back(digit.get_si());
        }
        return out;
    }

    /// x_0, the leading digit; 0 for zero.
    std::int64_t leading_digit() const {
        if (zero_) return 0;
        return static_cast<std::int64_t>(mpz_fdiv_ui(unit_.get_mpz_t(), static_cast<unsigned long>(prime_)));
    }

    /// The rational p^v * u representing x modulo p^(v+N).
    mpq_class to_rational() const {
        if (zero_) return mpq_class(0);
        mpq_class r(unit_);
        if (valuation_ >= 0) r *= mpq_class(detail::prime_power(prime_, valuation_));
        else r /= mpq_class(detail::prime_power(prime_, -valuation_));
        r.canonicalize();
        return r;
    }

    /// Same number carried at a lower precision (no-op if already at or below).
    PAdicNumber truncated(int precision) const {
        if (zero_ || precision >= precision_) return *this;
        return from_parts(prime_, valuation_, unit_, precision);
    }

    /// "p^v*(d0+d1*p+d2*p^2+...+O(p^N))" with zero digits omitted.
    std::string str() const {
        if (zero_) return "0";
        std::string p = std::to_string(prime_);
        std::string out = p + "^" + std::to_string(valuation_) + "*(";
        auto ds = digits();
        bool first = true;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds[i] == 0) continue;
            if (!first) out += "+";
            first = false;
            out += std::to_string(ds[i]);
            if (i == 1) out += "*" + p;
            else if (i > 1) out += "*" + p + "^" + std::to_string(i);
        }
        out += "+O(" + p + "^" + std::to_string(precision_) + "))";
        return out;
    }

    /// Representational equality (same valuation, digits and precision).
    friend bool operator==(const PAdicNumber& a, const PAdicNumber& b) {
        if (a.prime_ != b.prime_ || a.zero_ != b.zero_) return false;
        if (a.zero_) return true;
        return a.valuation_ == b.valuation_ && a.precision_ == b.precision_ && a.unit_ == b.unit_;
    }

    friend PAdicNumber operator-(const PAdicNumber& x) {
        if (x.zero_) return x;
        PAdicNumber r = x;
        r.unit_ = detail::prime_power(x.prime_, x.precision_) - x.unit_;
        return r;
    }

    friend PAdicNumber operator+(const PAdicNumber& x, const PAdicNumber& y) {
        check_same_prime(x, y);
        if (x.zero_) return y;
        if (y.zero_) return x;
        const std::int64_t p = x.prime_;
        const std::int64_t v = std::min(x.valuation_, y.valuation_);
        const std::int64_t absolute = std::min(x.absolute_precision(), y.absolute_precision());
        const std::int64_t width = absolute - v;
        const mpz_class& modulus = detail::prime_power(p, width);
        mpz_class sum = shifted(x, v, width) + shifted(y, v, width);
        sum = detail::mod_positive(sum, modulus);
        if (sum == 0)
            fail(ErrorKind::PrecisionExhausted,
                 "cancellation consumed all " + std::to_string(width) + " carried digits");
        std::int64_t t = detail::remove_factor(sum, p);
        PAdicNumber r;
        r.prime_ = p;
        r.zero_ = false;
        r.valuation_ = v + t;
        r.precision_ = static_cast<int>(width - t);
        r.unit_ = std::move(sum);
        return r;
    }

    friend PAdicNumber operator-(const PAdicNumber& x, const PAdicNumber& y) { return x + (-y); }

    friend PAdicNumber operator*(const PAdicNumber& x, const PAdicNumber& y) {
        check_same_prime(x, y);
        if (x.zero_) return x;
        if (y.zero_) return y;
        const int n = std::min(x.precision_, y.precision_);
        PAdicNumber r;
        r.prime_ = x.prime_;
        r.zero_ = false;
        r.valuation_ = x.valuation_ + y.valuation_;
        r.precision_ = n;
        r.unit_ = detail::mod_positive(x.unit_ * y.unit_, detail::prime_power(x.prime_, n));
        return r;
    }

    friend PAdicNumber operator/(const PAdicNumber& x, const PAdicNumber& y) {
        check_same_prime(x, y);
        if (y.zero_) fail(ErrorKind::DivisionByZero, "division by zero in Q_p");
        if (x.zero_) return x;
        const int n = std::min(x.precision_, y.precision_);
        const mpz_class& modulus = detail::prime_power(x.prime_, n);
        PAdicNumber r;
        r.prime_ = x.prime_;
        r.zero_ = false;
        r.valuation_ = x.valuation_ - y.valuation_;
        r.precision_ = n;
        r.unit_ = detail::mod_positive(x.unit_ * detail::inverse_mod(y.unit_, modulus), modulus);
        return r;
    }

    PAdicNumber& operator+=(const PAdicNumber& y) { return *this = *this + y; }
    PAdicNumber& operator-=(const PAdicNumber& y) { return *this = *this - y; }
    PAdicNumber& operator*=(const PAdicNumber& y) { return *this = *this * y; }
    PAdicNumber& operator/=(const PAdicNumber& y) { return *this = *this / y; }

private:

    static void check_same_prime(const PAdicNumber& x, const PAdicNumber& y) {
        if (x.prime_ != y.prime_)
            fail(ErrorKind::BadParameter, "operands over different primes " + std::to_string(x.prime_) +
                                              " and " + std::to_string(y.prime_));
    }

    // x / p^base reduced modulo p^width (x nonzero, valuation >= base).
    static mpz_class shifted(const PAdicNumber& x, std::int64_t base, std::int64_t width) {
        const std::int64_t shift = x.valuation_ - base;
        if (shift >= width) return mpz_class(0);
        return x.unit_ * detail::prime_power(x.prime_, shift);
    }

    std::int64_t prime_ = 2;
    bool zero_ = true;
    std::int64_t valuation_ = 0;
    int precision_ = kDefaultPrecision;
    mpz_class unit_ = 0;
};

/// Canonical expansion of numerator/denominator truncated to `precision` digits.
inline PAdicNumber parse_rational(const mpz_class& numerator, const mpz_class& denominator, std::int64_t p,
                                  int precision = kDefaultPrecision) {
    detail::require_prime(p);
    if (denominator == 0) fail(ErrorKind::DivisionByZero, "zero denominator");
    if (precision < 1) fail(ErrorKind::BadParameter, "precision must be >= 1");
    mpq_class q(numerator, denominator);
    q.canonicalize();
    return PAdicNumber::from_rational(q, p, precision);
}

inline PAdicNumber add(const PAdicNumber& x, const PAdicNumber& y) { return x + y; }
inline PAdicNumber sub(const PAdicNumber& x, const PAdicNumber& y) { return x - y; }
inline PAdicNumber mul(const PAdicNumber& x, const PAdicNumber& y) { return x * y; }
inline PAdicNumber div(const PAdicNumber& x, const PAdicNumber& y) { return x / y; }

inline PAdicNumber pow_int(const PAdicNumber& x, std::int64_t n) {
    if (n == 0) return PAdicNumber::one(x.prime(), x.precision());
    if (x.is_zero()) {
        if (n < 0) fail(ErrorKind::DivisionByZero, "negative power of zero");
        return x;
    }
    const mpz_class& modulus = detail::prime_power(x.prime(), x.precision());
    mpz_class u;
    mpz_class e(static_cast<long>(n < 0 ? -n : n));
    mpz_powm(u.get_mpz_t(), x.unit().get_mpz_t(), e.get_mpz_t(), modulus.get_mpz_t());
    if (n < 0) u = detail::inverse_mod(u, modulus);
    return PAdicNumber::from_parts(x.prime(), x.valuation() * n, std::move(u), x.precision());
}

inline NormValue norm(const PAdicNumber& x) noexcept { return x.norm(); }

/// How far apart two numbers are. When `exact` is false the difference vanished
/// at the carried precision and `valuation` is only a lower bound.
struct Separation {
    std::int64_t valuation;
    bool exact;

    NormValue norm_bound() const noexcept { return NormValue::from_exponent(valuation); }
};

inline Separation separation(const PAdicNumber& x, const PAdicNumber& y) {
    if (x.is_zero() && y.is_zero()) return {kInfiniteValuation, false};
    try {
        PAdicNumber d = x - y;
        if (d.is_zero()) return {kInfiniteValuation, false};
        return {d.valuation(), true};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        return {std::min(x.absolute_precision(), y.absolute_precision()), false};
    }
}

/// True when |x - y|_p <= p^(-exponent) is established (or cannot be refuted
/// because the difference vanished at a bound at least `exponent`).
inline bool agrees_to(const PAdicNumber& x, const PAdicNumber& y, std::int64_t exponent) {
    return separation(x, y).valuation >= exponent;
}

/// Sum of x^n/n! for n >= 0; defined on |x|_p < p^(-1/(p-1)).
inline PAdicNumber exp_p(const PAdicNumber& x) {
    const std::int64_t p = x.prime();
    const int n_digits = x.precision();
    PAdicNumber one = PAdicNumber::one(p, n_digits);
    if (x.is_zero()) return one;
    const std::int64_t min_valuation = p == 2 ? 2 : 1;
    if (x.valuation() < min_valuation)
        fail(ErrorKind::OutOfDomain, "exp_p needs valuation >= " + std::to_string(min_valuation) + ", got " +
                                         std::to_string(x.valuation()));
    PAdicNumber sum = one;
    PAdicNumber term = one;
    const std::int64_t v = x.valuation();
    for (std::int64_t n = 1;; ++n) {
        term = term * x / PAdicNumber::from_integer(n, p, n_digits);
        sum += term;
        // v_p(m!) <= (m-1)/(p-1), so every later term has valuation >= m*v - (m-1)/(p-1).
        const std::int64_t m = n + 1;
        if ((m * v - sum.absolute_precision()) * (p - 1) >= m - 1) break;
    }
    return sum;
}

inline bool in_Zp(const PAdicNumber& x) noexcept { return x.is_zero() || x.valuation() >= 0; }

inline bool in_unit_sphere(const PAdicNumber& x) noexcept { return !x.is_zero() && x.valuation() == 0; }

/// |x|_p = 1 and |x-1|_p < p^(-1/(p-1)).
inline bool in_Ep(const PAdicNumber& x) {
    if (!in_unit_sphere(x)) return false;
    const std::int64_t needed = x.prime() == 2 ? 2 : 1;
    return separation(x, PAdicNumber::one(x.prime(), x.precision())).valuation >= needed;
}

/// Ball of radius p^radius_exponent around `center`; open unless `closed`.
struct PAdicBall {
    PAdicNumber center;
    std::int64_t radius_exponent = 0;
    bool closed = false;

    /// Smallest valuation of x - center admitted by the ball.
    std::int64_t min_distance_valuation() const noexcept {
        return closed ? -radius_exponent : -radius_exponent + 1;
    }

    bool contains(const PAdicNumber& x) const {
        if (x.prime() != center.prime()) fail(ErrorKind::BadParameter, "ball and point over different primes");
        Separation s = separation(x, center);
        if (s.exact || s.valuation >= min_distance_valuation()) return s.valuation >= min_distance_valuation();
        fail(ErrorKind::PrecisionExhausted, "ball membership undecidable at carried precision");
    }
};

inline bool ball_contains(const PAdicBall& ball, const PAdicNumber& x) { return ball.contains(x); }

} // namespace padyn
