#pragma once

// Dense univariate polynomials over an exact coefficient ring (mpz_class or
// mpq_class), lowest degree first.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/error.hpp"
#include "padyn/padic.hpp"

namespace padyn {

template <typename Coeff>
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<Coeff> coeffs) : coeffs_(coeffs) { trim(); }
    explicit Polynomial(std::vector<Coeff> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    static Polynomial constant(Coeff c) { return Polynomial(std::vector<Coeff>{std::move(c)}); }
    static Polynomial monomial(Coeff c, std::size_t degree) {
        std::vector<Coeff> v(degree + 1, Coeff(0));
        v[degree] = std::move(c);
        return Polynomial(std::move(v));
    }
    /// The polynomial x.
    static Polynomial identity() { return monomial(Coeff(1), 1); }

    bool is_zero() const noexcept { return coeffs_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Coeff>& coefficients() const noexcept { return coeffs_; }
    Coeff coefficient(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Coeff(0); }
    const Coeff& leading() const { return coeffs_.back(); }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<Coeff> out(std::max(a.coeffs_.size(), b.coeffs_.size()), Coeff(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
        for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a) {
        std::vector<Coeff> out = a.coeffs_;
        for (auto& c : out) c = -c;
        return Polynomial(std::move(out));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Coeff> out(a.coeffs_.size() + b.coeffs_.size() - 1, Coeff(0));
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
            if (a.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
        return Polynomial(std::move(out));
    }
    friend Polynomial operator*(const Coeff& s, const Polynomial& a) {
        std::vector<Coeff> out = a.coeffs_;
        for (auto& c : out) c *= s;
        return Polynomial(std::move(out));
    }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    Polynomial pow(unsigned n) const {
        Polynomial result = constant(Coeff(1));
        Polynomial base = *this;
        while (n > 0) {
            if (n & 1u) result = result * base;
            n >>= 1u;
            if (n > 0) base = base * base;
        }
        return result;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<Coeff> out(coeffs_.size() - 1);
        for (std::size_t i = 1; i < coeffs_.size(); ++i) out[i - 1] = coeffs_[i] * Coeff(static_cast<long>(i));
        return Polynomial(std::move(out));
    }

    /// p(q(x)).
    Polynomial compose(const Polynomial& q) const {
        Polynomial result;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) result = result * q + constant(*it);
        return result;
    }

    Coeff operator()(const Coeff& x) const {
        Coeff acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    std::string str(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = coeffs_.size(); i-- > 0;) {
            if (coeffs_[i] == 0) continue;
            if (!out.empty()) out += " + ";
            out += "(" + coeffs_[i].get_str() + ")";
            if (i >= 1) out += "*" + var;
            if (i >= 2) out += "^" + std::to_string(i);
        }
        return out;
    }

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::vector<Coeff> coeffs_;
};

using RationalPolynomial = Polynomial<mpq_class>;
using IntegerPolynomial = Polynomial<mpz_class>;

/// Horner evaluation of an exact polynomial at a p-adic point.
inline PAdicNumber evaluate(const RationalPolynomial& poly, const PAdicNumber& x) {
    const std::int64_t p = x.prime();
    const int n = x.precision();
    PAdicNumber acc = PAdicNumber::zero(p, n);
    const auto& c = poly.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = acc * x;
        if (*it != 0) acc = acc + PAdicNumber::from_rational(*it, p, n);
    }
    return acc;
}

/// Multiplies through by the lcm of the denominators: a primitive-free integer
/// polynomial with the same roots.
inline IntegerPolynomial clear_denominators(const RationalPolynomial& poly) {
    mpz_class l = 1;
    for (const auto& c : poly.coefficients()) {
        if (c == 0) continue;
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    }
    std::vector<mpz_class> out;
    out.reserve(poly.coefficients().size());
    for (const auto& c : poly.coefficients()) {
        mpq_class scaled = c * mpq_class(l);
        out.push_back(scaled.get_num());
    }
    return IntegerPolynomial(std::move(out));
}

inline RationalPolynomial to_rational(const IntegerPolynomial& poly) {
    std::vector<mpq_class> out;
    for (const auto& c : poly.coefficients()) out.emplace_back(c);
    return RationalPolynomial(std::move(out));
}

} // namespace padyn
