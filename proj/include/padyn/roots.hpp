#pragma once

// Roots of polynomials over Q_p: Hensel lifting, Newton polygons, and a
// complete root search inside a window of valuations.
//
// The search substitutes x = p^v u for every valuation v in the window and
// looks for unit roots u by residue descent: each residue r with g(r) = 0 mod p
// either is simple (then Hensel-lifted) or the search recurses on
// g(r + p y) / p^content. Roots still clustered after `precision` levels are
// reported as inconclusive instead of being dropped.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/error.hpp"
#include "padyn/padic.hpp"
#include "padyn/polynomial.hpp"
#include "padyn/residue.hpp"

namespace padyn {

/// Finite set of candidate valuations, ascending.
struct ValuationWindow {
    std::vector<std::int64_t> valuations;

    static ValuationWindow interval(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) fail(ErrorKind::BadParameter, "empty valuation interval");
        ValuationWindow w;
        for (std::int64_t v = lo; v <= hi; ++v) w.valuations.push_back(v);
        return w;
    }
    static ValuationWindow of(std::vector<std::int64_t> vs) {
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        return ValuationWindow{std::move(vs)};
    }
    bool contains(std::int64_t v) const { return std::binary_search(valuations.begin(), valuations.end(), v); }
};

/// One edge of the Newton polygon: `length` roots (counted in an algebraic
/// closure) of valuation `root_valuation`.
struct NewtonSegment {
    mpq_class root_valuation;
    int length = 0;
    bool integral() const { return root_valuation.get_den() == 1; }
};

struct InconclusiveRoot {
    std::int64_t valuation = 0;
    PAdicNumber approximation;  ///< digits known so far
    int depth = 0;              ///< number of digits fixed before giving up
};

struct RootSearchResult {
    std::vector<PAdicNumber> roots;
    std::vector<InconclusiveRoot> inconclusive;
    bool has_zero_root = false;
};

namespace detail {

inline std::vector<std::int64_t> reduce_mod(const IntegerPolynomial& g, std::int64_t p) {
    std::vector<std::int64_t> out;
    out.reserve(g.coefficients().size());
    for (const auto& c : g.coefficients())
        out.push_back(static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), static_cast<unsigned long>(p))));
    return out;
}

inline std::int64_t eval_mod(const std::vector<std::int64_t>& coeffs, std::int64_t x, std::int64_t p) {
    std::int64_t acc = 0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (mulmod(acc, x, p) + *it) % p;
    return acc;
}

inline mpz_class eval_mod(const IntegerPolynomial& g, const mpz_class& x, const mpz_class& modulus) {
    mpz_class acc = 0;
    const auto& c = g.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = mod_positive(acc * x + *it, modulus);
    return acc;
}

/// Newton iteration from a simple residue root r to x mod p^precision.
inline mpz_class hensel_integer(const IntegerPolynomial& g, std::int64_t r, std::int64_t p, int precision) {
    const IntegerPolynomial dg = g.derivative();
    mpz_class x = r;
    int known = 1;
    while (known < precision) {
        known = std::min(2 * known, precision);
        const mpz_class& modulus = prime_power(p, known);
        mpz_class fx = eval_mod(g, x, modulus);
        mpz_class dfx = eval_mod(dg, x, modulus);
        x = mod_positive(x - fx * inverse_mod(dfx, modulus), modulus);
    }
    return mod_positive(x, prime_power(p, precision));
}

/// g(r + p y) divided by the largest power of p dividing every coefficient.
inline IntegerPolynomial shift_and_scale(const IntegerPolynomial& g, std::int64_t r, std::int64_t p) {
    std::vector<mpz_class> c = g.coefficients();
    const std::size_t d = c.size();
    const mpz_class rr = r;
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = d - 1; j-- > i;) c[j] += rr * c[j + 1];
    std::int64_t content = kInfiniteValuation;
    for (std::size_t i = 0; i < d; ++i) {
        c[i] *= prime_power(p, static_cast<std::int64_t>(i));
        if (c[i] != 0) content = std::min(content, valuation_of(c[i], p));
    }
    if (content > 0 && content != kInfiniteValuation) {
        const mpz_class& scale = prime_power(p, content);
        for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), scale.get_mpz_t());
    }
    return IntegerPolynomial(std::move(c));
}

/// Integer polynomial whose unit roots u are p^(-v) times the valuation-v
/// roots of `poly`.
inline IntegerPolynomial substitute_valuation(const IntegerPolynomial& poly, std::int64_t v, std::int64_t p) {
    const auto& c = poly.coefficients();
    std::vector<mpz_class> units(c.size());
    std::vector<std::int64_t> w(c.size(), kInfiniteValuation);
    std::int64_t least = kInfiniteValuation;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        units[i] = c[i];
        w[i] = remove_factor(units[i], p) + v * static_cast<std::int64_t>(i);
        least = std::min(least, w[i]);
    }
    std::vector<mpz_class> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        out[i] = units[i] * prime_power(p, w[i] - least);
    }
    return IntegerPolynomial(std::move(out));
}

struct Descent {
    std::int64_t p;
    int precision;
    std::vector<mpz_class> roots;
    std::vector<std::pair<mpz_class, int>> stuck;

    void run(const IntegerPolynomial& g, const mpz_class& prefix, int depth, bool units_only) {
        if (g.degree() < 1) return;
        const auto gm = reduce_mod(g, p);
        const auto dgm = reduce_mod(g.derivative(), p);
        const mpz_class& place = prime_power(p, depth);
        for (std::int64_t r = units_only ? 1 : 0; r < p; ++r) {
            if (eval_mod(gm, r, p) != 0) continue;
            const mpz_class next_prefix = prefix + place * r;
            if (eval_mod(dgm, r, p) != 0) {
                mpz_class y = hensel_integer(g, r, p, precision);
                roots.push_back(mod_positive(prefix + place * y, prime_power(p, precision)));
            } else if (depth + 1 >= precision) {
                stuck.emplace_back(next_prefix, depth + 1);
            } else {
                run(shift_and_scale(g, r, p), next_prefix, depth + 1, false);
            }
        }
    }
};

} // namespace detail

/// Lower convex hull of {(i, v_p(c_i))}; zero roots are not represented.
inline std::vector<NewtonSegment> newton_polygon(const IntegerPolynomial& poly, std::int64_t p) {
    std::vector<std::pair<std::int64_t, std::int64_t>> pts;
    const auto& c = poly.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0) pts.emplace_back(static_cast<std::int64_t>(i), detail::valuation_of(c[i], p));
    std::vector<std::pair<std::int64_t, std::int64_t>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            // Drop b if it lies on or above the segment a -> pt.
            const __int128 lhs = static_cast<__int128>(b.second - a.second) * (pt.first - a.first);
            const __int128 rhs = static_cast<__int128>(pt.second - a.second) * (b.first - a.first);
            if (lhs >= rhs) hull.pop_back();
            else break;
        }
        hull.push_back(pt);
    }
    std::vector<NewtonSegment> out;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const auto dx = hull[i].first - hull[i - 1].first;
        const auto dy = hull[i].second - hull[i - 1].second;
        mpq_class slope(static_cast<long>(-dy), static_cast<long>(dx));
        slope.canonicalize();
        out.push_back({slope, static_cast<int>(dx)});
    }
    return out;
}

/// Valuations that nonzero roots in Q_p can have (integral Newton slopes).
inline ValuationWindow newton_window(const IntegerPolynomial& poly, std::int64_t p) {
    std::vector<std::int64_t> vs;
    for (const auto& seg : newton_polygon(poly, p))
        if (seg.integral()) vs.push_back(seg.root_valuation.get_num().get_si());
    return ValuationWindow::of(std::move(vs));
}

inline ValuationWindow newton_window(const RationalPolynomial& poly, std::int64_t p) {
    return newton_window(clear_denominators(poly), p);
}

/// Lifts a simple root of `poly` modulo p to a root in Z_p known to
/// `target_precision` absolute digits.
inline PAdicNumber hensel_lift(const IntegerPolynomial& poly, std::int64_t p, std::int64_t root_mod_p,
                               int target_precision) {
    detail::require_prime(p);
    if (target_precision < 1) fail(ErrorKind::BadParameter, "target precision must be >= 1");
    const std::int64_t r = ((root_mod_p % p) + p) % p;
    if (detail::eval_mod(detail::reduce_mod(poly, p), r, p) != 0)
        fail(ErrorKind::NotARoot, std::to_string(root_mod_p) + " is not a root modulo " + std::to_string(p));
    if (detail::eval_mod(detail::reduce_mod(poly.derivative(), p), r, p) == 0)
        fail(ErrorKind::NotSimpleRoot, "derivative vanishes modulo p at " + std::to_string(root_mod_p));
    mpz_class x = detail::hensel_integer(poly, r, p, target_precision);
    if (x == 0) {
        if (poly.coefficient(0) == 0) return PAdicNumber::zero(p, target_precision);
        fail(ErrorKind::PrecisionExhausted, "lifted root vanishes modulo p^" + std::to_string(target_precision));
    }
    const std::int64_t t = detail::valuation_of(x, p);
    return PAdicNumber::from_parts(p, 0, x, static_cast<int>(target_precision - t));
}

inline PAdicNumber hensel_lift(const RationalPolynomial& poly, std::int64_t p, std::int64_t root_mod_p,
                               int target_precision) {
    return hensel_lift(clear_denominators(poly), p, root_mod_p, target_precision);
}

/// All roots of `poly` in Q_p whose valuation lies in `window`, each carried to
/// `precision` digits; ordered by valuation, then by digits. A zero root is
/// flagged via `has_zero_root` regardless of the window.
inline RootSearchResult poly_roots_Qp(const IntegerPolynomial& poly, std::int64_t p, const ValuationWindow& window,
                                      int precision = kDefaultPrecision) {
    detail::require_prime(p);
    detail::require_enumerable(p);
    if (poly.is_zero()) fail(ErrorKind::BadParameter, "the zero polynomial has every point as a root");
    if (precision < 1) fail(ErrorKind::BadParameter, "precision must be >= 1");
    RootSearchResult out;
    std::vector<mpz_class> c = poly.coefficients();
    std::size_t lead_zeros = 0;
    while (lead_zeros < c.size() && c[lead_zeros] == 0) ++lead_zeros;
    if (lead_zeros > 0) {
        out.has_zero_root = true;
        c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
    }
    IntegerPolynomial reduced(std::move(c));
    if (reduced.degree() < 1) return out;
    for (std::int64_t v : window.valuations) {
        detail::Descent descent{p, precision, {}, {}};
        descent.run(detail::substitute_valuation(reduced, v, p), mpz_class(0), 0, true);
        for (auto& u : descent.roots) out.roots.push_back(PAdicNumber::from_parts(p, v, u, precision));
        for (auto& [prefix, depth] : descent.stuck)
            out.inconclusive.push_back({v, PAdicNumber::from_parts(p, v, prefix, depth), depth});
    }
    return out;
}

inline RootSearchResult poly_roots_Qp(const RationalPolynomial& poly, std::int64_t p, const ValuationWindow& window,
                                      int precision = kDefaultPrecision) {
    return poly_roots_Qp(clear_denominators(poly), p, window, precision);
}

} // namespace padyn
