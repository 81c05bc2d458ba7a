#pragma once

// Rational maps x -> (N(x)/D(x))^k over Q_p: evaluation, multipliers, fixed
// and periodic points, orbits.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/error.hpp"
#include "padyn/padic.hpp"
#include "padyn/polynomial.hpp"
#include "padyn/roots.hpp"

namespace padyn {

enum class MapKind { IsingPotts, LambdaTI, SmallRhoF, EpRegimeG, Generic };

inline std::string to_string(MapKind kind) {
    switch (kind) {
        case MapKind::IsingPotts: return "ising";
        case MapKind::LambdaTI: return "lambda";
        case MapKind::SmallRhoF: return "small_rho_f";
        case MapKind::EpRegimeG: return "ep_g";
        case MapKind::Generic: return "generic";
    }
    return "generic";
}

/// lambda(1,1), lambda(1,-1), lambda(-1,1), lambda(-1,-1).
using LambdaTable = std::array<std::int64_t, 4>;

namespace detail {

inline std::int64_t rational_valuation(const mpq_class& q, std::int64_t p) {
    if (q == 0) return kInfiniteValuation;
    return valuation_of(q.get_num(), p) - valuation_of(q.get_den(), p);
}

inline bool rational_in_Ep(const mpq_class& q, std::int64_t p) {
    if (q == 0 || rational_valuation(q, p) != 0) return false;
    return rational_valuation(q - 1, p) >= (p == 2 ? 2 : 1);
}

inline mpq_class rational_pow(const mpq_class& base, std::int64_t e) {
    if (e < 0) {
        if (base == 0) fail(ErrorKind::DivisionByZero, "negative power of zero");
        return rational_pow(mpq_class(1) / base, -e);
    }
    mpq_class out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    out.canonicalize();
    return out;
}

inline void require_rho(const mpq_class& rho) {
    if (rho == 0 || rho == 1 || rho == -1) fail(ErrorKind::BadParameter, "rho must avoid -1, 0, 1");
}

} // namespace detail

class RationalMap {
public:
    RationalMap(std::int64_t p, RationalPolynomial numerator, RationalPolynomial denominator, unsigned outer_power = 1,
                int precision = kDefaultPrecision)
        : prime_(p), num_(std::move(numerator)), den_(std::move(denominator)), k_(outer_power), precision_(precision) {
        detail::require_prime(p);
        if (den_.is_zero()) fail(ErrorKind::BadParameter, "denominator is identically zero");
        if (k_ < 1) fail(ErrorKind::BadParameter, "outer power must be >= 1");
        if (precision_ < 1) fail(ErrorKind::BadParameter, "precision must be >= 1");
    }

    std::int64_t prime() const noexcept { return prime_; }
    const RationalPolynomial& numerator() const noexcept { return num_; }
    const RationalPolynomial& denominator() const noexcept { return den_; }
    unsigned outer_power() const noexcept { return k_; }
    int precision() const noexcept { return precision_; }
    MapKind kind() const noexcept { return kind_; }
    const std::map<std::string, mpq_class>& params() const noexcept { return params_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// N^k and D^k: the map as a single quotient of polynomials.
    RationalPolynomial full_numerator() const { return num_.pow(k_); }
    RationalPolynomial full_denominator() const { return den_.pow(k_); }

    /// N^k - x D^k, whose roots are the fixed points plus common zeros of N and D.
    RationalPolynomial fixed_point_polynomial() const {
        return full_numerator() - RationalPolynomial::identity() * full_denominator();
    }

    /// The exact numerator of d/dx (N/D), i.e. N'D - ND'.
    RationalPolynomial wronskian() const { return num_.derivative() * den_ - num_ * den_.derivative(); }

    RationalMap& tag(MapKind kind, std::map<std::string, mpq_class> params) {
        kind_ = kind;
        params_ = std::move(params);
        return *this;
    }
    RationalMap& warn(std::string message) {
        warnings_.push_back(std::move(message));
        return *this;
    }

private:
    std::int64_t prime_;
    RationalPolynomial num_;
    RationalPolynomial den_;
    unsigned k_;
    int precision_;
    MapKind kind_ = MapKind::Generic;
    std::map<std::string, mpq_class> params_;
    std::vector<std::string> warnings_;
};

/// x -> ((theta x + 1)/(x + theta))^k with theta = rho^(2N).
inline RationalMap make_ising_potts(std::int64_t p, unsigned k, const mpq_class& rho, std::int64_t N,
                                    int precision = kDefaultPrecision) {
    detail::require_rho(rho);
    if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
    const mpq_class theta = detail::rational_pow(rho, 2 * N);
    RationalMap map(p, RationalPolynomial{mpq_class(1), theta}, RationalPolynomial{theta, mpq_class(1)}, k, precision);
    map.tag(MapKind::IsingPotts, {{"k", mpq_class(k)}, {"rho", rho}, {"N", mpq_class(N)}, {"theta", theta}});
    if (theta == 1) map.warn("theta = 1: the map is constant 1");
    if (theta == -1) map.warn("theta = -1: numerator and denominator are proportional");
    return map;
}

/// h -> ((rho^l11 h + rho^l1m)/(rho^lm1 h + rho^lmm))^k.
inline RationalMap make_lambda_TI(std::int64_t p, unsigned k, const mpq_class& rho, const LambdaTable& lambda,
                                  int precision = kDefaultPrecision) {
    detail::require_rho(rho);
    if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
    const auto r = [&](std::int64_t e) { return detail::rational_pow(rho, e); };
    RationalMap map(p, RationalPolynomial{r(lambda[1]), r(lambda[0])}, RationalPolynomial{r(lambda[3]), r(lambda[2])},
                    k, precision);
    map.tag(MapKind::LambdaTI, {{"k", mpq_class(k)},
                                {"rho", rho},
                                {"l11", mpq_class(lambda[0])},
                                {"l1m", mpq_class(lambda[1])},
                                {"lm1", mpq_class(lambda[2])},
                                {"lmm", mpq_class(lambda[3])}});
    if (lambda[0] - lambda[2] == lambda[1] - lambda[3])
        map.warn("rows of lambda differ by a constant: the map is constant");
    return map;
}

/// f(x) = (A x^2 + 1)/(C x^2 + 1).
inline RationalMap make_small_rho_f(std::int64_t p, const mpq_class& A, const mpq_class& C,
                                    int precision = kDefaultPrecision) {
    RationalMap map(p, RationalPolynomial{mpq_class(1), mpq_class(0), A}, RationalPolynomial{mpq_class(1), mpq_class(0), C},
                    1, precision);
    map.tag(MapKind::SmallRhoF, {{"A", A}, {"C", C}});
    const std::int64_t vA = detail::rational_valuation(A, p);
    const std::int64_t vC = detail::rational_valuation(C, p);
    if (vA < 1 || vC < 1) map.warn("expected |A|_p < 1 and |C|_p < 1");
    if (A == C)
        map.warn("A = C: the map is constant 1");
    else if (vA == vC)
        map.warn("expected |A|_p != |C|_p");
    return map;
}

/// g(u) = a (b u^2 + 1)/(u^2 + c).
inline RationalMap make_Ep_regime_g(std::int64_t p, const mpq_class& a, const mpq_class& b, const mpq_class& c,
                                    int precision = kDefaultPrecision) {
    RationalMap map(p, RationalPolynomial{a, mpq_class(0), a * b}, RationalPolynomial{c, mpq_class(0), mpq_class(1)}, 1,
                    precision);
    map.tag(MapKind::EpRegimeG, {{"a", a}, {"b", b}, {"c", c}});
    if (!detail::rational_in_Ep(a, p) || !detail::rational_in_Ep(b, p) || !detail::rational_in_Ep(c, p))
        map.warn("expected a, b, c in E_p");
    if (b == 1 && c == 1) map.warn("|b-1|_p + |c-1|_p = 0: the equation is trivial");
    return map;
}

namespace detail {

inline PAdicNumber nonvanishing(const RationalPolynomial& poly, const PAdicNumber& x, const char* what) {
    try {
        PAdicNumber v = evaluate(poly, x);
        if (v.is_zero()) fail(ErrorKind::PoleHit, std::string(what) + " vanishes at " + x.str());
        return v;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        fail(ErrorKind::PoleHit, std::string(what) + " vanishes to working precision at " + x.str());
    }
}

} // namespace detail

inline PAdicNumber evaluate(const RationalMap& map, const PAdicNumber& x) {
    if (x.prime() != map.prime()) fail(ErrorKind::BadParameter, "point and map over different primes");
    const PAdicNumber d = detail::nonvanishing(map.denominator(), x, "denominator");
    return pow_int(evaluate(map.numerator(), x) / d, map.outer_power());
}

/// k (N/D)^(k-1) (N'D - ND') / D^2.
inline PAdicNumber derivative_at(const RationalMap& map, const PAdicNumber& x) {
    if (x.prime() != map.prime()) fail(ErrorKind::BadParameter, "point and map over different primes");
    const PAdicNumber d = detail::nonvanishing(map.denominator(), x, "denominator");
    const PAdicNumber w = evaluate(map.wronskian(), x);
    PAdicNumber out = w / (d * d) * PAdicNumber::from_integer(map.outer_power(), map.prime(), x.precision());
    if (map.outer_power() > 1) out = out * pow_int(evaluate(map.numerator(), x) / d, map.outer_power() - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Fixed points

enum class FixedPointClass { Attractive, Neutral, Repelling };

inline std::string to_string(FixedPointClass c) {
    switch (c) {
        case FixedPointClass::Attractive: return "attractive";
        case FixedPointClass::Neutral: return "neutral";
        case FixedPointClass::Repelling: return "repelling";
    }
    return "";
}

inline FixedPointClass classify_multiplier(const NormValue& n) {
    if (n.is_zero() || n.exponent() > 0) return FixedPointClass::Attractive;
    return n.exponent() == 0 ? FixedPointClass::Neutral : FixedPointClass::Repelling;
}

struct FixedPointReport {
    PAdicNumber point;
    PAdicNumber multiplier;
    NormValue multiplier_norm = NormValue::zero();
    FixedPointClass cls = FixedPointClass::Neutral;
    bool in_unit_sphere = false;
    bool in_Ep = false;
    std::int64_t valuation = 0;
    /// f(x) and x agree to at least this many absolute digits.
    std::int64_t residual_valuation = 0;
};

/// Digits of agreement required of |f(x) - x|_p before x counts as fixed.
inline std::int64_t fixed_tolerance(int precision) { return (precision + 1) / 2; }

inline FixedPointReport classify_fixed_point(const RationalMap& map, const PAdicNumber& x) {
    const PAdicNumber fx = evaluate(map, x);
    const Separation s = separation(fx, x);
    const std::int64_t tol = fixed_tolerance(map.precision());
    if (s.valuation < tol)
        fail(ErrorKind::NotFixed, "|f(x) - x|_p = p^" + std::to_string(-s.valuation) + " exceeds p^" +
                                      std::to_string(-tol) + " at " + x.str());
    FixedPointReport r;
    r.point = x;
    try {
        r.multiplier = derivative_at(map, x);
    } catch (const Error& e) {
        // N'D - ND' cancelled completely: the multiplier is zero to working precision.
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        r.multiplier = PAdicNumber::zero(map.prime(), x.precision());
    }
    r.multiplier_norm = r.multiplier.norm();
    r.cls = classify_multiplier(r.multiplier_norm);
    r.in_unit_sphere = padyn::in_unit_sphere(x);
    r.in_Ep = padyn::in_Ep(x);
    r.valuation = x.valuation();
    r.residual_valuation = s.valuation;
    return r;
}

/// Candidate valuations of fixed points from the norm statements known for the
/// named maps; nullopt when the map has no such statement or its standing
/// assumptions fail.
inline std::optional<ValuationWindow> named_window(const RationalMap& map) {
    const std::int64_t p = map.prime();
    const auto& prm = map.params();
    switch (map.kind()) {
        case MapKind::IsingPotts: {
            const mpq_class& theta = prm.at("theta");
            const std::int64_t vt = detail::rational_valuation(theta, p);
            if (vt >= 0) return ValuationWindow::of({0});
            const std::int64_t kv = static_cast<std::int64_t>(map.outer_power()) * vt;
            return ValuationWindow::of({-kv, 0, kv});
        }
        case MapKind::SmallRhoF: {
            if (!map.warnings().empty()) return std::nullopt;
            const std::int64_t vA = detail::rational_valuation(prm.at("A"), p);
            const std::int64_t vC = detail::rational_valuation(prm.at("C"), p);
            std::vector<std::int64_t> vs{0, vA - vC, -vA};
            if (vC % 2 == 0) vs.push_back(-vC / 2);
            return ValuationWindow::of(std::move(vs));
        }
        case MapKind::EpRegimeG:
            if (!map.warnings().empty()) return std::nullopt;
            return ValuationWindow::of({0});
        default: return std::nullopt;
    }
}

inline ValuationWindow default_window(const RationalMap& map) {
    if (auto w = named_window(map)) return *w;
    return newton_window(map.fixed_point_polynomial(), map.prime());
}

struct FixedPointSearch {
    ValuationWindow window;
    std::vector<FixedPointReport> points;
    std::vector<InconclusiveRoot> inconclusive;
    /// Roots of the cleared equation rejected because the denominator vanishes there.
    std::vector<PAdicNumber> excluded_poles;
};

inline FixedPointSearch fixed_points(const RationalMap& map, const ValuationWindow& window) {
    FixedPointSearch out;
    out.window = window;
    const auto poly = map.fixed_point_polynomial();
    if (poly.is_zero()) fail(ErrorKind::BadParameter, "the map is the identity: every point is fixed");
    auto roots = poly_roots_Qp(poly, map.prime(), window, map.precision());
    if (roots.has_zero_root) roots.roots.insert(roots.roots.begin(), PAdicNumber::zero(map.prime(), map.precision()));
    for (const auto& x : roots.roots) {
        try {
            out.points.push_back(classify_fixed_point(map, x));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PoleHit) throw;
            out.excluded_poles.push_back(x);
        }
    }
    out.inconclusive = std::move(roots.inconclusive);
    return out;
}

inline FixedPointSearch fixed_points(const RationalMap& map) { return fixed_points(map, default_window(map)); }

// ---------------------------------------------------------------------------
// Orbits

enum class OrbitStop { StepBudget, Converged, PoleHit, PrecisionExhausted };

inline std::string to_string(OrbitStop s) {
    switch (s) {
        case OrbitStop::StepBudget: return "step_budget";
        case OrbitStop::Converged: return "converged";
        case OrbitStop::PoleHit: return "pole_hit";
        case OrbitStop::PrecisionExhausted: return "precision_exhausted";
    }
    return "";
}

struct OrbitTrace {
    PAdicNumber start;
    std::vector<PAdicNumber> iterates;  ///< x^(0), x^(1), ...
    OrbitStop reason = OrbitStop::StepBudget;
    std::optional<std::size_t> converged_to;  ///< index into the supplied targets
};

/// Iterates f from x0 for at most max_steps steps, stopping once an iterate is
/// within p^(-tolerance) of one of `targets`.
inline OrbitTrace iterate_orbit(const RationalMap& map, const PAdicNumber& x0, std::size_t max_steps,
                                std::int64_t tolerance, const std::vector<PAdicNumber>& targets = {}) {
    OrbitTrace t;
    t.start = x0;
    t.iterates.push_back(x0);
    auto near_target = [&](const PAdicNumber& x) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < targets.size(); ++i)
            if (agrees_to(x, targets[i], tolerance)) return i;
        return std::nullopt;
    };
    if (auto hit = near_target(x0)) {
        t.reason = OrbitStop::Converged;
        t.converged_to = hit;
        return t;
    }
    for (std::size_t step = 0; step < max_steps; ++step) {
        try {
            t.iterates.push_back(evaluate(map, t.iterates.back()));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::PoleHit) {
                t.reason = OrbitStop::PoleHit;
                return t;
            }
            if (e.kind() == ErrorKind::PrecisionExhausted) {
                t.reason = OrbitStop::PrecisionExhausted;
                return t;
            }
            throw;
        }
        if (auto hit = near_target(t.iterates.back())) {
            t.reason = OrbitStop::Converged;
            t.converged_to = hit;
            return t;
        }
    }
    t.reason = OrbitStop::StepBudget;
    return t;
}

// ---------------------------------------------------------------------------
// Periodic points

inline constexpr int kMaxPeriod = 3;

/// Numerator and denominator of f^m, obtained by homogenized substitution
/// P_{j+1} = sum a_i P_j^i Q_j^(d-i), Q_{j+1} = sum b_i P_j^i Q_j^(d-i).
inline std::pair<RationalPolynomial, RationalPolynomial> compose_power(const RationalMap& map, int m) {
    if (m < 1) fail(ErrorKind::BadParameter, "period must be >= 1");
    const RationalPolynomial P = map.full_numerator();
    const RationalPolynomial Q = map.full_denominator();
    const int d = std::max(P.degree(), Q.degree());
    RationalPolynomial Pm = P;
    RationalPolynomial Qm = Q;
    for (int j = 1; j < m; ++j) {
        std::vector<RationalPolynomial> pp(static_cast<std::size_t>(d + 1)), qp(static_cast<std::size_t>(d + 1));
        pp[0] = qp[0] = RationalPolynomial::constant(mpq_class(1));
        for (int i = 1; i <= d; ++i) {
            pp[static_cast<std::size_t>(i)] = pp[static_cast<std::size_t>(i - 1)] * Pm;
            qp[static_cast<std::size_t>(i)] = qp[static_cast<std::size_t>(i - 1)] * Qm;
        }
        RationalPolynomial nextP, nextQ;
        for (int i = 0; i <= d; ++i) {
            const auto term = pp[static_cast<std::size_t>(i)] * qp[static_cast<std::size_t>(d - i)];
            nextP = nextP + P.coefficient(static_cast<std::size_t>(i)) * term;
            nextQ = nextQ + Q.coefficient(static_cast<std::size_t>(i)) * term;
        }
        Pm = std::move(nextP);
        Qm = std::move(nextQ);
    }
    return {Pm, Qm};
}

/// Polynomial whose roots include every point with f^m(x) = x.
inline RationalPolynomial periodic_polynomial(const RationalMap& map, int m) {
    auto [Pm, Qm] = compose_power(map, m);
    return Pm - RationalPolynomial::identity() * Qm;
}

inline PAdicNumber iterate(const RationalMap& map, PAdicNumber x, int n) {
    for (int i = 0; i < n; ++i) x = evaluate(map, x);
    return x;
}

struct PeriodicPoints {
    int m = 1;
    ValuationWindow window;
    /// Every verified point with f^m(x) = x, in root-finder order.
    std::vector<PAdicNumber> points;
    /// Least period of each entry of `points`.
    std::vector<int> least_period;
    /// Cycles of exact period m, each listed as x, f(x), ..., f^(m-1)(x).
    std::vector<std::vector<PAdicNumber>> cycles;
    std::vector<InconclusiveRoot> inconclusive;
};

inline PeriodicPoints periodic_points(const RationalMap& map, int m, const ValuationWindow& window) {
    if (m < 1 || m > kMaxPeriod)
        fail(ErrorKind::BadParameter, "period must lie in [1, " + std::to_string(kMaxPeriod) + "]");
    PeriodicPoints out;
    out.m = m;
    out.window = window;
    const auto poly = periodic_polynomial(map, m);
    if (poly.is_zero()) fail(ErrorKind::BadParameter, "f^m is the identity");
    auto roots = poly_roots_Qp(poly, map.prime(), window, map.precision());
    if (roots.has_zero_root) roots.roots.insert(roots.roots.begin(), PAdicNumber::zero(map.prime(), map.precision()));
    out.inconclusive = std::move(roots.inconclusive);
    const std::int64_t tol = fixed_tolerance(map.precision());

    std::vector<std::vector<PAdicNumber>> orbits;
    for (const auto& x : roots.roots) {
        std::vector<PAdicNumber> orbit{x};
        try {
            for (int j = 1; j <= m; ++j) orbit.push_back(evaluate(map, orbit.back()));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PoleHit) throw;
            continue;
        }
        if (!agrees_to(orbit.back(), x, tol)) continue;
        int period = m;
        for (int j = 1; j < m; ++j) {
            if (m % j == 0 && agrees_to(orbit[static_cast<std::size_t>(j)], x, tol)) {
                period = j;
                break;
            }
        }
        orbit.pop_back();
        out.points.push_back(x);
        out.least_period.push_back(period);
        orbits.push_back(std::move(orbit));
    }

    std::vector<bool> used(out.points.size(), false);
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (used[i] || out.least_period[i] != m) continue;
        std::vector<PAdicNumber> cycle;
        for (const auto& y : orbits[i]) {
            std::optional<std::size_t> match;
            for (std::size_t j = 0; j < out.points.size(); ++j) {
                if (!used[j] && agrees_to(out.points[j], y, tol)) {
                    match = j;
                    break;
                }
            }
            if (match) {
                used[*match] = true;
                cycle.push_back(out.points[*match]);
            } else {
                cycle.push_back(y);
            }
        }
        out.cycles.push_back(std::move(cycle));
    }
    return out;
}

inline PeriodicPoints periodic_points(const RationalMap& map, int m) {
    if (m == 1) return periodic_points(map, 1, default_window(map));
    return periodic_points(map, m, newton_window(periodic_polynomial(map, m), map.prime()));
}

} // namespace padyn
