#pragma once

// Weak repellers: ball covers, scaling exponents, incidence matrices,
// itineraries and the dynamical metric d_f.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/dynamics.hpp"
#include "padyn/error.hpp"
#include "padyn/padic.hpp"
#include "padyn/residue.hpp"

namespace padyn {

enum class RepellerClass { Repeller, WeakRepeller, Neither };

inline std::string to_string(RepellerClass c) {
    switch (c) {
        case RepellerClass::Repeller: return "repeller";
        case RepellerClass::WeakRepeller: return "weak_repeller";
        case RepellerClass::Neither: return "neither";
    }
    return "";
}

inline RepellerClass classify_exponents(const std::vector<std::int64_t>& tau) {
    bool positive = false;
    bool nonnegative = true;
    bool all_positive = !tau.empty();
    for (auto t : tau) {
        positive = positive || t > 0;
        nonnegative = nonnegative && t >= 0;
        all_positive = all_positive && t > 0;
    }
    if (all_positive) return RepellerClass::Repeller;
    if (nonnegative && positive) return RepellerClass::WeakRepeller;
    return RepellerClass::Neither;
}

/// A pair in ball `ball` violating |f(x) - f(y)|_p = p^tau |x - y|_p.
struct ScalingWitness {
    std::size_t ball = 0;
    PAdicNumber x;
    PAdicNumber y;
    std::int64_t expected_valuation = 0;
    std::int64_t observed_valuation = 0;
};

struct RepellerSetup {
    RationalMap map;
    std::vector<PAdicBall> balls;
    std::vector<std::int64_t> scaling_exponents;
    RepellerClass repeller_class = RepellerClass::Neither;
    std::optional<ScalingWitness> witness;
    std::uint64_t seed = 0;
    std::size_t samples_per_ball = 0;
    /// Residues xi_i and solutions eta_i behind each center (Ising construction only).
    std::vector<std::int64_t> xi;
    std::vector<std::int64_t> eta;

    std::int64_t prime() const { return map.prime(); }
    std::int64_t radius_exponent() const { return balls.empty() ? 0 : balls.front().radius_exponent; }
};

namespace detail {

/// Uniform-ish point of the ball: center + p^m * u with u in Z_p.
inline PAdicNumber random_in_ball(std::mt19937_64& rng, const PAdicBall& ball, int precision) {
    const std::int64_t p = ball.center.prime();
    std::uniform_int_distribution<std::int64_t> digit(0, p - 1);
    mpz_class u = 0;
    mpz_class place = 1;
    for (int i = 0; i < precision; ++i) {
        u += place * digit(rng);
        place *= p;
    }
    if (u == 0) return ball.center;
    return ball.center + PAdicNumber::from_parts(p, ball.min_distance_valuation(), u, precision);
}

inline void require_cover(const std::vector<PAdicBall>& balls) {
    if (balls.empty()) fail(ErrorKind::BadParameter, "repeller needs at least one ball");
    for (std::size_t i = 0; i < balls.size(); ++i) {
        if (balls[i].radius_exponent != balls[0].radius_exponent || balls[i].closed != balls[0].closed)
            fail(ErrorKind::BadParameter, "balls must share one radius and one convention");
        for (std::size_t j = 0; j < i; ++j)
            if (balls[j].contains(balls[i].center))
                fail(ErrorKind::BadParameter, "balls " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
    }
}

} // namespace detail

struct ScalingReport {
    std::vector<std::int64_t> tau;
    bool verified = true;
    std::optional<ScalingWitness> witness;
};

/// tau_j = -v(f'(a_j)), then checked exactly on `samples` random pairs per ball.
inline ScalingReport scaling_exponents(const RationalMap& map, const std::vector<PAdicBall>& balls,
                                       std::size_t samples, std::uint64_t seed) {
    ScalingReport out;
    std::mt19937_64 rng(seed);
    for (std::size_t j = 0; j < balls.size(); ++j) {
        const PAdicNumber d = derivative_at(map, balls[j].center);
        if (d.is_zero()) fail(ErrorKind::BadParameter, "derivative vanishes at center " + std::to_string(j));
        const std::int64_t tau = -d.valuation();
        out.tau.push_back(tau);
        for (std::size_t s = 0; s < samples && out.verified; ++s) {
            const PAdicNumber x = detail::random_in_ball(rng, balls[j], map.precision());
            const PAdicNumber y = detail::random_in_ball(rng, balls[j], map.precision());
            const Separation dxy = separation(x, y);
            if (!dxy.exact) continue;
            const Separation dfxy = separation(evaluate(map, x), evaluate(map, y));
            const std::int64_t expected = dxy.valuation - tau;
            if (!dfxy.exact || dfxy.valuation != expected) {
                out.verified = false;
                out.witness = ScalingWitness{j, x, y, expected, dfxy.valuation};
            }
        }
    }
    return out;
}

inline ScalingReport scaling_exponents(const RepellerSetup& setup, std::size_t samples, std::uint64_t seed) {
    return scaling_exponents(setup.map, setup.balls, samples, seed);
}

inline constexpr std::size_t kDefaultScalingSamples = 64;

/// Repeller data for an arbitrary map and ball cover.
inline RepellerSetup make_repeller(RationalMap map, std::vector<PAdicBall> balls,
                                   std::size_t samples = kDefaultScalingSamples, std::uint64_t seed = 0) {
    detail::require_cover(balls);
    RepellerSetup s{std::move(map), std::move(balls), {}, RepellerClass::Neither, std::nullopt, seed, samples, {}, {}};
    auto report = scaling_exponents(s, samples, seed);
    s.scaling_exponents = report.tau;
    s.witness = report.witness;
    s.repeller_class = report.verified ? classify_exponents(report.tau) : RepellerClass::Neither;
    return s;
}

/// Ising-Potts repeller: balls of radius |p(theta - 1)|_p around
/// x_i = -1 + (theta - 1) eta_i, one for each xi_i in Sol_p(x^k + 1).
inline RepellerSetup build_ising_repeller(std::int64_t p, unsigned k, const mpq_class& rho, std::int64_t N,
                                          int precision = kDefaultPrecision,
                                          std::size_t samples = kDefaultScalingSamples, std::uint64_t seed = 0) {
    detail::require_prime(p);
    RationalMap map = make_ising_potts(p, k, rho, N, precision);
    const mpq_class theta = map.params().at("theta");
    std::vector<std::string> failed;
    if (p < 3) failed.push_back("p >= 3");
    if (!detail::rational_in_Ep(rho, p)) failed.push_back("rho in E_p");
    const std::int64_t v_theta1 = detail::rational_valuation(theta - 1, p);
    const std::int64_t v_k = detail::valuation_of(mpz_class(k), p);
    if (!(v_theta1 > v_k)) failed.push_back("|theta - 1|_p < |k|_p");
    ResidueReport residues;
    if (p >= 3) {
        residues = kth_roots_of_minus_one_mod_p(p, k);
        if (residues.kappa < 2) failed.push_back("kappa_p >= 2 (kappa_p = " + std::to_string(residues.kappa) + ")");
    }
    if (!failed.empty()) {
        std::string msg = "Ising repeller hypotheses fail:";
        for (const auto& f : failed) msg += " [" + f + "]";
        fail(ErrorKind::RegimeViolation, msg);
    }

    const PAdicNumber theta_minus_one = PAdicNumber::from_rational(theta - 1, p, precision);
    const std::int64_t radius_exponent = -(1 + v_theta1);
    std::vector<PAdicBall> balls;
    std::vector<std::int64_t> etas;
    for (std::int64_t xi : residues.sol_set) {
        // eta (xi - 1) + xi + 1 = 0 mod p; xi != 1 because xi^k = -1.
        const mpz_class inv = detail::inverse_mod(mpz_class(xi - 1), mpz_class(p));
        const std::int64_t eta = detail::mod_positive(-(xi + 1) * inv, mpz_class(p)).get_si();
        etas.push_back(eta);
        PAdicNumber center = PAdicNumber::from_integer(-1, p, precision) +
                             theta_minus_one * PAdicNumber::from_integer(eta, p, precision);
        balls.push_back(PAdicBall{center, radius_exponent, true});
    }
    RepellerSetup s = make_repeller(std::move(map), std::move(balls), samples, seed);
    s.xi = residues.sol_set;
    s.eta = std::move(etas);
    return s;
}

// ---------------------------------------------------------------------------
// Incidence matrix

using BoolMatrix = std::vector<std::vector<bool>>;

inline bool is_irreducible(const BoolMatrix& a) {
    const std::size_t n = a.size();
    if (n == 0) return false;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{s};
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j)
                if (a[i][j] && !seen[j]) {
                    seen[j] = true;
                    stack.push_back(j);
                }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!seen[j]) return false;
    }
    return true;
}

struct IncidenceMatrix {
    BoolMatrix a;
    bool irreducible = false;

    std::size_t size() const { return a.size(); }
};

inline IncidenceMatrix make_incidence(BoolMatrix a) {
    IncidenceMatrix m{std::move(a), false};
    m.irreducible = is_irreducible(m.a);
    return m;
}

/// a_ij = 1 iff B_j lies in f(B_i) = B(f(a_i), p^tau_i r).
inline IncidenceMatrix incidence_matrix(const RepellerSetup& setup) {
    const std::size_t n = setup.balls.size();
    BoolMatrix a(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        const PAdicBall image{evaluate(setup.map, setup.balls[i].center),
                              setup.balls[i].radius_exponent + setup.scaling_exponents[i], setup.balls[i].closed};
        for (std::size_t j = 0; j < n; ++j) a[i][j] = image.contains(setup.balls[j].center);
    }
    return make_incidence(std::move(a));
}

/// Marks (i, j) whenever a sampled point of B_i lands in B_j.
inline BoolMatrix sampled_incidence(const RepellerSetup& setup, std::size_t samples, std::uint64_t seed) {
    const std::size_t n = setup.balls.size();
    BoolMatrix hit(n, std::vector<bool>(n, false));
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < samples; ++s) {
            const PAdicNumber y = evaluate(setup.map, detail::random_in_ball(rng, setup.balls[i], setup.map.precision()));
            for (std::size_t j = 0; j < n; ++j)
                if (setup.balls[j].contains(y)) hit[i][j] = true;
        }
    }
    return hit;
}

inline std::vector<std::vector<std::int64_t>> matrix_power(const BoolMatrix& a, int m) {
    const std::size_t n = a.size();
    std::vector<std::vector<std::int64_t>> result(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) result[i][i] = 1;
    for (int step = 0; step < m; ++step) {
        std::vector<std::vector<std::int64_t>> next(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (result[i][l] != 0)
                    for (std::size_t j = 0; j < n; ++j)
                        if (a[l][j]) next[i][j] += result[i][l];
        result = std::move(next);
    }
    return result;
}

/// Number of admissible words of length m that close up: trace(A^m).
inline std::int64_t trace_power(const BoolMatrix& a, int m) {
    const auto pm = matrix_power(a, m);
    std::int64_t t = 0;
    for (std::size_t i = 0; i < pm.size(); ++i) t += pm[i][i];
    return t;
}

// ---------------------------------------------------------------------------
// Symbolic dynamics

/// Index of the ball holding x, if any.
inline std::optional<std::size_t> locate(const RepellerSetup& setup, const PAdicNumber& x) {
    for (std::size_t i = 0; i < setup.balls.size(); ++i)
        if (setup.balls[i].contains(x)) return i;
    return std::nullopt;
}

inline bool in_cover(const RepellerSetup& setup, const PAdicNumber& x) { return locate(setup, x).has_value(); }

struct SymbolSequence {
    std::vector<std::size_t> symbols;
    /// First n with f^n(x) outside X (a pole also counts as leaving X).
    std::optional<std::size_t> escape_step;
};

inline SymbolSequence itinerary(const RepellerSetup& setup, const PAdicNumber& x, std::size_t n_steps) {
    SymbolSequence out;
    PAdicNumber y = x;
    for (std::size_t t = 0; t < n_steps; ++t) {
        auto idx = locate(setup, y);
        if (!idx) {
            out.escape_step = t;
            return out;
        }
        out.symbols.push_back(*idx);
        if (t + 1 == n_steps) break;
        try {
            y = evaluate(setup.map, y);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PoleHit) throw;
            out.escape_step = t + 1;
            return out;
        }
    }
    return out;
}

/// kappa(i, j) with |a_i - a_j|_p = p^(-kappa(i, j)).
inline std::int64_t kappa(const RepellerSetup& setup, std::size_t i, std::size_t j) {
    if (i == j) fail(ErrorKind::BadParameter, "kappa needs two distinct balls");
    return separation(setup.balls[i].center, setup.balls[j].center).valuation;
}

/// d_f between two itineraries: p^-kappa(s_0, t_0) if they differ at once,
/// else p^-(tau_{s_0} + ... + tau_{s_{n-1}} + kappa(s_n, t_n)).
inline NormValue df_distance(const RepellerSetup& setup, const SymbolSequence& s, const SymbolSequence& t) {
    const std::size_t len = std::min(s.symbols.size(), t.symbols.size());
    std::size_t n = 0;
    while (n < len && s.symbols[n] == t.symbols[n]) ++n;
    if (n == len) fail(ErrorKind::IdenticalPrefix, "sequences agree on all " + std::to_string(len) + " symbols");
    std::int64_t e = kappa(setup, s.symbols[n], t.symbols[n]);
    for (std::size_t i = 0; i < n; ++i) e += setup.scaling_exponents[s.symbols[i]];
    return NormValue::from_exponent(e);
}

struct ConjugacyRow {
    int m = 1;
    std::int64_t trace = 0;        ///< trace(A^m)
    std::int64_t points_in_X = 0;  ///< f^m(x) = x with x in X
    bool match = false;
};

struct ConjugacyReport {
    std::vector<ConjugacyRow> rows;
    bool holds = false;
};

inline ConjugacyReport verify_shift_conjugacy(const RepellerSetup& setup, int max_m) {
    if (max_m < 1 || max_m > kMaxPeriod)
        fail(ErrorKind::BadParameter, "period must lie in [1, " + std::to_string(kMaxPeriod) + "]");
    const auto inc = incidence_matrix(setup);
    ConjugacyReport out;
    out.holds = true;
    for (int m = 1; m <= max_m; ++m) {
        ConjugacyRow row;
        row.m = m;
        row.trace = trace_power(inc.a, m);
        for (const auto& x : periodic_points(setup.map, m).points)
            if (in_cover(setup, x)) ++row.points_in_X;
        row.match = row.trace == row.points_in_X;
        out.holds = out.holds && row.match;
        out.rows.push_back(row);
    }
    return out;
}

} // namespace padyn
