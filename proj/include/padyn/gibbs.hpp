#pragma once

// The lambda-model on the Cayley tree: finite-volume p-adic measures,
// compatibility, translation-invariant and level-periodic boundary fields,
// boundedness and phase verdicts.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "padyn/dynamics.hpp"
#include "padyn/error.hpp"
#include "padyn/padic.hpp"
#include "padyn/residue.hpp"
#include "padyn/roots.hpp"

namespace padyn {

// ---------------------------------------------------------------------------
// Tree

struct TreeAddress {
    unsigned k = 2;
    std::vector<unsigned> path;  ///< coordinates in [1, k]; empty is the root

    std::size_t level() const noexcept { return path.size(); }
    friend bool operator==(const TreeAddress&, const TreeAddress&) = default;
};

inline std::vector<TreeAddress> successors(const TreeAddress& x) {
    std::vector<TreeAddress> out;
    for (unsigned i = 1; i <= x.k; ++i) {
        TreeAddress y = x;
        y.path.push_back(i);
        out.push_back(std::move(y));
    }
    return out;
}

/// x o y: the coordinates of x followed by those of y.
inline TreeAddress concat(const TreeAddress& x, const TreeAddress& y) {
    if (x.k != y.k) fail(ErrorKind::BadParameter, "addresses on trees of different order");
    TreeAddress z = x;
    z.path.insert(z.path.end(), y.path.begin(), y.path.end());
    return z;
}

/// tau_g(x) = g o x.
inline TreeAddress translate(const TreeAddress& g, const TreeAddress& x) { return concat(g, x); }

inline bool in_Gm(const TreeAddress& x, unsigned m) {
    if (m == 0) fail(ErrorKind::BadParameter, "m must be >= 1");
    return x.level() % m == 0;
}

/// |W_n| = k^n.
inline std::uint64_t sphere_size(unsigned k, unsigned n) {
    std::uint64_t w = 1;
    for (unsigned i = 0; i < n; ++i) w *= k;
    return w;
}

/// |V_n| = 1 + k + ... + k^n.
inline std::uint64_t ball_size(unsigned k, unsigned n) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i <= n; ++i) v += sphere_size(k, i);
    return v;
}

/// |L_n| = k + ... + k^n, the number of edges inside V_n.
inline std::uint64_t edge_count(unsigned k, unsigned n) { return ball_size(k, n) - 1; }

/// Breadth-first index: the root is 0 and the children of i are k i + 1 ... k i + k.
inline TreeAddress address_of(unsigned k, std::uint64_t index) {
    TreeAddress a{k, {}};
    while (index > 0) {
        a.path.push_back(static_cast<unsigned>((index - 1) % k) + 1);
        index = (index - 1) / k;
    }
    std::reverse(a.path.begin(), a.path.end());
    return a;
}

inline std::uint64_t index_of(const TreeAddress& a) {
    std::uint64_t i = 0;
    for (unsigned c : a.path) i = i * a.k + c;
    return i;
}

struct LevelSets {
    std::uint64_t w_size = 0;
    std::uint64_t v_size = 0;
    std::vector<TreeAddress> W;
    std::vector<TreeAddress> V;
};

inline constexpr std::uint64_t kMaxListedVertices = 1u << 20;

inline LevelSets level_sets(unsigned k, unsigned n) {
    if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
    LevelSets s;
    s.w_size = sphere_size(k, n);
    s.v_size = ball_size(k, n);
    if (s.v_size > kMaxListedVertices) fail(ErrorKind::EnumerationGuard, "V_n too large to list");
    for (std::uint64_t i = 0; i < s.v_size; ++i) {
        s.V.push_back(address_of(k, i));
        if (s.V.back().level() == n) s.W.push_back(s.V.back());
    }
    return s;
}

// ---------------------------------------------------------------------------
// Model

struct InteractionSpec {
    LambdaTable lambda{};
    std::optional<std::int64_t> ising_N;

    static InteractionSpec ising(std::int64_t N) { return {{N, -N, -N, N}, N}; }
    static InteractionSpec table(const LambdaTable& t) { return {t, std::nullopt}; }

    /// lambda(s, t) for spins s, t in {-1, +1}.
    std::int64_t operator()(int s, int t) const {
        if (s > 0) return t > 0 ? lambda[0] : lambda[1];
        return t > 0 ? lambda[2] : lambda[3];
    }
};

struct ModelParams {
    std::int64_t p = 2;
    unsigned k = 2;
    mpq_class rho = 2;
    InteractionSpec interaction;
    int precision = kDefaultPrecision;

    static ModelParams ising(std::int64_t p, unsigned k, const mpq_class& rho, std::int64_t N,
                             int precision = kDefaultPrecision) {
        ModelParams m{p, k, rho, InteractionSpec::ising(N), precision};
        m.validate();
        return m;
    }
    static ModelParams lambda_model(std::int64_t p, unsigned k, const mpq_class& rho, const LambdaTable& t,
                                    int precision = kDefaultPrecision) {
        ModelParams m{p, k, rho, InteractionSpec::table(t), precision};
        m.validate();
        return m;
    }

    void validate() const {
        detail::require_prime(p);
        detail::require_rho(rho);
        if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
        if (precision < 1) fail(ErrorKind::BadParameter, "precision must be >= 1");
    }
    bool is_ising() const noexcept { return interaction.ising_N.has_value(); }
    mpq_class theta() const {
        if (!is_ising()) fail(ErrorKind::BadParameter, "theta is defined for the Ising interaction only");
        return detail::rational_pow(rho, 2 * *interaction.ising_N);
    }
    std::int64_t rho_valuation() const { return detail::rational_valuation(rho, p); }
    PAdicNumber rho_power(std::int64_t e) const {
        return PAdicNumber::from_rational(detail::rational_pow(rho, e), p, precision);
    }
    /// The translation-invariant recursion map F.
    RationalMap ti_map() const { return make_lambda_TI(p, k, rho, interaction.lambda, precision); }
};

/// Weights (h_{-1,x}, h_{1,x}) by level; level l uses entry l mod period.
struct BoundaryField {
    std::vector<PAdicNumber> plus;
    std::vector<PAdicNumber> minus;

    static BoundaryField translation_invariant(const PAdicNumber& h) {
        return {{h}, {PAdicNumber::one(h.prime(), h.precision())}};
    }
    static BoundaryField level_periodic(std::vector<PAdicNumber> cycle) {
        if (cycle.empty()) fail(ErrorKind::BadField, "empty cycle");
        std::vector<PAdicNumber> ones;
        for (const auto& h : cycle) ones.push_back(PAdicNumber::one(h.prime(), h.precision()));
        return {std::move(cycle), std::move(ones)};
    }
    static BoundaryField uniform(const PAdicNumber& h_plus, const PAdicNumber& h_minus) {
        return {{h_plus}, {h_minus}};
    }

    std::size_t period() const noexcept { return plus.size(); }
    const PAdicNumber& plus_at(std::size_t level) const { return plus[level % plus.size()]; }
    const PAdicNumber& minus_at(std::size_t level) const { return minus[level % minus.size()]; }
};

// Spin configurations on V_n are bitmasks over breadth-first indices; bit = 1 is spin +1.
using SpinConfig = std::uint32_t;

inline constexpr std::uint64_t kMaxEnumeratedVertices = 20;

inline void require_enumerable_volume(unsigned k, unsigned n) {
    if (ball_size(k, n) > kMaxEnumeratedVertices)
        fail(ErrorKind::EnumerationGuard, "|V_" + std::to_string(n) + "| = " + std::to_string(ball_size(k, n)) +
                                              " exceeds " + std::to_string(kMaxEnumeratedVertices));
}

inline int spin(SpinConfig c, std::uint64_t i) { return (c >> i) & 1u ? 1 : -1; }

/// H_n(sigma): sum of lambda(sigma(parent), sigma(child)) over the edges of V_n.
inline std::int64_t hamiltonian(unsigned k, unsigned n, SpinConfig sigma, const InteractionSpec& spec) {
    require_enumerable_volume(k, n);
    const std::uint64_t v = ball_size(k, n);
    std::int64_t H = 0;
    for (std::uint64_t i = 1; i < v; ++i) H += spec(spin(sigma, (i - 1) / k), spin(sigma, i));
    return H;
}

/// Number of +1 spins on W_n.
inline unsigned plus_on_sphere(unsigned k, unsigned n, SpinConfig sigma) {
    const std::uint64_t first = ball_size(k, n) - sphere_size(k, n);
    unsigned j = 0;
    for (std::uint64_t i = first; i < ball_size(k, n); ++i) j += (sigma >> i) & 1u;
    return j;
}

namespace detail {

/// Counts of configurations on V_n by (H, #plus on W_n).
inline std::map<std::pair<std::int64_t, unsigned>, std::uint64_t> energy_census(unsigned k, unsigned n,
                                                                                const InteractionSpec& spec) {
    require_enumerable_volume(k, n);
    std::map<std::pair<std::int64_t, unsigned>, std::uint64_t> counts;
    const std::uint64_t total = std::uint64_t{1} << ball_size(k, n);
    for (std::uint64_t c = 0; c < total; ++c) {
        const auto sigma = static_cast<SpinConfig>(c);
        ++counts[{hamiltonian(k, n, sigma, spec), plus_on_sphere(k, n, sigma)}];
    }
    return counts;
}

class RhoPowers {
public:
    explicit RhoPowers(const ModelParams& m) : m_(m) {}
    const PAdicNumber& operator()(std::int64_t e) {
        auto it = cache_.find(e);
        if (it == cache_.end()) it = cache_.emplace(e, m_.rho_power(e)).first;
        return it->second;
    }

private:
    const ModelParams& m_;
    std::map<std::int64_t, PAdicNumber> cache_;
};

inline PAdicNumber boundary_weight(const PAdicNumber& hp, const PAdicNumber& hm, unsigned plus, unsigned total) {
    return pow_int(hp, plus) * pow_int(hm, total - plus);
}

/// Sums nonzero terms; a sum with no nonzero term or one that cancels to all
/// carried digits is reported as a vanishing partition function.
inline PAdicNumber partition_sum(const std::vector<PAdicNumber>& terms) {
    std::optional<PAdicNumber> acc;
    try {
        for (const auto& t : terms) {
            if (t.is_zero()) continue;
            acc = acc ? *acc + t : t;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        fail(ErrorKind::ZeroPartition, "partition function vanishes at working precision");
    }
    if (!acc) fail(ErrorKind::ZeroPartition, "every term of the partition function vanishes");
    return *acc;
}

} // namespace detail

/// Weight rho^H(sigma) * prod_{x in W_n} h_{sigma(x), x} before normalization.
inline PAdicNumber configuration_weight(const ModelParams& m, unsigned n, const BoundaryField& field,
                                        SpinConfig sigma) {
    const std::int64_t H = hamiltonian(m.k, n, sigma, m.interaction);
    const unsigned j = plus_on_sphere(m.k, n, sigma);
    return m.rho_power(H) *
           detail::boundary_weight(field.plus_at(n), field.minus_at(n), j, static_cast<unsigned>(sphere_size(m.k, n)));
}

inline PAdicNumber partition_function(const ModelParams& m, unsigned n, const BoundaryField& field) {
    detail::RhoPowers rp(m);
    std::vector<PAdicNumber> terms;
    const auto w = static_cast<unsigned>(sphere_size(m.k, n));
    for (const auto& [key, count] : detail::energy_census(m.k, n, m.interaction)) {
        const auto& [H, j] = key;
        terms.push_back(rp(H) * detail::boundary_weight(field.plus_at(n), field.minus_at(n), j, w) *
                        PAdicNumber::from_integer(mpz_class(static_cast<unsigned long>(count)), m.p, m.precision));
    }
    return detail::partition_sum(terms);
}

inline PAdicNumber cylinder_measure(const ModelParams& m, unsigned n, const BoundaryField& field, SpinConfig sigma) {
    return configuration_weight(m, n, field, sigma) / partition_function(m, n, field);
}

/// Relative agreement: separation minus the smaller valuation.
inline std::int64_t relative_agreement(const PAdicNumber& a, const PAdicNumber& b) {
    if (a.is_zero() && b.is_zero()) return kInfiniteValuation;
    const std::int64_t base = std::min(a.valuation(), b.valuation());
    const Separation s = separation(a, b);
    if (!s.exact) return kInfiniteValuation;
    return s.valuation - base;
}

inline bool equal_at_working_precision(const PAdicNumber& a, const PAdicNumber& b, int precision) {
    return relative_agreement(a, b) >= fixed_tolerance(precision);
}

struct CompatibilityReport {
    unsigned n = 0;
    bool holds = false;
    /// Smallest relative agreement (in digits) between the two sides; infinite if identical.
    std::int64_t worst_discrepancy_valuation = kInfiniteValuation;
    std::optional<SpinConfig> witness;  ///< a sigma_{n-1} where the sides differ
    std::uint64_t configurations = 0;
};

/// Brute-force marginal of mu^(n) onto V_{n-1} against mu^(n-1), for every sigma_{n-1}.
inline CompatibilityReport check_compatibility(const ModelParams& m, unsigned n, const BoundaryField& field) {
    if (n < 1) fail(ErrorKind::BadParameter, "compatibility needs n >= 1");
    require_enumerable_volume(m.k, n);
    const auto z_n = partition_function(m, n, field);
    const auto z_prev = partition_function(m, n - 1, field);
    const std::uint64_t v_prev = ball_size(m.k, n - 1);
    const std::uint64_t prev_configs = std::uint64_t{1} << v_prev;
    const std::uint64_t configs = std::uint64_t{1} << ball_size(m.k, n);
    std::vector<std::optional<PAdicNumber>> marginal(prev_configs);
    try {
        for (std::uint64_t c = 0; c < configs; ++c) {
            const auto w = configuration_weight(m, n, field, static_cast<SpinConfig>(c));
            auto& slot = marginal[c & (prev_configs - 1)];
            if (w.is_zero()) continue;
            slot = slot ? *slot + w : w;
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
    }
    CompatibilityReport r;
    r.n = n;
    r.configurations = configs;
    r.holds = true;
    for (std::uint64_t s = 0; s < prev_configs; ++s) {
        const auto rhs = configuration_weight(m, n - 1, field, static_cast<SpinConfig>(s)) / z_prev;
        const auto lhs = marginal[s] ? *marginal[s] / z_n : PAdicNumber::zero(m.p, m.precision);
        std::int64_t agree;
        if (lhs.is_zero() || rhs.is_zero())
            agree = lhs.is_zero() && rhs.is_zero() ? kInfiniteValuation : 0;
        else
            agree = relative_agreement(lhs, rhs);
        if (agree < r.worst_discrepancy_valuation) {
            r.worst_discrepancy_valuation = agree;
            if (agree < fixed_tolerance(m.precision)) r.witness = static_cast<SpinConfig>(s);
        }
    }
    r.holds = r.worst_discrepancy_valuation >= fixed_tolerance(m.precision);
    return r;
}

/// prod over children y of (rho^l11 h_y + rho^l1m)/(rho^lm1 h_y + rho^lmm).
inline PAdicNumber recurrence_rhs(const ModelParams& m, const std::vector<PAdicNumber>& children) {
    const auto& l = m.interaction.lambda;
    PAdicNumber out = PAdicNumber::one(m.p, m.precision);
    for (const auto& h : children) {
        PAdicNumber den;
        try {
            den = m.rho_power(l[2]) * h + m.rho_power(l[3]);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PrecisionExhausted) throw;
            fail(ErrorKind::PoleHit, "recurrence denominator vanishes at working precision");
        }
        if (den.is_zero()) fail(ErrorKind::PoleHit, "recurrence denominator vanishes");
        out = out * ((m.rho_power(l[0]) * h + m.rho_power(l[1])) / den);
    }
    return out;
}

namespace detail {

inline void require_not_minus_one(const PAdicNumber& h) {
    if (!separation(h, PAdicNumber::from_integer(-1, h.prime(), h.precision())).exact)
        fail(ErrorKind::BadField, "h = -1 does not define a measure");
}

} // namespace detail

/// a_{-1}(h) = rho^lambda(-1,-1) + rho^lambda(-1,1) h: the factor shared by all
/// configurations per edge at a translation-invariant fixed point.
/// Raises ZeroPartition when it vanishes, since Z_n = (1 + h) a_{-1}^{|L_n|} then does too.
inline PAdicNumber minus_weight(const ModelParams& m, const PAdicNumber& h) {
    PAdicNumber a;
    try {
        a = m.rho_power(m.interaction.lambda[3]) + m.rho_power(m.interaction.lambda[2]) * h;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::PrecisionExhausted) throw;
        fail(ErrorKind::ZeroPartition, "a_{-1}(h) vanishes at working precision");
    }
    if (a.is_zero()) fail(ErrorKind::ZeroPartition, "a_{-1}(h) vanishes");
    return a;
}

/// rho^H h^{#plus on W_n} / ((1 + h) a_{-1}(h)^{|L_n|}) for a fixed point h of F.
inline PAdicNumber ti_closed_form(const ModelParams& m, unsigned n, const PAdicNumber& h, SpinConfig sigma) {
    detail::require_not_minus_one(h);
    const PAdicNumber a = minus_weight(m, h);
    const PAdicNumber one = PAdicNumber::one(m.p, m.precision);
    const std::int64_t H = hamiltonian(m.k, n, sigma, m.interaction);
    const unsigned j = plus_on_sphere(m.k, n, sigma);
    return m.rho_power(H) * pow_int(h, j) / ((one + h) * pow_int(a, static_cast<std::int64_t>(edge_count(m.k, n))));
}

// ---------------------------------------------------------------------------
// Boundedness

enum class Boundedness { Bounded, Unbounded };

inline std::string to_string(Boundedness b) { return b == Boundedness::Bounded ? "bounded" : "unbounded"; }

struct NormProfile {
    /// min over sigma_n of v_p(mu_h(sigma_n)) for n = 1 .. size; the sup of
    /// cylinder norms is p^(-value).
    std::vector<std::int64_t> min_valuation;
    Boundedness asymptotic = Boundedness::Bounded;

    std::int64_t exponent(std::size_t n) const { return -min_valuation.at(n - 1); }
};

namespace detail {

inline constexpr std::int64_t kSaturation = std::int64_t{1} << 50;

inline std::int64_t saturate(__int128 x) {
    if (x > kSaturation) return kSaturation;
    if (x < -kSaturation) return -kSaturation;
    return static_cast<std::int64_t>(x);
}

// Min-plus recursion over subtree depth d: m_0(t) = leaf(t),
// m_{d+1}(s) = k * min_t (edge(s, t) + m_d(t)).
struct MinPlus {
    unsigned k;
    std::int64_t edge[2][2];  // [s][t], index 0 = spin -1, 1 = spin +1
    std::int64_t leaf[2];

    std::array<std::int64_t, 2> step(const std::array<std::int64_t, 2>& m) const {
        std::array<std::int64_t, 2> out{};
        for (int s = 0; s < 2; ++s) {
            const __int128 best = std::min<__int128>(static_cast<__int128>(edge[s][0]) + m[0],
                                                     static_cast<__int128>(edge[s][1]) + m[1]);
            out[static_cast<std::size_t>(s)] = saturate(best * k);
        }
        return out;
    }
};

inline MinPlus min_plus_for(const ModelParams& m, const PAdicNumber& h) {
    const PAdicNumber a = minus_weight(m, h);
    const std::int64_t va = a.valuation();
    const std::int64_t vr = m.rho_valuation();
    MinPlus mp{m.k, {}, {0, h.valuation()}};
    for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) mp.edge[s][t] = m.interaction(s ? 1 : -1, t ? 1 : -1) * vr - va;
    return mp;
}

} // namespace detail

inline constexpr unsigned kProfileDepth = 8;
inline constexpr unsigned kAsymptoticSteps = 200;

/// Cylinder-norm profile of mu_h from closed-form valuations, plus the
/// asymptotic verdict of the same recursion.
inline NormProfile norm_profile(const ModelParams& m, const PAdicNumber& h, unsigned depth = kProfileDepth) {
    detail::require_not_minus_one(h);
    const PAdicNumber one_plus_h = PAdicNumber::one(m.p, m.precision) + h;
    const std::int64_t v1h = one_plus_h.valuation();
    const auto mp = detail::min_plus_for(m, h);
    NormProfile out;
    std::array<std::int64_t, 2> cur{mp.leaf[0], mp.leaf[1]};
    std::int64_t at_half = 0;
    std::int64_t lowest = std::min(cur[0], cur[1]);
    for (unsigned d = 1; d <= std::max(depth, kAsymptoticSteps); ++d) {
        cur = mp.step(cur);
        const std::int64_t low = std::min(cur[0], cur[1]);
        if (d <= depth) out.min_valuation.push_back(low - v1h);
        if (d == kAsymptoticSteps / 2) at_half = low;
        lowest = std::min(lowest, low);
        if (d == kAsymptoticSteps) {
            const bool diverges = lowest <= -detail::kSaturation || low < at_half;
            out.asymptotic = diverges ? Boundedness::Unbounded : Boundedness::Bounded;
        }
    }
    return out;
}

/// Profile exponents strictly increase from n = 1 to n = depth.
inline bool profile_diverges(const NormProfile& p) {
    for (std::size_t i = 1; i < p.min_valuation.size(); ++i)
        if (!(p.min_valuation[i] < p.min_valuation[i - 1])) return false;
    return p.min_valuation.size() > 1;
}

struct BoundednessReport {
    Boundedness verdict = Boundedness::Bounded;
    std::string criterion_path;
    NormProfile profile;
    bool profile_agrees = true;
};

/// Ising measures: |rho|_p != 1 gives bounded; otherwise unbounded iff
/// 0 < |h + theta|_p < 1.
inline BoundednessReport boundedness_classify(const ModelParams& m, const PAdicNumber& h) {
    if (!m.is_ising()) fail(ErrorKind::BadParameter, "boundedness_classify needs the Ising interaction");
    detail::require_not_minus_one(h);
    BoundednessReport r;
    if (m.rho_valuation() != 0) {
        r.verdict = Boundedness::Bounded;
        r.criterion_path = "|rho|_p != 1 => bounded";
    } else {
        const Separation s = separation(h, PAdicNumber::from_rational(-m.theta(), m.p, m.precision));
        const bool strictly_between = s.exact && s.valuation > 0;
        r.verdict = strictly_between ? Boundedness::Unbounded : Boundedness::Bounded;
        r.criterion_path = strictly_between ? "|rho|_p = 1 and 0 < |h + theta|_p < 1 => unbounded"
                                            : "|rho|_p = 1 and |h + theta|_p not in (0, 1) => bounded";
    }
    r.profile = norm_profile(m, h);
    const bool empirical_unbounded = profile_diverges(r.profile);
    r.profile_agrees = (r.verdict == Boundedness::Unbounded) == empirical_unbounded &&
                       r.profile.asymptotic == r.verdict;
    return r;
}

/// Any interaction: verdict from the asymptotics of the closed-form valuations.
inline BoundednessReport boundedness_from_profile(const ModelParams& m, const PAdicNumber& h) {
    BoundednessReport r;
    r.profile = norm_profile(m, h);
    r.verdict = r.profile.asymptotic;
    r.criterion_path = "min-plus recursion on closed-form cylinder valuations";
    r.profile_agrees = (r.verdict == Boundedness::Unbounded) == profile_diverges(r.profile);
    return r;
}

// ---------------------------------------------------------------------------
// Censuses

struct CensusEntry {
    PAdicNumber h;
    /// The fixed point of the regime map behind h (h = x^2 for the k = 2 reductions).
    PAdicNumber x;
    FixedPointClass cls = FixedPointClass::Neutral;
    std::int64_t residual_valuation = 0;  ///< agreement of F(h) with h
    BoundednessReport boundedness;
    std::optional<bool> compatible_n2;
};

struct ExcludedField {
    PAdicNumber h;
    std::string reason;
};

struct TheoremComparison {
    std::string theorem;
    bool hypotheses_hold = false;
    std::optional<std::int64_t> expected_count;
    std::optional<bool> expected_phase;
    std::optional<bool> expected_quasi;
    bool count_matches = true;
    bool verdict_matches = true;
    std::string note;
};

struct MeasureCensus {
    ModelParams params;
    std::string regime;
    std::vector<CensusEntry> entries;
    std::vector<ExcludedField> excluded;
    std::vector<InconclusiveRoot> inconclusive;
    std::size_t bounded = 0;
    std::size_t unbounded = 0;
    bool phase_transition = false;
    bool quasi_phase_transition = false;
    /// Two distinct fields giving equal cylinder measures at n = 1.
    bool measures_coincide = false;
    std::optional<TheoremComparison> theorem;
    std::vector<std::string> notes;

    std::size_t count() const noexcept { return entries.size(); }
    std::string verdict() const {
        if (phase_transition) return "phase transition";
        if (quasi_phase_transition) return "quasi phase transition";
        return "none";
    }
};

namespace detail {

inline void finish_census(MeasureCensus& c) {
    c.bounded = c.unbounded = 0;
    for (const auto& e : c.entries) (e.boundedness.verdict == Boundedness::Bounded ? c.bounded : c.unbounded)++;
    c.phase_transition = c.bounded >= 1 && c.unbounded >= 1;
    c.quasi_phase_transition = c.bounded >= 2;
    const auto& m = c.params;
    if (c.entries.size() >= 2 && ball_size(m.k, 1) <= kMaxEnumeratedVertices) {
        const std::uint64_t configs = std::uint64_t{1} << ball_size(m.k, 1);
        for (std::size_t i = 0; i < c.entries.size() && !c.measures_coincide; ++i) {
            for (std::size_t j = 0; j < i && !c.measures_coincide; ++j) {
                bool same = true;
                for (std::uint64_t s = 0; s < configs && same; ++s)
                    same = equal_at_working_precision(ti_closed_form(m, 1, c.entries[i].h, static_cast<SpinConfig>(s)),
                                                      ti_closed_form(m, 1, c.entries[j].h, static_cast<SpinConfig>(s)),
                                                      m.precision);
                c.measures_coincide = same;
            }
        }
    }
}

inline std::optional<bool> compatible_at_two(const ModelParams& m, const PAdicNumber& h) {
    if (ball_size(m.k, 2) > kMaxEnumeratedVertices) return std::nullopt;
    return check_compatibility(m, 2, BoundaryField::translation_invariant(h)).holds;
}

/// Adds h as a census member unless it is -1 or has a vanishing partition function.
inline void admit(MeasureCensus& c, const PAdicNumber& h, const PAdicNumber& x, FixedPointClass cls, bool ising) {
    const auto& m = c.params;
    if (!separation(h, PAdicNumber::from_integer(-1, m.p, m.precision)).exact) {
        c.excluded.push_back({h, "h = -1"});
        return;
    }
    CensusEntry e;
    e.h = h;
    e.x = x;
    e.cls = cls;
    try {
        e.residual_valuation = relative_agreement(evaluate(m.ti_map(), h), h);
        e.boundedness = ising ? boundedness_classify(m, h) : boundedness_from_profile(m, h);
        e.compatible_n2 = compatible_at_two(m, h);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::ZeroPartition) throw;
        c.excluded.push_back({h, "zero partition function"});
        return;
    }
    c.entries.push_back(std::move(e));
}

} // namespace detail

/// Number of solutions of x^k = -1 in F_p.
inline std::int64_t residue_count(std::int64_t p, std::int64_t k) {
    return static_cast<std::int64_t>(kth_roots_of_minus_one_mod_p(p, k).roots_mod_p.size());
}

/// Translation-invariant measures of the Ising model from the fixed points of
/// the Ising-Potts map, compared with the cardinality formulas
/// N + 2 / N + 1 (|rho^N|_p > 1, |rho^-N|_p < |k-1|_p) and
/// N + 1 / N (|rho^N|_p < 1, |rho^N|_p < |k+1|_p), N the number of k-th roots of -1 mod p.
inline MeasureCensus ti_census_ising(const ModelParams& m) {
    if (!m.is_ising()) fail(ErrorKind::BadParameter, "ti_census_ising needs the Ising interaction");
    MeasureCensus c;
    c.params = m;
    c.regime = "ising";
    const auto map = make_ising_potts(m.p, m.k, m.rho, *m.interaction.ising_N, m.precision);
    for (const auto& w : map.warnings()) c.notes.push_back(w);
    const auto fp = fixed_points(map);
    c.inconclusive = fp.inconclusive;
    for (const auto& r : fp.points) detail::admit(c, r.point, r.point, r.cls, true);
    detail::finish_census(c);

    TheoremComparison t;
    t.theorem = "Ising TI cardinality";
    const std::int64_t vN = *m.interaction.ising_N * m.rho_valuation();  // v(rho^N)
    const std::int64_t k = m.k;
    const bool even = k % 2 == 0;
    const std::int64_t n_pk = residue_count(m.p, k);
    if (k >= 2 && vN < 0) {
        // |rho^-N|_p < |k-1|_p  <=>  v(rho^-N) > v(k-1).
        const bool sharp = -vN > detail::valuation_of(mpz_class(static_cast<long>(k - 1)), m.p);
        t.hypotheses_hold = sharp;
        if (sharp) t.expected_count = n_pk + (even ? 2 : 1);
        t.note = sharp ? "|rho^N|_p > 1 and |rho^-N|_p < |k-1|_p" : "|rho^N|_p > 1 only: at least 3";
    } else if (k >= 2 && vN > 0) {
        const bool sharp = vN > detail::valuation_of(mpz_class(static_cast<long>(k + 1)), m.p);
        t.hypotheses_hold = sharp;
        if (sharp) t.expected_count = n_pk + (even ? 1 : 0);
        t.note = sharp ? "|rho^N|_p < 1 and |rho^N|_p < |k+1|_p" : "|rho^N|_p < 1 only: at least 1";
    } else {
        t.note = "|rho^N|_p = 1: no cardinality formula";
    }
    if (t.expected_count) t.count_matches = static_cast<std::int64_t>(c.count()) == *t.expected_count;
    if (m.p == 2 || m.rho_valuation() != 0) {
        t.expected_phase = false;
        t.verdict_matches = !c.phase_transition;
    }
    c.theorem = t;
    return c;
}

/// Level-periodic fields from the exact-period-m cycles of the Ising-Potts map,
/// arranged so that h_l = f(h_{l+1}).
inline std::vector<BoundaryField> hm_periodic_fields(const ModelParams& m, int period) {
    if (!m.is_ising()) fail(ErrorKind::BadParameter, "hm_periodic_fields needs the Ising interaction");
    const auto map = make_ising_potts(m.p, m.k, m.rho, *m.interaction.ising_N, m.precision);
    const auto pp = periodic_points(map, period);
    std::vector<BoundaryField> out;
    const auto minus_one = PAdicNumber::from_integer(-1, m.p, m.precision);
    for (const auto& orbit : pp.cycles) {
        const bool hits_minus_one = std::any_of(orbit.begin(), orbit.end(), [&](const PAdicNumber& x) {
            return !separation(x, minus_one).exact;
        });
        if (hits_minus_one) continue;
        std::vector<PAdicNumber> cycle;
        const std::size_t mm = orbit.size();
        for (std::size_t i = 0; i < mm; ++i) cycle.push_back(orbit[(mm - i % mm) % mm]);
        out.push_back(BoundaryField::level_periodic(std::move(cycle)));
    }
    return out;
}

namespace detail {

inline bool sqrt_exists(const mpq_class& a, std::int64_t p, int precision) {
    if (a == 0) return true;
    if (rational_valuation(a, p) % 2 != 0) return false;
    const auto poly = RationalPolynomial{mpq_class(-a), mpq_class(0), mpq_class(1)};
    return !poly_roots_Qp(poly, p, newton_window(poly, p), precision).roots.empty();
}

} // namespace detail

/// k = 2 lambda-model: small-rho reduction f, E_p reduction g, or the map F itself.
inline MeasureCensus lambda_k2_analysis(const ModelParams& m) {
    if (m.k != 2) fail(ErrorKind::BadParameter, "lambda_k2_analysis needs k = 2");
    MeasureCensus c;
    c.params = m;
    const auto& l = m.interaction.lambda;
    const std::int64_t l11 = l[0], l1m = l[1], lm1 = l[2], lmm = l[3];
    const auto rp = [&](std::int64_t e) { return detail::rational_pow(m.rho, e); };
    const bool small_rho = m.rho_valuation() > 0 && l11 > 0 && lm1 > 0 && l1m == 0 && lmm == 0;
    const bool ep = m.p >= 3 && detail::rational_in_Ep(m.rho, m.p) && !(l11 == l1m && lmm == lm1);
    TheoremComparison t;

    for (const auto& w : m.ti_map().warnings()) c.notes.push_back(w);
    auto admit_squares = [&](const FixedPointSearch& fp) {
        c.inconclusive = fp.inconclusive;
        for (const auto& r : fp.points) detail::admit(c, r.point * r.point, r.point, r.cls, false);
    };

    if (small_rho) {
        c.regime = "small_rho";
        const mpq_class A = rp(l11), C = rp(lm1);
        admit_squares(fixed_points(make_small_rho_f(m.p, A, C, m.precision)));
        if (m.p < 3) {
            t.note = "p = 2: no theorem";
        } else if (2 * l11 > lm1) {
            t.theorem = "small rho, 2 l11 > lm1";
            t.hypotheses_hold = true;
            const bool root = detail::sqrt_exists(-C, m.p, m.precision);
            t.expected_count = root ? 3 : 1;
            if (root) t.expected_phase = true;
            t.note = root ? "sqrt(-rho^lm1) exists" : "sqrt(-rho^lm1) does not exist";
        } else if (2 * l11 < lm1) {
            t.theorem = "small rho, 2 l11 < lm1";
            t.hypotheses_hold = true;
            t.expected_count = 3;
            t.expected_quasi = true;
        } else {
            t.note = "2 l11 = lm1: no theorem";
        }
    } else if (ep) {
        c.regime = "ep";
        const mpq_class a = rp(l1m - lm1), b = rp(l11 - l1m), cc = rp(lmm - lm1);
        admit_squares(fixed_points(make_Ep_regime_g(m.p, a, b, cc, m.precision)));
        t.theorem = "rho in E_p";
        t.hypotheses_hold = true;
        const bool one_mod_four = m.p % 4 == 1;
        t.expected_count = one_mod_four ? 3 : 1;
        if (one_mod_four) t.expected_phase = true;
        t.note = one_mod_four ? "p = 1 mod 4" : "p = 3 mod 4";
    } else {
        c.regime = "generic";
        const auto fp = fixed_points(m.ti_map());
        c.inconclusive = fp.inconclusive;
        for (const auto& r : fp.points) detail::admit(c, r.point, r.point, r.cls, false);
        t.note = "no theorem for this regime";
    }
    detail::finish_census(c);
    if (t.expected_count) t.count_matches = static_cast<std::int64_t>(c.count()) == *t.expected_count;
    if (t.expected_phase) t.verdict_matches = c.phase_transition == *t.expected_phase;
    if (t.expected_quasi) t.verdict_matches = t.verdict_matches && c.quasi_phase_transition == *t.expected_quasi;
    c.theorem = t;
    return c;
}

} // namespace padyn
