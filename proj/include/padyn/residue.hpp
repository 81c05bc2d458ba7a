#pragma once

// k-th roots of -1 modulo p and in Q_p.

#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "padyn/error.hpp"
#include "padyn/padic.hpp"

namespace padyn {

inline constexpr std::int64_t kResidueEnumerationLimit = 1'000'000;

namespace detail {

inline std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
    return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

inline std::int64_t powmod(std::int64_t base, std::int64_t e, std::int64_t m) {
    std::int64_t result = 1 % m;
    base %= m;
    if (base < 0) base += m;
    while (e > 0) {
        if (e & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return result;
}

inline void require_enumerable(std::int64_t p) {
    if (p > kResidueEnumerationLimit)
        fail(ErrorKind::BadParameter, "residue enumeration limited to p <= 10^6, got " + std::to_string(p));
}

} // namespace detail

struct ResidueReport {
    std::int64_t prime = 0;
    std::int64_t degree = 0;
    std::vector<std::int64_t> roots_mod_p;   ///< all xi in F_p with xi^k = -1, ascending
    std::vector<std::int64_t> sol_set;       ///< roots_mod_p without p-1
    std::int64_t kappa = 0;                  ///< |sol_set|
    std::optional<std::int64_t> n_kp;        ///< |roots_mod_p| when nonempty
    bool exists_in_Fp = false;
    bool exists_in_Qp = false;
};

/// Whether x^k = -1 has a solution in Q_p. For odd p this reduces to the q-th
/// root of -1 in F_p where k = q p^s, gcd(q, p) = 1.
inline bool exists_kth_root_minus_one_Qp(std::int64_t p, std::int64_t k) {
    detail::require_prime(p);
    if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
    // In Q_2 the only roots of unity are +-1, so -1 is a k-th power iff k is odd.
    if (p == 2) return k % 2 == 1;
    std::int64_t q = k;
    while (q % p == 0) q /= p;
    return ((p - 1) / std::gcd(q, p - 1)) % 2 == 0;
}

inline ResidueReport kth_roots_of_minus_one_mod_p(std::int64_t p, std::int64_t k) {
    detail::require_prime(p);
    detail::require_enumerable(p);
    if (k < 1) fail(ErrorKind::BadParameter, "k must be >= 1");
    ResidueReport r;
    r.prime = p;
    r.degree = k;
    const std::int64_t minus_one = p - 1;
    for (std::int64_t x = 0; x < p; ++x) {
        if (detail::powmod(x, k, p) == minus_one % p) r.roots_mod_p.push_back(x);
    }
    for (std::int64_t x : r.roots_mod_p)
        if (x != p - 1) r.sol_set.push_back(x);
    r.kappa = static_cast<std::int64_t>(r.sol_set.size());
    r.exists_in_Fp = !r.roots_mod_p.empty();
    if (r.exists_in_Fp) r.n_kp = static_cast<std::int64_t>(r.roots_mod_p.size());
    r.exists_in_Qp = exists_kth_root_minus_one_Qp(p, k);
    return r;
}

} // namespace padyn
