#pragma once

// JSON and CSV views of the library's reports. Field names here are the
// public output format of the command-line tool.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "padyn/dynamics.hpp"
#include "padyn/gibbs.hpp"
#include "padyn/padic.hpp"
#include "padyn/residue.hpp"
#include "padyn/roots.hpp"
#include "padyn/subshift.hpp"

namespace padyn {

using json = nlohmann::ordered_json;

/// p^(-e) as an exact decimal or fraction string.
inline std::string render_norm(std::int64_t p, const NormValue& n) {
    if (n.is_zero()) return "0";
    const std::int64_t e = n.exponent();
    if (e <= 0) return detail::prime_power(p, -e).get_str();
    return "1/" + detail::prime_power(p, e).get_str();
}

inline json norm_json(std::int64_t p, const NormValue& n) {
    if (n.is_zero()) return {{"zero", true}, {"rendered", "0"}};
    return {{"zero", false}, {"exponent", n.exponent()}, {"rendered", render_norm(p, n)}};
}

inline void to_json(json& j, const PAdicNumber& x) {
    if (x.is_zero()) {
        j = {{"prime", x.prime()}, {"zero", true}, {"precision", x.precision()}};
        return;
    }
    j = {{"prime", x.prime()},
         {"valuation", x.valuation()},
         {"precision", x.precision()},
         {"digits", x.digits()},
         {"expansion", x.str()}};
}

inline void to_json(json& j, const PAdicBall& b) {
    j = {{"center", b.center}, {"radius_exponent", b.radius_exponent}, {"closed", b.closed}};
}

inline void to_json(json& j, const ValuationWindow& w) { j = w.valuations; }

inline void to_json(json& j, const InconclusiveRoot& r) {
    j = {{"valuation", r.valuation}, {"approximation", r.approximation}, {"digits_known", r.depth}};
}

inline void to_json(json& j, const ResidueReport& r) {
    j = {{"prime", r.prime},         {"k", r.degree},
         {"roots_mod_p", r.roots_mod_p}, {"sol_set", r.sol_set},
         {"kappa_p", r.kappa},       {"n_kp", r.n_kp ? json(*r.n_kp) : json("none")},
         {"exists_in_Fp", r.exists_in_Fp}, {"exists_in_Qp", r.exists_in_Qp}};
}

inline void to_json(json& j, const RootSearchResult& r) {
    j = {{"roots", r.roots}, {"inconclusive", r.inconclusive}, {"zero_root", r.has_zero_root}};
}

inline json map_json(const RationalMap& m) {
    json params = json::object();
    for (const auto& [name, value] : m.params()) params[name] = value.get_str();
    return {{"kind", to_string(m.kind())},
            {"prime", m.prime()},
            {"numerator", m.numerator().str()},
            {"denominator", m.denominator().str()},
            {"outer_power", m.outer_power()},
            {"params", params},
            {"warnings", m.warnings()}};
}

inline void to_json(json& j, const FixedPointReport& r) {
    j = {{"point", r.point},
         {"valuation", r.valuation},
         {"multiplier", r.multiplier},
         {"multiplier_norm", norm_json(r.point.prime(), r.multiplier_norm)},
         {"class", to_string(r.cls)},
         {"in_unit_sphere", r.in_unit_sphere},
         {"in_Ep", r.in_Ep},
         {"residual_valuation", r.residual_valuation}};
}

inline json fixed_points_json(const RationalMap& map, const FixedPointSearch& s) {
    json excluded = s.excluded_poles;
    return {{"map", map_json(map)},
            {"window", s.window},
            {"count", s.points.size()},
            {"fixed_points", s.points},
            {"inconclusive", s.inconclusive},
            {"excluded_poles", excluded}};
}

inline json orbit_json(const RationalMap& map, const OrbitTrace& t) {
    json j = {{"map", map_json(map)},
              {"start", t.start},
              {"steps", t.iterates.empty() ? 0 : t.iterates.size() - 1},
              {"stop_reason", to_string(t.reason)},
              {"iterates", t.iterates}};
    if (t.converged_to) j["converged_to"] = *t.converged_to;
    return j;
}

inline json periodic_json(const RationalMap& map, const PeriodicPoints& pp) {
    return {{"map", map_json(map)},     {"m", pp.m},
            {"window", pp.window},      {"count", pp.points.size()},
            {"points", pp.points},      {"least_period", pp.least_period},
            {"cycles", pp.cycles},      {"inconclusive", pp.inconclusive}};
}

inline json repeller_json(const RepellerSetup& s, const IncidenceMatrix& a, const ConjugacyReport& c) {
    json rows = json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"m", r.m}, {"trace", r.trace}, {"points_in_X", r.points_in_X}, {"match", r.match}});
    json matrix = json::array();
    for (const auto& row : a.a) {
        json out = json::array();
        for (bool b : row) out.push_back(b ? 1 : 0);
        matrix.push_back(out);
    }
    json j = {{"map", map_json(s.map)},
              {"balls", s.balls},
              {"xi", s.xi},
              {"eta", s.eta},
              {"scaling_exponents", s.scaling_exponents},
              {"repeller_class", to_string(s.repeller_class)},
              {"seed", s.seed},
              {"samples_per_ball", s.samples_per_ball},
              {"incidence", matrix},
              {"irreducible", a.irreducible},
              {"conjugacy", {{"rows", rows}, {"holds", c.holds}}}};
    if (s.witness)
        j["scaling_witness"] = {{"ball", s.witness->ball},
                                {"x", s.witness->x},
                                {"y", s.witness->y},
                                {"expected_valuation", s.witness->expected_valuation},
                                {"observed_valuation", s.witness->observed_valuation}};
    return j;
}

inline json params_json(const ModelParams& m) {
    const auto& l = m.interaction.lambda;
    json j = {{"prime", m.p},
              {"k", m.k},
              {"rho", m.rho.get_str()},
              {"lambda", {{"l11", l[0]}, {"l1m", l[1]}, {"lm1", l[2]}, {"lmm", l[3]}}},
              {"precision", m.precision}};
    if (m.interaction.ising_N) j["N"] = *m.interaction.ising_N;
    return j;
}

/// Sup of cylinder norms by level; exponent e means p^(-e).
inline json profile_json(std::int64_t p, const NormProfile& prof) {
    json rows = json::array();
    for (std::size_t n = 1; n <= prof.min_valuation.size(); ++n) {
        const auto norm = NormValue::from_exponent(prof.min_valuation[n - 1]);
        rows.push_back({{"n", n}, {"valuation_of_measure_norm", prof.min_valuation[n - 1]},
                        {"sup_norm", render_norm(p, norm)}});
    }
    return rows;
}

inline json boundedness_json(std::int64_t p, const BoundednessReport& r) {
    return {{"verdict", to_string(r.verdict)},
            {"criterion_path", r.criterion_path},
            {"asymptotic", to_string(r.profile.asymptotic)},
            {"profile_agrees", r.profile_agrees},
            {"profile", profile_json(p, r.profile)}};
}

inline json census_json(const MeasureCensus& c) {
    const std::int64_t p = c.params.p;
    json entries = json::array();
    for (const auto& e : c.entries) {
        json row = {{"h", e.h},
                    {"x", e.x},
                    {"class", to_string(e.cls)},
                    {"residual_valuation", e.residual_valuation},
                    {"boundedness", boundedness_json(p, e.boundedness)}};
        row["compatible_n2"] = e.compatible_n2 ? json(*e.compatible_n2) : json(nullptr);
        entries.push_back(row);
    }
    json excluded = json::array();
    for (const auto& x : c.excluded) excluded.push_back({{"h", x.h}, {"reason", x.reason}});
    json j = {{"params", params_json(c.params)},
              {"regime", c.regime},
              {"count", c.count()},
              {"bounded", c.bounded},
              {"unbounded", c.unbounded},
              {"phase_transition", c.phase_transition},
              {"quasi_phase_transition", c.quasi_phase_transition},
              {"verdict", c.verdict()},
              {"measures_coincide", c.measures_coincide},
              {"measures", entries},
              {"excluded", excluded},
              {"inconclusive", c.inconclusive},
              {"notes", c.notes}};
    if (c.theorem) {
        const auto& t = *c.theorem;
        json tj = {{"theorem", t.theorem},
                   {"hypotheses_hold", t.hypotheses_hold},
                   {"count_matches", t.count_matches},
                   {"verdict_matches", t.verdict_matches},
                   {"note", t.note}};
        tj["expected_count"] = t.expected_count ? json(*t.expected_count) : json(nullptr);
        tj["expected_phase_transition"] = t.expected_phase ? json(*t.expected_phase) : json(nullptr);
        tj["expected_quasi_phase_transition"] = t.expected_quasi ? json(*t.expected_quasi) : json(nullptr);
        j["theorem"] = tj;
    }
    return j;
}

/// Spins of sigma on V_n as +1 / -1 in breadth-first order.
inline std::vector<int> spins_of(unsigned k, unsigned n, SpinConfig sigma) {
    std::vector<int> out;
    for (std::uint64_t i = 0; i < ball_size(k, n); ++i) out.push_back(spin(sigma, i));
    return out;
}

inline json compatibility_json(const ModelParams& m, const CompatibilityReport& r) {
    json j = {{"n", r.n}, {"holds", r.holds}, {"configurations", r.configurations}};
    if (r.worst_discrepancy_valuation >= kInfiniteValuation)
        j["max_discrepancy_norm"] = norm_json(m.p, NormValue::zero());
    else
        j["max_discrepancy_norm"] = norm_json(m.p, NormValue::from_exponent(r.worst_discrepancy_valuation));
    if (r.witness) j["witness"] = spins_of(m.k, r.n - 1, *r.witness);
    return j;
}

inline std::string profile_csv(const NormProfile& prof) {
    std::ostringstream out;
    out << "n,valuation_of_measure_norm\n";
    for (std::size_t n = 1; n <= prof.min_valuation.size(); ++n) out << n << ',' << prof.min_valuation[n - 1] << '\n';
    return out.str();
}

} // namespace padyn
