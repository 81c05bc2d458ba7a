#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "padyn/gibbs.hpp"
#include "test_support.hpp"

namespace padyn {
namespace {

using testing::q;

bool same(const PAdicNumber& a, const PAdicNumber& b, int precision = kDefaultPrecision) {
    return equal_at_working_precision(a, b, precision);
}

std::uint64_t configs(unsigned k, unsigned n) { return std::uint64_t{1} << ball_size(k, n); }

// ---------------------------------------------------------------------------
// Tree

TEST(Tree, Sizes) {
    EXPECT_EQ(sphere_size(2, 1), 2u);
    EXPECT_EQ(sphere_size(2, 2), 4u);
    EXPECT_EQ(ball_size(2, 2), 7u);
    EXPECT_EQ(ball_size(3, 2), 13u);
    EXPECT_EQ(edge_count(2, 3), 14u);
    for (unsigned k = 1; k <= 4; ++k)
        for (unsigned n = 0; n <= 5; ++n) {
            const auto s = level_sets(k, n);
            EXPECT_EQ(s.W.size(), s.w_size);
            EXPECT_EQ(s.V.size(), s.v_size);
        }
}

TEST(Tree, IndexRoundTrip) {
    for (unsigned k = 1; k <= 4; ++k)
        for (std::uint64_t i = 0; i < 200; ++i) EXPECT_EQ(index_of(address_of(k, i)), i);
}

TEST(Tree, SuccessorsAreChildrenInIndexOrder) {
    for (unsigned k = 2; k <= 3; ++k)
        for (std::uint64_t i = 0; i < 30; ++i) {
            const auto kids = successors(address_of(k, i));
            ASSERT_EQ(kids.size(), k);
            for (unsigned c = 0; c < k; ++c) EXPECT_EQ(index_of(kids[c]), k * i + c + 1);
        }
}

TEST(Tree, TranslationAndSubgroup) {
    const TreeAddress g{2, {1, 2}};
    const TreeAddress x{2, {2}};
    EXPECT_EQ(translate(g, x).path, (std::vector<unsigned>{1, 2, 2}));
    EXPECT_EQ(translate(g, TreeAddress{2, {}}), g);
    EXPECT_TRUE(in_Gm(g, 2));
    EXPECT_FALSE(in_Gm(translate(g, x), 2));
    EXPECT_TRUE(in_Gm(translate(g, x), 3));
    EXPECT_THROW(concat(g, TreeAddress{3, {1}}), Error);
}

// ---------------------------------------------------------------------------
// Finite-volume measures

TEST(Measure, HamiltonianExamples) {
    const auto ising = InteractionSpec::ising(1);
    EXPECT_EQ(hamiltonian(2, 1, 0b111, ising), 2);
    EXPECT_EQ(hamiltonian(2, 1, 0b001, ising), -2);
    EXPECT_EQ(hamiltonian(2, 1, 0b011, ising), 0);
    const auto lam = InteractionSpec::table({5, 7, 11, 13});
    // root -, children + and -: lambda(-,+) + lambda(-,-).
    EXPECT_EQ(hamiltonian(2, 1, 0b010, lam), 24);
}

TEST(Measure, PartitionFunctionSmallOracle) {
    // Z_1 with unit boundary weights is sum_s (sum_t rho^{s t})^2 = 2 (rho + 1/rho)^2.
    for (long r : {2L, 3L, 7L}) {
        const mpq_class rho(r);
        const auto m = ModelParams::ising(5, 2, rho, 1);
        const auto one = PAdicNumber::one(5);
        const mpq_class expected = 2 * (rho + 1 / rho) * (rho + 1 / rho);
        EXPECT_TRUE(same(partition_function(m, 1, BoundaryField::uniform(one, one)),
                         PAdicNumber::from_rational(expected, 5)));
    }
}

TEST(Measure, NormalizedOnEveryVolume) {
    std::mt19937_64 rng(11);
    for (std::int64_t p : {3, 5, 7}) {
        const auto m = ModelParams::lambda_model(p, 2, mpq_class(p + 1), {1, -2, 0, 3});
        const auto field = BoundaryField::uniform(testing::random_unit(rng, p), testing::random_unit(rng, p));
        for (unsigned n = 0; n <= 2; ++n) {
            auto total = PAdicNumber::zero(p);
            for (std::uint64_t s = 0; s < configs(2, n); ++s)
                total = total + cylinder_measure(m, n, field, static_cast<SpinConfig>(s));
            EXPECT_TRUE(same(total, PAdicNumber::one(p))) << "p=" << p << " n=" << n;
        }
    }
}

TEST(Measure, VanishingPartitionFunction) {
    const auto m = ModelParams::ising(5, 2, mpq_class(6), 1);
    const auto zero = PAdicNumber::zero(5);
    EXPECT_THROW(
        {
            try {
                partition_function(m, 1, BoundaryField::uniform(zero, zero));
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::ZeroPartition);
                throw;
            }
        },
        Error);
    // For odd k, -1 is a fixed point and Z_n = (1 + h) a^{|L_n|} vanishes there.
    const auto odd = ModelParams::ising(5, 3, mpq_class(6), 1);
    try {
        partition_function(odd, 2, BoundaryField::translation_invariant(q(-1, 1, 5)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroPartition);
    }
}

TEST(Measure, VanishingEdgeFactor) {
    // a_{-1}(h) = rho + h / rho is zero at h = -rho^2.
    const auto m = ModelParams::ising(5, 2, mpq_class(2), 1);
    for (const auto& call : std::vector<std::function<void()>>{
             [&] { ti_closed_form(m, 1, q(-4, 1, 5), 0); }, [&] { norm_profile(m, q(-4, 1, 5)); }}) {
        try {
            call();
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ZeroPartition);
        }
    }
}

TEST(Measure, EnumerationGuard) {
    const auto m = ModelParams::ising(5, 4, mpq_class(6), 1);
    try {
        partition_function(m, 2, BoundaryField::translation_invariant(PAdicNumber::one(5)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EnumerationGuard);
    }
}

// ---------------------------------------------------------------------------
// Compatibility and the recursion

std::vector<ModelParams> ising_models() {
    return {ModelParams::ising(5, 2, mpq_class(6), 1), ModelParams::ising(5, 2, mpq_class(1, 5), 1),
            ModelParams::ising(5, 3, mpq_class(1, 5), 1), ModelParams::ising(7, 2, mpq_class(2), 1),
            ModelParams::ising(3, 2, mpq_class(3), 2)};
}

TEST(Compatibility, FixedPointFieldsAreCompatible) {
    for (const auto& m : ising_models()) {
        const auto c = ti_census_ising(m);
        ASSERT_GE(c.count(), 1u);
        for (const auto& e : c.entries)
            for (unsigned n = 1; n <= 2; ++n) {
                const auto r = check_compatibility(m, n, BoundaryField::translation_invariant(e.h));
                EXPECT_TRUE(r.holds) << "p=" << m.p << " k=" << m.k << " n=" << n;
                EXPECT_FALSE(r.witness.has_value());
                EXPECT_EQ(r.configurations, configs(m.k, n));
            }
    }
}

TEST(Compatibility, PerturbedFieldFailsWithWitness) {
    const auto m = ModelParams::ising(5, 2, mpq_class(6), 1);
    const auto h = ti_census_ising(m).entries.at(0).h;
    const auto r = check_compatibility(m, 2, BoundaryField::translation_invariant(h + PAdicNumber::from_integer(5, 5)));
    EXPECT_FALSE(r.holds);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_LT(*r.witness, configs(2, 1));
    EXPECT_LT(r.worst_discrepancy_valuation, fixed_tolerance(kDefaultPrecision));
}

TEST(Compatibility, RecurrenceAtFixedPoints) {
    for (const auto& m : ising_models()) {
        for (const auto& e : ti_census_ising(m).entries) {
            const std::vector<PAdicNumber> kids(m.k, e.h);
            EXPECT_TRUE(same(recurrence_rhs(m, kids), e.h));
        }
    }
}

TEST(Compatibility, RecurrenceIsAProductOfMobiusFactors) {
    const auto m = ModelParams::lambda_model(7, 3, mpq_class(3, 2), {1, 0, -1, 2});
    const mpq_class rho(3, 2);
    const std::vector<mpq_class> hs{mpq_class(2), mpq_class(5, 3), mpq_class(-4)};
    mpq_class expected = 1;
    for (const auto& h : hs) expected *= (rho * h + 1) / (h / rho + rho * rho);
    std::vector<PAdicNumber> kids;
    for (const auto& h : hs) kids.push_back(PAdicNumber::from_rational(h, 7));
    EXPECT_TRUE(same(recurrence_rhs(m, kids), PAdicNumber::from_rational(expected, 7)));
}

TEST(Compatibility, PeriodicFieldsSatisfyTheRecursionByLevel) {
    const auto m = ModelParams::ising(5, 2, mpq_class(6), 1);
    for (int period = 1; period <= 3; ++period) {
        for (const auto& f : hm_periodic_fields(m, period)) {
            ASSERT_EQ(static_cast<int>(f.period()), period);
            for (std::size_t l = 0; l < f.period(); ++l) {
                const std::vector<PAdicNumber> kids(m.k, f.plus_at(l + 1));
                EXPECT_TRUE(same(recurrence_rhs(m, kids), f.plus_at(l)));
            }
            for (unsigned n = 2; n <= 3; ++n) EXPECT_TRUE(check_compatibility(m, n, f).holds);
        }
    }
}

TEST(Compatibility, PeriodicFieldCounts) {
    // Exact-period cycles of the Ising map at (5, 2, 6, 1): one 2-cycle, two 3-cycles.
    const auto m = ModelParams::ising(5, 2, mpq_class(6), 1);
    EXPECT_EQ(hm_periodic_fields(m, 1).size(), ti_census_ising(m).count());
    EXPECT_EQ(hm_periodic_fields(m, 2).size(), 1u);
    EXPECT_EQ(hm_periodic_fields(m, 3).size(), 2u);
}

// ---------------------------------------------------------------------------
// Closed form

TEST(ClosedForm, MatchesEnumeration) {
    std::vector<ModelParams> models = ising_models();
    models.push_back(ModelParams::lambda_model(5, 2, mpq_class(5), {1, 0, 3, 0}));
    models.push_back(ModelParams::lambda_model(5, 2, mpq_class(6), {2, 0, 1, 0}));
    for (const auto& m : models) {
        const auto census = m.is_ising() ? ti_census_ising(m) : lambda_k2_analysis(m);
        for (const auto& e : census.entries) {
            const auto field = BoundaryField::translation_invariant(e.h);
            for (unsigned n = 1; n <= 2; ++n) {
                const auto z = partition_function(m, n, field);
                for (std::uint64_t s = 0; s < configs(m.k, n); ++s) {
                    const auto sigma = static_cast<SpinConfig>(s);
                    EXPECT_TRUE(same(ti_closed_form(m, n, e.h, sigma), configuration_weight(m, n, field, sigma) / z))
                        << "p=" << m.p << " k=" << m.k << " n=" << n << " sigma=" << s;
                }
            }
        }
    }
}

TEST(ClosedForm, RejectsMinusOne) {
    const auto m = ModelParams::ising(5, 3, mpq_class(1, 5), 1);
    try {
        ti_closed_form(m, 1, q(-1, 1, 5), 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BadField);
    }
}

// ---------------------------------------------------------------------------
// Boundedness

// Oracle: min over all sigma_n of v(mu_h(sigma_n)) by enumerating the closed form.
std::int64_t brute_min_valuation(const ModelParams& m, unsigned n, const PAdicNumber& h) {
    std::int64_t best = kInfiniteValuation;
    for (std::uint64_t s = 0; s < configs(m.k, n); ++s)
        best = std::min(best, ti_closed_form(m, n, h, static_cast<SpinConfig>(s)).valuation());
    return best;
}

TEST(Boundedness, ProfileMatchesEnumeration) {
    std::vector<ModelParams> models = ising_models();
    models.push_back(ModelParams::ising(5, 2, mpq_class(2), 1));
    models.push_back(ModelParams::lambda_model(5, 2, mpq_class(5), {3, 0, 2, 0}));
    models.push_back(ModelParams::lambda_model(5, 2, mpq_class(6), {2, 0, 1, 0}));
    for (const auto& m : models) {
        const auto census = m.is_ising() ? ti_census_ising(m) : lambda_k2_analysis(m);
        for (const auto& e : census.entries) {
            const auto prof = norm_profile(m, e.h, 3);
            for (unsigned n = 1; n <= 3; ++n) {
                if (ball_size(m.k, n) > kMaxEnumeratedVertices) break;
                EXPECT_EQ(prof.min_valuation[n - 1], brute_min_valuation(m, n, e.h))
                    << "p=" << m.p << " k=" << m.k << " n=" << n;
            }
        }
    }
}

TEST(Boundedness, RhoOffTheUnitSphereIsBounded) {
    for (const auto& rho : {mpq_class(5), mpq_class(1, 5), mpq_class(10), mpq_class(2, 25)})
        for (unsigned k : {2u, 3u}) {
            const auto m = ModelParams::ising(5, k, rho, 1);
            for (const auto& e : ti_census_ising(m).entries) {
                const auto r = boundedness_classify(m, e.h);
                EXPECT_EQ(r.verdict, Boundedness::Bounded);
                EXPECT_TRUE(r.profile_agrees);
            }
        }
}

TEST(Boundedness, UnitRhoCriterion) {
    struct Case {
        std::int64_t p;
        long rho;
    };
    for (const auto& c : std::vector<Case>{{5, 2}, {3, 2}, {2, 3}, {7, 2}, {5, 6}, {7, 8}, {3, 4}}) {
        const auto m = ModelParams::ising(c.p, 2, mpq_class(c.rho), 1);
        const auto theta = PAdicNumber::from_rational(m.theta(), c.p);
        for (const auto& e : ti_census_ising(m).entries) {
            const auto r = boundedness_classify(m, e.h);
            const auto v = (e.h + theta).valuation();
            EXPECT_EQ(r.verdict == Boundedness::Unbounded, v > 0) << "p=" << c.p << " rho=" << c.rho;
            EXPECT_TRUE(r.profile_agrees) << "p=" << c.p << " rho=" << c.rho;
            // The profile exponent grows by |W_n| v(h + theta) per level.
            for (unsigned n = 2; n <= kProfileDepth; ++n)
                EXPECT_EQ(r.profile.exponent(n) - r.profile.exponent(n - 1),
                          static_cast<std::int64_t>(sphere_size(2, n)) * v);
        }
    }
}

TEST(Boundedness, DyadicCase) {
    for (const auto& rho : {mpq_class(3), mpq_class(5), mpq_class(1, 3), mpq_class(7, 9), mpq_class(2),
                            mpq_class(1, 2), mpq_class(6)}) {
        const auto m = ModelParams::ising(2, 2, rho, 1);
        const auto c = ti_census_ising(m);
        ASSERT_GE(c.count(), 1u);
        const bool unit = m.rho_valuation() == 0;
        for (const auto& e : c.entries)
            EXPECT_EQ(boundedness_classify(m, e.h).verdict == Boundedness::Unbounded, unit) << rho.get_str();
        EXPECT_FALSE(c.phase_transition);
    }
}

TEST(Boundedness, NeedsIsingForTheCriterion) {
    const auto m = ModelParams::lambda_model(5, 2, mpq_class(6), {2, 0, 1, 0});
    EXPECT_THROW(boundedness_classify(m, PAdicNumber::one(5)), Error);
}

// ---------------------------------------------------------------------------
// Censuses

TEST(Census, IsingCountsMatchFixedPoints) {
    for (const auto& m : ising_models()) {
        const auto c = ti_census_ising(m);
        const auto fp = fixed_points(make_ising_potts(m.p, m.k, m.rho, *m.interaction.ising_N));
        EXPECT_EQ(c.count() + c.excluded.size(), fp.points.size());
        for (const auto& x : c.excluded) EXPECT_EQ(x.reason, "h = -1");
        for (const auto& e : c.entries) EXPECT_GE(e.residual_valuation, fixed_tolerance(kDefaultPrecision));
        EXPECT_FALSE(c.measures_coincide);
    }
}

TEST(Census, CardinalityComparisonIsReported) {
    const auto even = ti_census_ising(ModelParams::ising(5, 2, mpq_class(1, 5), 1));
    ASSERT_TRUE(even.theorem.has_value());
    EXPECT_TRUE(even.theorem->hypotheses_hold);
    ASSERT_TRUE(even.theorem->expected_count.has_value());
    EXPECT_EQ(*even.theorem->expected_count, residue_count(5, 2) + 2);
    EXPECT_EQ(even.theorem->count_matches, static_cast<std::int64_t>(even.count()) == *even.theorem->expected_count);

    const auto odd = ti_census_ising(ModelParams::ising(5, 3, mpq_class(1, 5), 1));
    ASSERT_TRUE(odd.theorem->expected_count.has_value());
    EXPECT_EQ(*odd.theorem->expected_count, residue_count(5, 3) + 1);

    const auto unit = ti_census_ising(ModelParams::ising(5, 2, mpq_class(6), 1));
    EXPECT_FALSE(unit.theorem->hypotheses_hold);
    EXPECT_FALSE(unit.theorem->expected_count.has_value());
}

TEST(Census, NoPhaseTransitionOffTheUnitSphere) {
    for (const auto& rho : {mpq_class(5), mpq_class(1, 5), mpq_class(3, 25)}) {
        const auto c = ti_census_ising(ModelParams::ising(5, 2, rho, 1));
        EXPECT_FALSE(c.phase_transition);
        EXPECT_EQ(c.unbounded, 0u);
    }
}

TEST(Census, PhaseTransitionOnTheUnitSphere) {
    // (5, 2, 6, 1): 1 is attractive with bounded measure, the two others give unbounded measures.
    const auto c = ti_census_ising(ModelParams::ising(5, 2, mpq_class(6), 1));
    EXPECT_EQ(c.count(), 3u);
    EXPECT_EQ(c.bounded, 1u);
    EXPECT_EQ(c.unbounded, 2u);
    EXPECT_TRUE(c.phase_transition);
    EXPECT_EQ(c.verdict(), "phase transition");
}

TEST(LambdaCensus, SmallRhoStrongCoupling) {
    // 2 l11 > lm1 with sqrt(-rho^lm1) in Q_5.
    const auto c = lambda_k2_analysis(ModelParams::lambda_model(5, 2, mpq_class(5), {3, 0, 2, 0}));
    EXPECT_EQ(c.regime, "small_rho");
    EXPECT_EQ(c.count(), 3u);
    EXPECT_TRUE(c.phase_transition);
    EXPECT_TRUE(c.theorem->count_matches);
    EXPECT_TRUE(c.theorem->verdict_matches);

    // sqrt(-125) is not in Q_5.
    const auto d = lambda_k2_analysis(ModelParams::lambda_model(5, 2, mpq_class(5), {2, 0, 3, 0}));
    EXPECT_EQ(d.count(), 1u);
    EXPECT_FALSE(d.phase_transition);
}

TEST(LambdaCensus, SmallRhoQuasiPhase) {
    const auto c = lambda_k2_analysis(ModelParams::lambda_model(5, 2, mpq_class(5), {1, 0, 3, 0}));
    EXPECT_EQ(c.count(), 3u);
    EXPECT_EQ(c.bounded, 3u);
    EXPECT_TRUE(c.quasi_phase_transition);
    EXPECT_FALSE(c.phase_transition);
    EXPECT_TRUE(c.theorem->verdict_matches);
    // Each h = x^2 is a fixed point of the full recursion map.
    for (const auto& e : c.entries) EXPECT_TRUE(same(e.h, e.x * e.x));
}

TEST(LambdaCensus, EpRegime) {
    for (std::int64_t p : {5, 7, 11, 13, 17, 19}) {
        const auto c = lambda_k2_analysis(ModelParams::lambda_model(p, 2, mpq_class(p + 1), {2, 0, 1, 0}));
        EXPECT_EQ(c.regime, "ep");
        const bool one_mod_four = p % 4 == 1;
        EXPECT_EQ(c.count(), one_mod_four ? 3u : 1u) << p;
        EXPECT_EQ(c.phase_transition, one_mod_four) << p;
        EXPECT_TRUE(c.theorem->count_matches) << p;
    }
}

TEST(LambdaCensus, DegenerateInteractionIsNoted) {
    // l11 + lmm = l1m + lm1 makes the recursion map constant.
    const auto c = lambda_k2_analysis(ModelParams::lambda_model(5, 2, mpq_class(6), {1, 0, 2, 1}));
    EXPECT_FALSE(c.notes.empty());
    EXPECT_EQ(c.count(), 1u);
}

TEST(LambdaCensus, RequiresBinaryTree) {
    EXPECT_THROW(lambda_k2_analysis(ModelParams::lambda_model(5, 3, mpq_class(6), {2, 0, 1, 0})), Error);
}

TEST(Property, RandomModelsAreConsistent) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> lam(-2, 3);
    std::uniform_int_distribution<int> prime_pick(0, 3);
    const std::int64_t primes[] = {3, 5, 7, 13};
    int checked = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::int64_t p = primes[prime_pick(rng)];
        const mpq_class rho = trial % 2 ? mpq_class(p + 1) : mpq_class(p * (trial % 3 + 1), 1);
        LambdaTable t{lam(rng), lam(rng), lam(rng), lam(rng)};
        ModelParams m;
        try {
            m = ModelParams::lambda_model(p, 2, rho, t);
        } catch (const Error&) {
            continue;
        }
        MeasureCensus c;
        try {
            c = lambda_k2_analysis(m);
        } catch (const Error&) {
            continue;
        }
        for (const auto& e : c.entries) {
            const auto field = BoundaryField::translation_invariant(e.h);
            EXPECT_TRUE(check_compatibility(m, 2, field).holds);
            for (std::uint64_t s = 0; s < configs(2, 1); ++s)
                EXPECT_TRUE(same(ti_closed_form(m, 1, e.h, static_cast<SpinConfig>(s)),
                                 cylinder_measure(m, 1, field, static_cast<SpinConfig>(s))));
            ++checked;
        }
    }
    EXPECT_GT(checked, 10);
}

} // namespace
} // namespace padyn
