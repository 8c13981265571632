#include <random>

#include <gtest/gtest.h>

#include <equideform/tower.hpp>

using namespace equideform;
using namespace equideform::smooth;

TEST(Tower, CatalogJumps) {
    for (u64 p : {2u, 3u}) {
        for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
            const CyclicSmoothAction a = tower::tower_action(e.spec, 120);
            EXPECT_TRUE(a.is_faithful());
            EXPECT_EQ(a.faithful_order(), p * p);
            const RamificationProfile prof = ramification_profile(a);
            EXPECT_EQ(prof.jumps, (std::vector<int>{e.m0, e.m1}));
            EXPECT_NE(static_cast<u64>(e.m0) % p, 0u);
            EXPECT_EQ((static_cast<u64>(e.m1) - static_cast<u64>(e.m0)) % p, 0u);
            EXPECT_EQ(prof.different, static_cast<int>(p - 1) * ((e.m1 + 1) + static_cast<int>(p) * (e.m0 + 1)));
        }
    }
}

TEST(Tower, RejectsBadBaseChange) {
    EXPECT_THROW(tower::tower_series({3, {}, 3}, 40), HypothesisError);
    EXPECT_THROW(tower::tower_series({2, {0, 0, 1}, 0}, 40), HypothesisError);
}

TEST(Tower, TraceIdentity) {
    std::mt19937_64 rng(77);
    for (u64 p : {2u, 3u}) {
        for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
            const CyclicSmoothAction a = tower::tower_action(e.spec, 120);
            EXPECT_TRUE(tower_trace_identity_check(a, VectorField(Series::constant(p, 1, 119))));
            EXPECT_TRUE(tower_trace_identity_check(a, VectorField(Series::zero(p, 119))));
            std::uniform_int_distribution<i64> d(0, static_cast<i64>(p) - 1);
            std::vector<i64> c(119);
            for (i64& v : c) v = d(rng);
            EXPECT_TRUE(tower_trace_identity_check(a, VectorField(Series(p, c, 119))));
        }
    }
}

TEST(Tower, WitnessesFollowTheCriterion) {
    for (u64 p : {2u, 3u}) {
        for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
            const CyclicSmoothAction a = tower::tower_action(e.spec, 160);
            const RamificationProfile prof = ramification_profile(a);
            const bool exists = (2 * static_cast<u64>(prof.different) + 1) % (p * p) != 0;
            EXPECT_EQ(trace_zero_basis_exists(a), exists);
            if (exists) {
                const TraceZeroWitness w = trace_zero_basis_construct(a);
                EXPECT_NE(w.field.f[0], 0u);
                EXPECT_TRUE(trace(a, w.field).f.is_zero_to_precision());
            } else {
                EXPECT_THROW(trace_zero_basis_construct(a), ExistenceFails);
            }
        }
    }
}

TEST(Tower, DescentIsUsedWhenTheSubgroupHasNoWitness) {
    // p = 3, jumps (1, 7): 2*m0 + 1 = 3 kills the subgroup witness.
    const CyclicSmoothAction a = tower::tower_action({3, {}, 1}, 160);
    EXPECT_EQ(trace_zero_basis_construct(a).method, "descent");
    const CyclicSmoothAction b = tower::tower_action({3, {}, 2}, 200);
    EXPECT_EQ(trace_zero_basis_construct(b).method, "subgroup-linear-solve");
}

TEST(Tower, ValuationLawHoldsOnTowers) {
    std::mt19937_64 rng(8);
    const u64 p = 3;
    for (const tower::CatalogEntry& e : tower::desk_towers(p)) {
        if ((2 * static_cast<u64>(e.m0) + 1) % p != 0) continue;
        const CyclicSmoothAction a = tower::tower_action(e.spec, 360);
        const RamificationProfile prof = ramification_profile(a);
        const Series z = norm_parameter(a);
        int checked = 0;
        for (int ell = 0; ell <= 18; ++ell) {
            int predicted;
            try {
                predicted = predict_trace_valuation(prof, ell);
            } catch (const HypothesisError&) {
                continue;
            }
            std::uniform_int_distribution<i64> d(0, 2);
            std::vector<i64> c(static_cast<std::size_t>(359 - ell));
            for (i64& v : c) v = d(rng);
            c[0] = 1;
            const Series f = shift_up(Series(p, c, 359 - ell), ell);
            EXPECT_EQ(theta(a, VectorField(f), z).valuation(), Valuation::finite(predicted));
            ++checked;
        }
        EXPECT_GT(checked, 0);
    }
}
