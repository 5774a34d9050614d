#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "socdyn/core.hpp"

using namespace socdyn;

TEST(CombineMass, ZeroOnlyWhenAllComponentsZero) {
    EXPECT_EQ(combine_mass({0, 0, 0}), 0.0);
    EXPECT_EQ(combine_mass({1, 0, 0}), 1.0);
    EXPECT_GT(combine_mass({0, 0, 1e-300}), 0.0);
}

TEST(CombineMass, AdditiveDefault) {
    const MassComponents c{2, 3, 5};
    const double expected = c.economic + c.physical + c.intellectual;  // re-summed
    EXPECT_EQ(expected, 10.0);
    EXPECT_EQ(combine_mass(c), expected);
}

TEST(CombineMass, RejectsNegativeAndNonFinite) {
    EXPECT_THROW((void)combine_mass({-1, 0, 0}), ValidationError);
    EXPECT_THROW((void)combine_mass({0, std::numeric_limits<double>::quiet_NaN(), 0}), ValidationError);
    EXPECT_THROW((void)combine_mass({0, 0, std::numeric_limits<double>::infinity()}), ValidationError);
}

TEST(CombineMass, EveryCombinerPositiveAndMonotone) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    const MassCombiner combiners[] = {MassCombiner::additive(), MassCombiner::euclidean(),
                                      MassCombiner::weighted({0.5, 2.0, 3.0})};
    for (const auto& comb : combiners) {
        EXPECT_EQ(comb({0, 0, 0}), 0.0);
        for (int i = 0; i < 1000; ++i) {
            MassComponents c{u(rng), u(rng), u(rng)};
            const double m = comb(c);
            EXPECT_GT(m, 0.0);
            auto bumped = c;
            bumped.physical += 0.5;
            EXPECT_GT(comb(bumped), m);
        }
    }
}

TEST(CombineMass, WeightsMustBePositive) {
    EXPECT_THROW((void)MassCombiner::weighted({1.0, 0.0, 1.0}), ValidationError);
}

TEST(Distance, Examples) {
    EXPECT_EQ(distance({0, 0}, {0, 0}), 0.0);
    EXPECT_EQ(distance({3, 0}, {0, 4}), 5.0);
    EXPECT_NEAR(distance({1, 1, 1}, {2, 2, 2}), 1.7320508075688772, 1e-15);
}

TEST(Distance, DimensionMismatch) {
    EXPECT_THROW((void)distance({1, 2}, {1, 2, 3}), ValidationError);
}

TEST(Distance, TriangleInequalityAndSymmetry) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int i = 0; i < 10000; ++i) {
        const auto n = static_cast<std::size_t>(dim(rng));
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t k = 0; k < n; ++k) {
            a[k] = u(rng);
            b[k] = u(rng);
            c[k] = u(rng);
        }
        const AssessmentVector va(a), vb(b), vc(c);
        const double ab = distance(va, vb), bc = distance(vb, vc), ac = distance(va, vc);
        EXPECT_LE(ac, (ab + bc) * (1 + 1e-12));
        EXPECT_EQ(ab, distance(vb, va));
        EXPECT_EQ(distance(va, va), 0.0);
    }
}

TEST(AssessmentVector, RejectsNonFinite) {
    EXPECT_THROW(AssessmentVector({1.0, std::numeric_limits<double>::infinity()}), ValidationError);
}

TEST(AssessmentVector, ArithmeticPreservesDimension) {
    const AssessmentVector a{1, 2, 3}, b{4, 5, 6};
    EXPECT_EQ((a + b).dimension(), 3u);
    EXPECT_EQ((a - b).dimension(), 3u);
    EXPECT_EQ((a * 2.0).dimension(), 3u);
    EXPECT_EQ((-a).dimension(), 3u);
    EXPECT_EQ(a + b, AssessmentVector({5, 7, 9}));
    EXPECT_EQ(a.dot(b), 32.0);
    EXPECT_THROW((void)(a + AssessmentVector{1, 2}), ValidationError);
}

TEST(SocialBody, ZeroMassRejected) {
    EXPECT_THROW((void)make_body("x", {0, 0, 0}, {0.0}, {0.0}), ValidationError);
    const auto b = make_body("x", {1, 2, 0}, {0.0}, {0.0});
    EXPECT_EQ(b.mass, 3.0);
}

TEST(SocialBody, PositionVelocityDimensionsMatch) {
    EXPECT_THROW((void)make_body("x", {1, 0, 0}, {0.0, 1.0}, {0.0}), ValidationError);
}

TEST(OscillatorSolution, PeriodAndFrequency) {
    const auto s = OscillatorSolution::make(1.0, 2.0, 4.0);
    EXPECT_NEAR(s.period, 2.0 * std::numbers::pi / 4.0, 1e-15);
    EXPECT_NEAR(s.frequency * s.period, 1.0, 1e-12);
    EXPECT_THROW((void)OscillatorSolution::make(1, 1, 0), ValidationError);
}

namespace {

SimulationState two_bodies() {
    SimulationState s;
    s.dimension = 2;
    s.bodies.push_back(make_body("a", {1, 0, 0}, {0, 0}, {0, 0}));
    s.bodies.push_back(make_body("b", {2, 0, 0}, {1, 0}, {0, 0}));
    return s;
}

}  // namespace

TEST(SimulationStateValidation, AcceptsConsistentState) {
    auto s = two_bodies();
    ForceModel f;
    f.kind = ForceKind::Attraction;
    f.body = "a";
    f.partner = "b";
    s.forces.push_back(f);
    EXPECT_NO_THROW(validate(s));
}

TEST(SimulationStateValidation, RejectsDanglingIdsAndDuplicates) {
    auto s = two_bodies();
    ForceModel f;
    f.kind = ForceKind::Attraction;
    f.body = "a";
    f.partner = "ghost";
    s.forces.push_back(f);
    EXPECT_THROW(validate(s), ValidationError);

    auto d = two_bodies();
    d.bodies[1].id = "a";
    EXPECT_THROW(validate(d), ValidationError);
}

TEST(SimulationStateValidation, RejectsMixedDimensions) {
    auto s = two_bodies();
    s.bodies[1].position = AssessmentVector{1, 0, 0};
    EXPECT_THROW(validate(s), ValidationError);
}

TEST(SimulationStateValidation, ConstraintMustHoldInitially) {
    auto s = two_bodies();
    s.constraints.push_back({"a", {0, 1}, 1.0});
    EXPECT_THROW(validate(s), ValidationError);
    s.constraints.back().offset = 0.0;
    EXPECT_NO_THROW(validate(s));
    s.constraints.back().normal = AssessmentVector{0, 2};
    EXPECT_THROW(validate(s), ValidationError);
}
