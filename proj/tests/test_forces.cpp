#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "socdyn/forces.hpp"

using namespace socdyn;

namespace {

SocialBody body(const std::string& id, double m, AssessmentVector x) {
    auto v = AssessmentVector::zeros(x.dimension());
    return make_body(id, {m, 0, 0}, std::move(x), std::move(v));
}

ForceParams attraction_params(double gamma, double eps = 0.0) {
    ForceParams p;
    p.gamma = gamma;
    p.softening = eps;
    return p;
}

ForceParams linear_params(double k_e, double k_c, AssessmentVector eq) {
    ForceParams p;
    p.k_e = k_e;
    p.k_c = k_c;
    p.equilibrium = std::move(eq);
    return p;
}

double cross2(const AssessmentVector& a, const AssessmentVector& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

TEST(Attraction, UnitCase) {
    const auto f = attraction_force(body("a", 1, {0, 0}), body("b", 1, {1, 0}), attraction_params(1));
    EXPECT_EQ(f, AssessmentVector({1.0, 0.0}));
}

TEST(Attraction, InverseSquare) {
    const auto p = attraction_params(1.3);
    const double f1 = attraction_force(body("a", 2, {0, 0}), body("b", 5, {0, 1}), p).norm();
    const double f2 = attraction_force(body("a", 2, {0, 0}), body("b", 5, {0, 2}), p).norm();
    EXPECT_NEAR(f2 / f1, 0.25, 1e-12);
}

TEST(Attraction, DirectArithmetic) {
    const auto f = attraction_force(body("a", 2, {0, 0}), body("b", 3, {0, 2}), attraction_params(0.5));
    EXPECT_NEAR(f.norm(), 0.5 * 2 * 3 / 4.0, 1e-15);
    EXPECT_GT(f[1], 0.0);
}

TEST(Attraction, SofteningAndSingularity) {
    const auto a = body("a", 1, {1, 1});
    const auto b = body("b", 1, {1, 1});
    EXPECT_THROW((void)attraction_force(a, b, attraction_params(1, 0)), SingularityError);
    EXPECT_EQ(attraction_force(a, b, attraction_params(1, 1e-6)), AssessmentVector::zeros(2));

    const auto c = body("c", 1, {1, 2});
    EXPECT_NEAR(attraction_force(a, c, attraction_params(1, 0.5)).norm(), 1.0 / 1.25, 1e-15);
}

TEST(Attraction, ThirdLawCentralityBilinearity) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(-50, 50), mass(0.1, 100), gamma(0.01, 10);
    for (int i = 0; i < 1000; ++i) {
        const auto a = body("a", mass(rng), {pos(rng), pos(rng)});
        const auto b = body("b", mass(rng), {pos(rng), pos(rng)});
        const auto p = attraction_params(gamma(rng), i % 2 ? 0.0 : 1e-3);
        const auto fab = attraction_force(a, b, p);
        const auto fba = attraction_force(b, a, p);
        EXPECT_LE((fab + fba).norm(), 1e-12 * fab.norm());
        const auto sep = b.position - a.position;
        EXPECT_LE(std::abs(cross2(fab, sep)), 1e-12 * fab.norm() * sep.norm());
        EXPECT_GT(fab.dot(sep), 0.0);

        auto heavier = a;
        heavier.mass *= 3.0;
        EXPECT_NEAR(attraction_force(heavier, b, p).norm(), 3.0 * fab.norm(), 1e-12 * fab.norm());
    }
}

TEST(Elasticity, Examples) {
    EXPECT_EQ(elasticity_force(body("a", 1, {2, 3}), linear_params(5, 0, {2, 3})),
              AssessmentVector::zeros(2));
    EXPECT_EQ(elasticity_force(body("a", 1, {1, 0}), linear_params(2, 0, {0, 0})),
              AssessmentVector({-2, 0}));
    const auto f = elasticity_force(body("a", 1, {4, 5}), linear_params(0.5, 0, {1, 1}));
    EXPECT_EQ(f, AssessmentVector({-1.5, -2.0}));
    EXPECT_DOUBLE_EQ(f.norm(), 2.5);
}

TEST(Change, Examples) {
    EXPECT_EQ(change_force(body("a", 1, {1, 1}), linear_params(0, 3, {1, 1})), AssessmentVector::zeros(2));
    EXPECT_EQ(change_force(body("a", 1, {0, 2}), linear_params(0, 1, {0, 0})), AssessmentVector({0, 2}));
    EXPECT_EQ(change_force(body("a", 1, {-1, 1}), linear_params(0, 3, {0, 0})), AssessmentVector({-3, 3}));
}

TEST(Driving, RatioAndThreshold) {
    const auto eq = driving_force({5.0, 5.0, {1.0, 0.0}, 1.0});
    EXPECT_EQ(eq.ratio, 1.0);
    EXPECT_FALSE(eq.transaction_may_happen());

    const auto yes = driving_force({90.0, 45.0, {1.0, 0.0}, 1.0});
    EXPECT_EQ(yes.force, AssessmentVector({2.0, 0.0}));
    EXPECT_TRUE(yes.transaction_may_happen());

    const auto no = driving_force({1.0, 2.0, {0.0, 1.0}, 1.0});
    EXPECT_EQ(no.ratio, 0.5);
    EXPECT_FALSE(no.transaction_may_happen());
}

TEST(Driving, Errors) {
    EXPECT_THROW((void)driving_force({1.0, 0.0, {1.0}, 1.0}), ValidationError);
    EXPECT_THROW((void)driving_force({1.0, -2.0, {1.0}, 1.0}), ValidationError);
    EXPECT_THROW((void)driving_force({1.0, 1.0, {0.6, 0.6}, 1.0}), ValidationError);
    EXPECT_THROW((void)driving_ratio(1.0, 0.0), ValidationError);
}

namespace {

ComplexBody disc(double R, double mass, double dR) {
    ComplexBody c;
    c.id = "O";
    c.radius = R;
    c.layer_thickness = dR;
    c.mass = mass;
    c.center = AssessmentVector::zeros(2);
    return c;
}

}  // namespace

TEST(SurfaceGravity, Examples) {
    const auto p = attraction_params(1.0);
    const auto f = surface_gravity_force(body("c", 1, {0, 10.05}), disc(10, 100, 0.5), p);
    EXPECT_NEAR(f.norm(), 1.0, 1e-15);
    EXPECT_LT(f[1], 0.0);
    EXPECT_EQ(f[0], 0.0);

    const auto f2 = surface_gravity_force(body("c", 3, {3, 4.1}), disc(5, 50, 0.5), attraction_params(2.0));
    EXPECT_NEAR(f2.norm(), 2.0 * 50 / 25 * 3, 1e-13);
    const AssessmentVector toward = AssessmentVector{0, 0} - AssessmentVector{3, 4.1};
    EXPECT_LE(std::abs(cross2(f2, toward)), 1e-12 * f2.norm() * toward.norm());
}

TEST(SurfaceGravity, NearlyConstantAcrossThinLayer) {
    // Exact attraction γ m_c m / r² across (R, R + ΔR) vs g·m.
    const double R = 10, dR = 0.01 * R, gamma = 1.0, mc = 100.0, m = 1.0;
    const double g_force =
        surface_gravity_force(body("c", m, {0, R + dR / 2}), disc(R, mc, dR), attraction_params(gamma)).norm();
    for (double r = R + 1e-9; r <= R + dR; r += dR / 50) {
        const double exact = gamma * mc * m / (r * r);
        EXPECT_LE(std::abs(exact - g_force) / g_force, 0.02);
        EXPECT_NEAR(surface_gravity_force(body("c", m, {0, r}), disc(R, mc, dR), attraction_params(gamma)).norm(),
                    g_force, 1e-12);
    }
}

TEST(SurfaceGravity, LayerCheckAndCenter) {
    const auto p = attraction_params(1.0);
    EXPECT_THROW((void)surface_gravity_force(body("c", 1, {0, 5}), disc(10, 100, 0.5), p), SimulationError);
    EXPECT_NO_THROW((void)surface_gravity_force(body("c", 1, {0, 5}), disc(10, 100, 0.5), p, false));
    EXPECT_THROW((void)surface_gravity_force(body("c", 1, {0, 0}), disc(10, 100, 0.5), p, false),
                 SingularityError);
    auto soft = p;
    soft.softening = 1e-6;
    EXPECT_EQ(surface_gravity_force(body("c", 1, {0, 0}), disc(10, 100, 0.5), soft, false),
              AssessmentVector::zeros(2));
}

namespace {

SimulationState single(AssessmentVector x) {
    SimulationState s;
    s.dimension = x.dimension();
    s.bodies.push_back(body("p", 1, std::move(x)));
    return s;
}

ForceModel bind(ForceKind kind, ForceParams params) {
    ForceModel f;
    f.kind = kind;
    f.body = "p";
    f.params = std::move(params);
    return f;
}

}  // namespace

TEST(NetForce, BalancedCoefficientsCancel) {
    auto s = single({3.7, -1.2});
    s.forces = {bind(ForceKind::Elasticity, linear_params(1.7, 0, {0, 0})),
                bind(ForceKind::Change, linear_params(0, 1.7, {0, 0}))};
    EXPECT_EQ(net_force(s.bodies[0], s), AssessmentVector::zeros(2));
    EXPECT_EQ(linear_coefficients(s, "p").stability(), Stability::Neutral);
}

TEST(NetForce, ElasticityMinusChange) {
    auto s = single({1, 0});
    s.forces = {bind(ForceKind::Elasticity, linear_params(2, 0, {0, 0})),
                bind(ForceKind::Change, linear_params(0, 1, {0, 0}))};
    EXPECT_EQ(net_force(s.bodies[0], s), AssessmentVector({-1, 0}));
    EXPECT_EQ(linear_coefficients(s, "p").stability(), Stability::Sustainable);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10), k(0, 5);
    for (int i = 0; i < 200; ++i) {
        auto r = single({u(rng), u(rng), u(rng)});
        const double ke = k(rng), kc = k(rng);
        const AssessmentVector eq{u(rng), u(rng), u(rng)};
        r.forces = {bind(ForceKind::Elasticity, linear_params(ke, 0, eq)),
                    bind(ForceKind::Change, linear_params(0, kc, eq))};
        const auto expected = (r.bodies[0].position - eq) * (kc - ke);
        EXPECT_LE((net_force(r.bodies[0], r) - expected).norm(), 1e-12 * (1 + expected.norm()));
    }
}

TEST(NetForce, SumOfIndependentEvaluations) {
    SimulationState s;
    s.dimension = 2;
    s.bodies = {body("p", 2, {1, 1}), body("q", 3, {4, 5})};
    ForceModel a;
    a.kind = ForceKind::Attraction;
    a.body = "p";
    a.partner = "q";
    a.params = attraction_params(0.7);
    s.forces = {a, bind(ForceKind::Elasticity, linear_params(1.5, 0, {0, 0}))};

    // Oracle: per-force arithmetic by hand, then component-wise addition.
    const double r = 5.0;  // 3-4-5
    const double mag = 0.7 * 2 * 3 / (r * r);
    const AssessmentVector attraction{mag * 3 / r, mag * 4 / r};
    const AssessmentVector elastic{-1.5, -1.5};
    const auto net = net_force(s.bodies[0], s);
    EXPECT_NEAR(net[0], attraction[0] + elastic[0], 1e-15);
    EXPECT_NEAR(net[1], attraction[1] + elastic[1], 1e-15);

    // The partner feels only the reaction.
    const auto on_q = net_force(s.bodies[1], s);
    EXPECT_NEAR(on_q[0], -attraction[0], 1e-15);
    EXPECT_NEAR(on_q[1], -attraction[1], 1e-15);
}

TEST(Stability, Classifier) {
    EXPECT_EQ(classify_stability(2, 1), Stability::Sustainable);
    EXPECT_EQ(classify_stability(1, 2), Stability::Unsustainable);
    EXPECT_EQ(classify_stability(1, 1), Stability::Neutral);
}

TEST(Energy, AttractionPotentialLimits) {
    EXPECT_DOUBLE_EQ(attraction_potential(1, 2, 3, 4, 0), -1.5);
    EXPECT_NEAR(attraction_potential(1, 2, 3, 4, 1e-9), -1.5, 1e-12);
    // Force is minus the derivative of the potential.
    const double r = 2.0, eps = 0.3, h = 1e-5;
    const double dudr = (attraction_potential(1, 1, 1, r + h, eps) - attraction_potential(1, 1, 1, r - h, eps)) / (2 * h);
    EXPECT_NEAR(dudr, 1.0 / (r * r + eps * eps), 1e-9);
}
