#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "socdyn/analytic.hpp"
#include "socdyn/assessment_space.hpp"
#include "socdyn/core.hpp"
#include "socdyn/dynamics.hpp"
#include "socdyn/forces.hpp"

namespace socdyn {

/// Closed-form motion of one body along one axis: the body's coordinate
/// (position - origin) · axis follows `solution`.
struct ExpectedOscillation {
    std::string body;
    AssessmentVector origin;
    AssessmentVector axis;
    OscillatorSolution solution;

    [[nodiscard]] double project(const AssessmentVector& position) const {
        return (position - origin).dot(axis);
    }

    friend bool operator==(const ExpectedOscillation&, const ExpectedOscillation&) = default;
};

/// Poll-based assessment of one subject relative to one complex.
struct AssessmentSpec {
    std::string subject;
    std::string complex;
    std::vector<PollRecord> records;
    std::optional<std::string> records_file;  // relative to the scenario file
    std::vector<AssessmentFloor> floors;

    friend bool operator==(const AssessmentSpec&, const AssessmentSpec&) = default;
};

enum class OutputKind { Trajectories, Energy };

[[nodiscard]] inline std::string_view to_string(OutputKind k) {
    return k == OutputKind::Trajectories ? "trajectories" : "energy";
}

/// A complete, runnable configuration.
struct Scenario {
    std::string name;
    std::string description;
    MassCombiner combiner;
    double thin_layer_ratio = kDefaultThinLayerRatio;
    SimulationState state;
    IntegratorConfig integrator;
    std::vector<AssessmentSpec> assessments;
    std::optional<ExpectedOscillation> expected;
    std::vector<OutputKind> outputs{OutputKind::Trajectories};
    std::vector<std::string> warnings;  // builder diagnostics, not serialized

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.name == b.name && a.description == b.description && a.combiner == b.combiner &&
               a.thin_layer_ratio == b.thin_layer_ratio && a.state == b.state &&
               a.integrator == b.integrator && a.assessments == b.assessments &&
               a.expected == b.expected && a.outputs == b.outputs;
    }
};

namespace detail {

inline void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || !(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
}

inline SocialBody body_with_mass(std::string id, double mass, AssessmentVector x, AssessmentVector v,
                                 const MassCombiner& combiner = {}) {
    require_positive(mass, "mass");
    return make_body(std::move(id), combiner.components_for(mass), std::move(x), std::move(v),
                     combiner);
}

inline ForceModel elastic(const std::string& body, double k_e, AssessmentVector eq) {
    ForceModel f;
    f.kind = ForceKind::Elasticity;
    f.body = body;
    f.params.k_e = k_e;
    f.params.equilibrium = std::move(eq);
    return f;
}

inline ForceModel change(const std::string& body, double k_c, AssessmentVector eq) {
    ForceModel f;
    f.kind = ForceKind::Change;
    f.body = body;
    f.params.k_c = k_c;
    f.params.equilibrium = std::move(eq);
    return f;
}

inline ForceModel attraction(const std::string& a, const std::string& b, double gamma,
                             double softening) {
    ForceModel f;
    f.kind = ForceKind::Attraction;
    f.body = a;
    f.partner = b;
    f.params.gamma = gamma;
    f.params.softening = softening;
    return f;
}

inline ForceModel driving(const std::string& body, double pb, double pc, AssessmentVector dir,
                          double scale = 1.0) {
    ForceModel f;
    f.kind = ForceKind::Driving;
    f.body = body;
    f.driving = {pb, pc, std::move(dir), scale};
    return f;
}

inline void finish(Scenario& s) {
    resolve_complexes(s.state.complexes, s.thin_layer_ratio);
    validate(s.state);
    validate(s.integrator);
    check_bindings(s.state);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elastic oscillator started from equilibrium with a kick
// ---------------------------------------------------------------------------

/// One body in 1-D bound elastically to 0, starting at x = 0 with v = A0·ω.
/// Runs 10 periods of RK4 at T/1000.
[[nodiscard]] inline Scenario build_fashion_oscillator(double k_e, double m, double A0) {
    detail::require_positive(k_e, "k_e");
    detail::require_positive(m, "m");
    if (!std::isfinite(A0) || A0 < 0.0) throw ValidationError("A0 must be nonnegative");

    const double omega = std::sqrt(k_e / m);
    const auto sol = solve_harmonic(HarmonicSpec::elastic(k_e, m, 0.0, A0 * omega));

    Scenario s;
    s.name = "fashion";
    s.description = "Elastic oscillator of an 'others' assessment kicked from equilibrium";
    s.state.dimension = 1;
    s.state.bodies.push_back(detail::body_with_mass("others", m, {0.0}, {A0 * omega}));
    s.state.forces.push_back(detail::elastic("others", k_e, {0.0}));
    s.integrator = {IntegratorMethod::RK4, sol.period / 1000.0, 10.0 * sol.period, 1};
    s.expected = ExpectedOscillation{"others", {0.0}, {1.0}, sol};
    detail::finish(s);
    return s;
}

// ---------------------------------------------------------------------------
// Attraction pendulum on a constraint line
// ---------------------------------------------------------------------------

struct PendulumParams {
    double gamma = 1.0;
    double m_c = 1e4;
    double R = 100.0;
    double m = 1.0;
    double beta0 = 0.01;       // initial angle; tan(beta0) = x0 / R
    double alpha = 0.0;        // tilt of the constraint line
    double max_tan_beta = 0.05;
    bool strict_small_angle = true;
    double layer_ratio = 0.01;  // ΔR / R
};

/// 2-D: a complex of fixed radius R centered at the origin and one body
/// resting on the line tangent to the disc at B = R·(−sin α, cos α). The body
/// starts x0 = R·tan(beta0) along the line, at rest, pulled toward the center
/// by surface gravity. Small oscillations along the line have ω = √(g/R).
[[nodiscard]] inline Scenario build_attraction_pendulum(const PendulumParams& p) {
    detail::require_positive(p.gamma, "gamma");
    detail::require_positive(p.m_c, "m_c");
    detail::require_positive(p.R, "R");
    detail::require_positive(p.m, "m");
    detail::require_positive(p.layer_ratio, "layer_ratio");
    if (!std::isfinite(p.beta0) || !std::isfinite(p.alpha)) {
        throw ValidationError("angles must be finite");
    }

    Scenario s;
    s.name = "attraction_pendulum";
    s.description = "Public body sliding on a minimal-assessment line under surface gravity";

    const double tan_beta = std::tan(p.beta0);
    if (std::abs(tan_beta) > p.max_tan_beta) {
        const std::string msg = "tan(beta0) = " + std::to_string(tan_beta) +
                                " exceeds the small-angle limit " + std::to_string(p.max_tan_beta);
        if (p.strict_small_angle) throw ValidationError(msg);
        s.warnings.push_back(msg);
    }

    // Written as 0 - sin so alpha = 0 gives +0 rather than -0 in saved configs.
    const AssessmentVector normal{0.0 - std::sin(p.alpha), std::cos(p.alpha)};
    const AssessmentVector along{std::cos(p.alpha), std::sin(p.alpha)};
    const AssessmentVector b_point = normal * p.R;
    const double x0 = p.R * tan_beta;

    ComplexBody o;
    o.id = "O";
    o.fixed_radius = p.R;
    o.layer_thickness = p.layer_ratio * p.R;
    o.center = AssessmentVector::zeros(2);
    o.mass = p.m_c;

    s.state.dimension = 2;
    s.state.complexes.push_back(o);
    s.state.bodies.push_back(
        detail::body_with_mass("C", p.m, b_point + along * x0, AssessmentVector::zeros(2)));

    ForceModel pull;
    pull.kind = ForceKind::SurfaceGravity;
    pull.body = "C";
    pull.partner = "O";
    pull.params.gamma = p.gamma;
    pull.params.softening = 0.0;
    // The lowest point B sits exactly at |r| = R, the Ordinary side of the
    // layer boundary.
    pull.check_layer = false;
    s.state.forces.push_back(pull);
    s.state.constraints.push_back({"C", normal, p.R});

    const double g = p.gamma * p.m_c / (p.R * p.R);
    const auto sol = solve_harmonic(HarmonicSpec::pendulum(g, p.R, x0, 0.0));
    s.integrator = {IntegratorMethod::RK4, sol.period / 1000.0, 10.0 * sol.period, 1};
    s.expected = ExpectedOscillation{"C", b_point, along, sol};
    detail::finish(s);
    return s;
}

// ---------------------------------------------------------------------------
// Celebrity and ordinary body
// ---------------------------------------------------------------------------

/// Two bodies at rest, separated by r0 along the first axis, attracting each
/// other with ε = 0.
[[nodiscard]] inline Scenario build_celebrity_pair(double m_c, double m, double r0,
                                                   double gamma = 1.0) {
    detail::require_positive(m, "m");
    detail::require_positive(r0, "r0");
    detail::require_positive(gamma, "gamma");
    if (!(m_c >= m)) throw ValidationError("celebrity mass must be at least the ordinary mass");

    Scenario s;
    s.name = "celebrity_pair";
    s.description = "Mutual attraction between a celebrity and an ordinary body";
    s.state.dimension = 2;
    s.state.bodies.push_back(detail::body_with_mass("celebrity", m_c, {0.0, 0.0}, {0.0, 0.0}));
    s.state.bodies.push_back(detail::body_with_mass("ordinary", m, {r0, 0.0}, {0.0, 0.0}));
    s.state.forces.push_back(detail::attraction("celebrity", "ordinary", gamma, 0.0));

    // Stop well before the bodies meet.
    const double free_fall =
        0.5 * std::numbers::pi * std::sqrt(r0 * r0 * r0 / (2.0 * gamma * (m_c + m)));
    const double t_end = std::min(10.0, 0.5 * free_fall);
    s.integrator = {IntegratorMethod::Leapfrog, t_end / 1000.0, t_end, 1};
    detail::finish(s);
    return s;
}

/// |a_celebrity| / |a_ordinary| from the accelerations driving the first step.
[[nodiscard]] inline double first_step_acceleration_ratio(const SimulationState& state,
                                                          const std::string& heavy = "celebrity",
                                                          const std::string& light = "ordinary") {
    const auto acc = accelerations(state);
    return acc[state.index_of(heavy)].norm() / acc[state.index_of(light)].norm();
}

// ---------------------------------------------------------------------------
// Elasticity against change
// ---------------------------------------------------------------------------

/// One body in 1-D at x0, at rest, with elasticity k_e and change k_c bound
/// to the same equilibrium 0.
[[nodiscard]] inline Scenario build_stability_probe(double k_e, double k_c, double m, double x0) {
    detail::require_positive(m, "m");
    detail::require_positive(x0, "x0");
    detail::require_nonneg(k_e, "k_e");
    detail::require_nonneg(k_c, "k_c");

    Scenario s;
    s.name = "stability_probe";
    s.description = std::string("Elasticity vs change, ") +
                    std::string(to_string(classify_stability(k_e, k_c)));
    s.state.dimension = 1;
    s.state.bodies.push_back(detail::body_with_mass("probe", m, {x0}, {0.0}));
    s.state.forces.push_back(detail::elastic("probe", k_e, {0.0}));
    s.state.forces.push_back(detail::change("probe", k_c, {0.0}));

    if (k_e > k_c) {
        const auto sol = solve_harmonic(HarmonicSpec::elastic(k_e - k_c, m, x0, 0.0));
        s.integrator = {IntegratorMethod::RK4, sol.period / 1000.0, 10.0 * sol.period, 1};
        s.expected = ExpectedOscillation{"probe", {0.0}, {1.0}, sol};
    } else if (k_c > k_e) {
        const double rate = std::sqrt((k_c - k_e) / m);
        s.integrator = {IntegratorMethod::RK4, std::min(0.01, 1.0 / (1000.0 * rate)), 10.0, 1};
    } else {
        s.integrator = {IntegratorMethod::RK4, 0.01, 10.0, 1};
    }
    detail::finish(s);
    return s;
}

// ---------------------------------------------------------------------------
// Conservative two-body configuration
// ---------------------------------------------------------------------------

/// Two bodies in 2-D, each elastically tied to its own equilibrium and
/// attracting each other with ε = 0. Leapfrog over 100 periods of the
/// unit elastic oscillator.
[[nodiscard]] inline Scenario build_conservative_pair() {
    Scenario s;
    s.name = "conservative_pair";
    s.description = "Two elastic bodies with mutual attraction (energy check)";
    s.state.dimension = 2;
    s.state.bodies.push_back(detail::body_with_mass("a", 1.0, {-5.0, 0.0}, {0.0, 0.5}));
    s.state.bodies.push_back(detail::body_with_mass("b", 2.0, {5.0, 0.0}, {0.0, -0.3}));
    s.state.forces.push_back(detail::attraction("a", "b", 1.0, 0.0));
    s.state.forces.push_back(detail::elastic("a", 1.0, {-4.0, 0.0}));
    s.state.forces.push_back(detail::elastic("b", 2.0, {4.0, 0.0}));
    const double period = 2.0 * std::numbers::pi;
    s.integrator = {IntegratorMethod::Leapfrog, period / 1000.0, 100.0 * period, 10};
    s.outputs = {OutputKind::Trajectories, OutputKind::Energy};
    detail::finish(s);
    return s;
}

// ---------------------------------------------------------------------------
// Illustrative configurations (invented parameters)
// ---------------------------------------------------------------------------

/// Destabilizing change outweighs elasticity while a constant driving force
/// pushes the same way.
[[nodiscard]] inline Scenario build_civil_war_demo() {
    auto s = build_stability_probe(1.0, 1.5, 1.0, 0.1);
    s.name = "civil_war";
    s.description = "Demo with invented parameters: change force (k_c=1.5) exceeds "
                    "elasticity (k_e=1) plus a driving force with PB/PC = 3";
    s.state.forces.push_back(detail::driving("probe", 90.0, 30.0, {1.0}, 0.01));
    s.integrator = {IntegratorMethod::RK4, 0.001, 5.0, 10};
    detail::finish(s);
    return s;
}

/// Government and opposition in 2-D (ethical, professional), each with
/// elasticity toward a status quo and opposing driving forces.
[[nodiscard]] inline Scenario build_belarus_2020_demo() {
    Scenario s;
    s.name = "belarus_2020";
    s.description = "Demo with invented parameters: two bodies with opposing driving forces "
                    "(PB/PC = 0.5 and 1.8) around elastic status-quo points";
    s.state.dimension = 2;
    s.state.bodies.push_back(detail::body_with_mass("government", 5.0, {1.0, 2.0}, {0.0, 0.0}));
    s.state.bodies.push_back(detail::body_with_mass("opposition", 1.0, {-1.0, 0.5}, {0.0, 0.0}));
    s.state.forces.push_back(detail::elastic("government", 2.0, {1.0, 2.0}));
    s.state.forces.push_back(detail::elastic("opposition", 0.5, {-1.0, 0.5}));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    s.state.forces.push_back(detail::driving("government", 1.0, 2.0, {inv_sqrt2, -inv_sqrt2}));
    s.state.forces.push_back(detail::driving("opposition", 1.8, 1.0, {inv_sqrt2, inv_sqrt2}));
    s.state.forces.push_back(detail::attraction("government", "opposition", 0.1, 1e-6));
    s.integrator = {IntegratorMethod::Leapfrog, 0.005, 40.0, 10};
    s.outputs = {OutputKind::Trajectories, OutputKind::Energy};
    detail::finish(s);
    return s;
}

/// Voter assessments of two parties as identical elastic oscillators started
/// with opposite displacements.
[[nodiscard]] inline Scenario build_us_congress_demo() {
    Scenario s;
    s.name = "us_congress";
    s.description = "Demo with invented parameters: two elastic oscillators started in antiphase";
    s.state.dimension = 1;
    s.state.bodies.push_back(detail::body_with_mass("republicans", 1.0, {1.0}, {0.0}));
    s.state.bodies.push_back(detail::body_with_mass("democrats", 1.0, {-1.0}, {0.0}));
    s.state.forces.push_back(detail::elastic("republicans", 0.25, {0.0}));
    s.state.forces.push_back(detail::elastic("democrats", 0.25, {0.0}));
    const double period = 2.0 * std::numbers::pi / 0.5;
    s.integrator = {IntegratorMethod::RK4, period / 1000.0, 5.0 * period, 10};
    detail::finish(s);
    return s;
}

/// A residential community of three households, with poll-based assessments
/// of a well-known member. The subject's position matches its aggregated
/// assessment and sits in the public layer.
[[nodiscard]] inline Scenario build_community_demo() {
    Scenario s;
    s.name = "community";
    s.description = "Poll aggregation over a 3-household community (10 residents)";
    s.state.dimension = 2;

    const std::vector<std::vector<std::string>> households{
        {"r1", "r2", "r3"}, {"r4", "r5", "r6", "r7"}, {"r8", "r9", "r10"}};
    ComplexBody town;
    town.id = "town";
    town.layer_thickness = 1.0;
    town.center = AssessmentVector::zeros(2);
    town.mass = 50.0;
    for (std::size_t h = 0; h < households.size(); ++h) {
        ComplexBody hh;
        hh.id = "household" + std::to_string(h + 1);
        hh.members = households[h];
        hh.layer_thickness = 0.1 * static_cast<double>(households[h].size());
        hh.center = AssessmentVector::zeros(2);
        hh.mass = static_cast<double>(households[h].size());
        town.members.push_back(hh.id);
        s.state.complexes.push_back(hh);
    }
    s.state.complexes.insert(s.state.complexes.begin(), town);

    AssessmentSpec a;
    a.subject = "mayor";
    a.complex = "town";
    for (const auto& hh : households) {
        for (const auto& r : hh) {
            a.records.push_back({r, "mayor", 0, 1.0});
            a.records.push_back({r, "mayor", 1, 0.0});
        }
    }
    a.records.back().value = 5.0;  // r10 rates the mayor's second attribute higher
    a.floors.push_back({1, 0.0});
    s.assessments.push_back(a);

    // The mayor starts inside the town's public layer (R = 10, ΔR = 1).
    s.state.bodies.push_back(detail::body_with_mass("mayor", 2.0, {10.0, 0.4}, {0.0, 0.0}));
    s.state.forces.push_back(detail::elastic("mayor", 1.0, {10.0, 0.0}));
    ForceModel pull;
    pull.kind = ForceKind::SurfaceGravity;
    pull.body = "mayor";
    pull.partner = "town";
    pull.params.gamma = 0.1;
    pull.params.softening = 0.0;
    pull.check_layer = false;
    s.state.forces.push_back(pull);
    s.integrator = {IntegratorMethod::Leapfrog, 0.01, 20.0, 5};
    detail::finish(s);
    return s;
}

}  // namespace socdyn
