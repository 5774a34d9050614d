#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "socdyn/assessment_space.hpp"
#include "socdyn/core.hpp"

namespace socdyn {

// ---------------------------------------------------------------------------
// Individual force laws
// ---------------------------------------------------------------------------

/// Central attraction on `body` toward `other`:
/// |F| = γ m₁ m₂ / (r² + ε²). With ε > 0 coincident bodies feel no force.
[[nodiscard]] inline AssessmentVector attraction_force(const SocialBody& body,
                                                       const SocialBody& other,
                                                       const ForceParams& params) {
    if (!(params.gamma > 0.0)) throw ValidationError("attraction requires gamma > 0");
    auto separation = other.position - body.position;
    const double r2 = separation.norm_squared();
    if (r2 == 0.0) {
        if (params.softening > 0.0) return AssessmentVector::zeros(separation.dimension());
        throw SingularityError("bodies '" + body.id + "' and '" + other.id +
                               "' coincide with zero softening");
    }
    const double eps2 = params.softening * params.softening;
    const double magnitude = params.gamma * (body.mass * other.mass) / (r2 + eps2);
    separation *= magnitude / std::sqrt(r2);
    return separation;
}

/// Restoring force -k_e (x - x_0).
[[nodiscard]] inline AssessmentVector elasticity_force(const SocialBody& body,
                                                       const ForceParams& params) {
    auto displacement = body.position - params.equilibrium;
    displacement *= -params.k_e;
    return displacement;
}

/// Destabilizing force +k_c (x - x_0).
[[nodiscard]] inline AssessmentVector change_force(const SocialBody& body,
                                                   const ForceParams& params) {
    auto displacement = body.position - params.equilibrium;
    displacement *= params.k_c;
    return displacement;
}

struct DrivingForce {
    AssessmentVector force;
    double ratio = 0.0;  // PB / PC
    /// A transaction may happen only when PB / PC > 1 strictly.
    [[nodiscard]] bool transaction_may_happen() const noexcept { return ratio > 1.0; }
};

[[nodiscard]] inline double driving_ratio(double perceived_benefits, double perceived_costs) {
    if (!(perceived_costs > 0.0)) throw ValidationError("perceived costs must be positive");
    if (!(perceived_benefits > 0.0)) throw ValidationError("perceived benefits must be positive");
    return perceived_benefits / perceived_costs;
}

[[nodiscard]] inline DrivingForce driving_force(const DrivingForceSpec& spec) {
    validate(spec);
    const double ratio = driving_ratio(spec.perceived_benefits, spec.perceived_costs);
    return {spec.direction * (spec.scale * ratio), ratio};
}

/// g = γ m_c / R².
[[nodiscard]] inline double surface_gravity(const ComplexBody& complex, double gamma) {
    if (!(complex.radius > 0.0)) throw ValidationError("complex '" + complex.id + "' has no radius");
    return gamma * complex.mass / (complex.radius * complex.radius);
}

[[nodiscard]] inline LayerClass layer_of(const SocialBody& body, const ComplexBody& complex) {
    return classify_layer(distance(body.position, complex.center), complex);
}

/// Constant-magnitude pull g·m toward the complex center.
[[nodiscard]] inline AssessmentVector surface_gravity_force(const SocialBody& body,
                                                            const ComplexBody& complex,
                                                            const ForceParams& params,
                                                            bool check_layer = true) {
    if (check_layer && layer_of(body, complex) != LayerClass::OrdinaryPublic) {
        throw SimulationError("body '" + body.id + "' is not in the public layer of '" +
                              complex.id + "'");
    }
    auto toward = complex.center - body.position;
    const double r = toward.norm();
    if (r == 0.0) {
        if (params.softening > 0.0) return AssessmentVector::zeros(toward.dimension());
        throw SingularityError("body '" + body.id + "' sits at the center of '" + complex.id + "'");
    }
    toward *= surface_gravity(complex, params.gamma) * body.mass / r;
    return toward;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

enum class Stability { Sustainable, Neutral, Unsustainable };

[[nodiscard]] inline std::string_view to_string(Stability s) {
    switch (s) {
    case Stability::Sustainable: return "sustainable";
    case Stability::Neutral: return "neutral";
    case Stability::Unsustainable: return "unsustainable";
    }
    return "?";
}

/// Sustainable when k_c < k_e, unsustainable when k_c > k_e.
[[nodiscard]] constexpr Stability classify_stability(double k_e, double k_c) noexcept {
    if (k_c < k_e) return Stability::Sustainable;
    if (k_c > k_e) return Stability::Unsustainable;
    return Stability::Neutral;
}

/// Force contributed by one binding to the body at index `i`. Pairwise
/// bindings contribute to both ends with opposite signs.
[[nodiscard]] inline AssessmentVector binding_force_on(std::size_t i, const ForceModel& f,
                                                       const SimulationState& state) {
    const auto& body = state.bodies[i];
    const auto zero = AssessmentVector::zeros(state.dimension);
    switch (f.kind) {
    case ForceKind::Attraction: {
        if (f.body == body.id) return attraction_force(body, state.body(f.partner), f.params);
        if (f.partner == body.id) return attraction_force(body, state.body(f.body), f.params);
        return zero;
    }
    case ForceKind::Elasticity:
        return f.body == body.id ? elasticity_force(body, f.params) : zero;
    case ForceKind::Change:
        return f.body == body.id ? change_force(body, f.params) : zero;
    case ForceKind::Driving:
        return f.body == body.id ? driving_force(f.driving).force : zero;
    case ForceKind::SurfaceGravity:
        return f.body == body.id
                   ? surface_gravity_force(body, state.complex(f.partner), f.params, f.check_layer)
                   : zero;
    }
    return zero;
}

/// Vector sum of every binding acting on `body`, in binding order.
[[nodiscard]] inline AssessmentVector net_force(const SocialBody& body,
                                                std::span<const ForceModel> bindings,
                                                const SimulationState& state) {
    const auto idx = state.find_body(body.id);
    if (!idx) throw ValidationError("unknown body '" + body.id + "'");
    auto total = AssessmentVector::zeros(state.dimension);
    for (const auto& f : bindings) total += binding_force_on(*idx, f, state);
    return total;
}

[[nodiscard]] inline AssessmentVector net_force(const SocialBody& body,
                                                const SimulationState& state) {
    return net_force(body, state.forces, state);
}

/// Checks surface-gravity layer preconditions against the current state.
inline void check_bindings(const SimulationState& state) {
    for (const auto& f : state.forces) {
        if (f.kind != ForceKind::SurfaceGravity || !f.check_layer) continue;
        const auto& body = state.body(f.body);
        const auto& complex = state.complex(f.partner);
        const auto layer = layer_of(body, complex);
        if (layer != LayerClass::OrdinaryPublic) {
            throw ValidationError("surface gravity on '" + body.id + "' requires it in the public layer of '" +
                                  complex.id + "', found " + std::string(to_string(layer)));
        }
    }
}

/// Net linear stiffness per body: (Σk_e, Σk_c) over its elasticity/change
/// bindings.
struct LinearCoefficients {
    double k_e = 0.0;
    double k_c = 0.0;
    [[nodiscard]] Stability stability() const noexcept { return classify_stability(k_e, k_c); }
};

[[nodiscard]] inline LinearCoefficients linear_coefficients(const SimulationState& state,
                                                            const std::string& body_id) {
    LinearCoefficients out;
    for (const auto& f : state.forces) {
        if (f.body != body_id) continue;
        if (f.kind == ForceKind::Elasticity) out.k_e += f.params.k_e;
        if (f.kind == ForceKind::Change) out.k_c += f.params.k_c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Energy bookkeeping (conservative bindings)
// ---------------------------------------------------------------------------

/// Potential of the softened attraction law. Equals -γ m₁ m₂ / r at ε = 0.
[[nodiscard]] inline double attraction_potential(double gamma, double m1, double m2, double r,
                                                 double softening) {
    if (softening > 0.0) return -gamma * m1 * m2 * std::atan2(softening, r) / softening;
    if (r == 0.0) throw SingularityError("attraction potential at zero separation");
    return -gamma * m1 * m2 / r;
}

[[nodiscard]] inline double potential_energy(const SimulationState& state) {
    double u = 0.0;
    for (const auto& f : state.forces) {
        const auto& body = state.body(f.body);
        switch (f.kind) {
        case ForceKind::Attraction: {
            const auto& other = state.body(f.partner);
            u += attraction_potential(f.params.gamma, body.mass, other.mass,
                                      distance(body.position, other.position), f.params.softening);
            break;
        }
        case ForceKind::Elasticity:
            u += 0.5 * f.params.k_e * (body.position - f.params.equilibrium).norm_squared();
            break;
        case ForceKind::Change:
            u -= 0.5 * f.params.k_c * (body.position - f.params.equilibrium).norm_squared();
            break;
        case ForceKind::Driving:
            u -= driving_force(f.driving).force.dot(body.position);
            break;
        case ForceKind::SurfaceGravity: {
            const auto& c = state.complex(f.partner);
            u += surface_gravity(c, f.params.gamma) * body.mass * distance(body.position, c.center);
            break;
        }
        }
    }
    return u;
}

[[nodiscard]] inline double kinetic_energy(const SimulationState& state) {
    double k = 0.0;
    for (const auto& b : state.bodies) k += 0.5 * b.mass * b.velocity.norm_squared();
    return k;
}

[[nodiscard]] inline double total_energy(const SimulationState& state) {
    return kinetic_energy(state) + potential_energy(state);
}

[[nodiscard]] inline AssessmentVector total_momentum(const SimulationState& state) {
    auto p = AssessmentVector::zeros(state.dimension);
    for (const auto& b : state.bodies) p += b.velocity * b.mass;
    return p;
}

}  // namespace socdyn
