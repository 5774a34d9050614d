#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "socdyn/core.hpp"
#include "socdyn/forces.hpp"

namespace socdyn {

enum class IntegratorMethod { RK4, SemiImplicitEuler, Leapfrog };

[[nodiscard]] inline std::string_view to_string(IntegratorMethod m) {
    switch (m) {
    case IntegratorMethod::RK4: return "rk4";
    case IntegratorMethod::SemiImplicitEuler: return "semi_implicit_euler";
    case IntegratorMethod::Leapfrog: return "leapfrog";
    }
    return "?";
}

[[nodiscard]] inline IntegratorMethod integrator_from_string(std::string_view s) {
    for (auto m : {IntegratorMethod::RK4, IntegratorMethod::SemiImplicitEuler,
                   IntegratorMethod::Leapfrog}) {
        if (to_string(m) == s) return m;
    }
    throw ValidationError("unknown integrator '" + std::string(s) + "'");
}

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::Leapfrog;
    double dt = 0.01;
    double t_end = 1.0;
    std::uint64_t record_every = 1;

    friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

inline void validate(const IntegratorConfig& cfg) {
    if (!std::isfinite(cfg.dt) || !(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!std::isfinite(cfg.t_end) || !(cfg.t_end > 0.0)) throw ValidationError("t_end must be positive");
    if (cfg.t_end < cfg.dt) throw ValidationError("t_end must be at least dt");
    if (cfg.record_every < 1) throw ValidationError("record_every must be at least 1");
}

/// Number of steps covering [0, t_end]. Ratios within 1e-9 of an integer are
/// rounded so t_end = 10 * dt gives exactly 10 steps.
[[nodiscard]] inline std::uint64_t step_count(const IntegratorConfig& cfg) {
    validate(cfg);
    const double ratio = cfg.t_end / cfg.dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) {
        return static_cast<std::uint64_t>(nearest);
    }
    return static_cast<std::uint64_t>(std::floor(ratio));
}

struct TrajectorySample {
    double t = 0.0;
    AssessmentVector position;
    AssessmentVector velocity;
};

struct Trajectory {
    std::string body_id;
    std::vector<TrajectorySample> samples;
};

/// a = F / m.
[[nodiscard]] inline AssessmentVector acceleration(const SocialBody& body,
                                                   const AssessmentVector& force) {
    if (!(body.mass > 0.0)) throw ValidationError("body '" + body.id + "' has zero mass");
    return force / body.mass;
}

namespace detail {

inline double contact_tolerance(const Constraint& c) { return 1e-9 * (1.0 + std::abs(c.offset)); }

[[noreturn]] inline void rethrow_with_context(const SimulationState& s, std::string_view body) {
    std::ostringstream where;
    where.precision(17);
    where << "at t=" << s.t;
    if (!body.empty()) where << " on body '" << body << "'";
    where << ": ";
    try {
        throw;
    } catch (const SingularityError& e) {
        throw SingularityError(where.str() + e.what());
    } catch (const SimulationError& e) {
        throw SimulationError(where.str() + e.what());
    } catch (const ValidationError& e) {
        throw SimulationError(where.str() + e.what());
    }
}

}  // namespace detail

/// Net force on every body. Pairwise bindings are evaluated once and the
/// negated vector is applied to the partner, so action and reaction cancel
/// exactly.
[[nodiscard]] inline std::vector<AssessmentVector> net_forces(const SimulationState& state) {
    std::vector<AssessmentVector> out(state.bodies.size(),
                                      AssessmentVector::zeros(state.dimension));
    for (const auto& f : state.forces) {
        std::string_view who = f.body;
        try {
            const auto i = state.index_of(f.body);
            if (f.kind == ForceKind::Attraction) {
                const auto j = state.index_of(f.partner);
                auto on_i = attraction_force(state.bodies[i], state.bodies[j], f.params);
                out[j] -= on_i;
                out[i] += on_i;
            } else {
                out[i] += binding_force_on(i, f, state);
            }
        } catch (const Error&) {
            detail::rethrow_with_context(state, who);
        }
    }
    return out;
}

/// Accelerations with constraint reactions applied: a body resting on its
/// constraint surface loses the inward normal component.
[[nodiscard]] inline std::vector<AssessmentVector> accelerations(const SimulationState& state) {
    auto forces = net_forces(state);
    for (std::size_t i = 0; i < forces.size(); ++i) {
        forces[i] = acceleration(state.bodies[i], forces[i]);
    }
    for (const auto& c : state.constraints) {
        const auto i = state.index_of(c.body);
        const auto& x = state.bodies[i].position;
        if (c.normal.dot(x) - c.offset > detail::contact_tolerance(c)) continue;
        const double an = forces[i].dot(c.normal);
        if (an < 0.0) forces[i] -= c.normal * an;
    }
    return forces;
}

/// Projects positions back onto allowed half-spaces and removes inward
/// normal velocity for bodies in contact (inelastic, frictionless).
inline void enforce_constraints(SimulationState& state) {
    for (const auto& c : state.constraints) {
        auto& b = state.bodies[state.index_of(c.body)];
        const double gap = c.normal.dot(b.position) - c.offset;
        if (gap < 0.0) b.position -= c.normal * gap;
        if (gap > detail::contact_tolerance(c)) continue;
        const double vn = c.normal.dot(b.velocity);
        if (vn < 0.0) b.velocity -= c.normal * vn;
    }
}

namespace detail {

inline void check_finite(const SimulationState& s) {
    for (const auto& b : s.bodies) {
        if (!b.position.is_finite() || !b.velocity.is_finite()) {
            std::ostringstream os;
            os.precision(17);
            os << "at t=" << s.t << " on body '" << b.id << "': state became non-finite";
            throw SimulationError(os.str());
        }
    }
}

inline void step_semi_implicit_euler(SimulationState& s, double dt) {
    const auto a = accelerations(s);
    for (std::size_t i = 0; i < s.bodies.size(); ++i) {
        auto& b = s.bodies[i];
        b.velocity += a[i] * dt;
        b.position += b.velocity * dt;
    }
    enforce_constraints(s);
}

// Kick-drift-kick.
inline void step_leapfrog(SimulationState& s, double dt) {
    const double half = 0.5 * dt;
    const auto a0 = accelerations(s);
    for (std::size_t i = 0; i < s.bodies.size(); ++i) {
        auto& b = s.bodies[i];
        b.velocity += a0[i] * half;
        b.position += b.velocity * dt;
    }
    enforce_constraints(s);
    const auto a1 = accelerations(s);
    for (std::size_t i = 0; i < s.bodies.size(); ++i) s.bodies[i].velocity += a1[i] * half;
    enforce_constraints(s);
}

inline void step_rk4(SimulationState& s, double dt) {
    const std::size_t n = s.bodies.size();
    std::vector<AssessmentVector> x0, v0;
    x0.reserve(n);
    v0.reserve(n);
    for (const auto& b : s.bodies) {
        x0.push_back(b.position);
        v0.push_back(b.velocity);
    }

    SimulationState probe = s;
    auto stage = [&](double h, const std::vector<AssessmentVector>* kx,
                     const std::vector<AssessmentVector>* kv,
                     std::vector<AssessmentVector>& out_kx, std::vector<AssessmentVector>& out_kv) {
        for (std::size_t i = 0; i < n; ++i) {
            probe.bodies[i].position = kx ? x0[i] + (*kx)[i] * h : x0[i];
            probe.bodies[i].velocity = kv ? v0[i] + (*kv)[i] * h : v0[i];
        }
        out_kv = accelerations(probe);
        out_kx.resize(n);
        for (std::size_t i = 0; i < n; ++i) out_kx[i] = probe.bodies[i].velocity;
    };

    std::vector<AssessmentVector> k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
    stage(0.0, nullptr, nullptr, k1x, k1v);
    stage(0.5 * dt, &k1x, &k1v, k2x, k2v);
    stage(0.5 * dt, &k2x, &k2v, k3x, k3v);
    stage(dt, &k3x, &k3v, k4x, k4v);

    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& b = s.bodies[i];
        b.position = x0[i] + (k1x[i] + (k2x[i] + k3x[i]) * 2.0 + k4x[i]) * w;
        b.velocity = v0[i] + (k1v[i] + (k2v[i] + k3v[i]) * 2.0 + k4v[i]) * w;
    }
    enforce_constraints(s);
}

}  // namespace detail

/// Advances every body by one dt. Forces do not depend on t, so the clock is
/// just t + dt.
[[nodiscard]] inline SimulationState step(SimulationState state, const IntegratorConfig& cfg) {
    if (!std::isfinite(cfg.dt) || !(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    switch (cfg.method) {
    case IntegratorMethod::RK4: detail::step_rk4(state, cfg.dt); break;
    case IntegratorMethod::SemiImplicitEuler: detail::step_semi_implicit_euler(state, cfg.dt); break;
    case IntegratorMethod::Leapfrog: detail::step_leapfrog(state, cfg.dt); break;
    }
    state.t += cfg.dt;
    detail::check_finite(state);
    return state;
}

/// Called with every recorded state, including the initial one.
using SampleObserver = std::function<void(const SimulationState&)>;

/// Integrates from the state's current time for t_end, recording every
/// record_every steps. The initial state is always the first sample. Sample
/// times are t0 + k*dt. Throws on the first failure; no partial result.
[[nodiscard]] inline std::vector<Trajectory> simulate(SimulationState state,
                                                      const IntegratorConfig& cfg,
                                                      const SampleObserver& observer = {}) {
    validate(state);
    validate(cfg);
    check_bindings(state);
    const auto steps = step_count(cfg);
    const double t0 = state.t;

    std::vector<Trajectory> out;
    out.reserve(state.bodies.size());
    const std::size_t expected = static_cast<std::size_t>(steps / cfg.record_every + 1);
    for (const auto& b : state.bodies) {
        Trajectory tr{b.id, {}};
        tr.samples.reserve(expected);
        out.push_back(std::move(tr));
    }

    auto record = [&] {
        for (std::size_t i = 0; i < state.bodies.size(); ++i) {
            out[i].samples.push_back({state.t, state.bodies[i].position, state.bodies[i].velocity});
        }
        if (observer) observer(state);
    };

    record();
    for (std::uint64_t k = 1; k <= steps; ++k) {
        state = step(std::move(state), cfg);
        state.t = t0 + static_cast<double>(k) * cfg.dt;
        if (k % cfg.record_every == 0) record();
    }
    return out;
}

}  // namespace socdyn
