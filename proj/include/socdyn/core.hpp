#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "socdyn/errors.hpp"

namespace socdyn {

// ---------------------------------------------------------------------------
// AssessmentVector
// ---------------------------------------------------------------------------

/// A point or displacement in the n-dimensional space of assessments.
/// Coordinates are in leos (summed individual ratings); the unit is a label
/// only. Construction from user data rejects non-finite coordinates;
/// arithmetic does not re-check, callers that integrate use is_finite().
class AssessmentVector {
public:
    AssessmentVector() = default;

    AssessmentVector(std::initializer_list<double> coords)
        : coords_(coords) {
        check_finite();
    }

    explicit AssessmentVector(std::vector<double> coords)
        : coords_(std::move(coords)) {
        check_finite();
    }

    static AssessmentVector zeros(std::size_t n) {
        return AssessmentVector(n, Raw{});
    }

    static AssessmentVector unit(std::size_t n, std::size_t axis) {
        if (axis >= n) {
            throw ValidationError("unit axis " + std::to_string(axis) +
                                  " out of range for dimension " + std::to_string(n));
        }
        auto v = zeros(n);
        v.coords_[axis] = 1.0;
        return v;
    }

    [[nodiscard]] std::size_t dimension() const noexcept { return coords_.size(); }
    [[nodiscard]] bool empty() const noexcept { return coords_.empty(); }

    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }

    [[nodiscard]] std::span<const double> coords() const noexcept { return coords_; }
    [[nodiscard]] const std::vector<double>& to_vector() const noexcept { return coords_; }

    [[nodiscard]] bool is_finite() const noexcept {
        return std::all_of(coords_.begin(), coords_.end(),
                           [](double c) { return std::isfinite(c); });
    }

    [[nodiscard]] double dot(const AssessmentVector& other) const {
        require_same_dimension(other, "dot");
        double s = 0.0;
        for (std::size_t i = 0; i < coords_.size(); ++i) s += coords_[i] * other.coords_[i];
        return s;
    }

    [[nodiscard]] double norm_squared() const noexcept {
        double s = 0.0;
        for (double c : coords_) s += c * c;
        return s;
    }

    [[nodiscard]] double norm() const noexcept { return std::sqrt(norm_squared()); }

    AssessmentVector& operator+=(const AssessmentVector& rhs) {
        require_same_dimension(rhs, "+");
        for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
        return *this;
    }

    AssessmentVector& operator-=(const AssessmentVector& rhs) {
        require_same_dimension(rhs, "-");
        for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
        return *this;
    }

    AssessmentVector& operator*=(double s) noexcept {
        for (double& c : coords_) c *= s;
        return *this;
    }

    AssessmentVector& operator/=(double s) noexcept {
        for (double& c : coords_) c /= s;
        return *this;
    }

    friend AssessmentVector operator+(AssessmentVector a, const AssessmentVector& b) { return a += b; }
    friend AssessmentVector operator-(AssessmentVector a, const AssessmentVector& b) { return a -= b; }
    friend AssessmentVector operator*(AssessmentVector a, double s) noexcept { return a *= s; }
    friend AssessmentVector operator*(double s, AssessmentVector a) noexcept { return a *= s; }
    friend AssessmentVector operator/(AssessmentVector a, double s) noexcept { return a /= s; }
    friend AssessmentVector operator-(AssessmentVector a) noexcept { return a *= -1.0; }

    friend bool operator==(const AssessmentVector&, const AssessmentVector&) = default;

    void require_same_dimension(const AssessmentVector& other, std::string_view what) const {
        if (other.dimension() != dimension()) {
            throw ValidationError("dimension mismatch in " + std::string(what) + ": " +
                                  std::to_string(dimension()) + " vs " +
                                  std::to_string(other.dimension()));
        }
    }

private:
    struct Raw {};
    AssessmentVector(std::size_t n, Raw) : coords_(n, 0.0) {}

    void check_finite() const {
        if (!is_finite()) throw ValidationError("assessment coordinates must be finite");
    }

    std::vector<double> coords_;
};

/// Euclidean distance in leos.
[[nodiscard]] inline double distance(const AssessmentVector& a, const AssessmentVector& b) {
    a.require_same_dimension(b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Mass
// ---------------------------------------------------------------------------

/// The three variables social mass depends on.
struct MassComponents {
    double intellectual = 0.0;
    double physical = 0.0;
    double economic = 0.0;

    friend bool operator==(const MassComponents&, const MassComponents&) = default;
};

inline void validate(const MassComponents& c) {
    for (double v : {c.intellectual, c.physical, c.economic}) {
        if (!std::isfinite(v)) throw ValidationError("mass components must be finite");
        if (v < 0.0) throw ValidationError("mass components must be nonnegative");
    }
}

/// Strategy mapping mass components to a scalar mass. Every kind returns zero
/// exactly when all components are zero and is strictly increasing in each
/// component.
struct MassCombiner {
    enum class Kind { Additive, Weighted, Euclidean };

    Kind kind = Kind::Additive;
    std::array<double, 3> weights{1.0, 1.0, 1.0};  // Weighted only

    [[nodiscard]] static MassCombiner additive() { return {}; }
    [[nodiscard]] static MassCombiner weighted(std::array<double, 3> w) {
        for (double x : w) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                throw ValidationError("mass combiner weights must be positive and finite");
            }
        }
        return {Kind::Weighted, w};
    }
    [[nodiscard]] static MassCombiner euclidean() { return {Kind::Euclidean, {1.0, 1.0, 1.0}}; }

    [[nodiscard]] double operator()(const MassComponents& c) const {
        validate(c);
        switch (kind) {
        case Kind::Additive:
            return c.intellectual + c.physical + c.economic;
        case Kind::Weighted:
            return weights[0] * c.intellectual + weights[1] * c.physical + weights[2] * c.economic;
        case Kind::Euclidean:
            return std::sqrt(c.intellectual * c.intellectual + c.physical * c.physical +
                             c.economic * c.economic);
        }
        return 0.0;
    }

    /// Components that reproduce a bare scalar mass (placed in the
    /// intellectual slot).
    [[nodiscard]] MassComponents components_for(double mass) const {
        if (kind == Kind::Weighted) return {mass / weights[0], 0.0, 0.0};
        return {mass, 0.0, 0.0};
    }

    friend bool operator==(const MassCombiner&, const MassCombiner&) = default;
};

[[nodiscard]] inline std::string_view to_string(MassCombiner::Kind k) {
    switch (k) {
    case MassCombiner::Kind::Additive: return "additive";
    case MassCombiner::Kind::Weighted: return "weighted";
    case MassCombiner::Kind::Euclidean: return "euclidean";
    }
    return "?";
}

/// Scalar social mass; additive by default.
[[nodiscard]] inline double combine_mass(const MassComponents& c,
                                         const MassCombiner& combiner = {}) {
    return combiner(c);
}

// ---------------------------------------------------------------------------
// Bodies
// ---------------------------------------------------------------------------

struct SocialBody {
    std::string id;
    MassComponents mass_components;
    double mass = 0.0;
    AssessmentVector position;
    AssessmentVector velocity;

    friend bool operator==(const SocialBody&, const SocialBody&) = default;
};

/// Builds a body whose mass is derived from its components. Massless bodies
/// are rejected: they cannot take part in dynamics.
[[nodiscard]] inline SocialBody make_body(std::string id, const MassComponents& components,
                                          AssessmentVector position, AssessmentVector velocity,
                                          const MassCombiner& combiner = {}) {
    if (id.empty()) throw ValidationError("body id must not be empty");
    const double m = combine_mass(components, combiner);
    if (!(m > 0.0)) throw ValidationError("body '" + id + "' has zero mass");
    if (!position.is_finite() || !velocity.is_finite()) {
        throw ValidationError("body '" + id + "' has non-finite state");
    }
    position.require_same_dimension(velocity, "body '" + id + "' position/velocity");
    return SocialBody{std::move(id), components, m, std::move(position), std::move(velocity)};
}

/// A nested social body. Members are ids of bodies or other complexes; a
/// member that names no complex is a leaf (a single individual).
struct ComplexBody {
    std::string id;
    std::vector<std::string> members;
    std::optional<double> fixed_radius;  // overrides the leaf-count rule
    double radius = 0.0;                 // R, resolved
    double layer_thickness = 0.0;        // ΔR
    AssessmentVector center;
    double mass = 0.0;                   // m_c

    friend bool operator==(const ComplexBody&, const ComplexBody&) = default;
};

/// Default bound on ΔR / R for a thin public layer.
inline constexpr double kDefaultThinLayerRatio = 0.1;

// ---------------------------------------------------------------------------
// Force parameters
// ---------------------------------------------------------------------------

inline constexpr double kDefaultSoftening = 1e-6;

struct ForceParams {
    double gamma = 1.0;       // attraction coefficient
    double k_e = 0.0;         // social elasticity
    double k_c = 0.0;         // coefficient of change
    double softening = kDefaultSoftening;
    AssessmentVector equilibrium;  // sustainable state x_0

    friend bool operator==(const ForceParams&, const ForceParams&) = default;
};

/// Constant noncoercive force of magnitude scale * PB / PC along direction.
struct DrivingForceSpec {
    double perceived_benefits = 1.0;
    double perceived_costs = 1.0;
    AssessmentVector direction;
    double scale = 1.0;

    friend bool operator==(const DrivingForceSpec&, const DrivingForceSpec&) = default;
};

inline void validate(const DrivingForceSpec& s) {
    if (!(s.perceived_benefits > 0.0) || !std::isfinite(s.perceived_benefits)) {
        throw ValidationError("perceived benefits must be positive");
    }
    if (!(s.perceived_costs > 0.0) || !std::isfinite(s.perceived_costs)) {
        throw ValidationError("perceived costs must be positive");
    }
    if (!(s.scale > 0.0) || !std::isfinite(s.scale)) {
        throw ValidationError("driving force scale must be positive");
    }
    if (s.direction.empty() || std::abs(s.direction.norm() - 1.0) > 1e-12) {
        throw ValidationError("driving force direction must be a unit vector");
    }
}

// ---------------------------------------------------------------------------
// Closed-form oscillator
// ---------------------------------------------------------------------------

/// x(t) = A sin(ωt) + B cos(ωt).
struct OscillatorSolution {
    double A = 0.0;
    double B = 0.0;
    double omega = 1.0;
    double period = 2.0 * std::numbers::pi;
    double frequency = 1.0 / (2.0 * std::numbers::pi);

    [[nodiscard]] static OscillatorSolution make(double A, double B, double omega) {
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw ValidationError("oscillator omega must be positive");
        }
        const double period = 2.0 * std::numbers::pi / omega;
        return {A, B, omega, period, 1.0 / period};
    }

    [[nodiscard]] double amplitude() const noexcept { return std::hypot(A, B); }

    friend bool operator==(const OscillatorSolution&, const OscillatorSolution&) = default;
};

// ---------------------------------------------------------------------------
// Force bindings and simulation state
// ---------------------------------------------------------------------------

enum class ForceKind { Attraction, Elasticity, Change, Driving, SurfaceGravity };

[[nodiscard]] inline std::string_view to_string(ForceKind k) {
    switch (k) {
    case ForceKind::Attraction: return "attraction";
    case ForceKind::Elasticity: return "elasticity";
    case ForceKind::Change: return "change";
    case ForceKind::Driving: return "driving";
    case ForceKind::SurfaceGravity: return "surface_gravity";
    }
    return "?";
}

[[nodiscard]] inline ForceKind force_kind_from_string(std::string_view s) {
    for (auto k : {ForceKind::Attraction, ForceKind::Elasticity, ForceKind::Change,
                   ForceKind::Driving, ForceKind::SurfaceGravity}) {
        if (to_string(k) == s) return k;
    }
    throw ValidationError("unknown force kind '" + std::string(s) + "'");
}

[[nodiscard]] constexpr bool is_pairwise(ForceKind k) noexcept {
    return k == ForceKind::Attraction;
}

/// One force law bound to the body (and partner) it acts on. `partner` is the
/// other body for Attraction, the complex for SurfaceGravity, and empty
/// otherwise.
struct ForceModel {
    ForceKind kind = ForceKind::Elasticity;
    std::string body;
    std::string partner;
    ForceParams params;
    DrivingForceSpec driving;
    bool check_layer = true;  // SurfaceGravity: require the body in the public layer

    friend bool operator==(const ForceModel&, const ForceModel&) = default;
};

/// Half-space n·x ≥ offset that a body's position may not leave. A floor on
/// dimension k is normal = e_k.
struct Constraint {
    std::string body;
    AssessmentVector normal;
    double offset = 0.0;

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct SimulationState {
    double t = 0.0;
    std::size_t dimension = 0;
    std::vector<SocialBody> bodies;
    std::vector<ComplexBody> complexes;
    std::vector<ForceModel> forces;
    std::vector<Constraint> constraints;

    [[nodiscard]] std::optional<std::size_t> find_body(std::string_view id) const {
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            if (bodies[i].id == id) return i;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::optional<std::size_t> find_complex(std::string_view id) const {
        for (std::size_t i = 0; i < complexes.size(); ++i) {
            if (complexes[i].id == id) return i;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::size_t index_of(std::string_view id) const {
        auto i = find_body(id);
        if (!i) throw ValidationError("unknown body '" + std::string(id) + "'");
        return *i;
    }

    [[nodiscard]] const SocialBody& body(std::string_view id) const { return bodies[index_of(id)]; }

    [[nodiscard]] const ComplexBody& complex(std::string_view id) const {
        auto i = find_complex(id);
        if (!i) throw ValidationError("unknown complex '" + std::string(id) + "'");
        return complexes[*i];
    }

    friend bool operator==(const SimulationState&, const SimulationState&) = default;
};

namespace detail {

inline void require_dim(const AssessmentVector& v, std::size_t n, const std::string& what) {
    if (v.dimension() != n) {
        throw ValidationError(what + " has dimension " + std::to_string(v.dimension()) +
                              ", expected " + std::to_string(n));
    }
    if (!v.is_finite()) throw ValidationError(what + " is not finite");
}

inline void require_nonneg(double x, const std::string& what) {
    if (!std::isfinite(x) || x < 0.0) throw ValidationError(what + " must be nonnegative");
}

inline void require_pos(double x, const std::string& what) {
    if (!std::isfinite(x) || !(x > 0.0)) throw ValidationError(what + " must be positive");
}

}  // namespace detail

/// Structural checks: dimensions, unique ids, resolvable references,
/// parameter ranges. Layer membership for surface gravity is checked by
/// forces::check_bindings.
inline void validate(const SimulationState& s) {
    using detail::require_dim;
    if (s.dimension == 0) throw ValidationError("dimension must be at least 1");
    if (!std::isfinite(s.t) || s.t < 0.0) throw ValidationError("time must be nonnegative");

    std::unordered_set<std::string> ids;
    for (const auto& b : s.bodies) {
        if (b.id.empty()) throw ValidationError("body id must not be empty");
        if (!ids.insert(b.id).second) throw ValidationError("duplicate id '" + b.id + "'");
        validate(b.mass_components);
        if (!(b.mass > 0.0) || !std::isfinite(b.mass)) {
            throw ValidationError("body '" + b.id + "' has zero mass");
        }
        require_dim(b.position, s.dimension, "position of '" + b.id + "'");
        require_dim(b.velocity, s.dimension, "velocity of '" + b.id + "'");
    }
    for (const auto& c : s.complexes) {
        if (c.id.empty()) throw ValidationError("complex id must not be empty");
        if (!ids.insert(c.id).second) throw ValidationError("duplicate id '" + c.id + "'");
        detail::require_pos(c.radius, "radius of '" + c.id + "'");
        detail::require_pos(c.layer_thickness, "layer thickness of '" + c.id + "'");
        detail::require_pos(c.mass, "mass of '" + c.id + "'");
        require_dim(c.center, s.dimension, "center of '" + c.id + "'");
    }

    for (const auto& f : s.forces) {
        const std::string tag = std::string(to_string(f.kind)) + " binding on '" + f.body + "'";
        if (!s.find_body(f.body)) throw ValidationError(tag + ": unknown body");
        switch (f.kind) {
        case ForceKind::Attraction:
            if (!s.find_body(f.partner)) {
                throw ValidationError(tag + ": unknown partner body '" + f.partner + "'");
            }
            if (f.partner == f.body) throw ValidationError(tag + ": body attracts itself");
            detail::require_pos(f.params.gamma, tag + ": gamma");
            detail::require_nonneg(f.params.softening, tag + ": softening");
            break;
        case ForceKind::SurfaceGravity:
            if (!s.find_complex(f.partner)) {
                throw ValidationError(tag + ": unknown complex '" + f.partner + "'");
            }
            detail::require_pos(f.params.gamma, tag + ": gamma");
            detail::require_nonneg(f.params.softening, tag + ": softening");
            break;
        case ForceKind::Elasticity:
        case ForceKind::Change:
            if (!f.partner.empty()) throw ValidationError(tag + ": unexpected partner");
            detail::require_nonneg(f.params.k_e, tag + ": k_e");
            detail::require_nonneg(f.params.k_c, tag + ": k_c");
            require_dim(f.params.equilibrium, s.dimension, tag + ": equilibrium");
            break;
        case ForceKind::Driving:
            if (!f.partner.empty()) throw ValidationError(tag + ": unexpected partner");
            validate(f.driving);
            require_dim(f.driving.direction, s.dimension, tag + ": direction");
            break;
        }
    }

    for (const auto& c : s.constraints) {
        if (!s.find_body(c.body)) throw ValidationError("constraint on unknown body '" + c.body + "'");
        require_dim(c.normal, s.dimension, "constraint normal of '" + c.body + "'");
        if (std::abs(c.normal.norm() - 1.0) > 1e-12) {
            throw ValidationError("constraint normal of '" + c.body + "' must be a unit vector");
        }
        if (!std::isfinite(c.offset)) throw ValidationError("constraint offset must be finite");
        const auto& b = s.body(c.body);
        if (c.normal.dot(b.position) < c.offset - 1e-9 * (1.0 + std::abs(c.offset))) {
            throw ValidationError("body '" + c.body + "' starts outside its constraint");
        }
    }
}

}  // namespace socdyn
