#pragma once

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <type_traits>
#include <string>
#include <vector>

#include "socdyn/core.hpp"
#include "socdyn/forces.hpp"

namespace socdyn {

// ---------------------------------------------------------------------------
// Closed-form linear oscillators
// ---------------------------------------------------------------------------

struct HarmonicSpec {
    enum class Source {
        Elastic,   // ω = √(k_e / m)
        Pendulum,  // ω = √(g / R)
    };

    Source source = Source::Elastic;
    double k_e = 0.0;
    double m = 0.0;
    double g = 0.0;
    double R = 0.0;
    double x0 = 0.0;
    double v0 = 0.0;

    [[nodiscard]] static HarmonicSpec elastic(double k_e, double m, double x0, double v0) {
        return {Source::Elastic, k_e, m, 0.0, 0.0, x0, v0};
    }
    [[nodiscard]] static HarmonicSpec pendulum(double g, double R, double x0, double v0) {
        return {Source::Pendulum, 0.0, 0.0, g, R, x0, v0};
    }
};

[[nodiscard]] inline double harmonic_omega(const HarmonicSpec& spec) {
    auto pos = [](double v, const char* name) {
        if (!std::isfinite(v) || !(v > 0.0)) {
            throw ValidationError(std::string(name) + " must be positive");
        }
    };
    if (spec.source == HarmonicSpec::Source::Elastic) {
        pos(spec.k_e, "k_e");
        pos(spec.m, "m");
        return std::sqrt(spec.k_e / spec.m);
    }
    pos(spec.g, "g");
    pos(spec.R, "R");
    return std::sqrt(spec.g / spec.R);
}

/// B = x(0), A = v(0) / ω.
[[nodiscard]] inline OscillatorSolution solve_harmonic(const HarmonicSpec& spec) {
    if (!std::isfinite(spec.x0) || !std::isfinite(spec.v0)) {
        throw ValidationError("initial conditions must be finite");
    }
    const double omega = harmonic_omega(spec);
    return OscillatorSolution::make(spec.v0 / omega, spec.x0, omega);
}

struct OscillatorPoint {
    double x = 0.0;
    double v = 0.0;
};

[[nodiscard]] inline OscillatorPoint evaluate_solution(const OscillatorSolution& sol, double t) {
    const double s = std::sin(sol.omega * t);
    const double c = std::cos(sol.omega * t);
    return {sol.A * s + sol.B * c, sol.omega * (sol.A * c - sol.B * s)};
}

/// Second derivative of the closed form, -ω² x(t).
[[nodiscard]] inline double solution_acceleration(const OscillatorSolution& sol, double t) {
    return -sol.omega * sol.omega * evaluate_solution(sol, t).x;
}

// ---------------------------------------------------------------------------
// Frequency recovery
// ---------------------------------------------------------------------------

struct TimeSample {
    double t = 0.0;
    double x = 0.0;
};

namespace detail {

inline double uniform_spacing(std::span<const TimeSample> samples) {
    if (samples.size() < 64) {
        throw ValidationError("frequency analysis needs at least 64 samples, got " +
                              std::to_string(samples.size()));
    }
    const double dt = (samples.back().t - samples.front().t) /
                      static_cast<double>(samples.size() - 1);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("sample times must increase");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double gap = samples[i].t - samples[i - 1].t;
        if (std::abs(gap - dt) > 1e-9 * dt) {
            throw ValidationError("samples are not uniformly spaced at index " + std::to_string(i));
        }
    }
    return dt;
}

struct FftwPlanDeleter {
    void operator()(fftw_plan p) const noexcept { fftw_destroy_plan(p); }
};

struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

/// |X_k| for k = 0 .. N/2.
inline std::vector<double> magnitude_spectrum(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * x.size())));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (x.size() / 2 + 1))));
    if (!in || !out) throw std::bad_alloc();
    // FFTW planning is not thread-safe; execution is.
    static std::mutex planner;
    std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDeleter> plan;
    {
        std::lock_guard lock(planner);
        plan.reset(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
    }
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan.get());
    {
        std::lock_guard lock(planner);
        plan.reset();
    }

    std::vector<double> mag(x.size() / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out.get()[k][0], out.get()[k][1]);
    return mag;
}

}  // namespace detail

/// Frequency (cycles per time unit) of the strongest nonzero DFT bin. The
/// mean is removed and a Hann window applied; the peak is refined by a
/// parabola through the log magnitudes of the peak and its neighbors.
[[nodiscard]] inline double dominant_frequency(std::span<const TimeSample> samples) {
    const double dt = detail::uniform_spacing(samples);
    const std::size_t n = samples.size();

    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = samples[i].x;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double spread = 0.0;
    for (double& v : x) {
        v -= mean;
        spread = std::max(spread, std::abs(v));
    }
    if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) {
        throw ValidationError("no oscillation: signal is constant");
    }

    for (std::size_t i = 0; i < n; ++i) {
        x[i] *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
    }
    const auto mag = detail::magnitude_spectrum(x);
    std::size_t peak = 1;
    for (std::size_t k = 2; k < mag.size(); ++k) {
        if (mag[k] > mag[peak]) peak = k;
    }

    double offset = 0.0;
    if (peak + 1 < mag.size()) {
        const double floor = 1e-300;
        const double a = std::log(std::max(mag[peak - 1], floor));
        const double b = std::log(std::max(mag[peak], floor));
        const double c = std::log(std::max(mag[peak + 1], floor));
        const double denom = a - 2.0 * b + c;
        if (denom != 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    return (static_cast<double>(peak) + offset) / (static_cast<double>(n) * dt);
}

/// x(t) ≈ A sin ωt + B cos ωt + offset, fitted by least squares.
struct HarmonicFit {
    OscillatorSolution solution;
    double offset = 0.0;
    double rms_residual = 0.0;
};

namespace detail {

inline HarmonicFit fit_at(std::span<const TimeSample> samples, double omega) {
    // Normal equations for the basis (sin ωt, cos ωt, 1).
    std::array<std::array<double, 4>, 3> m{};
    for (const auto& s : samples) {
        const std::array<double, 3> basis{std::sin(omega * s.t), std::cos(omega * s.t), 1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
            m[r][3] += basis[r] * s.x;
        }
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        if (m[col][col] == 0.0) throw ValidationError("degenerate harmonic fit");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    const double A = m[0][3] / m[0][0];
    const double B = m[1][3] / m[1][1];
    const double C = m[2][3] / m[2][2];

    double ss = 0.0;
    for (const auto& s : samples) {
        const double r = s.x - (A * std::sin(omega * s.t) + B * std::cos(omega * s.t) + C);
        ss += r * r;
    }
    return {OscillatorSolution::make(A, B, omega), C,
            std::sqrt(ss / static_cast<double>(samples.size()))};
}

}  // namespace detail

/// Starts from dominant_frequency, then polishes ω by golden-section search
/// on the fit residual within half a DFT bin.
[[nodiscard]] inline HarmonicFit fit_harmonic(std::span<const TimeSample> samples) {
    const double nu = dominant_frequency(samples);
    const double span = samples.back().t - samples.front().t;
    const double n = static_cast<double>(samples.size());
    const double half_bin = std::numbers::pi / (span * n / (n - 1.0));

    double lo = 2.0 * std::numbers::pi * nu - half_bin;
    double hi = 2.0 * std::numbers::pi * nu + half_bin;
    lo = std::max(lo, 1e-3 * half_bin);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - ratio * (hi - lo);
    double b = lo + ratio * (hi - lo);
    double fa = detail::fit_at(samples, a).rms_residual;
    double fb = detail::fit_at(samples, b).rms_residual;
    for (int iter = 0; iter < 80 && (hi - lo) > 1e-14 * hi; ++iter) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = detail::fit_at(samples, a).rms_residual;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = detail::fit_at(samples, b).rms_residual;
        }
    }
    return detail::fit_at(samples, 0.5 * (lo + hi));
}

/// Mean spacing of successive upward crossings of `level`, located by linear
/// interpolation between samples.
[[nodiscard]] inline double zero_crossing_period(std::span<const TimeSample> samples,
                                                 double level = 0.0) {
    std::vector<double> crossings;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double a = samples[i - 1].x - level;
        const double b = samples[i].x - level;
        if (a < 0.0 && b >= 0.0) {
            const double frac = a / (a - b);
            crossings.push_back(samples[i - 1].t + frac * (samples[i].t - samples[i - 1].t));
        }
    }
    if (crossings.size() < 2) throw ValidationError("fewer than two upward crossings");
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

// ---------------------------------------------------------------------------
// Oscillators known in closed form
// ---------------------------------------------------------------------------

struct KnownPeriod {
    std::string body_id;
    HarmonicSpec::Source source = HarmonicSpec::Source::Elastic;
    double period = 0.0;
};

/// Periods a state's bindings imply: net elasticity k_e - k_c > 0 gives
/// 2π√(m / (k_e - k_c)); constrained surface gravity gives 2π√(R / g).
[[nodiscard]] inline std::vector<KnownPeriod> known_periods(const SimulationState& state) {
    std::vector<KnownPeriod> out;
    for (const auto& b : state.bodies) {
        const auto lin = linear_coefficients(state, b.id);
        if (lin.k_e > lin.k_c) {
            out.push_back({b.id, HarmonicSpec::Source::Elastic,
                           2.0 * std::numbers::pi * std::sqrt(b.mass / (lin.k_e - lin.k_c))});
        }
    }
    for (const auto& f : state.forces) {
        if (f.kind != ForceKind::SurfaceGravity) continue;
        const bool constrained = std::any_of(state.constraints.begin(), state.constraints.end(),
                                             [&](const Constraint& c) { return c.body == f.body; });
        if (!constrained) continue;
        const auto& c = state.complex(f.partner);
        const double g = surface_gravity(c, f.params.gamma);
        out.push_back({f.body, HarmonicSpec::Source::Pendulum,
                       2.0 * std::numbers::pi * std::sqrt(c.radius / g)});
    }
    return out;
}

}  // namespace socdyn
