#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "socdyn/socdyn.hpp"

namespace fs = std::filesystem;
using namespace socdyn;

namespace {

enum Exit { kOk = 0, kValidation = 1, kRuntime = 2, kIo = 3 };

std::string num(double v) { return format_double(v); }

int exit_code_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ValidationError&) {
        return kValidation;
    } catch (const IoError&) {
        return kIo;
    } catch (const fs::filesystem_error&) {
        return kIo;
    } catch (...) {
        return kRuntime;
    }
}

std::string message_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

void warn_coarse_steps(const Scenario& s, std::ostream& err) {
    for (const auto& k : known_periods(s.state)) {
        if (s.integrator.dt > k.period / 100.0) {
            err << "warning: " << s.name << ": dt = " << num(s.integrator.dt) << " exceeds T/100 for body '"
                << k.body_id << "' (T = " << num(k.period) << ")\n";
        }
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateJob {
    fs::path scenario;
    fs::path out_dir;
    std::string log;
    std::exception_ptr error;
};

void run_job(SimulateJob& job) {
    try {
        std::ostringstream log;
        const auto s = load_scenario(job.scenario);
        for (const auto& w : s.warnings) log << "warning: " << w << '\n';
        warn_coarse_steps(s, log);
        const auto files = run_scenario(s);
        fs::create_directories(job.out_dir);
        for (const auto& f : files) {
            write_file(job.out_dir / f.name, f.contents);
            log << (job.out_dir / f.name).string() << '\n';
        }
        job.log = log.str();
    } catch (...) {
        job.error = std::current_exception();
    }
}

int cmd_simulate(const std::vector<std::string>& scenarios, const std::string& out, unsigned jobs) {
    std::vector<SimulateJob> work;
    for (const auto& path : scenarios) {
        // Several scenarios share --out, so each gets its own subdirectory.
        fs::path dir = scenarios.size() == 1 ? fs::path(out) : fs::path(out) / fs::path(path).stem();
        work.push_back({path, dir, {}, nullptr});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) run_job(work[i]);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(work.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
        worker();
    }

    int code = kOk;
    for (const auto& job : work) {
        std::cerr << job.log;
        if (job.error) {
            std::cerr << "error: " << job.scenario.string() << ": " << message_of(job.error) << '\n';
            code = std::max(code, exit_code_of(job.error));
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

std::size_t resolve_column(const CsvTable& table, const std::string& column) {
    std::size_t index = 0;
    const auto* end = column.data() + column.size();
    const auto [ptr, ec] = std::from_chars(column.data(), end, index);
    if (ec == std::errc{} && ptr == end) {
        if (index >= table.header.size()) {
            throw ValidationError("column index " + column + " out of range (" +
                                  std::to_string(table.header.size()) + " columns)");
        }
        return index;
    }
    return table.column_index(column);
}

int cmd_analyze(const std::string& path, const std::string& column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    const auto table = read_csv(in);
    const auto t = table.column_index("t");
    const auto c = resolve_column(table, column);

    std::vector<TimeSample> samples;
    samples.reserve(table.rows.size());
    for (const auto& row : table.rows) samples.push_back({row[t], row[c]});

    const double nu = dominant_frequency(samples);
    const auto fit = fit_harmonic(samples);
    std::cout << "column " << table.header[c] << '\n'
              << "frequency " << num(nu) << '\n'
              << "omega " << num(fit.solution.omega) << '\n'
              << "period " << num(fit.solution.period) << '\n'
              << "A " << num(fit.solution.A) << '\n'
              << "B " << num(fit.solution.B) << '\n'
              << "offset " << num(fit.offset) << '\n'
              << "rms_residual " << num(fit.rms_residual) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path) {
    const auto s = load_scenario(path);
    check_bindings(s.state);
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    warn_coarse_steps(s, std::cerr);

    std::cout << "scenario " << s.name << ": ok\n";
    for (const auto& b : s.state.bodies) {
        const auto lin = linear_coefficients(s.state, b.id);
        std::cout << "body " << b.id << " mass " << num(b.mass);
        if (lin.k_e != 0.0 || lin.k_c != 0.0) {
            std::cout << " stability " << to_string(lin.stability()) << " (k_e " << num(lin.k_e) << ", k_c "
                      << num(lin.k_c) << ")";
        }
        std::cout << '\n';
        for (const auto& c : s.state.complexes) {
            const double r = distance(b.position, c.center);
            std::cout << "  relative to " << c.id << ": |r| " << num(r) << " layer "
                      << to_string(classify_layer(r, c)) << '\n';
        }
    }
    for (const auto& c : s.state.complexes) {
        std::cout << "complex " << c.id << " radius " << num(c.radius) << " layer_thickness "
                  << num(c.layer_thickness) << " g(gamma=1) " << num(surface_gravity(c, 1.0)) << '\n';
    }
    const auto base = fs::path(path).parent_path();
    for (const auto& a : s.assessments) {
        const auto v = evaluate_assessment(s, a, base);
        std::cout << "assessment " << a.subject << " by " << a.complex << ": [";
        for (std::size_t i = 0; i < v.dimension(); ++i) std::cout << (i ? ", " : "") << num(v[i]);
        std::cout << "] |a| " << num(v.norm()) << " layer "
                  << to_string(classify_layer(v.norm(), s.state.complex(a.complex))) << '\n';
    }
    for (const auto& f : s.state.forces) {
        if (f.kind != ForceKind::Driving) continue;
        const auto d = driving_force(f.driving);
        std::cout << "driving " << f.body << " PB/PC " << num(d.ratio) << " transaction "
                  << (d.transaction_may_happen() ? "possible" : "not expected") << '\n';
    }
    for (const auto& k : known_periods(s.state)) {
        std::cout << "period " << k.body_id << " "
                  << (k.source == HarmonicSpec::Source::Elastic ? "elastic" : "pendulum") << " "
                  << num(k.period) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

// A lone 1-D body whose only bindings are elasticity and change toward one
// shared equilibrium, with net restoring stiffness.
std::optional<ExpectedOscillation> derive_expected(const Scenario& s) {
    if (s.state.dimension != 1 || s.state.bodies.size() != 1 || !s.state.constraints.empty()) {
        return std::nullopt;
    }
    const auto& b = s.state.bodies[0];
    std::optional<double> eq;
    for (const auto& f : s.state.forces) {
        if (f.kind != ForceKind::Elasticity && f.kind != ForceKind::Change) return std::nullopt;
        if (eq && *eq != f.params.equilibrium[0]) return std::nullopt;
        eq = f.params.equilibrium[0];
    }
    const auto lin = linear_coefficients(s.state, b.id);
    if (!eq || !(lin.k_e > lin.k_c)) return std::nullopt;
    const auto sol =
        solve_harmonic(HarmonicSpec::elastic(lin.k_e - lin.k_c, b.mass, b.position[0] - *eq, b.velocity[0]));
    return ExpectedOscillation{b.id, {*eq}, {1.0}, sol};
}

int cmd_oracle(const std::string& path) {
    const auto s = load_scenario(path);
    const auto expected = s.expected ? s.expected : derive_expected(s);
    if (!expected) {
        std::cout << "no closed-form solution for scenario " << s.name << '\n';
        return kOk;
    }
    const auto& e = *expected;
    std::cout << "body " << e.body << '\n'
              << "x(t) = A sin(omega t) + B cos(omega t)\n"
              << "A " << num(e.solution.A) << '\n'
              << "B " << num(e.solution.B) << '\n'
              << "omega " << num(e.solution.omega) << '\n'
              << "period " << num(e.solution.period) << '\n';

    warn_coarse_steps(s, std::cerr);
    const auto tr = simulate(s.state, s.integrator);
    double worst = 0.0;
    for (const auto& smp : tr[s.state.index_of(e.body)].samples) {
        const double want = evaluate_solution(e.solution, smp.t - s.state.t).x;
        worst = std::max(worst, std::abs(e.project(smp.position) - want));
    }
    std::cout << "max_deviation " << num(worst) << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// template
// ---------------------------------------------------------------------------

class Params {
public:
    explicit Params(const std::vector<std::string>& kv) {
        for (const auto& item : kv) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) throw ValidationError("expected key=value, got '" + item + "'");
            values_[item.substr(0, eq)] = item.substr(eq + 1);
        }
    }

    double number(const std::string& key, double fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::string text = it->second;
        values_.erase(it);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
            throw ValidationError(key + ": not a number '" + text + "'");
        }
        return v;
    }

    bool flag(const std::string& key, bool fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        const std::string text = it->second;
        values_.erase(it);
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        throw ValidationError(key + " must be true or false");
    }

    void finish() const {
        if (!values_.empty()) throw ValidationError("unknown parameter '" + values_.begin()->first + "'");
    }

private:
    std::map<std::string, std::string> values_;
};

Scenario make_template(const std::string& name, Params p) {
    Scenario s;
    if (name == "fashion") {
        s = build_fashion_oscillator(p.number("k_e", 1.0), p.number("m", 1.0), p.number("A0", 1.0));
    } else if (name == "attraction_pendulum") {
        PendulumParams pp;
        pp.gamma = p.number("gamma", pp.gamma);
        pp.m_c = p.number("m_c", pp.m_c);
        pp.R = p.number("R", pp.R);
        pp.m = p.number("m", pp.m);
        pp.beta0 = p.number("beta0", pp.beta0);
        pp.alpha = p.number("alpha", pp.alpha);
        pp.layer_ratio = p.number("layer_ratio", pp.layer_ratio);
        pp.strict_small_angle = p.flag("strict", pp.strict_small_angle);
        s = build_attraction_pendulum(pp);
    } else if (name == "celebrity_pair") {
        s = build_celebrity_pair(p.number("m_c", 100.0), p.number("m", 1.0), p.number("r0", 10.0),
                                 p.number("gamma", 1.0));
    } else if (name == "stability_probe") {
        s = build_stability_probe(p.number("k_e", 2.0), p.number("k_c", 1.0), p.number("m", 1.0),
                                  p.number("x0", 1.0));
    } else if (name == "conservative_pair") {
        s = build_conservative_pair();
    } else if (name == "civil_war") {
        s = build_civil_war_demo();
    } else if (name == "belarus_2020") {
        s = build_belarus_2020_demo();
    } else if (name == "us_congress") {
        s = build_us_congress_demo();
    } else if (name == "community") {
        s = build_community_demo();
    } else {
        throw ValidationError("unknown template '" + name + "'");
    }
    p.finish();
    return s;
}

int cmd_template(const std::string& name, const std::vector<std::string>& params, const std::string& out) {
    const auto s = make_template(name, Params(params));
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';
    const auto text = serialize_scenario(s);
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        write_file(out, text);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Social dynamics simulator"};
    app.require_subcommand(1);

    std::vector<std::string> scenarios;
    std::string out_dir;
    unsigned jobs = 1;
    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate scenarios and write trajectory CSVs");
    simulate_cmd->add_option("--scenario", scenarios, "Scenario file(s)")->required();
    simulate_cmd->add_option("--out", out_dir, "Output directory")->required();
    simulate_cmd->add_option("--jobs", jobs, "Scenarios to run in parallel")->check(CLI::PositiveNumber);

    std::string trajectory, column;
    auto* analyze_cmd = app.add_subcommand("analyze", "Dominant frequency and harmonic fit of one CSV column");
    analyze_cmd->add_option("--trajectory", trajectory, "Trajectory CSV")->required();
    analyze_cmd->add_option("--column", column, "Column name or zero-based index")->required();

    std::string scenario;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and report layers and stability");
    validate_cmd->add_option("--scenario", scenario, "Scenario file")->required();

    auto* oracle_cmd = app.add_subcommand("oracle", "Compare a fresh simulation with the closed form");
    oracle_cmd->add_option("--scenario", scenario, "Scenario file")->required();

    std::string template_name, template_out;
    std::vector<std::string> template_params;
    auto* template_cmd = app.add_subcommand("template", "Print a built-in scenario as a config file");
    template_cmd->add_option("name", template_name, "Template name")->required();
    template_cmd->add_option("--param", template_params, "Builder parameter key=value");
    template_cmd->add_option("--out", template_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*simulate_cmd) return cmd_simulate(scenarios, out_dir, jobs);
        if (*analyze_cmd) return cmd_analyze(trajectory, column);
        if (*validate_cmd) return cmd_validate(scenario);
        if (*oracle_cmd) return cmd_oracle(scenario);
        if (*template_cmd) return cmd_template(template_name, template_params, template_out);
    } catch (...) {
        const auto e = std::current_exception();
        std::cerr << "error: " << message_of(e) << '\n';
        return exit_code_of(e);
    }
    return kOk;
}
