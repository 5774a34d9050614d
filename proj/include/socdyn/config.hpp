#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socdyn/assessment_space.hpp"
#include "socdyn/core.hpp"
#include "socdyn/dynamics.hpp"
#include "socdyn/scenarios.hpp"

namespace socdyn {

/// Scenario files are JSON documents with the fields below; see README for
/// the full schema.
using ScenarioConfig = Scenario;
using json = nlohmann::ordered_json;

namespace config_detail {

inline void check_keys(const json& j, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
    if (!j.is_object()) throw ValidationError(std::string(where) + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError(std::string(where) + ": unknown field '" + key + "'");
    }
}

template <typename T>
T get(const json& j, const char* key, std::string_view where) {
    if (!j.contains(key)) {
        throw ValidationError(std::string(where) + ": missing field '" + key + "'");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

inline AssessmentVector get_vector(const json& j, const char* key, std::string_view where) {
    return AssessmentVector(get<std::vector<double>>(j, key, where));
}

inline json vec(const AssessmentVector& v) { return json(v.to_vector()); }

inline json mass_combiner_to_json(const MassCombiner& c) {
    json j;
    j["kind"] = std::string(to_string(c.kind));
    if (c.kind == MassCombiner::Kind::Weighted) {
        j["weights"] = {c.weights[0], c.weights[1], c.weights[2]};
    }
    return j;
}

inline MassCombiner mass_combiner_from_json(const json& j) {
    check_keys(j, "mass_combiner", {"kind", "weights"});
    const auto kind = get<std::string>(j, "kind", "mass_combiner");
    if (kind == "additive") return MassCombiner::additive();
    if (kind == "euclidean") return MassCombiner::euclidean();
    if (kind == "weighted") {
        const auto w = get<std::vector<double>>(j, "weights", "mass_combiner");
        if (w.size() != 3) throw ValidationError("mass_combiner: weights needs 3 entries");
        return MassCombiner::weighted({w[0], w[1], w[2]});
    }
    throw ValidationError("mass_combiner: unknown kind '" + kind + "'");
}

inline json force_to_json(const ForceModel& f) {
    json j;
    j["kind"] = std::string(to_string(f.kind));
    switch (f.kind) {
    case ForceKind::Attraction:
        j["bodies"] = {f.body, f.partner};
        j["gamma"] = f.params.gamma;
        j["softening"] = f.params.softening;
        break;
    case ForceKind::Elasticity:
        j["body"] = f.body;
        j["k_e"] = f.params.k_e;
        j["equilibrium"] = vec(f.params.equilibrium);
        break;
    case ForceKind::Change:
        j["body"] = f.body;
        j["k_c"] = f.params.k_c;
        j["equilibrium"] = vec(f.params.equilibrium);
        break;
    case ForceKind::Driving:
        j["body"] = f.body;
        j["perceived_benefits"] = f.driving.perceived_benefits;
        j["perceived_costs"] = f.driving.perceived_costs;
        j["direction"] = vec(f.driving.direction);
        j["scale"] = f.driving.scale;
        break;
    case ForceKind::SurfaceGravity:
        j["body"] = f.body;
        j["complex"] = f.partner;
        j["gamma"] = f.params.gamma;
        j["softening"] = f.params.softening;
        j["check_layer"] = f.check_layer;
        break;
    }
    return j;
}

inline ForceModel force_from_json(const json& j) {
    const std::string where = "force";
    ForceModel f;
    f.kind = force_kind_from_string(get<std::string>(j, "kind", where));
    switch (f.kind) {
    case ForceKind::Attraction: {
        check_keys(j, where, {"kind", "bodies", "gamma", "softening"});
        const auto ids = get<std::vector<std::string>>(j, "bodies", where);
        if (ids.size() != 2) throw ValidationError("attraction: 'bodies' needs exactly two ids");
        f.body = ids[0];
        f.partner = ids[1];
        f.params.gamma = get<double>(j, "gamma", where);
        f.params.softening = get_or(j, "softening", kDefaultSoftening, where);
        break;
    }
    case ForceKind::Elasticity:
        check_keys(j, where, {"kind", "body", "k_e", "equilibrium"});
        f.body = get<std::string>(j, "body", where);
        f.params.k_e = get<double>(j, "k_e", where);
        f.params.equilibrium = get_vector(j, "equilibrium", where);
        break;
    case ForceKind::Change:
        check_keys(j, where, {"kind", "body", "k_c", "equilibrium"});
        f.body = get<std::string>(j, "body", where);
        f.params.k_c = get<double>(j, "k_c", where);
        f.params.equilibrium = get_vector(j, "equilibrium", where);
        break;
    case ForceKind::Driving:
        check_keys(j, where,
                   {"kind", "body", "perceived_benefits", "perceived_costs", "direction", "scale"});
        f.body = get<std::string>(j, "body", where);
        f.driving.perceived_benefits = get<double>(j, "perceived_benefits", where);
        f.driving.perceived_costs = get<double>(j, "perceived_costs", where);
        f.driving.direction = get_vector(j, "direction", where);
        f.driving.scale = get_or(j, "scale", 1.0, where);
        break;
    case ForceKind::SurfaceGravity:
        check_keys(j, where, {"kind", "body", "complex", "gamma", "softening", "check_layer"});
        f.body = get<std::string>(j, "body", where);
        f.partner = get<std::string>(j, "complex", where);
        f.params.gamma = get<double>(j, "gamma", where);
        f.params.softening = get_or(j, "softening", kDefaultSoftening, where);
        f.check_layer = get_or(j, "check_layer", true, where);
        break;
    }
    return f;
}

inline std::optional<std::size_t> unit_axis(const AssessmentVector& v) {
    std::optional<std::size_t> axis;
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        if (v[i] == 0.0) continue;
        if (v[i] != 1.0 || axis) return std::nullopt;
        axis = i;
    }
    return axis;
}

inline json constraint_to_json(const Constraint& c) {
    json j;
    j["body"] = c.body;
    if (auto axis = unit_axis(c.normal)) {
        j["dimension"] = *axis;
        j["floor"] = c.offset;
    } else {
        j["normal"] = vec(c.normal);
        j["offset"] = c.offset;
    }
    return j;
}

inline Constraint constraint_from_json(const json& j, std::size_t n) {
    const std::string where = "constraint";
    check_keys(j, where, {"body", "dimension", "floor", "normal", "offset"});
    Constraint c;
    c.body = get<std::string>(j, "body", where);
    if (j.contains("dimension")) {
        c.normal = AssessmentVector::unit(n, get<std::size_t>(j, "dimension", where));
        c.offset = get<double>(j, "floor", where);
    } else {
        c.normal = get_vector(j, "normal", where);
        c.offset = get<double>(j, "offset", where);
    }
    return c;
}

inline json record_to_json(const PollRecord& r) {
    return json::array({r.evaluator_id, r.subject_id, r.dimension_index, r.value});
}

inline PollRecord record_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw ValidationError("poll record: expected [evaluator, subject, dimension, value]");
    }
    try {
        PollRecord r{j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::size_t>(),
                     j[3].get<double>()};
        validate(r);
        return r;
    } catch (const nlohmann::json::exception&) {
        throw ValidationError("poll record: wrong field types");
    }
}

}  // namespace config_detail

// ---------------------------------------------------------------------------
// Scenario <-> JSON
// ---------------------------------------------------------------------------

[[nodiscard]] inline json to_json(const Scenario& s) {
    using namespace config_detail;
    json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["dimension"] = s.state.dimension;
    j["mass_combiner"] = mass_combiner_to_json(s.combiner);
    j["thin_layer_ratio"] = s.thin_layer_ratio;
    if (s.state.t != 0.0) j["initial_time"] = s.state.t;

    j["bodies"] = json::array();
    for (const auto& b : s.state.bodies) {
        json jb;
        jb["id"] = b.id;
        jb["mass_components"] = {{"intellectual", b.mass_components.intellectual},
                                 {"physical", b.mass_components.physical},
                                 {"economic", b.mass_components.economic}};
        jb["position"] = vec(b.position);
        jb["velocity"] = vec(b.velocity);
        j["bodies"].push_back(jb);
    }

    j["complexes"] = json::array();
    for (const auto& c : s.state.complexes) {
        json jc;
        jc["id"] = c.id;
        jc["members"] = c.members;
        if (c.fixed_radius) jc["radius"] = *c.fixed_radius;
        jc["layer_thickness"] = c.layer_thickness;
        jc["center"] = vec(c.center);
        jc["mass"] = c.mass;
        j["complexes"].push_back(jc);
    }

    j["forces"] = json::array();
    for (const auto& f : s.state.forces) j["forces"].push_back(force_to_json(f));

    j["constraints"] = json::array();
    for (const auto& c : s.state.constraints) j["constraints"].push_back(constraint_to_json(c));

    j["integrator"] = {{"method", std::string(to_string(s.integrator.method))},
                       {"dt", s.integrator.dt},
                       {"t_end", s.integrator.t_end},
                       {"record_every", s.integrator.record_every}};

    if (!s.assessments.empty()) {
        j["assessments"] = json::array();
        for (const auto& a : s.assessments) {
            json ja;
            ja["subject"] = a.subject;
            ja["complex"] = a.complex;
            ja["records"] = json::array();
            for (const auto& r : a.records) ja["records"].push_back(record_to_json(r));
            if (a.records_file) ja["records_file"] = *a.records_file;
            ja["floors"] = json::array();
            for (const auto& f : a.floors) {
                ja["floors"].push_back({{"dimension", f.dimension_index}, {"value", f.value}});
            }
            j["assessments"].push_back(ja);
        }
    }

    if (s.expected) {
        const auto& e = *s.expected;
        j["expected"] = {{"body", e.body},
                         {"origin", vec(e.origin)},
                         {"axis", vec(e.axis)},
                         {"A", e.solution.A},
                         {"B", e.solution.B},
                         {"omega", e.solution.omega}};
    }

    j["outputs"] = json::array();
    for (auto o : s.outputs) j["outputs"].push_back(std::string(to_string(o)));
    return j;
}

/// Parses and fully validates a scenario document. Derived quantities
/// (body mass, complex radius) are recomputed, never read.
[[nodiscard]] inline Scenario scenario_from_json(const json& j) {
    using namespace config_detail;
    check_keys(j, "scenario",
               {"name", "description", "dimension", "mass_combiner", "thin_layer_ratio",
                "initial_time", "bodies", "complexes", "forces", "constraints", "integrator",
                "assessments", "expected", "outputs"});
    Scenario s;
    s.name = get_or<std::string>(j, "name", "scenario", "scenario");
    s.description = get_or<std::string>(j, "description", "", "scenario");
    s.state.dimension = get<std::size_t>(j, "dimension", "scenario");
    const std::size_t n = s.state.dimension;
    if (n == 0) throw ValidationError("dimension must be at least 1");
    if (j.contains("mass_combiner")) s.combiner = mass_combiner_from_json(j.at("mass_combiner"));
    s.thin_layer_ratio = get_or(j, "thin_layer_ratio", kDefaultThinLayerRatio, "scenario");
    s.state.t = get_or(j, "initial_time", 0.0, "scenario");

    for (const auto& jb : get<json>(j, "bodies", "scenario")) {
        check_keys(jb, "body", {"id", "mass_components", "mass", "position", "velocity"});
        const auto id = get<std::string>(jb, "id", "body");
        const std::string where = "body '" + id + "'";
        MassComponents mc;
        if (jb.contains("mass_components")) {
            if (jb.contains("mass")) throw ValidationError(where + ": give mass or mass_components, not both");
            const auto& jm = jb.at("mass_components");
            check_keys(jm, where, {"intellectual", "physical", "economic"});
            mc = {get_or(jm, "intellectual", 0.0, where), get_or(jm, "physical", 0.0, where),
                  get_or(jm, "economic", 0.0, where)};
        } else {
            const double m = get<double>(jb, "mass", where);
            detail::require_nonneg(m, where + ": mass");
            mc = s.combiner.components_for(m);
        }
        auto position = get_vector(jb, "position", where);
        auto velocity = jb.contains("velocity") ? get_vector(jb, "velocity", where)
                                                : AssessmentVector::zeros(position.dimension());
        detail::require_dim(position, n, where + " position");
        detail::require_dim(velocity, n, where + " velocity");
        s.state.bodies.push_back(make_body(id, mc, std::move(position), std::move(velocity), s.combiner));
    }

    if (j.contains("complexes")) {
        for (const auto& jc : j.at("complexes")) {
            check_keys(jc, "complex", {"id", "members", "radius", "layer_thickness", "center", "mass"});
            ComplexBody c;
            c.id = get<std::string>(jc, "id", "complex");
            const std::string where = "complex '" + c.id + "'";
            c.members = get_or<std::vector<std::string>>(jc, "members", {}, where);
            if (jc.contains("radius")) c.fixed_radius = get<double>(jc, "radius", where);
            c.layer_thickness = get<double>(jc, "layer_thickness", where);
            c.center = get_vector(jc, "center", where);
            c.mass = get<double>(jc, "mass", where);
            s.state.complexes.push_back(std::move(c));
        }
    }
    resolve_complexes(s.state.complexes, s.thin_layer_ratio);

    for (const auto& jf : get<json>(j, "forces", "scenario")) {
        s.state.forces.push_back(force_from_json(jf));
    }
    if (j.contains("constraints")) {
        for (const auto& jc : j.at("constraints")) {
            s.state.constraints.push_back(constraint_from_json(jc, n));
        }
    }

    const auto& ji = get<json>(j, "integrator", "scenario");
    check_keys(ji, "integrator", {"method", "dt", "t_end", "record_every"});
    s.integrator.method = integrator_from_string(get<std::string>(ji, "method", "integrator"));
    s.integrator.dt = get<double>(ji, "dt", "integrator");
    s.integrator.t_end = get<double>(ji, "t_end", "integrator");
    s.integrator.record_every = get_or<std::uint64_t>(ji, "record_every", 1, "integrator");

    if (j.contains("assessments")) {
        for (const auto& ja : j.at("assessments")) {
            check_keys(ja, "assessment", {"subject", "complex", "records", "records_file", "floors"});
            AssessmentSpec a;
            a.subject = get<std::string>(ja, "subject", "assessment");
            a.complex = get<std::string>(ja, "complex", "assessment");
            if (!s.state.find_complex(a.complex)) {
                throw ValidationError("assessment of '" + a.subject + "': unknown complex '" +
                                      a.complex + "'");
            }
            if (ja.contains("records")) {
                for (const auto& jr : ja.at("records")) a.records.push_back(record_from_json(jr));
            }
            if (ja.contains("records_file")) {
                a.records_file = get<std::string>(ja, "records_file", "assessment");
            }
            if (ja.contains("floors")) {
                for (const auto& jf : ja.at("floors")) {
                    check_keys(jf, "floor", {"dimension", "value"});
                    a.floors.push_back({get<std::size_t>(jf, "dimension", "floor"),
                                        get<double>(jf, "value", "floor")});
                    if (a.floors.back().dimension_index >= n) {
                        throw ValidationError("floor dimension out of range");
                    }
                }
            }
            s.assessments.push_back(std::move(a));
        }
    }

    if (j.contains("expected")) {
        const auto& je = j.at("expected");
        check_keys(je, "expected", {"body", "origin", "axis", "A", "B", "omega"});
        ExpectedOscillation e;
        e.body = get<std::string>(je, "body", "expected");
        e.origin = get_vector(je, "origin", "expected");
        e.axis = get_vector(je, "axis", "expected");
        detail::require_dim(e.origin, n, "expected origin");
        detail::require_dim(e.axis, n, "expected axis");
        if (std::abs(e.axis.norm() - 1.0) > 1e-12) throw ValidationError("expected axis must be a unit vector");
        e.solution = OscillatorSolution::make(get<double>(je, "A", "expected"),
                                              get<double>(je, "B", "expected"),
                                              get<double>(je, "omega", "expected"));
        if (!s.state.find_body(e.body)) throw ValidationError("expected: unknown body '" + e.body + "'");
        s.expected = std::move(e);
    }

    if (j.contains("outputs")) {
        s.outputs.clear();
        for (const auto& name : get<std::vector<std::string>>(j, "outputs", "scenario")) {
            if (name == "trajectories") s.outputs.push_back(OutputKind::Trajectories);
            else if (name == "energy") s.outputs.push_back(OutputKind::Energy);
            else throw ValidationError("unknown output '" + name + "'");
        }
    }

    validate(s.state);
    validate(s.integrator);
    return s;
}

[[nodiscard]] inline std::string serialize_scenario(const Scenario& s) {
    return to_json(s).dump(2) + "\n";
}

[[nodiscard]] inline Scenario parse_scenario(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

[[nodiscard]] inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return os.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

[[nodiscard]] inline Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(read_file(path));
}

/// Inline records plus any records file (resolved against `base_dir`).
[[nodiscard]] inline std::vector<PollRecord> assessment_records(const AssessmentSpec& a,
                                                                const std::filesystem::path& base_dir) {
    auto records = a.records;
    if (a.records_file) {
        std::istringstream in(read_file(base_dir / *a.records_file));
        auto more = parse_poll_records(in);
        records.insert(records.end(), more.begin(), more.end());
    }
    return records;
}

/// Aggregated, floored assessment of the subject relative to the complex.
[[nodiscard]] inline AssessmentVector evaluate_assessment(const Scenario& s, const AssessmentSpec& a,
                                                          const std::filesystem::path& base_dir) {
    const auto records = assessment_records(a, base_dir);
    const Hierarchy h(s.state.complexes);
    return apply_floors(aggregate_assessment(records, a.subject, a.complex, h, s.state.dimension),
                        a.floors);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Shortest-safe text for a double: 17 significant digits, C locale.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{}) throw SimulationError("cannot format number");
    return std::string(buf, ptr);
}

/// Header `t,<id>.x0..x{n-1},<id>.v0..v{n-1}`, one row per sample, LF endings.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    const std::size_t n = tr.samples.empty() ? 0 : tr.samples.front().position.dimension();
    std::string line = "t";
    for (std::size_t i = 0; i < n; ++i) line += "," + tr.body_id + ".x" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) line += "," + tr.body_id + ".v" + std::to_string(i);
    out << line << '\n';
    for (const auto& s : tr.samples) {
        line = format_double(s.t);
        for (double x : s.position.coords()) line += "," + format_double(x);
        for (double v : s.velocity.coords()) line += "," + format_double(v);
        out << line << '\n';
    }
}

[[nodiscard]] inline std::string trajectory_csv(const Trajectory& tr) {
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    return os.str();
}

/// Header `t,kinetic,potential,total`, one row per recorded state.
struct EnergyRow {
    double t = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
};

inline void write_energy_csv(std::ostream& out, const std::vector<EnergyRow>& rows) {
    out << "t,kinetic,potential,total\n";
    for (const auto& r : rows) {
        out << format_double(r.t) << ',' << format_double(r.kinetic) << ','
            << format_double(r.potential) << ',' << format_double(r.kinetic + r.potential) << '\n';
    }
}

/// A file produced by running a scenario: name relative to the output
/// directory, and its contents.
struct OutputFile {
    std::string name;
    std::string contents;
};

/// Runs the scenario and renders every requested output in memory:
/// `<body>.csv` per body, then `energy.csv`.
[[nodiscard]] inline std::vector<OutputFile> run_scenario(const Scenario& s) {
    const bool want_energy =
        std::find(s.outputs.begin(), s.outputs.end(), OutputKind::Energy) != s.outputs.end();
    const bool want_traj =
        std::find(s.outputs.begin(), s.outputs.end(), OutputKind::Trajectories) != s.outputs.end();

    for (const auto& b : s.state.bodies) {
        if (b.id.find_first_of("/\\") != std::string::npos || b.id.starts_with(".") || b.id == "energy") {
            throw ValidationError("body id '" + b.id + "' cannot be used as a file name");
        }
    }

    std::vector<EnergyRow> energy;
    SampleObserver observer;
    if (want_energy) {
        observer = [&energy](const SimulationState& st) {
            energy.push_back({st.t, kinetic_energy(st), potential_energy(st)});
        };
    }
    const auto trajectories = simulate(s.state, s.integrator, observer);

    std::vector<OutputFile> out;
    if (want_traj) {
        for (const auto& tr : trajectories) out.push_back({tr.body_id + ".csv", trajectory_csv(tr)});
    }
    if (want_energy) {
        std::ostringstream os;
        write_energy_csv(os, energy);
        out.push_back({"energy.csv", os.str()});
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::size_t column_index(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw ValidationError("no column named '" + std::string(name) + "'");
    }
};

[[nodiscard]] inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    auto split = [](std::string_view s) {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        while (true) {
            const auto comma = s.find(',', start);
            out.push_back(detail::trim(s.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty()) continue;
        const auto fields = split(body);
        if (table.header.empty()) {
            for (auto f : fields) table.header.emplace_back(f);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(table.header.size()) + " fields");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(detail::parse_number<double>(f, "value", lineno));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ValidationError("empty CSV");
    return table;
}

}  // namespace socdyn
