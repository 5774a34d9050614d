#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "socdyn/core.hpp"

namespace socdyn {

inline constexpr double kMinRating = -100.0;
inline constexpr double kMaxRating = 100.0;

/// One evaluator's rating of a subject along one dimension. Zero means the
/// subject is unknown to the evaluator.
struct PollRecord {
    std::string evaluator_id;
    std::string subject_id;
    std::size_t dimension_index = 0;
    double value = 0.0;

    friend bool operator==(const PollRecord&, const PollRecord&) = default;
};

inline void validate(const PollRecord& r) {
    if (!std::isfinite(r.value) || r.value < kMinRating || r.value > kMaxRating) {
        std::ostringstream os;
        os << "poll rating " << r.value << " by '" << r.evaluator_id << "' of '" << r.subject_id
           << "' is outside the allowed range [-100, 100]";
        throw ValidationError(os.str());
    }
}

enum class LayerClass { Ordinary, OrdinaryPublic, OutstandingPublic };

[[nodiscard]] inline std::string_view to_string(LayerClass c) {
    switch (c) {
    case LayerClass::Ordinary: return "ordinary";
    case LayerClass::OrdinaryPublic: return "ordinary_public";
    case LayerClass::OutstandingPublic: return "outstanding_public";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Poll record text format
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view s, std::string_view what, std::size_t line) {
    T out{};
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last || s.empty()) {
        throw ValidationError("line " + std::to_string(line) + ": malformed " + std::string(what) +
                              " '" + std::string(s) + "'");
    }
    return out;
}

}  // namespace detail

/// Reads `evaluator_id,subject_id,dimension_index,value` lines. Blank lines
/// and lines starting with '#' are skipped.
[[nodiscard]] inline std::vector<PollRecord> parse_poll_records(std::istream& in) {
    std::vector<PollRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            fields.push_back(detail::trim(body.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 4) {
            throw ValidationError("line " + std::to_string(lineno) + ": expected 4 fields, got " +
                                  std::to_string(fields.size()));
        }
        if (fields[0].empty() || fields[1].empty()) {
            throw ValidationError("line " + std::to_string(lineno) + ": empty id");
        }
        PollRecord r{std::string(fields[0]), std::string(fields[1]),
                     detail::parse_number<std::size_t>(fields[2], "dimension index", lineno),
                     detail::parse_number<double>(fields[3], "value", lineno)};
        validate(r);
        out.push_back(std::move(r));
    }
    return out;
}

[[nodiscard]] inline std::vector<PollRecord> parse_poll_records(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_poll_records(in);
}

// ---------------------------------------------------------------------------
// Complex-body hierarchy
// ---------------------------------------------------------------------------

/// Index over a set of complexes for membership queries.
class Hierarchy {
public:
    Hierarchy() = default;

    explicit Hierarchy(std::span<const ComplexBody> complexes) {
        for (const auto& c : complexes) add(c);
    }

    void add(const ComplexBody& c) {
        if (!members_.emplace(c.id, c.members).second) {
            throw ValidationError("duplicate complex '" + c.id + "'");
        }
    }

    [[nodiscard]] bool is_complex(const std::string& id) const { return members_.contains(id); }

    /// Leaf ids reachable from `id`, sorted and unique. Throws on cycles.
    [[nodiscard]] std::vector<std::string> leaves(const std::string& id) const {
        if (!is_complex(id)) throw ValidationError("unknown complex '" + id + "'");
        std::set<std::string> out;
        std::set<std::string> on_path;
        collect(id, on_path, out);
        return {out.begin(), out.end()};
    }

    [[nodiscard]] const std::vector<std::string>& members(const std::string& id) const {
        auto it = members_.find(id);
        if (it == members_.end()) throw ValidationError("unknown complex '" + id + "'");
        return it->second;
    }

private:
    void collect(const std::string& id, std::set<std::string>& on_path,
                 std::set<std::string>& out) const {
        if (!on_path.insert(id).second) {
            throw ValidationError("membership cycle through complex '" + id + "'");
        }
        for (const auto& m : members_.at(id)) {
            if (is_complex(m)) {
                collect(m, on_path, out);
            } else {
                out.insert(m);
            }
        }
        on_path.erase(id);
    }

    std::unordered_map<std::string, std::vector<std::string>> members_;
};

/// R as the number of transitively contained leaves, unless the complex
/// carries a fixed radius.
[[nodiscard]] inline double radius(const ComplexBody& complex, const Hierarchy& h) {
    if (complex.fixed_radius) {
        if (!(*complex.fixed_radius > 0.0) || !std::isfinite(*complex.fixed_radius)) {
            throw ValidationError("fixed radius of '" + complex.id + "' must be positive");
        }
        return *complex.fixed_radius;
    }
    const auto n = h.leaves(complex.id).size();
    if (n == 0) throw ValidationError("complex '" + complex.id + "' has no leaf members");
    return static_cast<double>(n);
}

[[nodiscard]] inline double radius(const ComplexBody& complex) {
    Hierarchy h;
    h.add(complex);
    return radius(complex, h);
}

/// Fills in each complex's radius and checks the thin-layer bound
/// ΔR <= ratio * R.
inline void resolve_complexes(std::vector<ComplexBody>& complexes,
                              double thin_layer_ratio = kDefaultThinLayerRatio) {
    const Hierarchy h(complexes);
    for (auto& c : complexes) {
        c.radius = radius(c, h);
        if (!(c.layer_thickness > 0.0) || c.layer_thickness > thin_layer_ratio * c.radius) {
            std::ostringstream os;
            os << "layer thickness of '" << c.id << "' must be in (0, " << thin_layer_ratio
               << " * R], got " << c.layer_thickness << " with R = " << c.radius;
            throw ValidationError(os.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Aggregation and layers
// ---------------------------------------------------------------------------

/// Sums ratings of `subject_id` over the leaf evaluators of `complex_id`,
/// per dimension. Missing ratings count as zero. Summation runs in sorted
/// evaluator order so the result is reproducible bit for bit.
[[nodiscard]] inline AssessmentVector aggregate_assessment(std::span<const PollRecord> records,
                                                           const std::string& subject_id,
                                                           const std::string& complex_id,
                                                           const Hierarchy& h,
                                                           std::size_t dimension) {
    if (dimension == 0) throw ValidationError("dimension must be at least 1");
    const auto leaves = h.leaves(complex_id);
    if (leaves.empty()) throw ValidationError("complex '" + complex_id + "' has no leaf members");

    // (evaluator, dimension) -> value; std::map keeps evaluator order sorted.
    std::map<std::pair<std::string, std::size_t>, double> ratings;
    for (const auto& r : records) {
        if (r.subject_id != subject_id) continue;
        validate(r);
        if (r.dimension_index >= dimension) {
            throw ValidationError("poll record dimension " + std::to_string(r.dimension_index) +
                                  " out of range for dimension " + std::to_string(dimension));
        }
        if (!std::binary_search(leaves.begin(), leaves.end(), r.evaluator_id)) {
            throw ValidationError("evaluator '" + r.evaluator_id + "' is not a leaf of '" +
                                  complex_id + "'");
        }
        if (!ratings.emplace(std::pair{r.evaluator_id, r.dimension_index}, r.value).second) {
            throw ValidationError("duplicate rating of '" + subject_id + "' by '" +
                                  r.evaluator_id + "' on dimension " +
                                  std::to_string(r.dimension_index));
        }
    }

    auto total = AssessmentVector::zeros(dimension);
    for (const auto& [key, value] : ratings) total[key.second] += value;
    return total;
}

[[nodiscard]] inline AssessmentVector aggregate_assessment(std::span<const PollRecord> records,
                                                           const std::string& subject_id,
                                                           const ComplexBody& complex,
                                                           std::size_t dimension) {
    Hierarchy h;
    h.add(complex);
    return aggregate_assessment(records, subject_id, complex.id, h, dimension);
}

/// Lower bound on one coordinate of an aggregated assessment.
struct AssessmentFloor {
    std::size_t dimension_index = 0;
    double value = 0.0;

    friend bool operator==(const AssessmentFloor&, const AssessmentFloor&) = default;
};

[[nodiscard]] inline AssessmentVector apply_floors(AssessmentVector v,
                                                   std::span<const AssessmentFloor> floors) {
    for (const auto& f : floors) {
        if (f.dimension_index >= v.dimension()) {
            throw ValidationError("floor dimension out of range");
        }
        v[f.dimension_index] = std::max(v[f.dimension_index], f.value);
    }
    return v;
}

/// Places an assessment magnitude in (0, R], (R, R + ΔR] or (R + ΔR, ∞).
[[nodiscard]] inline LayerClass classify_layer(double magnitude, const ComplexBody& complex) {
    if (!std::isfinite(magnitude) || magnitude < 0.0) {
        throw ValidationError("assessment magnitude must be nonnegative");
    }
    if (!(complex.radius > 0.0) || !(complex.layer_thickness > 0.0)) {
        throw ValidationError("complex '" + complex.id + "' has no resolved radius/layer");
    }
    if (magnitude <= complex.radius) return LayerClass::Ordinary;
    if (magnitude <= complex.radius + complex.layer_thickness) return LayerClass::OrdinaryPublic;
    return LayerClass::OutstandingPublic;
}

}  // namespace socdyn
