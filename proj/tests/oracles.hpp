#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numerical paths.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

/// Plain nested tree used to generate hierarchies: node name -> children.
/// Names absent from the map are leaves.
using Tree = std::map<std::string, std::vector<std::string>>;

inline void enumerate_leaves(const Tree& tree, const std::string& node, std::vector<std::string>& out) {
    auto it = tree.find(node);
    if (it == tree.end()) {
        out.push_back(node);
        return;
    }
    for (const auto& child : it->second) enumerate_leaves(tree, child, out);
}

inline std::vector<std::string> leaves(const Tree& tree, const std::string& root) {
    std::vector<std::string> out;
    enumerate_leaves(tree, root, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct Rating {
    std::string evaluator;
    std::string subject;
    std::size_t dim;
    double value;
};

/// Flat sum over the given evaluators, visiting them in sorted order.
inline std::vector<double> flat_sum(const std::vector<Rating>& ratings, const std::string& subject,
                                    std::vector<std::string> evaluators, std::size_t n) {
    std::sort(evaluators.begin(), evaluators.end());
    std::vector<double> total(n, 0.0);
    for (const auto& e : evaluators) {
        for (const auto& r : ratings) {
            if (r.subject == subject && r.evaluator == e) total[r.dim] += r.value;
        }
    }
    return total;
}

/// x(t) for x'' + w² x = 0 with x(0) = x0, x'(0) = v0.
inline double harmonic_x(double w, double x0, double v0, double t) {
    return x0 * std::cos(w * t) + (v0 / w) * std::sin(w * t);
}

inline double harmonic_v(double w, double x0, double v0, double t) {
    return -x0 * w * std::sin(w * t) + v0 * std::cos(w * t);
}

/// x(t) for x'' = λ² x with x(0) = x0, x'(0) = 0.
inline double growth_x(double lambda, double x0, double t) { return x0 * std::cosh(lambda * t); }

/// Random 3-level hierarchy: root -> groups -> subgroups -> leaves.
struct RandomHierarchy {
    Tree tree;
    std::string root = "root";
    std::vector<std::string> groups;
};

inline RandomHierarchy random_hierarchy(std::mt19937_64& rng, std::size_t max_leaves) {
    RandomHierarchy h;
    std::uniform_int_distribution<int> n_groups(1, 8), n_sub(1, 5), n_leaf(1, 50);
    std::size_t leaf_count = 0;
    const int g = n_groups(rng);
    for (int i = 0; i < g && leaf_count < max_leaves; ++i) {
        const std::string group = "g" + std::to_string(i);
        h.tree[h.root].push_back(group);
        const int s = n_sub(rng);
        for (int j = 0; j < s && leaf_count < max_leaves; ++j) {
            const std::string sub = group + "s" + std::to_string(j);
            h.tree[group].push_back(sub);
            const int l = n_leaf(rng);
            for (int k = 0; k < l && leaf_count < max_leaves; ++k) {
                h.tree[sub].push_back(sub + "l" + std::to_string(k));
                ++leaf_count;
            }
        }
        if (h.tree[group].empty()) {
            h.tree.erase(group);
        } else {
            h.groups.push_back(group);
        }
    }
    return h;
}

}  // namespace oracle
