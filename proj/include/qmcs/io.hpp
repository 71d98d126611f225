// Copyright 2026 The qmcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * File formats: distributions as {"support": [[value, prob], ...]}, graphs
 * as "n m" followed by m lines "u v". Needs nlohmann/json.
 */

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmcs/core.hpp"
#include "qmcs/distribution.hpp"
#include "qmcs/gibbs.hpp"

namespace qmcs::io {

inline std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json(const std::string &path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw IoError(path + ": " + e.what());
    }
}

inline nlohmann::json to_json(const ValueDistribution &d) {
    auto support = nlohmann::json::array();
    for (const auto &o : d.support()) {
        support.push_back({o.value, o.prob});
    }
    return {{"support", support}};
}

/// @throws IoError on malformed JSON; std::invalid_argument on a bad law.
inline ValueDistribution distribution_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("support") || !j["support"].is_array()) {
        throw IoError("distribution: expected {\"support\": [[value, prob], ...]}");
    }
    std::vector<std::pair<double, double>> pairs;
    for (const auto &e : j["support"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw IoError("distribution: each entry must be [value, prob]");
        }
        pairs.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return ValueDistribution::from_pairs(pairs);
}

inline ValueDistribution load_distribution(const std::string &path) {
    return distribution_from_json(read_json(path));
}

/**
 * A probability vector, given either as a plain JSON array or in the
 * distribution format with values 0..n-1.
 */
inline std::vector<double> load_probability_vector(const std::string &path) {
    const auto j = read_json(path);
    std::vector<double> p;
    if (j.is_array()) {
        for (const auto &e : j) {
            if (!e.is_number()) {
                throw IoError(path + ": expected an array of numbers");
            }
            p.push_back(e.get<double>());
        }
        return p;
    }
    if (!j.is_object() || !j.contains("support") || !j["support"].is_array()) {
        throw IoError(path + ": expected an array or {\"support\": ...}");
    }
    for (const auto &e : j["support"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
            throw IoError(path + ": support entries must be [index, prob]");
        }
        const auto idx = e[0].get<long long>();
        if (idx < 0 || idx > 1 << 24) {
            throw IoError(path + ": index out of range");
        }
        if (static_cast<std::size_t>(idx) >= p.size()) {
            p.resize(static_cast<std::size_t>(idx) + 1, 0.0);
        }
        p[static_cast<std::size_t>(idx)] += e[1].get<double>();
    }
    return p;
}

/// @throws IoError on malformed text; std::invalid_argument on a bad graph.
inline Graph parse_graph(const std::string &text) {
    std::istringstream in(text);
    long long n = 0;
    long long m = 0;
    if (!(in >> n >> m) || n < 1 || m < 0) {
        throw IoError("graph: expected header \"n m\"");
    }
    std::vector<std::pair<int, int>> edges;
    for (long long i = 0; i < m; ++i) {
        long long u = 0;
        long long v = 0;
        if (!(in >> u >> v)) {
            throw IoError("graph: expected " + std::to_string(m) + " edge lines");
        }
        if (u < 0 || v < 0 || u >= n || v >= n) {
            throw IoError("graph: vertex out of range");
        }
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    }
    std::string rest;
    if (in >> rest) {
        throw IoError("graph: trailing content");
    }
    return Graph::make(static_cast<int>(n), std::move(edges));
}

inline Graph load_graph(const std::string &path) {
    return parse_graph(read_file(path));
}

inline std::string format_graph(const Graph &g) {
    std::ostringstream out;
    out << g.n_vertices << ' ' << g.n_edges() << '\n';
    for (const auto &[u, v] : g.edges) {
        out << u << ' ' << v << '\n';
    }
    return out.str();
}

inline nlohmann::json to_json(const QueryLedger &l) {
    return {{"a_uses", l.a_uses},
            {"a_inv_uses", l.a_inv_uses},
            {"state_copies", l.state_copies},
            {"reflection_uses", l.reflection_uses},
            {"walk_steps", l.walk_steps},
            {"classical_samples", l.classical_samples}};
}

} // namespace qmcs::io
