#pragma once

#include "scatterlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace scatterlab {

/// Lattice momentum in radians per site, canonicalized to (-pi, pi].
class Momentum {
public:
    constexpr Momentum() = default;
    explicit Momentum(double k) : value_(canonical(k)) {}

    double value() const { return value_; }
    double magnitude() const { return std::abs(value_); }

    /// Group velocity of the -t*A dispersion E(k) = -2t cos k.
    double group_velocity(double t = 1.0) const { return 2.0 * t * std::sin(value_); }

    static double canonical(double k) {
        constexpr double pi = std::numbers::pi;
        double r = std::remainder(k, 2.0 * pi);  // [-pi, pi]
        if (r <= -pi) r += 2.0 * pi;
        return r;
    }

private:
    double value_ = 0.0;
};

using Edge = std::pair<std::size_t, std::size_t>;

/**
 * Finite simple graph with an ordered list of terminal vertices where rails
 * attach. Immutable after construction; edges are stored with u < v, sorted.
 */
class ScatterGraph {
public:
    ScatterGraph() = default;

    ScatterGraph(std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::size_t> terminals)
        : n_(vertex_count), terminals_(std::move(terminals)) {
        std::set<Edge> seen;
        for (auto [u, v] : edges) {
            if (u >= n_ || v >= n_)
                throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                  ") out of range for " + std::to_string(n_) + " vertices");
            if (u == v) throw ConfigError("self-loop at vertex " + std::to_string(u));
            Edge e = std::minmax(u, v);
            if (!seen.insert(e).second)
                throw ConfigError("duplicate edge (" + std::to_string(e.first) + "," +
                                  std::to_string(e.second) + ")");
        }
        edges_.assign(seen.begin(), seen.end());
        std::set<std::size_t> tset;
        for (auto t : terminals_) {
            if (t >= n_) throw ConfigError("terminal " + std::to_string(t) + " out of range");
            if (!tset.insert(t).second) throw ConfigError("duplicate terminal " + std::to_string(t));
        }
        neighbors_.assign(n_, {});
        for (auto [u, v] : edges_) {
            neighbors_[u].push_back(v);
            neighbors_[v].push_back(u);
        }
        for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
    }

    std::size_t vertex_count() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<std::size_t>& terminals() const { return terminals_; }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return neighbors_[v]; }
    std::size_t degree(std::size_t v) const { return neighbors_[v].size(); }

    bool adjacent(std::size_t u, std::size_t v) const {
        const auto& nb = neighbors_[u];
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& nb : neighbors_) d = std::max(d, nb.size());
        return d;
    }

    /// Dense 0/1 adjacency, row-major. Intended for small graphs and tests.
    std::vector<int> adjacency_matrix() const {
        std::vector<int> a(n_ * n_, 0);
        for (auto [u, v] : edges_) a[u * n_ + v] = a[v * n_ + u] = 1;
        return a;
    }

    friend bool operator==(const ScatterGraph& a, const ScatterGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_ && a.terminals_ == b.terminals_;
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> terminals_;
    std::vector<std::vector<std::size_t>> neighbors_;
};

/// Path graph 0-1-...-(n-1) with terminals at both ends (a single terminal when n == 1).
inline ScatterGraph build_path(std::size_t n) {
    if (n == 0) throw ConfigError("path length must be positive");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    std::vector<std::size_t> terms = n == 1 ? std::vector<std::size_t>{0}
                                            : std::vector<std::size_t>{0, n - 1};
    return ScatterGraph(n, std::move(edges), std::move(terms));
}

/**
 * A core graph with a finite path ("rail") of rail_length sites attached to
 * each terminal. Vertex layout: core vertices first, then the rails in
 * terminal order; rail j occupies [core.n + j*len, core.n + (j+1)*len), with
 * the first site of the range adjacent to the terminal.
 */
class RailedGraph {
public:
    RailedGraph(ScatterGraph core, std::size_t rail_length) : core_(std::move(core)), rail_length_(rail_length) {
        if (rail_length_ == 0) throw ConfigError("rail_length must be positive");
        const std::size_t n0 = core_.vertex_count();
        const std::size_t nt = core_.terminals().size();
        std::vector<Edge> edges = core_.edges();
        for (std::size_t j = 0; j < nt; ++j) {
            const std::size_t first = n0 + j * rail_length_;
            edges.emplace_back(core_.terminals()[j], first);
            for (std::size_t d = 0; d + 1 < rail_length_; ++d) edges.emplace_back(first + d, first + d + 1);
        }
        graph_ = ScatterGraph(n0 + nt * rail_length_, std::move(edges), core_.terminals());
    }

    const ScatterGraph& core() const { return core_; }
    const ScatterGraph& graph() const { return graph_; }
    std::size_t rail_length() const { return rail_length_; }
    std::size_t rail_count() const { return core_.terminals().size(); }
    std::size_t vertex_count() const { return graph_.vertex_count(); }

    /// Half-open vertex range [begin, end) of rail j.
    std::pair<std::size_t, std::size_t> rail_range(std::size_t j) const {
        const std::size_t b = core_.vertex_count() + j * rail_length_;
        return {b, b + rail_length_};
    }

    /// Vertex at distance d from terminal j (d = 0 is the terminal itself).
    std::size_t rail_site(std::size_t j, std::size_t d) const {
        if (d == 0) return core_.terminals()[j];
        return rail_range(j).first + d - 1;
    }

private:
    ScatterGraph core_;
    std::size_t rail_length_;
    ScatterGraph graph_;
};

inline RailedGraph attach_rails(const ScatterGraph& core, std::size_t rail_length) {
    return RailedGraph(core, rail_length);
}

/// Incremental construction of composite graphs (several switch copies joined by paths).
class GraphBuilder {
public:
    /// Copies g into the builder, returning the vertex offset of the copy.
    std::size_t add_graph(const ScatterGraph& g) {
        const std::size_t off = n_;
        for (auto [u, v] : g.edges()) edges_.emplace_back(u + off, v + off);
        n_ += g.vertex_count();
        return off;
    }

    /// Adds a fresh path of `length` vertices and returns them in order.
    std::vector<std::size_t> add_path(std::size_t length) {
        std::vector<std::size_t> vs(length);
        for (std::size_t i = 0; i < length; ++i) vs[i] = n_ + i;
        for (std::size_t i = 0; i + 1 < length; ++i) edges_.emplace_back(vs[i], vs[i + 1]);
        n_ += length;
        return vs;
    }

    void connect(std::size_t u, std::size_t v) { edges_.emplace_back(u, v); }
    std::size_t vertex_count() const { return n_; }

    ScatterGraph build(std::vector<std::size_t> terminals = {}) const {
        return ScatterGraph(n_, edges_, std::move(terminals));
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

// ---------------------------------------------------------------------------
// Graph files: {"vertices": n, "edges": [[u, v], ...], "terminals": [t0, ...]}

namespace detail {

inline std::size_t read_index(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        throw ParseError(field, "expected a non-negative integer, got " + j.dump());
    return j.get<std::size_t>();
}

}  // namespace detail

inline ScatterGraph graph_from_json(const nlohmann::json& j, const std::string& context = "graph") {
    if (!j.is_object()) throw ParseError(context, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() != "vertices" && it.key() != "edges" && it.key() != "terminals" && it.key() != "name" &&
            it.key() != "description")
            throw ParseError(context + "." + it.key(), "unknown field");
    }
    for (const char* f : {"vertices", "edges", "terminals"})
        if (!j.contains(f)) throw ParseError(context + "." + f, "missing field");

    const std::size_t n = detail::read_index(j["vertices"], context + ".vertices");
    const auto& je = j["edges"];
    if (!je.is_array()) throw ParseError(context + ".edges", "expected an array");
    std::vector<Edge> edges;
    std::set<Edge> seen;
    for (std::size_t i = 0; i < je.size(); ++i) {
        const std::string where = context + ".edges[" + std::to_string(i) + "]";
        if (!je[i].is_array() || je[i].size() != 2) throw ParseError(where, "expected a [u, v] pair");
        const auto u = detail::read_index(je[i][0], where);
        const auto v = detail::read_index(je[i][1], where);
        if (u >= n || v >= n) throw ParseError(where, "vertex index out of range (vertices = " + std::to_string(n) + ")");
        if (u == v) throw ParseError(where, "self-loop");
        if (!seen.insert(std::minmax(u, v)).second) throw ParseError(where, "duplicate edge");
        edges.emplace_back(u, v);
    }
    const auto& jt = j["terminals"];
    if (!jt.is_array()) throw ParseError(context + ".terminals", "expected an array");
    std::vector<std::size_t> terms;
    std::set<std::size_t> tseen;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        const std::string where = context + ".terminals[" + std::to_string(i) + "]";
        const auto t = detail::read_index(jt[i], where);
        if (t >= n) throw ParseError(where, "terminal out of range");
        if (!tseen.insert(t).second) throw ParseError(where, "duplicate terminal");
        terms.push_back(t);
    }
    return ScatterGraph(n, std::move(edges), std::move(terms));
}

inline nlohmann::json graph_to_json(const ScatterGraph& g) {
    nlohmann::json j;
    j["vertices"] = g.vertex_count();
    j["edges"] = nlohmann::json::array();
    for (auto [u, v] : g.edges()) j["edges"].push_back({u, v});
    j["terminals"] = g.terminals();
    return j;
}

inline nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line number for the diagnostic.
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw ParseError(source + ":" + std::to_string(line), e.what());
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ScatterGraph load_graph_file(const std::string& path) {
    return graph_from_json(parse_json_text(read_text_file(path), path), path);
}

}  // namespace scatterlab
