#ifndef DENDRODYN_GRAPH_HPP
#define DENDRODYN_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dendrodyn/error.hpp"
#include "dendrodyn/rational.hpp"

namespace dendrodyn {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// A point of a metric graph. Canonical: positions 0 and full length are
// always stored as the corresponding vertex, so equality is exact.
struct GraphPoint {
    enum class Kind : std::uint8_t { Vertex, Edge };

    Kind kind = Kind::Vertex;
    std::size_t index = 0;  // vertex index or edge index
    Rational pos = 0;       // position along the edge from its tail; 0 for vertices

    static GraphPoint at_vertex(std::size_t v) { return {Kind::Vertex, v, Rational(0)}; }

    bool is_vertex() const { return kind == Kind::Vertex; }

    friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
        return a.kind == b.kind && a.index == b.index && a.pos == b.pos;
    }
    friend bool operator!=(const GraphPoint& a, const GraphPoint& b) { return !(a == b); }
    friend bool operator<(const GraphPoint& a, const GraphPoint& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.index != b.index) return a.index < b.index;
        return a.pos < b.pos;
    }
};

struct Edge {
    std::string id;
    std::size_t tail = 0;
    std::size_t head = 0;
    Rational length;

    bool is_loop() const { return tail == head; }
    std::size_t other(std::size_t v) const { return v == tail ? head : tail; }
};

// One end of an edge as seen from a vertex. Loops contribute two incidences.
struct Incidence {
    std::size_t edge;
    bool at_head;
};

struct EdgeDescription {
    std::string id;
    std::string from;
    std::string to;
    Rational length;

    friend bool operator==(const EdgeDescription&, const EdgeDescription&) = default;
};

struct GraphDescription {
    std::vector<std::string> vertices;
    std::vector<EdgeDescription> edges;

    friend bool operator==(const GraphDescription&, const GraphDescription&) = default;
};

enum class SpaceKind { Arc, Circle, Tree, LocalDendriteWithCycles };

inline const char* space_kind_name(SpaceKind k) {
    switch (k) {
        case SpaceKind::Arc: return "Arc";
        case SpaceKind::Circle: return "Circle";
        case SpaceKind::Tree: return "Tree";
        case SpaceKind::LocalDendriteWithCycles: return "LocalDendriteWithCycles";
    }
    return "?";
}

// Access point to the graph from a GraphPoint: reach `vertex` after walking
// `offset` along `edge` (npos when the point is the vertex itself).
struct Port {
    std::size_t vertex;
    Rational offset;
    std::size_t edge;
    bool at_head = false;
};

// Finite connected metric graph with exact rational edge lengths. Immutable
// after construction; all-pairs vertex distances are computed eagerly.
class MetricGraph {
public:
    static MetricGraph build(const GraphDescription& desc) {
        MetricGraph g;
        std::map<std::string, std::size_t> vertex_index;
        for (const auto& name : desc.vertices) {
            if (!vertex_index.emplace(name, g.vertex_names_.size()).second)
                throw Error(ErrorCode::DuplicateId, "vertex '" + name + "' listed twice");
            g.vertex_names_.push_back(name);
        }
        if (g.vertex_names_.empty())
            throw Error(ErrorCode::DisconnectedSpace, "space has no vertices");
        std::map<std::string, std::size_t> edge_index;
        for (const auto& ed : desc.edges) {
            if (!edge_index.emplace(ed.id, g.edges_.size()).second)
                throw Error(ErrorCode::DuplicateId, "edge '" + ed.id + "' listed twice");
            if (vertex_index.count(ed.id))
                throw Error(ErrorCode::DuplicateId, "id '" + ed.id + "' names both a vertex and an edge");
            auto from = vertex_index.find(ed.from);
            auto to = vertex_index.find(ed.to);
            if (from == vertex_index.end() || to == vertex_index.end())
                throw Error(ErrorCode::UnknownId, "edge '" + ed.id + "' references an unknown vertex");
            if (ed.length <= 0)
                throw Error(ErrorCode::NonpositiveLength, "edge '" + ed.id + "' has length " +
                                                              format_rational(ed.length));
            g.edges_.push_back(Edge{ed.id, from->second, to->second, ed.length});
        }
        g.vertex_lookup_ = std::move(vertex_index);
        g.edge_lookup_ = std::move(edge_index);
        g.index();
        if (!g.connected())
            throw Error(ErrorCode::DisconnectedSpace, "space is not connected");
        g.compute_distances();
        return g;
    }

    GraphDescription description() const {
        GraphDescription d;
        d.vertices = vertex_names_;
        for (const auto& e : edges_)
            d.edges.push_back({e.id, vertex_names_[e.tail], vertex_names_[e.head], e.length});
        return d;
    }

    std::size_t vertex_count() const { return vertex_names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::string& vertex_name(std::size_t v) const { return vertex_names_[v]; }
    const Edge& edge(std::size_t e) const { return edges_[e]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Incidence>& incidences(std::size_t v) const { return incidences_[v]; }
    std::size_t degree(std::size_t v) const { return incidences_[v].size(); }

    std::optional<std::size_t> find_vertex(const std::string& name) const {
        auto it = vertex_lookup_.find(name);
        if (it == vertex_lookup_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> find_edge(const std::string& id) const {
        auto it = edge_lookup_.find(id);
        if (it == edge_lookup_.end()) return std::nullopt;
        return it->second;
    }

    // First Betti number |E| - |V| + 1.
    std::size_t betti() const { return edges_.size() + 1 - vertex_names_.size(); }

    Rational total_length() const {
        Rational s = 0;
        for (const auto& e : edges_) s += e.length;
        return s;
    }

    const Rational& vertex_distance(std::size_t u, std::size_t v) const { return dist_[u][v]; }

    GraphPoint vertex_point(std::size_t v) const { return GraphPoint::at_vertex(v); }

    // Normalized point at `pos` along edge e; throws when pos is outside [0, length].
    GraphPoint point(std::size_t e, const Rational& pos) const {
        const Edge& ed = edges_.at(e);
        if (pos < 0 || pos > ed.length)
            throw Error(ErrorCode::InvalidArgument, "position " + format_rational(pos) +
                                                        " outside edge '" + ed.id + "'");
        if (pos == 0) return GraphPoint::at_vertex(ed.tail);
        if (pos == ed.length) return GraphPoint::at_vertex(ed.head);
        return GraphPoint{GraphPoint::Kind::Edge, e, pos};
    }

    bool contains(const GraphPoint& p) const {
        if (p.is_vertex()) return p.index < vertex_names_.size() && p.pos == 0;
        return p.index < edges_.size() && p.pos > 0 && p.pos < edges_[p.index].length;
    }

    std::vector<Port> ports(const GraphPoint& p) const {
        if (p.is_vertex()) return {Port{p.index, Rational(0), npos, false}};
        const Edge& e = edges_[p.index];
        return {Port{e.tail, p.pos, p.index, false}, Port{e.head, e.length - p.pos, p.index, true}};
    }

    // Distances from p to every vertex.
    std::vector<Rational> distances_to_vertices(const GraphPoint& p) const {
        std::vector<Rational> out(vertex_count());
        auto ps = ports(p);
        for (std::size_t v = 0; v < vertex_count(); ++v) {
            Rational best = ps[0].offset + dist_[ps[0].vertex][v];
            for (std::size_t i = 1; i < ps.size(); ++i) {
                Rational c = ps[i].offset + dist_[ps[i].vertex][v];
                if (c < best) best = c;
            }
            out[v] = best;
        }
        return out;
    }

    friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
        if (a.vertex_names_ != b.vertex_names_ || a.edges_.size() != b.edges_.size()) return false;
        for (std::size_t i = 0; i < a.edges_.size(); ++i) {
            const Edge& x = a.edges_[i];
            const Edge& y = b.edges_[i];
            if (x.id != y.id || x.tail != y.tail || x.head != y.head || x.length != y.length)
                return false;
        }
        return true;
    }
    friend bool operator!=(const MetricGraph& a, const MetricGraph& b) { return !(a == b); }

private:
    MetricGraph() = default;

    void index() {
        incidences_.assign(vertex_names_.size(), {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            incidences_[edges_[e].tail].push_back({e, false});
            incidences_[edges_[e].head].push_back({e, true});
        }
    }

    bool connected() const {
        std::vector<bool> seen(vertex_names_.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (const auto& inc : incidences_[v]) {
                std::size_t w = edges_[inc.edge].other(v);
                if (!seen[w]) {
                    seen[w] = true;
                    ++count;
                    stack.push_back(w);
                }
            }
        }
        return count == vertex_names_.size();
    }

    // Floyd-Warshall; graphs are desk-sized.
    void compute_distances() {
        const std::size_t n = vertex_names_.size();
        std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
        for (std::size_t v = 0; v < n; ++v) d[v][v] = Rational(0);
        for (const auto& e : edges_) {
            if (e.is_loop()) continue;
            auto& slot = d[e.tail][e.head];
            if (!slot || e.length < *slot) {
                slot = e.length;
                d[e.head][e.tail] = e.length;
            }
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                if (!d[i][k]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (!d[k][j]) continue;
                    Rational via = *d[i][k] + *d[k][j];
                    if (!d[i][j] || via < *d[i][j]) d[i][j] = via;
                }
            }
        dist_.assign(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dist_[i][j] = *d[i][j];
    }

    std::vector<std::string> vertex_names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> incidences_;
    std::map<std::string, std::size_t> vertex_lookup_;
    std::map<std::string, std::size_t> edge_lookup_;
    std::vector<std::vector<Rational>> dist_;
};

inline MetricGraph build_space(const GraphDescription& desc) { return MetricGraph::build(desc); }

inline SpaceKind classify_space(const MetricGraph& x) {
    const std::size_t b1 = x.betti();
    if (b1 == 0) {
        std::size_t leaves = 0;
        bool branch = false;
        for (std::size_t v = 0; v < x.vertex_count(); ++v) {
            if (x.degree(v) == 1) ++leaves;
            if (x.degree(v) >= 3) branch = true;
        }
        return (leaves == 2 && !branch) ? SpaceKind::Arc : SpaceKind::Tree;
    }
    if (b1 == 1) {
        bool all_two = true;
        for (std::size_t v = 0; v < x.vertex_count(); ++v) all_two = all_two && x.degree(v) == 2;
        if (all_two) return SpaceKind::Circle;
    }
    return SpaceKind::LocalDendriteWithCycles;
}

struct SpecialPoints {
    std::vector<GraphPoint> endpoints;
    std::vector<GraphPoint> branch_points;
};

// E(X) = degree-1 vertices, B(X) = degree >= 3 vertices; loops count twice.
inline SpecialPoints special_points(const MetricGraph& x) {
    SpecialPoints sp;
    for (std::size_t v = 0; v < x.vertex_count(); ++v) {
        if (x.degree(v) == 1) sp.endpoints.push_back(x.vertex_point(v));
        if (x.degree(v) >= 3) sp.branch_points.push_back(x.vertex_point(v));
    }
    return sp;
}

inline Rational distance(const MetricGraph& x, const GraphPoint& p, const GraphPoint& q) {
    if (p == q) return 0;
    Rational best;
    bool have = false;
    if (!p.is_vertex() && !q.is_vertex() && p.index == q.index) {
        best = abs_of(p.pos - q.pos);
        have = true;
    }
    for (const auto& a : x.ports(p))
        for (const auto& b : x.ports(q)) {
            Rational c = a.offset + x.vertex_distance(a.vertex, b.vertex) + b.offset;
            if (!have || c < best) {
                best = c;
                have = true;
            }
        }
    return best;
}

inline std::string describe_point(const MetricGraph& x, const GraphPoint& p) {
    if (p.is_vertex()) return x.vertex_name(p.index);
    return x.edge(p.index).id + "@" + format_rational(p.pos);
}

// Inverse of describe_point: "name" for a vertex or "edge@q" for an edge position.
inline GraphPoint parse_point(const MetricGraph& x, const std::string& text) {
    const auto at = text.find('@');
    if (at == std::string::npos) {
        auto v = x.find_vertex(text);
        if (!v) throw Error(ErrorCode::UnknownId, "unknown vertex '" + text + "'");
        return x.vertex_point(*v);
    }
    auto e = x.find_edge(text.substr(0, at));
    if (!e) throw Error(ErrorCode::UnknownId, "unknown edge in point '" + text + "'");
    return x.point(*e, parse_rational(text.substr(at + 1)));
}

}  // namespace dendrodyn

#endif  // DENDRODYN_GRAPH_HPP
