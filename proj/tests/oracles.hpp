// Brute-force reference computations used by the tests. Nothing here calls
// into the library's algorithms; only raw graph data and generator
// application are read from it.
#ifndef DENDRODYN_TEST_ORACLES_HPP
#define DENDRODYN_TEST_ORACLES_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dendrodyn/action.hpp"
#include "dendrodyn/graph.hpp"

namespace oracle {

using dendrodyn::GraphPoint;
using dendrodyn::MetricGraph;
using dendrodyn::Rational;

struct RawEdge {
    std::size_t a;
    std::size_t b;
    Rational len;
};

// X with p and q inserted as extra nodes. Node ids of the points are returned.
struct Subdivided {
    std::size_t nodes = 0;
    std::vector<RawEdge> edges;
    std::size_t node_p = 0;
    std::size_t node_q = 0;
};

inline Subdivided subdivide(const MetricGraph& x, const GraphPoint& p, const GraphPoint& q) {
    Subdivided s;
    s.nodes = x.vertex_count();
    std::map<std::size_t, std::map<Rational, std::size_t>> cuts;
    auto node_for = [&](const GraphPoint& pt) -> std::size_t {
        if (pt.is_vertex()) return pt.index;
        auto& on = cuts[pt.index];
        auto it = on.find(pt.pos);
        if (it != on.end()) return it->second;
        on.emplace(pt.pos, s.nodes);
        return s.nodes++;
    };
    s.node_p = node_for(p);
    s.node_q = node_for(q);
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        const auto& ed = x.edge(e);
        std::size_t prev = ed.tail;
        Rational at = 0;
        for (const auto& [pos, node] : cuts[e]) {
            s.edges.push_back({prev, node, pos - at});
            prev = node;
            at = pos;
        }
        s.edges.push_back({prev, ed.head, ed.length - at});
    }
    return s;
}

struct PathCensus {
    Rational shortest;
    std::size_t shortest_count = 0;  // distinct simple edge paths of minimal length
};

// Exhaustive enumeration of simple paths between p and q.
inline PathCensus simple_paths(const MetricGraph& x, const GraphPoint& p, const GraphPoint& q) {
    const Subdivided s = subdivide(x, p, q);
    PathCensus c;
    if (s.node_p == s.node_q) {
        c.shortest = 0;
        c.shortest_count = 1;
        return c;
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(s.nodes);
    for (std::size_t i = 0; i < s.edges.size(); ++i) {
        adj[s.edges[i].a].push_back({i, s.edges[i].b});
        if (s.edges[i].a != s.edges[i].b) adj[s.edges[i].b].push_back({i, s.edges[i].a});
    }
    std::vector<bool> visited(s.nodes, false);
    std::optional<Rational> best;
    std::function<void(std::size_t, Rational)> dfs = [&](std::size_t u, Rational len) {
        if (best && len > *best) return;
        if (u == s.node_q) {
            if (!best || len < *best) {
                best = len;
                c.shortest_count = 1;
            } else if (len == *best) {
                ++c.shortest_count;
            }
            return;
        }
        visited[u] = true;
        for (const auto& [e, w] : adj[u])
            if (!visited[w]) dfs(w, len + s.edges[e].len);
        visited[u] = false;
    };
    dfs(s.node_p, Rational(0));
    c.shortest = *best;
    return c;
}

inline Rational distance(const MetricGraph& x, const GraphPoint& p, const GraphPoint& q) {
    return simple_paths(x, p, q).shortest;
}

// First Betti number as the number of non-tree edges of a BFS spanning tree.
inline std::size_t betti(const MetricGraph& x) {
    std::vector<bool> seen(x.vertex_count(), false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    std::size_t tree_edges = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const std::size_t v = queue[i];
        for (const auto& ed : x.edges()) {
            std::size_t w;
            if (ed.tail == v)
                w = ed.head;
            else if (ed.head == v)
                w = ed.tail;
            else
                continue;
            if (!seen[w]) {
                seen[w] = true;
                ++tree_edges;
                queue.push_back(w);
            }
        }
    }
    return x.edge_count() - tree_edges;
}

// Degrees counted from the edge list; a loop counts twice.
inline std::vector<std::size_t> degrees(const MetricGraph& x) {
    std::vector<std::size_t> d(x.vertex_count(), 0);
    for (const auto& ed : x.edges()) {
        ++d[ed.tail];
        ++d[ed.head];
    }
    return d;
}

inline std::string space_kind(const MetricGraph& x) {
    const auto d = degrees(x);
    const std::size_t b = betti(x);
    const std::size_t maxd = *std::max_element(d.begin(), d.end());
    if (b == 0) return maxd <= 2 ? "Arc" : "Tree";
    if (b == 1 && std::all_of(d.begin(), d.end(), [](std::size_t k) { return k == 2; })) return "Circle";
    return "LocalDendriteWithCycles";
}

// max over a of min over b, and symmetrically, with no early exit.
inline Rational hausdorff(const MetricGraph& x, const std::vector<GraphPoint>& a, const std::vector<GraphPoint>& b) {
    auto directed = [&](const std::vector<GraphPoint>& s, const std::vector<GraphPoint>& t) {
        Rational worst = 0;
        for (const auto& p : s) {
            std::vector<Rational> ds;
            for (const auto& q : t) ds.push_back(oracle::distance(x, p, q));
            worst = std::max(worst, *std::min_element(ds.begin(), ds.end()));
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

// Every point reachable by a word of length at most len, by depth-first
// enumeration of all words.
inline std::set<GraphPoint> word_images(const dendrodyn::GroupAction& a, const GraphPoint& seed, std::size_t len) {
    std::set<GraphPoint> out;
    std::function<void(const GraphPoint&, std::size_t)> rec = [&](const GraphPoint& p, std::size_t left) {
        out.insert(p);
        if (left == 0) return;
        for (std::size_t k = 0; k < a.letter_count(); ++k) rec(a.apply(a.letter(k), p), left - 1);
    };
    rec(seed, len);
    return out;
}

// Orbit of t under t -> t + alpha (mod length) on a circle coordinate.
inline std::size_t rotation_orbit_size(const Rational& alpha, const Rational& length) {
    const Rational turns = alpha / length;
    return static_cast<std::size_t>(boost::multiprecision::denominator(turns).convert_to<long>());
}

// The net covers X at resolution eps if along every edge the gaps between
// consecutive net positions (ends included) are at most 2 eps.
inline bool net_covers(const MetricGraph& x, const std::vector<GraphPoint>& net, const Rational& eps) {
    std::vector<std::vector<Rational>> per_edge(x.edge_count());
    std::set<std::size_t> vertices;
    for (const auto& p : net) {
        if (p.is_vertex())
            vertices.insert(p.index);
        else
            per_edge[p.index].push_back(p.pos);
    }
    if (vertices.size() != x.vertex_count()) return false;
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        auto& list = per_edge[e];
        list.push_back(0);
        list.push_back(x.edge(e).length);
        std::sort(list.begin(), list.end());
        for (std::size_t i = 1; i < list.size(); ++i)
            if (list[i] - list[i - 1] > 2 * eps) return false;
    }
    return true;
}

// Uniform random point with a position on a grid of 1/den of each edge.
inline GraphPoint random_point(const MetricGraph& x, std::mt19937_64& rng, long den = 97) {
    std::uniform_int_distribution<std::size_t> pick_edge(0, x.edge_count() - 1);
    std::uniform_int_distribution<long> pick_pos(0, den);
    const std::size_t e = pick_edge(rng);
    return x.point(e, x.edge(e).length * Rational(pick_pos(rng), den));
}

}  // namespace oracle

#endif  // DENDRODYN_TEST_ORACLES_HPP
