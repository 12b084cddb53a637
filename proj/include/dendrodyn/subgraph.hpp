#ifndef DENDRODYN_SUBGRAPH_HPP
#define DENDRODYN_SUBGRAPH_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dendrodyn/geodesic.hpp"
#include "dendrodyn/graph.hpp"

namespace dendrodyn {

struct Interval {
    Rational lo;
    Rational hi;

    friend bool operator==(const Interval&, const Interval&) = default;
};

// Closed subset of X made of vertices and closed edge intervals. Canonical
// form: intervals on an edge are disjoint, non-touching and sorted; an
// interval reaching an edge end implies the end vertex is listed; degenerate
// intervals only occur strictly inside an edge.
class Subgraph {
public:
    static Subgraph whole(const MetricGraph& x) {
        Subgraph s;
        for (std::size_t v = 0; v < x.vertex_count(); ++v) s.add_vertex(v);
        for (std::size_t e = 0; e < x.edge_count(); ++e) s.add_edge(x, e);
        return s;
    }

    void add_vertex(std::size_t v) { vertices_.insert(v); }

    void add_edge(const MetricGraph& x, std::size_t e) { add_interval(x, e, 0, x.edge(e).length); }

    void add_interval(const MetricGraph& x, std::size_t e, Rational lo, Rational hi) {
        if (hi < lo) std::swap(lo, hi);
        const Edge& ed = x.edge(e);
        if (lo < 0 || hi > ed.length)
            throw Error(ErrorCode::InvalidArgument, "interval outside edge '" + ed.id + "'");
        if (lo == 0) vertices_.insert(ed.tail);
        if (hi == ed.length) vertices_.insert(ed.head);
        if (lo == hi && (lo == 0 || lo == ed.length)) return;
        auto& list = intervals_[e];
        list.push_back({lo, hi});
        std::sort(list.begin(), list.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        std::vector<Interval> merged;
        for (const auto& iv : list) {
            if (!merged.empty() && iv.lo <= merged.back().hi)
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            else
                merged.push_back(iv);
        }
        list = std::move(merged);
    }

    void add_point(const MetricGraph& x, const GraphPoint& p) {
        if (p.is_vertex())
            add_vertex(p.index);
        else
            add_interval(x, p.index, p.pos, p.pos);
    }

    void add_arc(const MetricGraph& x, const ArcPath& arc) {
        for (const auto& seg : arc.segments) add_interval(x, seg.edge, seg.entry, seg.exit);
    }

    void unite(const MetricGraph& x, const Subgraph& other) {
        for (std::size_t v : other.vertices_) add_vertex(v);
        for (const auto& [e, list] : other.intervals_)
            for (const auto& iv : list) add_interval(x, e, iv.lo, iv.hi);
    }

    bool contains(const GraphPoint& p) const {
        if (p.is_vertex()) return vertices_.count(p.index) > 0;
        auto it = intervals_.find(p.index);
        if (it == intervals_.end()) return false;
        for (const auto& iv : it->second)
            if (iv.lo <= p.pos && p.pos <= iv.hi) return true;
        return false;
    }

    bool contains_edge(const MetricGraph& x, std::size_t e) const {
        auto it = intervals_.find(e);
        return it != intervals_.end() && it->second.size() == 1 && it->second[0].lo == 0 &&
               it->second[0].hi == x.edge(e).length;
    }

    // Edges entirely contained in the subgraph.
    std::vector<std::size_t> full_edges(const MetricGraph& x) const {
        std::vector<std::size_t> out;
        for (const auto& [e, list] : intervals_)
            if (contains_edge(x, e)) out.push_back(e);
        return out;
    }

    bool empty() const { return vertices_.empty() && intervals_.empty(); }

    const std::set<std::size_t>& vertices() const { return vertices_; }
    const std::map<std::size_t, std::vector<Interval>>& intervals() const { return intervals_; }

    // Any point of the subgraph (first vertex, else first interval start).
    std::optional<GraphPoint> representative(const MetricGraph& x) const {
        if (!vertices_.empty()) return x.vertex_point(*vertices_.begin());
        if (!intervals_.empty()) {
            const auto& [e, list] = *intervals_.begin();
            return x.point(e, list.front().lo);
        }
        return std::nullopt;
    }

    friend bool operator==(const Subgraph&, const Subgraph&) = default;

private:
    std::set<std::size_t> vertices_;
    std::map<std::size_t, std::vector<Interval>> intervals_;
};

namespace detail {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::vector<std::size_t> parent;
};

}  // namespace detail

inline bool is_connected(const MetricGraph& x, const Subgraph& s) {
    if (s.empty()) return false;
    std::map<std::size_t, std::size_t> vnode;
    std::size_t n = 0;
    for (std::size_t v : s.vertices()) vnode[v] = n++;
    struct Piece {
        std::size_t edge;
        Interval iv;
    };
    std::vector<Piece> pieces;
    for (const auto& [e, list] : s.intervals())
        for (const auto& iv : list) pieces.push_back({e, iv});
    detail::UnionFind uf(n + pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const Edge& ed = x.edge(pieces[i].edge);
        if (pieces[i].iv.lo == 0) uf.unite(n + i, vnode.at(ed.tail));
        if (pieces[i].iv.hi == ed.length) uf.unite(n + i, vnode.at(ed.head));
    }
    const std::size_t root = uf.find(0);
    for (std::size_t i = 1; i < n + pieces.size(); ++i)
        if (uf.find(i) != root) return false;
    return true;
}

// The minimal subgraph containing every circle of X: the 2-core, obtained
// by repeatedly pruning degree-1 vertices. It also contains the connecting
// arcs between distinct cycle blocks.
inline Subgraph invariant_graph_Y(const MetricGraph& x) {
    if (x.betti() == 0) throw Error(ErrorCode::NoCycles, "space has no circle");
    std::vector<std::size_t> degree(x.vertex_count());
    for (std::size_t v = 0; v < x.vertex_count(); ++v) degree[v] = x.degree(v);
    std::vector<bool> removed_edge(x.edge_count(), false);
    std::vector<bool> removed_vertex(x.vertex_count(), false);
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < x.vertex_count(); ++v)
        if (degree[v] == 1) queue.push_back(v);
    while (!queue.empty()) {
        std::size_t v = queue.back();
        queue.pop_back();
        if (removed_vertex[v] || degree[v] != 1) continue;
        removed_vertex[v] = true;
        for (const auto& inc : x.incidences(v)) {
            if (removed_edge[inc.edge]) continue;
            removed_edge[inc.edge] = true;
            std::size_t w = x.edge(inc.edge).other(v);
            --degree[v];
            if (--degree[w] == 1) queue.push_back(w);
        }
    }
    Subgraph y;
    for (std::size_t v = 0; v < x.vertex_count(); ++v)
        if (!removed_vertex[v]) y.add_vertex(v);
    for (std::size_t e = 0; e < x.edge_count(); ++e)
        if (!removed_edge[e]) y.add_edge(x, e);
    return y;
}

struct ComplementComponent {
    Subgraph closure;                     // closure of the component in X
    std::vector<GraphPoint> attachments;  // closure(C) intersected with A

    // Membership in the open component.
    bool contains(const Subgraph& a, const GraphPoint& p) const {
        return closure.contains(p) && !a.contains(p);
    }
};

// Connected components of X \ A for a closed subgraph A, with their
// attachment sets. Components are ordered by the first edge piece (or free
// vertex) they contain.
inline std::vector<ComplementComponent> complement_components(const MetricGraph& x,
                                                              const Subgraph& a) {
    struct Gap {
        std::size_t edge;
        Rational lo, hi;
    };
    std::vector<Gap> gaps;
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        const Rational& len = x.edge(e).length;
        Rational cur = 0;
        auto it = a.intervals().find(e);
        if (it != a.intervals().end()) {
            for (const auto& iv : it->second) {
                if (iv.lo > cur) gaps.push_back({e, cur, iv.lo});
                cur = std::max(cur, iv.hi);
            }
        }
        if (cur < len) gaps.push_back({e, cur, len});
    }
    const std::size_t nv = x.vertex_count();
    detail::UnionFind uf(nv + gaps.size());
    std::vector<std::vector<GraphPoint>> gap_attach(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const Gap& g = gaps[i];
        const Edge& ed = x.edge(g.edge);
        auto end = [&](const Rational& pos, std::size_t vertex) {
            if (pos == 0 || pos == ed.length) {
                if (a.contains(x.vertex_point(vertex)))
                    gap_attach[i].push_back(x.vertex_point(vertex));
                else
                    uf.unite(nv + i, vertex);
            } else {
                gap_attach[i].push_back(x.point(g.edge, pos));
            }
        };
        end(g.lo, ed.tail);
        end(g.hi, ed.head);
    }
    std::map<std::size_t, std::size_t> slot;
    std::vector<ComplementComponent> out;
    auto component_for = [&](std::size_t node) -> ComplementComponent& {
        std::size_t r = uf.find(node);
        auto [it, fresh] = slot.emplace(r, out.size());
        if (fresh) out.emplace_back();
        return out[it->second];
    };
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        auto& c = component_for(nv + i);
        c.closure.add_interval(x, gaps[i].edge, gaps[i].lo, gaps[i].hi);
        for (const auto& p : gap_attach[i]) c.attachments.push_back(p);
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (a.contains(x.vertex_point(v))) continue;
        component_for(v).closure.add_vertex(v);
    }
    for (auto& c : out) {
        std::sort(c.attachments.begin(), c.attachments.end());
        c.attachments.erase(std::unique(c.attachments.begin(), c.attachments.end()),
                            c.attachments.end());
        for (const auto& p : c.attachments) c.closure.add_point(x, p);
    }
    return out;
}

// Components sharing one attachment point z_k, grouped as the cluster C^k.
struct AttachmentCluster {
    GraphPoint attachment;
    std::vector<std::size_t> components;
};

inline std::vector<AttachmentCluster> group_by_attachment(
    const std::vector<ComplementComponent>& comps) {
    std::vector<AttachmentCluster> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (comps[i].attachments.size() != 1) continue;
        const GraphPoint& z = comps[i].attachments.front();
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const AttachmentCluster& c) { return c.attachment == z; });
        if (it == out.end())
            out.push_back({z, {i}});
        else
            it->components.push_back(i);
    }
    return out;
}

// Union of arcs between the points of a finite set in a tree.
inline Subgraph convex_hull(const MetricGraph& x, const std::vector<GraphPoint>& pts) {
    if (x.betti() != 0) throw Error(ErrorCode::NotATree, "convex hull needs a tree");
    Subgraph hull;
    if (pts.empty()) return hull;
    hull.add_point(x, pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
        hull.add_point(x, pts[i]);
        hull.add_arc(x, arc_between(x, pts.front(), pts[i]));
    }
    return hull;
}

// First-point retraction of a tree onto a closed connected subgraph.
inline GraphPoint retraction(const MetricGraph& x, const Subgraph& a, const GraphPoint& p) {
    if (x.betti() != 0) throw Error(ErrorCode::NotATree, "retraction needs a tree");
    auto target = a.representative(x);
    if (!target) throw Error(ErrorCode::EmptyTarget, "retraction onto an empty set");
    if (a.contains(p)) return p;
    const ArcPath arc = arc_between(x, p, *target);
    for (const auto& seg : arc.segments) {
        const bool fwd = seg.forward();
        const Rational lo = fwd ? seg.entry : seg.exit;
        const Rational hi = fwd ? seg.exit : seg.entry;
        std::optional<Rational> hit;
        auto consider = [&](const Rational& pos) {
            if (!hit || (fwd ? pos < *hit : pos > *hit)) hit = pos;
        };
        const Edge& ed = x.edge(seg.edge);
        if (lo == 0 && a.contains(x.vertex_point(ed.tail))) consider(Rational(0));
        if (hi == ed.length && a.contains(x.vertex_point(ed.head))) consider(ed.length);
        auto it = a.intervals().find(seg.edge);
        if (it != a.intervals().end())
            for (const auto& iv : it->second) {
                if (iv.hi < lo || iv.lo > hi) continue;
                consider(fwd ? std::max(iv.lo, lo) : std::min(iv.hi, hi));
            }
        if (hit) return x.point(seg.edge, *hit);
    }
    return *target;
}

}  // namespace dendrodyn

#endif  // DENDRODYN_SUBGRAPH_HPP
