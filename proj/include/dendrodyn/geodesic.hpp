#ifndef DENDRODYN_GEODESIC_HPP
#define DENDRODYN_GEODESIC_HPP

#include <algorithm>
#include <array>
#include <set>
#include <vector>

#include "dendrodyn/graph.hpp"

namespace dendrodyn {

// Traversal of part of one edge, from `entry` to `exit` (edge coordinates).
struct ArcSegment {
    std::size_t edge;
    Rational entry;
    Rational exit;

    bool forward() const { return entry < exit; }
    Rational length() const { return abs_of(exit - entry); }

    friend bool operator==(const ArcSegment&, const ArcSegment&) = default;
};

struct ArcPath {
    std::vector<ArcSegment> segments;
    Rational length = 0;
    GraphPoint start;  // the only point of a degenerate arc
    // false when another shortest arc with the same endpoints exists
    bool unique = true;

    std::vector<std::size_t> edge_sequence() const {
        std::vector<std::size_t> out;
        for (const auto& s : segments) out.push_back(s.edge);
        return out;
    }
};

namespace detail {

// Number of shortest vertex paths from u to target, saturated at 2.
inline unsigned shortest_path_count(const MetricGraph& x, std::size_t u, std::size_t target) {
    std::vector<std::size_t> order(x.vertex_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x.vertex_distance(a, target) < x.vertex_distance(b, target);
    });
    std::vector<unsigned> count(x.vertex_count(), 0);
    count[target] = 1;
    for (std::size_t v : order) {
        if (v == target) continue;
        unsigned c = 0;
        for (const auto& inc : x.incidences(v)) {
            const Edge& e = x.edge(inc.edge);
            if (e.is_loop()) continue;
            std::size_t w = e.other(v);
            if (x.vertex_distance(v, target) == e.length + x.vertex_distance(w, target))
                c = std::min(2u, c + count[w]);
        }
        count[v] = c;
    }
    return count[u];
}

// Lexicographically least (by edge index) shortest vertex path u -> target.
inline std::vector<ArcSegment> least_vertex_path(const MetricGraph& x, std::size_t u,
                                                 std::size_t target) {
    std::vector<ArcSegment> out;
    std::size_t cur = u;
    while (cur != target) {
        std::size_t best_edge = npos;
        bool best_at_head = false;
        for (const auto& inc : x.incidences(cur)) {
            const Edge& e = x.edge(inc.edge);
            if (e.is_loop()) continue;
            std::size_t w = e.other(cur);
            if (x.vertex_distance(cur, target) == e.length + x.vertex_distance(w, target) &&
                inc.edge < best_edge) {
                best_edge = inc.edge;
                best_at_head = inc.at_head;
            }
        }
        const Edge& e = x.edge(best_edge);
        if (best_at_head)
            out.push_back({best_edge, e.length, Rational(0)});
        else
            out.push_back({best_edge, Rational(0), e.length});
        cur = e.other(cur);
    }
    return out;
}

}  // namespace detail

// Shortest arc from p to q. On trees it is the unique arc; otherwise ties are
// broken by the lexicographically least edge-index sequence and `unique` is
// cleared.
inline ArcPath arc_between(const MetricGraph& x, const GraphPoint& p, const GraphPoint& q) {
    ArcPath result;
    result.start = p;
    if (p == q) return result;

    struct Candidate {
        Rational length;
        std::vector<ArcSegment> segments;
        unsigned count;
    };
    std::vector<Candidate> cands;
    if (!p.is_vertex() && !q.is_vertex() && p.index == q.index)
        cands.push_back({abs_of(p.pos - q.pos), {{p.index, p.pos, q.pos}}, 1});
    for (const auto& a : x.ports(p))
        for (const auto& b : x.ports(q)) {
            Candidate c;
            c.length = a.offset + x.vertex_distance(a.vertex, b.vertex) + b.offset;
            if (a.edge != npos)
                c.segments.push_back(
                    {a.edge, p.pos, a.at_head ? x.edge(a.edge).length : Rational(0)});
            auto mid = detail::least_vertex_path(x, a.vertex, b.vertex);
            c.segments.insert(c.segments.end(), mid.begin(), mid.end());
            if (b.edge != npos)
                c.segments.push_back(
                    {b.edge, b.at_head ? x.edge(b.edge).length : Rational(0), q.pos});
            c.count = detail::shortest_path_count(x, a.vertex, b.vertex);
            cands.push_back(std::move(c));
        }

    Rational best = cands.front().length;
    for (const auto& c : cands) best = std::min(best, c.length);
    unsigned total = 0;
    const Candidate* chosen = nullptr;
    std::vector<std::size_t> chosen_seq;
    for (const auto& c : cands) {
        if (c.length != best) continue;
        total += c.count;
        std::vector<std::size_t> seq;
        for (const auto& s : c.segments) seq.push_back(s.edge);
        if (!chosen || seq < chosen_seq) {
            chosen = &c;
            chosen_seq = std::move(seq);
        }
    }
    result.segments = chosen->segments;
    result.length = best;
    result.unique = total == 1;
    return result;
}

// Point at arclength s along the arc (0 <= s <= length).
inline GraphPoint point_along(const MetricGraph& x, const ArcPath& arc, Rational s) {
    if (arc.segments.empty() && s == 0) return arc.start;
    for (const auto& seg : arc.segments) {
        Rational len = seg.length();
        if (s <= len) {
            Rational pos = seg.forward() ? seg.entry + s : seg.entry - s;
            return x.point(seg.edge, pos);
        }
        s -= len;
    }
    throw Error(ErrorCode::InvalidArgument, "arclength beyond the end of the arc");
}

// Every point of X is within eps of the net. Each edge is cut into
// max(2, ceil(len/eps)) equal pieces, so every edge contributes its midpoint
// region and vertices are always included. Vertices come first, then edge
// points in edge order.
inline std::vector<GraphPoint> epsilon_net(const MetricGraph& x, const Rational& eps) {
    if (eps <= 0) throw Error(ErrorCode::InvalidArgument, "net resolution must be positive");
    std::vector<GraphPoint> net;
    for (std::size_t v = 0; v < x.vertex_count(); ++v) net.push_back(x.vertex_point(v));
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        const Rational& len = x.edge(e).length;
        const long pieces = std::max<long>(2, ceil_of(len / eps).convert_to<long>());
        for (long j = 1; j < pieces; ++j) net.push_back(x.point(e, len * j / pieces));
    }
    return net;
}

// Exact diameter of X: max over pairs of points (not only vertices). On each
// pair of edges the distance is a minimum of affine functions of the two
// positions, so its maximum sits at an intersection of crease lines or box
// sides; those candidates are enumerated exactly.
inline Rational diameter(const MetricGraph& x) {
    Rational best = 0;
    for (std::size_t u = 0; u < x.vertex_count(); ++u)
        for (std::size_t v = 0; v < x.vertex_count(); ++v)
            best = std::max(best, x.vertex_distance(u, v));
    // Affine form c + a*s + b*t.
    struct Form {
        Rational a, b, c;
    };
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        for (std::size_t f = e; f < x.edge_count(); ++f) {
            const Edge& E = x.edge(e);
            const Edge& F = x.edge(f);
            std::vector<Form> forms;
            const std::array<std::pair<std::size_t, int>, 2> es{{{E.tail, 1}, {E.head, -1}}};
            const std::array<std::pair<std::size_t, int>, 2> fs{{{F.tail, 1}, {F.head, -1}}};
            for (auto [ve, se] : es)
                for (auto [vf, sf] : fs) {
                    Form fm;
                    fm.a = se;
                    fm.b = sf;
                    fm.c = x.vertex_distance(ve, vf) + (se < 0 ? E.length : Rational(0)) +
                           (sf < 0 ? F.length : Rational(0));
                    forms.push_back(fm);
                }
            auto value = [&](const Rational& s, const Rational& t) {
                Rational m = forms[0].c + forms[0].a * s + forms[0].b * t;
                for (std::size_t i = 1; i < forms.size(); ++i)
                    m = std::min(m, forms[i].c + forms[i].a * s + forms[i].b * t);
                if (e == f) m = std::min(m, abs_of(s - t));
                return m;
            };
            // Lines a*s + b*t = c.
            std::vector<Form> lines;
            lines.push_back({1, 0, 0});
            lines.push_back({1, 0, E.length});
            lines.push_back({0, 1, 0});
            lines.push_back({0, 1, F.length});
            for (std::size_t i = 0; i < forms.size(); ++i)
                for (std::size_t j = i + 1; j < forms.size(); ++j) {
                    Form d{forms[i].a - forms[j].a, forms[i].b - forms[j].b, forms[j].c - forms[i].c};
                    if (d.a != 0 || d.b != 0) lines.push_back(d);
                }
            if (e == f) {
                lines.push_back({1, -1, 0});
                for (const auto& fm : forms) {
                    // fm = s - t and fm = t - s
                    lines.push_back({fm.a - 1, fm.b + 1, -fm.c});
                    lines.push_back({fm.a + 1, fm.b - 1, -fm.c});
                }
            }
            for (std::size_t i = 0; i < lines.size(); ++i)
                for (std::size_t j = i + 1; j < lines.size(); ++j) {
                    const Form& l1 = lines[i];
                    const Form& l2 = lines[j];
                    Rational det = l1.a * l2.b - l1.b * l2.a;
                    if (det == 0) continue;
                    Rational s = (l1.c * l2.b - l1.b * l2.c) / det;
                    Rational t = (l1.a * l2.c - l1.c * l2.a) / det;
                    if (s < 0 || s > E.length || t < 0 || t > F.length) continue;
                    best = std::max(best, value(s, t));
                }
        }
    }
    return best;
}

// Arclength coordinate on a circle space, starting at vertex 0.
class CircleChart {
public:
    explicit CircleChart(const MetricGraph& x) : x_(&x) {
        if (classify_space(x) != SpaceKind::Circle)
            throw Error(ErrorCode::NotACircle, "space is not a circle");
        std::size_t v = 0;
        std::size_t prev_edge = npos;
        Rational offset = 0;
        entry_.assign(x.edge_count(), Step{});
        vertex_offset_.assign(x.vertex_count(), Rational(0));
        for (std::size_t step = 0; step < x.edge_count(); ++step) {
            vertex_offset_[v] = offset;
            std::size_t chosen = npos;
            bool chosen_at_head = false;
            for (const auto& inc : x.incidences(v)) {
                if (inc.edge == prev_edge && !x.edge(inc.edge).is_loop()) continue;
                if (chosen == npos || inc.edge < chosen) {
                    chosen = inc.edge;
                    chosen_at_head = inc.at_head;
                }
            }
            if (step == 0 && x.edge(chosen).is_loop()) chosen_at_head = false;
            entry_[chosen] = Step{offset, !chosen_at_head};
            offset += x.edge(chosen).length;
            v = x.edge(chosen).other(v);
            prev_edge = chosen;
        }
        length_ = offset;
    }

    const Rational& length() const { return length_; }

    // Coordinate in [0, length).
    Rational coordinate(const GraphPoint& p) const {
        if (p.is_vertex()) return vertex_offset_[p.index];
        const Step& st = entry_[p.index];
        const Rational& len = x_->edge(p.index).length;
        return st.offset + (st.forward ? p.pos : len - p.pos);
    }

    GraphPoint point_at(const Rational& theta) const {
        Rational t = mod_positive(theta, length_);
        for (std::size_t e = 0; e < x_->edge_count(); ++e) {
            const Step& st = entry_[e];
            const Rational& len = x_->edge(e).length;
            if (t >= st.offset && t < st.offset + len) {
                Rational local = t - st.offset;
                return x_->point(e, st.forward ? local : len - local);
            }
        }
        throw Error(ErrorCode::InvalidArgument, "coordinate outside the circle");
    }

private:
    struct Step {
        Rational offset;
        bool forward = true;
    };
    const MetricGraph* x_;
    std::vector<Step> entry_;
    std::vector<Rational> vertex_offset_;
    Rational length_;
};

}  // namespace dendrodyn

#endif  // DENDRODYN_GEODESIC_HPP
