#ifndef DENDRODYN_HOMEO_HPP
#define DENDRODYN_HOMEO_HPP

#include <algorithm>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dendrodyn/geodesic.hpp"
#include "dendrodyn/graph.hpp"
#include "dendrodyn/subgraph.hpp"

namespace dendrodyn {

using SpacePtr = std::shared_ptr<const MetricGraph>;

inline SpacePtr make_space(const GraphDescription& desc) {
    return std::make_shared<const MetricGraph>(build_space(desc));
}

// Domain [lo, hi] of one edge mapped affinely onto [image_lo, image_hi]
// (either order) of edge `target`.
struct AffinePiece {
    Rational lo;
    Rational hi;
    std::size_t target;
    Rational image_lo;
    Rational image_hi;

    Rational slope() const { return (image_hi - image_lo) / (hi - lo); }
    Rational eval(const Rational& t) const { return image_lo + (t - lo) * slope(); }

    friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

// Part of an image route: edge traversed from position `from` to `to`.
struct RouteSegment {
    std::size_t edge;
    Rational from;
    Rational to;
};

// Raw description of a homeomorphism: for every edge, interior cut positions
// and, per sub-edge, the image route traversed at constant speed.
struct EdgeMapSpec {
    std::vector<Rational> cuts;
    std::vector<std::vector<RouteSegment>> routes;
};

struct HomeoSpec {
    std::vector<EdgeMapSpec> edges;
};

// Piecewise-affine homeomorphism of a metric graph onto itself, in canonical
// form: every piece lands in a single edge and adjacent pieces with the same
// target and slope are merged.
class PLHomeo {
public:
    static PLHomeo identity(SpacePtr space) {
        std::vector<std::vector<AffinePiece>> pieces(space->edge_count());
        for (std::size_t e = 0; e < space->edge_count(); ++e)
            pieces[e].push_back({0, space->edge(e).length, e, 0, space->edge(e).length});
        return from_pieces(std::move(space), std::move(pieces));
    }

    static PLHomeo from_spec(SpacePtr space, const HomeoSpec& spec) {
        const MetricGraph& x = *space;
        if (spec.edges.size() != x.edge_count())
            throw Error(ErrorCode::InvalidArgument, "map must describe every edge");
        std::vector<std::vector<AffinePiece>> pieces(x.edge_count());
        for (std::size_t e = 0; e < x.edge_count(); ++e) {
            const EdgeMapSpec& em = spec.edges[e];
            const Rational& len = x.edge(e).length;
            std::vector<Rational> bounds{Rational(0)};
            for (const auto& c : em.cuts) {
                if (c <= bounds.back() || c >= len)
                    throw Error(ErrorCode::InvalidArgument,
                                "cuts on edge '" + x.edge(e).id + "' must increase inside the edge");
                bounds.push_back(c);
            }
            bounds.push_back(len);
            if (em.routes.size() + 1 != bounds.size())
                throw Error(ErrorCode::InvalidArgument,
                            "edge '" + x.edge(e).id + "' needs one route per sub-edge");
            for (std::size_t i = 0; i < em.routes.size(); ++i)
                expand_route(x, e, bounds[i], bounds[i + 1], em.routes[i], pieces[e]);
        }
        return from_pieces(std::move(space), std::move(pieces));
    }

    // Validates continuity, preservation of special points and bijectivity,
    // then canonicalizes.
    static PLHomeo from_pieces(SpacePtr space, std::vector<std::vector<AffinePiece>> pieces) {
        PLHomeo h;
        h.space_ = std::move(space);
        h.pieces_ = std::move(pieces);
        h.validate();
        h.canonicalize();
        return h;
    }

    const SpacePtr& space() const { return space_; }
    const std::vector<AffinePiece>& pieces(std::size_t e) const { return pieces_[e]; }
    const GraphPoint& vertex_image(std::size_t v) const { return vertex_images_[v]; }

    GraphPoint apply(const GraphPoint& p) const {
        if (p.is_vertex()) return vertex_images_[p.index];
        const auto& list = pieces_[p.index];
        auto it = std::upper_bound(list.begin(), list.end(), p.pos,
                                   [](const Rational& t, const AffinePiece& a) { return t < a.lo; });
        const AffinePiece& piece = *std::prev(it);
        return space_->point(piece.target, piece.eval(p.pos));
    }

    Subgraph image(const Subgraph& s) const {
        const MetricGraph& x = *space_;
        Subgraph out;
        for (std::size_t v : s.vertices()) out.add_point(x, vertex_images_[v]);
        for (const auto& [e, list] : s.intervals()) {
            for (const auto& iv : list) {
                if (iv.lo == iv.hi) {
                    out.add_point(x, apply(x.point(e, iv.lo)));
                    continue;
                }
                for (const auto& piece : pieces_[e]) {
                    Rational a = std::max(iv.lo, piece.lo);
                    Rational b = std::min(iv.hi, piece.hi);
                    if (a < b) out.add_interval(x, piece.target, piece.eval(a), piece.eval(b));
                }
            }
        }
        return out;
    }

    friend bool operator==(const PLHomeo& a, const PLHomeo& b) {
        return (a.space_ == b.space_ || *a.space_ == *b.space_) && a.pieces_ == b.pieces_ &&
               a.vertex_images_ == b.vertex_images_;
    }
    friend bool operator!=(const PLHomeo& a, const PLHomeo& b) { return !(a == b); }

private:
    PLHomeo() = default;

    static void expand_route(const MetricGraph& x, std::size_t e, const Rational& lo,
                             const Rational& hi, const std::vector<RouteSegment>& route,
                             std::vector<AffinePiece>& out) {
        const std::string where = "edge '" + x.edge(e).id + "'";
        if (route.empty()) throw Error(ErrorCode::InvalidArgument, "empty image route on " + where);
        Rational total = 0;
        for (std::size_t j = 0; j < route.size(); ++j) {
            const RouteSegment& seg = route[j];
            if (seg.edge >= x.edge_count())
                throw Error(ErrorCode::InvalidArgument, "route on " + where + " names a missing edge");
            const Rational& tlen = x.edge(seg.edge).length;
            if (seg.from < 0 || seg.from > tlen || seg.to < 0 || seg.to > tlen || seg.from == seg.to)
                throw Error(ErrorCode::InvalidArgument, "degenerate route segment on " + where);
            if (j > 0 && x.point(route[j - 1].edge, route[j - 1].to) != x.point(seg.edge, seg.from))
                throw Error(ErrorCode::Discontinuous, "image route on " + where + " is broken");
            total += abs_of(seg.to - seg.from);
        }
        Rational cursor = lo;
        for (std::size_t j = 0; j < route.size(); ++j) {
            const RouteSegment& seg = route[j];
            Rational next = j + 1 == route.size()
                                ? hi
                                : cursor + (hi - lo) * abs_of(seg.to - seg.from) / total;
            out.push_back({cursor, next, seg.edge, seg.from, seg.to});
            cursor = next;
        }
    }

    void validate() {
        const MetricGraph& x = *space_;
        if (pieces_.size() != x.edge_count())
            throw Error(ErrorCode::InvalidArgument, "map must describe every edge");
        for (std::size_t e = 0; e < x.edge_count(); ++e) {
            const auto& list = pieces_[e];
            const std::string where = "edge '" + x.edge(e).id + "'";
            if (list.empty() || list.front().lo != 0 || list.back().hi != x.edge(e).length)
                throw Error(ErrorCode::InvalidArgument, "pieces do not cover " + where);
            for (std::size_t i = 0; i < list.size(); ++i) {
                const AffinePiece& p = list[i];
                if (p.lo >= p.hi || p.target >= x.edge_count() || p.image_lo == p.image_hi)
                    throw Error(ErrorCode::InvalidArgument, "degenerate piece on " + where);
                const Rational& tlen = x.edge(p.target).length;
                if (std::min(p.image_lo, p.image_hi) < 0 || std::max(p.image_lo, p.image_hi) > tlen)
                    throw Error(ErrorCode::InvalidArgument, "piece image leaves its edge on " + where);
                if (i + 1 < list.size()) {
                    if (list[i + 1].lo != p.hi)
                        throw Error(ErrorCode::InvalidArgument, "pieces overlap or leave gaps on " + where);
                    if (x.point(p.target, p.image_hi) != x.point(list[i + 1].target, list[i + 1].image_lo))
                        throw Error(ErrorCode::Discontinuous,
                                    "image jumps at " + format_rational(p.hi) + " on " + where);
                }
            }
        }
        vertex_images_.assign(x.vertex_count(), GraphPoint{});
        for (std::size_t v = 0; v < x.vertex_count(); ++v) {
            std::optional<GraphPoint> img;
            for (const auto& inc : x.incidences(v)) {
                const auto& list = pieces_[inc.edge];
                GraphPoint end = inc.at_head ? x.point(list.back().target, list.back().image_hi)
                                             : x.point(list.front().target, list.front().image_lo);
                if (img && *img != end)
                    throw Error(ErrorCode::Discontinuous,
                                "incident edges disagree on the image of vertex '" + x.vertex_name(v) + "'");
                img = end;
            }
            vertex_images_[v] = img ? *img : x.vertex_point(v);
        }
        for (std::size_t v = 0; v < x.vertex_count(); ++v) {
            if (x.degree(v) == 2) continue;
            const GraphPoint& img = vertex_images_[v];
            if (!img.is_vertex() || x.degree(img.index) != x.degree(v))
                throw Error(ErrorCode::SpecialPointViolation,
                            std::string(x.degree(v) == 1 ? "endpoint" : "branch point") + " '" +
                                x.vertex_name(v) + "' is sent to " + describe_point(x, img));
        }
        std::vector<std::vector<Interval>> cover(x.edge_count());
        for (const auto& list : pieces_)
            for (const auto& p : list)
                cover[p.target].push_back({std::min(p.image_lo, p.image_hi), std::max(p.image_lo, p.image_hi)});
        for (std::size_t f = 0; f < x.edge_count(); ++f) {
            auto& c = cover[f];
            std::sort(c.begin(), c.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
            Rational cur = 0;
            for (const auto& iv : c) {
                if (iv.lo != cur)
                    throw Error(ErrorCode::NotBijective,
                                "edge '" + x.edge(f).id + "' is not covered exactly once");
                cur = iv.hi;
            }
            if (cur != x.edge(f).length)
                throw Error(ErrorCode::NotBijective, "edge '" + x.edge(f).id + "' is not covered");
        }
        std::set<GraphPoint> node_images(vertex_images_.begin(), vertex_images_.end());
        std::size_t nodes = vertex_images_.size();
        for (const auto& list : pieces_)
            for (std::size_t i = 0; i + 1 < list.size(); ++i) {
                node_images.insert(x.point(list[i].target, list[i].image_hi));
                ++nodes;
            }
        if (node_images.size() != nodes)
            throw Error(ErrorCode::NotBijective, "two distinct points share an image");
    }

    void canonicalize() {
        for (auto& list : pieces_) {
            std::vector<AffinePiece> merged;
            for (const auto& p : list) {
                if (!merged.empty()) {
                    AffinePiece& b = merged.back();
                    if (b.target == p.target && b.image_hi == p.image_lo && b.slope() == p.slope()) {
                        b.hi = p.hi;
                        b.image_hi = p.image_hi;
                        continue;
                    }
                }
                merged.push_back(p);
            }
            list = std::move(merged);
        }
    }

    SpacePtr space_;
    std::vector<std::vector<AffinePiece>> pieces_;
    std::vector<GraphPoint> vertex_images_;
};

inline PLHomeo validate_homeo(SpacePtr space, const HomeoSpec& spec) {
    return PLHomeo::from_spec(std::move(space), spec);
}

inline GraphPoint apply(const PLHomeo& h, const GraphPoint& p) { return h.apply(p); }

inline void require_same_space(const PLHomeo& a, const PLHomeo& b) {
    if (a.space() != b.space() && *a.space() != *b.space())
        throw Error(ErrorCode::SpaceMismatch, "maps act on different spaces");
}

// outer after inner. Cut points of `outer` are pulled back through `inner`.
inline PLHomeo compose(const PLHomeo& outer, const PLHomeo& inner) {
    require_same_space(outer, inner);
    const MetricGraph& x = *inner.space();
    std::vector<std::vector<AffinePiece>> out(x.edge_count());
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        for (const auto& p : inner.pieces(e)) {
            const Rational lo_img = std::min(p.image_lo, p.image_hi);
            const Rational hi_img = std::max(p.image_lo, p.image_hi);
            auto pull = [&](const Rational& y) {
                return p.lo + (y - p.image_lo) * (p.hi - p.lo) / (p.image_hi - p.image_lo);
            };
            for (const auto& q : outer.pieces(p.target)) {
                if (!(q.lo < hi_img && q.hi > lo_img)) continue;
                Rational u = std::max(q.lo, lo_img);
                Rational w = std::min(q.hi, hi_img);
                Rational su = pull(u);
                Rational sw = pull(w);
                if (su < sw)
                    out[e].push_back({su, sw, q.target, q.eval(u), q.eval(w)});
                else
                    out[e].push_back({sw, su, q.target, q.eval(w), q.eval(u)});
            }
        }
        std::sort(out[e].begin(), out[e].end(),
                  [](const AffinePiece& a, const AffinePiece& b) { return a.lo < b.lo; });
    }
    return PLHomeo::from_pieces(inner.space(), std::move(out));
}

inline PLHomeo invert(const PLHomeo& h) {
    const MetricGraph& x = *h.space();
    std::vector<std::vector<AffinePiece>> out(x.edge_count());
    for (std::size_t e = 0; e < x.edge_count(); ++e)
        for (const auto& p : h.pieces(e)) {
            if (p.image_lo < p.image_hi)
                out[p.target].push_back({p.image_lo, p.image_hi, e, p.lo, p.hi});
            else
                out[p.target].push_back({p.image_hi, p.image_lo, e, p.hi, p.lo});
        }
    for (auto& list : out)
        std::sort(list.begin(), list.end(),
                  [](const AffinePiece& a, const AffinePiece& b) { return a.lo < b.lo; });
    return PLHomeo::from_pieces(h.space(), std::move(out));
}

enum class Orientation { Preserving, Reversing };

inline const char* orientation_name(Orientation o) {
    return o == Orientation::Preserving ? "Preserving" : "Reversing";
}

// Cyclic order of the images of three points at thirds of the circle.
inline Orientation circle_orientation(const PLHomeo& h) {
    const CircleChart chart(*h.space());
    const Rational& len = chart.length();
    std::vector<Rational> img;
    for (int k = 0; k < 3; ++k) img.push_back(chart.coordinate(h.apply(chart.point_at(len * k / 3))));
    const Rational d1 = mod_positive(img[1] - img[0], len);
    const Rational d2 = mod_positive(img[2] - img[0], len);
    return d1 < d2 ? Orientation::Preserving : Orientation::Reversing;
}

}  // namespace dendrodyn

#endif  // DENDRODYN_HOMEO_HPP
