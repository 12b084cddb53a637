#ifndef DENDRODYN_HYPERSPACE_HPP
#define DENDRODYN_HYPERSPACE_HPP

#include <algorithm>
#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "dendrodyn/action.hpp"
#include "dendrodyn/geodesic.hpp"
#include "dendrodyn/minimal.hpp"

namespace dendrodyn {

// Finite sample of a closed set; resolution 0 marks an exact finite set.
struct ClosedSetSample {
    std::vector<GraphPoint> points;  // sorted, distinct
    Rational resolution = 0;

    static ClosedSetSample of(std::vector<GraphPoint> pts, Rational resolution = 0) {
        if (pts.empty()) throw Error(ErrorCode::EmptySet, "closed set sample is empty");
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return {std::move(pts), std::move(resolution)};
    }

    friend bool operator==(const ClosedSetSample& a, const ClosedSetSample& b) { return a.points == b.points; }
};

namespace detail {

// sup over a in A of d(a, B), stopping the inner scan once it cannot matter.
inline Rational directed_hausdorff(const MetricGraph& x, const std::vector<GraphPoint>& a,
                                   const std::vector<GraphPoint>& b, Rational current) {
    for (const auto& p : a) {
        std::optional<Rational> inner;
        for (const auto& q : b) {
            Rational d = distance(x, p, q);
            if (!inner || d < *inner) inner = d;
            if (*inner <= current) break;
        }
        if (*inner > current) current = *inner;
    }
    return current;
}

}  // namespace detail

inline Rational hausdorff_distance(const MetricGraph& x, const std::vector<GraphPoint>& a,
                                   const std::vector<GraphPoint>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySet, "Hausdorff distance of an empty set");
    Rational h = detail::directed_hausdorff(x, a, b, Rational(0));
    return detail::directed_hausdorff(x, b, a, h);
}

inline Rational hausdorff_distance(const MetricGraph& x, const ClosedSetSample& a, const ClosedSetSample& b) {
    return hausdorff_distance(x, a.points, b.points);
}

// Single-linkage clusters at distance <= link; each cluster is replaced by
// the midpoint of the shortest arc between its two farthest points.
inline std::vector<GraphPoint> cluster_centers(const MetricGraph& x, const std::vector<GraphPoint>& pts,
                                               const Rational& link) {
    detail::UnionFind uf(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (distance(x, pts[i], pts[j]) <= link) uf.unite(i, j);
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i) groups[uf.find(i)].push_back(i);
    std::vector<GraphPoint> out;
    for (const auto& [root, members] : groups) {
        std::size_t bi = members.front();
        std::size_t bj = members.front();
        Rational best = -1;
        for (std::size_t i : members)
            for (std::size_t j : members) {
                Rational d = distance(x, pts[i], pts[j]);
                if (d > best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        if (bi == bj) {
            out.push_back(pts[bi]);
            continue;
        }
        const ArcPath arc = arc_between(x, pts[bi], pts[bj]);
        out.push_back(point_along(x, arc, arc.length / 2));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct SequenceLimit {
    bool converged = false;
    std::optional<ClosedSetSample> limit;
    std::size_t tail_start = 0;
    std::optional<std::size_t> violating_index;
    std::vector<Rational> consecutive;  // d_H(S_m, S_{m+1})
};

// Convergent when a tail of at least two sets stays within tol of the last
// set with non-increasing consecutive distances. The limit is the last set
// with clusters tighter than 2 tol collapsed to their centers, provided that
// stays within tol of the last set; otherwise the last set itself.
inline SequenceLimit sequence_limit(const MetricGraph& x, const std::vector<ClosedSetSample>& sets,
                                    const Rational& tol) {
    if (sets.size() < 2) throw Error(ErrorCode::InvalidArgument, "sequence needs at least two sets");
    SequenceLimit r;
    for (std::size_t m = 0; m + 1 < sets.size(); ++m)
        r.consecutive.push_back(hausdorff_distance(x, sets[m], sets[m + 1]));
    const std::size_t last = sets.size() - 1;
    std::size_t start = last;
    while (start > 0) {
        const std::size_t m = start - 1;
        if (hausdorff_distance(x, sets[m], sets[last]) > tol) break;
        if (m + 1 < last && r.consecutive[m] < r.consecutive[m + 1]) break;
        start = m;
    }
    r.tail_start = start;
    if (last - start + 1 < 2) {
        r.violating_index = start == 0 ? 0 : start - 1;
        return r;
    }
    r.converged = true;
    const auto& final_pts = sets[last].points;
    auto centers = cluster_centers(x, final_pts, 2 * tol);
    if (hausdorff_distance(x, centers, final_pts) <= tol)
        r.limit = ClosedSetSample::of(std::move(centers), tol);
    else
        r.limit = ClosedSetSample::of(final_pts, tol);
    return r;
}

struct FamilyLimitCheck {
    bool pass = false;
    std::optional<ClosedSetSample> limit;
    std::optional<OrbitResult> limit_orbit;
    Rational distance_to_last = 0;
    std::string limit_source;  // "clusters" or "last-set"
    std::string note;
};

// The Hausdorff limit of a family of certified finite orbits must itself be
// a certified finite orbit (a minimal set) within tol of the family's tail.
inline FamilyLimitCheck minimal_family_limit_check(const GroupAction& a,
                                                   const std::vector<std::vector<GraphPoint>>& family,
                                                   const Rational& tol, std::size_t max_word) {
    const MetricGraph& x = a.space();
    std::vector<ClosedSetSample> sets;
    for (const auto& m : family) {
        auto s = ClosedSetSample::of(m);
        if (!is_invariant(a, s.points))
            throw Error(ErrorCode::InvalidArgument, "family member is not an invariant finite set");
        sets.push_back(std::move(s));
    }
    if (sets.size() < 2) sets.push_back(sets.front());
    SequenceLimit sl = sequence_limit(x, sets, tol);
    if (!sl.converged)
        throw Error(ErrorCode::NoLimit, "family does not converge at tolerance " + format_rational(tol));
    FamilyLimitCheck out;
    const auto& last = sets.back().points;
    auto attempt = [&](const std::vector<GraphPoint>& candidate, const char* source) {
        OrbitResult o = orbit_bfs(a, candidate.front(), max_word);
        if (!o.finite()) return false;
        auto pts = o.sorted();
        for (const auto& c : candidate)
            if (!std::binary_search(pts.begin(), pts.end(), c)) return false;
        Rational d = hausdorff_distance(x, pts, last);
        if (d > tol) return false;
        out.pass = true;
        out.limit = ClosedSetSample::of(pts, tol);
        out.limit_orbit = std::move(o);
        out.distance_to_last = d;
        out.limit_source = source;
        return true;
    };
    if (attempt(sl.limit->points, "clusters")) return out;
    if (attempt(last, "last-set")) {
        out.note = "cluster centers are not a single finite orbit; the last set is used";
        return out;
    }
    out.note = "limit is not a certified finite orbit";
    out.limit = sl.limit;
    return out;
}

struct UnionClosedCheck {
    bool pass = true;
    std::size_t union_size = 0;
    std::size_t orbits = 0;
    std::size_t accumulation_points = 0;
    std::optional<GraphPoint> witness;
    std::string note;
};

// U = union of the certified finite orbits through the seeds. Every net point
// near which U accumulates (two points of U closer than eps) must lie within
// 2 eps of U and be a point of some minimal set at this resolution.
inline UnionClosedCheck union_minimal_closed_check(Resolution& res, const std::vector<GraphPoint>& seeds) {
    const GroupAction& a = res.action();
    const MetricGraph& x = a.space();
    const Rational& eps = res.epsilon();
    UnionClosedCheck out;
    std::vector<GraphPoint> u;
    for (const auto& d : find_finite_orbits(a, seeds, res.max_word())) {
        ++out.orbits;
        u.insert(u.end(), d.support.begin(), d.support.end());
    }
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    out.union_size = u.size();
    std::map<GraphPoint, std::size_t> close;
    for (const auto& p : u) {
        std::set<GraphPoint> near;
        res.index().for_each_near(p, eps, [&](const GraphPoint& q) { near.insert(q); });
        for (const auto& q : near) ++close[q];
    }
    for (const auto& q : res.net()) {
        auto it = close.find(q);
        if (it == close.end() || it->second < 2) continue;
        ++out.accumulation_points;
        // two points of U lie within eps, so q is within 2 eps of U
        bool ok = std::binary_search(u.begin(), u.end(), q) || approx_minimal(res, q).minimal;
        if (!ok) {
            out.pass = false;
            out.witness = q;
            out.note = "union of minimal sets accumulates at a point outside every minimal set";
            return out;
        }
    }
    return out;
}

}  // namespace dendrodyn

#endif  // DENDRODYN_HYPERSPACE_HPP
