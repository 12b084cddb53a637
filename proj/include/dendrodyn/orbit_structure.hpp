#ifndef DENDRODYN_ORBIT_STRUCTURE_HPP
#define DENDRODYN_ORBIT_STRUCTURE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dendrodyn/action.hpp"
#include "dendrodyn/minimal.hpp"

namespace dendrodyn {

struct PeriodicVerdict {
    bool pass = true;
    std::size_t checked = 0;
    std::optional<GraphPoint> witness;
    std::size_t witness_orbit_size = 0;
};

inline PeriodicVerdict pointwise_periodic_test(Resolution& res, const std::vector<GraphPoint>& seeds) {
    PeriodicVerdict v;
    for (const auto& s : seeds) {
        ++v.checked;
        const OrbitResult& o = res.orbit(s);
        if (!o.finite()) {
            v.pass = false;
            v.witness = s;
            v.witness_orbit_size = o.points.size();
            return v;
        }
    }
    return v;
}

inline PeriodicVerdict pointwise_periodic_test(const GroupAction& a, const std::vector<GraphPoint>& seeds,
                                               std::size_t max_word) {
    PeriodicVerdict v;
    for (const auto& s : seeds) {
        ++v.checked;
        OrbitResult o = orbit_bfs(a, s, max_word);
        if (!o.finite()) {
            v.pass = false;
            v.witness = s;
            v.witness_orbit_size = o.points.size();
            return v;
        }
    }
    return v;
}

struct AlmostPeriodicVerdict {
    bool pass = true;
    std::size_t checked = 0;
    std::optional<GraphPoint> witness;          // seed whose orbit closure is not minimal
    std::optional<GraphPoint> closure_witness;  // point of that closure with a smaller closure
    std::optional<GraphPoint> missed;
};

inline AlmostPeriodicVerdict pointwise_ap_test(Resolution& res, const std::vector<GraphPoint>& seeds) {
    AlmostPeriodicVerdict v;
    for (const auto& s : seeds) {
        ++v.checked;
        ApproxMinimalResult r = approx_minimal(res, s);
        if (!r.minimal) {
            v.pass = false;
            v.witness = s;
            v.closure_witness = r.witness;
            v.missed = r.missed;
            return v;
        }
    }
    return v;
}

// Pairs (x, y) of net points with y in the eps-shadow of the orbit of x.
inline std::vector<std::pair<GraphPoint, GraphPoint>> relation_sample(Resolution& res) {
    std::vector<std::pair<GraphPoint, GraphPoint>> out;
    for (const auto& x : res.net())
        for (const auto& y : res.shadow(x)) out.push_back({x, y});
    return out;
}

struct RelationViolation {
    Rational epsilon;
    GraphPoint x;                                          // limit of the x_n
    GraphPoint y;                                          // constant second coordinate
    std::vector<std::pair<GraphPoint, GraphPoint>> sequence;  // (x_n, y) in R
    Word ray;                                              // the letter generating x_n
    Rational gap;                                          // distance from y to closure(G(x)) sample
};

struct RelationVerdict {
    bool pass = true;
    std::vector<Rational> schedule;
    std::vector<std::size_t> violations_per_scale;
    std::optional<RelationViolation> witness;  // at the finest scale
};

namespace detail {

inline GraphPoint nearest_net_point(const MetricGraph& x, const std::vector<GraphPoint>& net, const GraphPoint& p) {
    GraphPoint best = net.front();
    Rational bd = distance(x, p, best);
    for (const auto& q : net) {
        Rational d = distance(x, p, q);
        if (d < bd) {
            bd = d;
            best = q;
        }
    }
    return best;
}

}  // namespace detail

// Searches for sequences (x_n, y) in R converging to (l, y) with y outside
// closure(G(l)). x_n = s^n(y) along a single letter s, so y lies in the orbit
// of every x_n. A ray counts as convergent when its second half stays within
// eps of its last point; l is the net point nearest that last point.
inline RelationVerdict relation_closedness_test(const GroupAction& a, std::vector<Rational> schedule,
                                                std::size_t max_word) {
    if (schedule.empty()) throw Error(ErrorCode::InvalidArgument, "empty resolution schedule");
    std::sort(schedule.begin(), schedule.end(), std::greater<>());
    const MetricGraph& x = a.space();
    RelationVerdict v;
    v.schedule = schedule;
    for (std::size_t si = 0; si < schedule.size(); ++si) {
        const Rational& eps = schedule[si];
        const bool finest = si + 1 == schedule.size();
        Resolution res(a, eps, max_word);
        std::size_t count = 0;
        for (const auto& y : default_seeds(x, eps)) {
            for (std::size_t k = 0; k < a.letter_count(); ++k) {
                const Letter l = a.letter(k);
                std::vector<GraphPoint> ray{y};
                bool periodic = false;
                for (std::size_t n = 1; n <= max_word; ++n) {
                    GraphPoint nx = a.apply(l, ray.back());
                    if (std::find(ray.begin(), ray.end(), nx) != ray.end()) {
                        periodic = true;
                        break;
                    }
                    ray.push_back(nx);
                }
                if (periodic || ray.size() < 4) continue;
                const GraphPoint& tip = ray.back();
                bool cauchy = true;
                for (std::size_t n = ray.size() / 2; n < ray.size() && cauchy; ++n)
                    cauchy = distance(x, ray[n], tip) < eps;
                if (!cauchy) continue;
                const GraphPoint lim = detail::nearest_net_point(x, res.net(), tip);
                const auto& closure = res.shadow(lim);
                std::optional<Rational> gap;
                for (const auto& c : closure) {
                    Rational d = distance(x, y, c);
                    if (!gap || d < *gap) gap = d;
                }
                if (gap && *gap <= 2 * eps) continue;
                ++count;
                if (finest && !v.witness) {
                    RelationViolation w;
                    w.epsilon = eps;
                    w.x = lim;
                    w.y = y;
                    w.ray = {l};
                    w.gap = gap ? *gap : Rational(-1);
                    for (std::size_t n = 1; n < ray.size(); n *= 2) w.sequence.push_back({ray[n], y});
                    if (w.sequence.back().first != ray.back()) w.sequence.push_back({ray.back(), y});
                    v.witness = std::move(w);
                }
            }
        }
        v.violations_per_scale.push_back(count);
        if (finest && count > 0) v.pass = false;
    }
    return v;
}

struct NonEndpointVerdict {
    bool pass = true;
    std::size_t checked = 0;
    std::optional<GraphPoint> witness;
};

inline NonEndpointVerdict non_endpoint_orbit_test(Resolution& res, const std::vector<GraphPoint>& seeds) {
    const MetricGraph& x = res.action().space();
    if (classify_space(x) == SpaceKind::Circle)
        throw Error(ErrorCode::SpaceIsCircle,
                    "not applicable on a circle: there the action is minimal or every non-endpoint has a finite orbit");
    NonEndpointVerdict v;
    for (const auto& s : seeds) {
        if (s.is_vertex() && x.degree(s.index) == 1) continue;
        ++v.checked;
        if (!res.orbit(s).finite()) {
            v.pass = false;
            v.witness = s;
            return v;
        }
    }
    return v;
}

struct OrbitSpaceReport {
    PeriodicVerdict periodic;
    RelationVerdict relation;
    AlmostPeriodicVerdict almost_periodic;
    bool orbit_space_hausdorff = false;        // X/G
    bool orbit_class_space_hausdorff = false;  // X/G~
    bool consistent = false;
};

inline const char* const kCitePeriodicHausdorff = "pointwise periodic implies X/G Hausdorff";
inline const char* const kCiteCountableHausdorff =
    "countable G: X/G Hausdorff iff pointwise periodic";
inline const char* const kCiteClassHausdorff =
    "X/G~ Hausdorff iff R closed iff pointwise almost periodic";
inline const char* const kCiteRelation = "the orbit closure relation R is closed iff the action is pointwise almost periodic";
inline const char* const kCiteNonEndpoint = "on a local dendrite other than a circle, pointwise almost periodic iff every non-endpoint has a finite orbit";

inline OrbitSpaceReport orbit_space_hausdorff_verdict(Resolution& res, const std::vector<GraphPoint>& seeds,
                                                      const std::vector<Rational>& schedule) {
    OrbitSpaceReport r;
    r.periodic = pointwise_periodic_test(res, seeds);
    r.relation = relation_closedness_test(res.action(), schedule, res.max_word());
    r.almost_periodic = pointwise_ap_test(res, seeds);
    r.orbit_space_hausdorff = r.periodic.pass;
    r.orbit_class_space_hausdorff = r.almost_periodic.pass;
    r.consistent = r.relation.pass == r.almost_periodic.pass &&
                   (!r.periodic.pass || r.almost_periodic.pass);
    return r;
}

struct OrbitClass {
    GraphPoint representative;
    std::vector<GraphPoint> members;                  // seeds in the class
    std::vector<std::vector<GraphPoint>> orbits;      // distinct exact orbits, when finite
    std::vector<GraphPoint> closure;                  // exact orbit or its eps-shadow
    bool exact = false;
};

struct OrbitClassReport {
    std::vector<OrbitClass> classes;
    bool all_orbits_closed = true;
    bool relation_closed = true;
};

// Seeds grouped by their orbit closure: the exact orbit when it is a
// certified finite orbit not dense at this resolution, otherwise the
// eps-shadow.
inline OrbitClassReport orbit_class_report(Resolution& res, const std::vector<GraphPoint>& seeds) {
    OrbitClassReport rep;
    std::map<std::pair<bool, std::vector<GraphPoint>>, std::size_t> index;
    for (const auto& s : seeds) {
        const OrbitResult& o = res.orbit(s);
        const auto& shadow = res.shadow(s);
        const bool exact = o.finite() && !res.covers_net(shadow);
        if (!o.finite()) rep.all_orbits_closed = false;
        std::vector<GraphPoint> key = exact ? o.sorted() : shadow;
        auto [it, fresh] = index.emplace(std::make_pair(exact, key), rep.classes.size());
        if (fresh) rep.classes.push_back({s, {}, {}, key, exact});
        OrbitClass& c = rep.classes[it->second];
        c.members.push_back(s);
        if (o.finite()) {
            auto pts = o.sorted();
            if (std::find(c.orbits.begin(), c.orbits.end(), pts) == c.orbits.end()) c.orbits.push_back(pts);
        }
    }
    rep.relation_closed = relation_closedness_test(res.action(), {res.epsilon()}, res.max_word()).pass;
    return rep;
}

}  // namespace dendrodyn

#endif  // DENDRODYN_ORBIT_STRUCTURE_HPP
