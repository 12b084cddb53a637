#ifndef DENDRODYN_ACTION_HPP
#define DENDRODYN_ACTION_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dendrodyn/geodesic.hpp"
#include "dendrodyn/homeo.hpp"

namespace dendrodyn {

struct Letter {
    std::size_t gen = 0;
    bool inverse = false;

    friend bool operator==(const Letter&, const Letter&) = default;
};

// w = w[0] w[1] ... w[k-1] acts as w[0] after w[1] after ... after w[k-1].
using Word = std::vector<Letter>;

// Finitely generated group of PL homeomorphisms, kept as generators only.
class GroupAction {
public:
    GroupAction(SpacePtr space, std::vector<PLHomeo> generators, std::vector<std::string> names = {})
        : space_(std::move(space)), generators_(std::move(generators)), names_(std::move(names)) {
        if (generators_.empty()) throw Error(ErrorCode::InvalidArgument, "action needs a generator");
        if (names_.empty())
            for (std::size_t i = 0; i < generators_.size(); ++i) names_.push_back("g" + std::to_string(i));
        if (names_.size() != generators_.size())
            throw Error(ErrorCode::InvalidArgument, "one name per generator");
        for (const auto& g : generators_) {
            if (g.space() != space_ && *g.space() != *space_)
                throw Error(ErrorCode::SpaceMismatch, "generator acts on another space");
            inverses_.push_back(invert(g));
        }
    }

    const MetricGraph& space() const { return *space_; }
    const SpacePtr& space_ptr() const { return space_; }
    std::size_t generator_count() const { return generators_.size(); }
    const PLHomeo& generator(std::size_t i) const { return generators_[i]; }
    const std::vector<PLHomeo>& generators() const { return generators_; }
    const std::string& name(std::size_t i) const { return names_[i]; }
    const std::vector<std::string>& names() const { return names_; }

    // Letters in fixed order: every generator, then every inverse.
    std::size_t letter_count() const { return 2 * generators_.size(); }
    Letter letter(std::size_t k) const {
        const std::size_t n = generators_.size();
        return k < n ? Letter{k, false} : Letter{k - n, true};
    }
    const PLHomeo& map(const Letter& l) const { return l.inverse ? inverses_[l.gen] : generators_[l.gen]; }

    GraphPoint apply(const Letter& l, const GraphPoint& p) const { return map(l).apply(p); }

    GraphPoint apply(const Word& w, GraphPoint p) const {
        for (auto it = w.rbegin(); it != w.rend(); ++it) p = apply(*it, p);
        return p;
    }

    PLHomeo element(const Word& w) const {
        PLHomeo h = PLHomeo::identity(space_);
        for (const auto& l : w) h = compose(h, map(l));
        return h;
    }

    std::string word_to_string(const Word& w) const {
        if (w.empty()) return "id";
        std::string s;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) s += "*";
            s += names_[w[i].gen];
            if (w[i].inverse) s += "^-1";
        }
        return s;
    }

private:
    SpacePtr space_;
    std::vector<PLHomeo> generators_;
    std::vector<PLHomeo> inverses_;
    std::vector<std::string> names_;
};

enum class OrbitStatus { FiniteClosed, OpenAtBound };

inline const char* orbit_status_name(OrbitStatus s) {
    return s == OrbitStatus::FiniteClosed ? "FiniteClosed" : "OpenAtBound";
}

struct OrbitResult {
    std::vector<GraphPoint> points;  // discovery order; points[0] is the seed
    OrbitStatus status = OrbitStatus::OpenAtBound;
    std::size_t word_bound = 0;
    std::vector<std::size_t> parent;  // npos for the seed
    std::vector<Letter> via;          // letter applied to the parent
    std::vector<std::size_t> depth;

    bool finite() const { return status == OrbitStatus::FiniteClosed; }

    std::vector<GraphPoint> sorted() const {
        std::vector<GraphPoint> s = points;
        std::sort(s.begin(), s.end());
        return s;
    }

    bool contains(const GraphPoint& p) const {
        return std::find(points.begin(), points.end(), p) != points.end();
    }

    // Word w with w(seed) = points[i].
    Word word_to(std::size_t i) const {
        Word w;
        while (parent[i] != npos) {
            w.push_back(via[i]);
            i = parent[i];
        }
        return w;
    }
};

// Layered closure of {x} under generators and inverses. FiniteClosed is
// certified: every point's images under every letter lie in the set.
inline OrbitResult orbit_bfs(const GroupAction& a, const GraphPoint& x, std::size_t max_word) {
    if (max_word < 1) throw Error(ErrorCode::InvalidArgument, "word bound must be at least 1");
    OrbitResult r;
    r.word_bound = max_word;
    std::map<GraphPoint, std::size_t> seen;
    r.points.push_back(x);
    r.parent.push_back(npos);
    r.via.push_back({});
    r.depth.push_back(0);
    seen.emplace(x, 0);
    std::vector<std::size_t> layer{0};
    for (std::size_t d = 1;; ++d) {
        std::vector<std::size_t> next;
        bool grew = false;
        for (std::size_t i : layer) {
            for (std::size_t k = 0; k < a.letter_count(); ++k) {
                const Letter l = a.letter(k);
                GraphPoint y = a.apply(l, r.points[i]);
                if (seen.count(y)) continue;
                grew = true;
                if (d > max_word) break;
                seen.emplace(y, r.points.size());
                next.push_back(r.points.size());
                r.points.push_back(y);
                r.parent.push_back(i);
                r.via.push_back(l);
                r.depth.push_back(d);
            }
            if (grew && d > max_word) break;
        }
        if (!grew) {
            r.status = OrbitStatus::FiniteClosed;
            return r;
        }
        if (d > max_word) {
            r.status = OrbitStatus::OpenAtBound;
            return r;
        }
        layer = std::move(next);
    }
}

// Net organized per edge so that the points within eps of a given point are
// found by range queries instead of a full scan.
class NetIndex {
public:
    NetIndex(const MetricGraph& x, const std::vector<GraphPoint>& net) : x_(&x), on_edge_(x.edge_count()) {
        for (const auto& p : net) {
            if (p.is_vertex())
                vertices_.push_back(p.index);
            else
                on_edge_[p.index].push_back(p.pos);
        }
        for (auto& list : on_edge_) std::sort(list.begin(), list.end());
    }

    // Calls f on every net point strictly closer than eps to p (a point may
    // be reported more than once).
    template <class F>
    void for_each_near(const GraphPoint& p, const Rational& eps, F&& f) const {
        const auto dv = x_->distances_to_vertices(p);
        for (std::size_t v : vertices_)
            if (dv[v] < eps) f(x_->vertex_point(v));
        for (std::size_t e = 0; e < x_->edge_count(); ++e) {
            const auto& list = on_edge_[e];
            if (list.empty()) continue;
            const Edge& ed = x_->edge(e);
            auto emit = [&](const Rational& lo, const Rational& hi) {
                // open range (lo, hi)
                if (!(lo < hi)) return;
                auto it = std::upper_bound(list.begin(), list.end(), lo);
                for (; it != list.end() && *it < hi; ++it) f(GraphPoint{GraphPoint::Kind::Edge, e, *it});
            };
            if (dv[ed.tail] < eps) emit(Rational(-1), eps - dv[ed.tail]);
            if (dv[ed.head] < eps) emit(ed.length - (eps - dv[ed.head]), ed.length + 1);
            if (!p.is_vertex() && p.index == e) emit(p.pos - eps, p.pos + eps);
        }
    }

private:
    const MetricGraph* x_;
    std::vector<std::size_t> vertices_;
    std::vector<std::vector<Rational>> on_edge_;
};

inline std::vector<GraphPoint> epsilon_shadow(const NetIndex& index, const std::vector<GraphPoint>& pts,
                                              const Rational& eps) {
    std::set<GraphPoint> out;
    for (const auto& p : pts) index.for_each_near(p, eps, [&](const GraphPoint& q) { out.insert(q); });
    return {out.begin(), out.end()};
}

// Net points strictly closer than eps to some point of pts, sorted.
inline std::vector<GraphPoint> epsilon_shadow(const MetricGraph& x, const std::vector<GraphPoint>& net,
                                              const std::vector<GraphPoint>& pts, const Rational& eps) {
    return epsilon_shadow(NetIndex(x, net), pts, eps);
}

inline std::vector<GraphPoint> orbit_epsilon_closure(const GroupAction& a, const GraphPoint& x,
                                                     const Rational& eps, std::size_t max_word) {
    const auto net = epsilon_net(a.space(), eps);
    return epsilon_shadow(a.space(), net, orbit_bfs(a, x, max_word).points, eps);
}

// Vertices, then edge midpoints, then the remaining points of the eps-net.
inline std::vector<GraphPoint> default_seeds(const MetricGraph& x, const Rational& eps) {
    std::vector<GraphPoint> out;
    std::set<GraphPoint> have;
    auto push = [&](const GraphPoint& p) {
        if (have.insert(p).second) out.push_back(p);
    };
    for (std::size_t v = 0; v < x.vertex_count(); ++v) push(x.vertex_point(v));
    for (std::size_t e = 0; e < x.edge_count(); ++e) push(x.point(e, x.edge(e).length / 2));
    for (const auto& p : epsilon_net(x, eps)) push(p);
    return out;
}

inline bool is_subset(const std::vector<GraphPoint>& sub, const std::vector<GraphPoint>& super_sorted) {
    for (const auto& p : sub)
        if (!std::binary_search(super_sorted.begin(), super_sorted.end(), p)) return false;
    return true;
}

// Shared resolution context: the eps-net and memoized orbits and shadows.
class Resolution {
public:
    Resolution(const GroupAction& a, Rational eps, std::size_t max_word)
        : action_(&a),
          eps_(std::move(eps)),
          max_word_(max_word),
          net_(epsilon_net(a.space(), eps_)),
          index_(a.space(), net_) {
        net_sorted_ = net_;
        std::sort(net_sorted_.begin(), net_sorted_.end());
    }

    const GroupAction& action() const { return *action_; }
    const Rational& epsilon() const { return eps_; }
    std::size_t max_word() const { return max_word_; }
    const std::vector<GraphPoint>& net() const { return net_; }
    const std::vector<GraphPoint>& net_sorted() const { return net_sorted_; }
    const NetIndex& index() const { return index_; }

    const OrbitResult& orbit(const GraphPoint& p) {
        auto it = orbits_.find(p);
        if (it != orbits_.end()) return it->second;
        return orbits_.emplace(p, orbit_bfs(*action_, p, max_word_)).first->second;
    }

    // Sorted eps-shadow of the explored orbit of p.
    const std::vector<GraphPoint>& shadow(const GraphPoint& p) {
        auto it = shadows_.find(p);
        if (it != shadows_.end()) return it->second;
        const OrbitResult& o = orbit(p);
        std::vector<GraphPoint> s = shadow_of(o.points);
        if (o.finite())
            for (const auto& q : o.points) shadows_.emplace(q, s);
        return shadows_.emplace(p, std::move(s)).first->second;
    }

    std::vector<GraphPoint> shadow_of(const std::vector<GraphPoint>& pts) const {
        return epsilon_shadow(index_, pts, eps_);
    }

    bool covers_net(const std::vector<GraphPoint>& shadow_sorted) const {
        return shadow_sorted.size() == net_sorted_.size();
    }

private:
    const GroupAction* action_;
    Rational eps_;
    std::size_t max_word_;
    std::vector<GraphPoint> net_;
    NetIndex index_;
    std::vector<GraphPoint> net_sorted_;
    std::map<GraphPoint, OrbitResult> orbits_;
    std::map<GraphPoint, std::vector<GraphPoint>> shadows_;
};

}  // namespace dendrodyn

#endif  // DENDRODYN_ACTION_HPP
