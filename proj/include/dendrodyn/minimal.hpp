#ifndef DENDRODYN_MINIMAL_HPP
#define DENDRODYN_MINIMAL_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dendrodyn/action.hpp"
#include "dendrodyn/subgraph.hpp"

namespace dendrodyn {

enum class MinimalKind { FiniteOrbit, WholeSpace, CircleSupport, CantorApprox };

inline const char* minimal_kind_name(MinimalKind k) {
    switch (k) {
        case MinimalKind::FiniteOrbit: return "FiniteOrbit";
        case MinimalKind::WholeSpace: return "WholeSpace";
        case MinimalKind::CircleSupport: return "CircleSupport";
        case MinimalKind::CantorApprox: return "CantorApprox";
    }
    return "?";
}

struct Certificate {
    std::size_t word_bound = 0;
    std::optional<Rational> epsilon;
    std::vector<std::string> notes;
};

struct MinimalSetDescriptor {
    std::vector<GraphPoint> support;  // sorted
    MinimalKind kind = MinimalKind::FiniteOrbit;
    Certificate certificate;
    std::optional<std::size_t> cardinality;  // finite orbits only
};

inline bool is_invariant(const GroupAction& a, const std::vector<GraphPoint>& sorted_set) {
    for (const auto& g : a.generators())
        for (const auto& p : sorted_set)
            if (!std::binary_search(sorted_set.begin(), sorted_set.end(), g.apply(p))) return false;
    return true;
}

// Certified finite orbits through the seeds, deduplicated, in seed order.
inline std::vector<MinimalSetDescriptor> find_finite_orbits(const GroupAction& a,
                                                           const std::vector<GraphPoint>& seeds,
                                                           std::size_t max_word) {
    std::vector<MinimalSetDescriptor> out;
    std::set<GraphPoint> covered;
    for (const auto& s : seeds) {
        if (covered.count(s)) continue;
        OrbitResult o = orbit_bfs(a, s, max_word);
        if (!o.finite()) continue;
        MinimalSetDescriptor d;
        d.support = o.sorted();
        d.kind = MinimalKind::FiniteOrbit;
        d.cardinality = d.support.size();
        d.certificate.word_bound = max_word;
        d.certificate.notes.push_back("orbit closed under every generator and inverse");
        covered.insert(d.support.begin(), d.support.end());
        out.push_back(std::move(d));
    }
    return out;
}

struct ClassifyOptions {
    // When false the exact invariance test is skipped (synthetic samples).
    bool check_invariance = true;
};

namespace detail {

// Net cells: consecutive net positions along each edge.
struct NetCell {
    std::size_t edge;
    Rational lo, hi;
    GraphPoint p, q;
};

inline std::vector<NetCell> net_cells(const MetricGraph& x, const std::vector<GraphPoint>& net) {
    std::vector<std::vector<Rational>> along(x.edge_count());
    for (std::size_t e = 0; e < x.edge_count(); ++e) along[e] = {Rational(0), x.edge(e).length};
    for (const auto& p : net)
        if (!p.is_vertex()) along[p.index].push_back(p.pos);
    std::vector<NetCell> cells;
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        auto& pos = along[e];
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
        for (std::size_t i = 0; i + 1 < pos.size(); ++i)
            cells.push_back({e, pos[i], pos[i + 1], x.point(e, pos[i]), x.point(e, pos[i + 1])});
    }
    return cells;
}

// Cells with both ends in the shadow form one cycle covering the shadow.
inline bool shadow_is_cycle(const MetricGraph& x, const std::vector<GraphPoint>& net,
                            const std::vector<GraphPoint>& shadow_sorted) {
    if (shadow_sorted.empty()) return false;
    auto in = [&](const GraphPoint& p) {
        return std::binary_search(shadow_sorted.begin(), shadow_sorted.end(), p);
    };
    std::map<GraphPoint, std::size_t> node;
    for (std::size_t i = 0; i < shadow_sorted.size(); ++i) node[shadow_sorted[i]] = i;
    std::vector<std::size_t> degree(shadow_sorted.size(), 0);
    UnionFind uf(shadow_sorted.size());
    std::size_t cells = 0;
    for (const auto& c : net_cells(x, net)) {
        if (!in(c.p) || !in(c.q)) continue;
        ++cells;
        ++degree[node[c.p]];
        ++degree[node[c.q]];
        uf.unite(node[c.p], node[c.q]);
    }
    if (cells != shadow_sorted.size()) return false;
    for (std::size_t i = 0; i < degree.size(); ++i)
        if (degree[i] != 2 || uf.find(i) != uf.find(0)) return false;
    return true;
}

// Every point has another point within 3 eps.
inline bool eps_perfect(const MetricGraph& x, const std::vector<GraphPoint>& s, const Rational& eps) {
    if (s.size() < 2) return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        bool ok = false;
        for (std::size_t j = 0; j < s.size() && !ok; ++j) ok = i != j && distance(x, s[i], s[j]) <= 3 * eps;
        if (!ok) return false;
    }
    return true;
}

// Every net cell, split into 8 sub-cells, has one sub-cell free of s.
inline bool eps_nowhere_dense(const MetricGraph& x, const std::vector<GraphPoint>& net,
                              const std::vector<GraphPoint>& s) {
    std::map<std::size_t, std::vector<Rational>> on_edge;
    std::set<std::size_t> at_vertex;
    for (const auto& p : s) {
        if (p.is_vertex())
            at_vertex.insert(p.index);
        else
            on_edge[p.index].push_back(p.pos);
    }
    for (const auto& c : net_cells(x, net)) {
        const std::size_t edge = c.edge;
        const Rational& lo = c.lo;
        const Rational& hi = c.hi;
        bool free_found = false;
        for (int k = 0; k < 8 && !free_found; ++k) {
            Rational a = lo + (hi - lo) * k / 8;
            Rational b = lo + (hi - lo) * (k + 1) / 8;
            bool hit = (a == 0 && at_vertex.count(x.edge(edge).tail)) ||
                       (b == x.edge(edge).length && at_vertex.count(x.edge(edge).head));
            auto it = on_edge.find(edge);
            if (!hit && it != on_edge.end())
                for (const auto& t : it->second)
                    if (a <= t && t <= b) {
                        hit = true;
                        break;
                    }
            free_found = !hit;
        }
        if (!free_found) return false;
    }
    return true;
}

}  // namespace detail

// Kind of a certified (or resolution-certified) minimal set with support s.
// A finite invariant set whose eps-shadow covers the whole net is reported as
// WholeSpace: at this resolution it is indistinguishable from a dense orbit.
// The eps-net and its index are supplied by the caller.
inline MinimalKind classify_minimal(const GroupAction& a, const std::vector<GraphPoint>& support,
                                    const Rational& eps, const std::vector<GraphPoint>& net, const NetIndex& index,
                                    ClassifyOptions opts = {}) {
    const MetricGraph& x = a.space();
    if (support.empty()) throw Error(ErrorCode::EmptySet, "empty support");
    std::vector<GraphPoint> s = support;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    const auto shadow = epsilon_shadow(index, s, eps);
    const bool covers = shadow.size() == net.size();
    if (opts.check_invariance && is_invariant(a, s)) return covers ? MinimalKind::WholeSpace : MinimalKind::FiniteOrbit;
    if (covers) return MinimalKind::WholeSpace;
    if (detail::shadow_is_cycle(x, net, shadow)) return MinimalKind::CircleSupport;
    if (detail::eps_perfect(x, s, eps) && detail::eps_nowhere_dense(x, net, s)) return MinimalKind::CantorApprox;
    throw Error(ErrorCode::Unclassified, "support is neither finite, a cycle nor Cantor-like at eps " +
                                             format_rational(eps));
}

inline MinimalKind classify_minimal(const GroupAction& a, const std::vector<GraphPoint>& support,
                                    const Rational& eps, ClassifyOptions opts = {}) {
    const auto net = epsilon_net(a.space(), eps);
    return classify_minimal(a, support, eps, net, NetIndex(a.space(), net), opts);
}

struct ApproxMinimalResult {
    bool minimal = false;
    std::optional<MinimalSetDescriptor> descriptor;
    // When not minimal: a point y of the shadow whose orbit shadow misses `missed`.
    std::optional<GraphPoint> witness;
    std::optional<GraphPoint> missed;
};

inline ApproxMinimalResult approx_minimal(Resolution& res, const GraphPoint& x) {
    const GroupAction& a = res.action();
    const OrbitResult& o = res.orbit(x);
    const std::vector<GraphPoint> s = res.shadow(x);
    ApproxMinimalResult out;
    auto describe = [&](std::vector<GraphPoint> support, bool finite) {
        MinimalSetDescriptor d;
        d.support = std::move(support);
        d.certificate.word_bound = res.max_word();
        d.certificate.epsilon = res.epsilon();
        if (finite) {
            d.kind = classify_minimal(a, d.support, res.epsilon(), res.net(), res.index());
            if (d.kind == MinimalKind::FiniteOrbit) d.cardinality = d.support.size();
            d.certificate.notes.push_back("certified finite orbit");
            if (d.kind == MinimalKind::WholeSpace)
                d.certificate.notes.push_back("finite orbit dense at this resolution");
        } else {
            d.kind = classify_minimal(a, d.support, res.epsilon(), res.net(), res.index(), {false});
            d.certificate.notes.push_back("orbit closure shadow contained in the closure of each of its points");
        }
        return d;
    };
    if (o.finite()) {
        out.minimal = true;
        out.descriptor = describe(o.sorted(), true);
        return out;
    }
    // Deepest layer first: orbit tails are where closures can shrink.
    std::vector<std::size_t> order(o.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return o.depth[i] > o.depth[j]; });
    std::set<GraphPoint> checked;
    const MetricGraph& space = a.space();
    for (std::size_t i : order) {
        std::vector<std::pair<Rational, GraphPoint>> near;
        for (const auto& q : s) {
            Rational d = distance(space, o.points[i], q);
            if (d < res.epsilon()) near.push_back({d, q});
        }
        std::stable_sort(near.begin(), near.end(),
                         [](const auto& l, const auto& r) { return l.first < r.first; });
        for (const auto& [d, y] : near) {
            if (!checked.insert(y).second) continue;
            const auto& sy = res.shadow(y);
            for (const auto& q : s)
                if (!std::binary_search(sy.begin(), sy.end(), q)) {
                    out.witness = y;
                    out.missed = q;
                    return out;
                }
        }
    }
    out.minimal = true;
    out.descriptor = describe(s, false);
    return out;
}

inline ApproxMinimalResult approx_minimal(const GroupAction& a, const GraphPoint& x, const Rational& eps,
                                          std::size_t max_word) {
    Resolution res(a, eps, max_word);
    return approx_minimal(res, x);
}

// ---- circle census ----

struct CircleCensus {
    std::vector<std::size_t> cardinals;            // one entry per distinct finite orbit
    std::vector<std::size_t> preserving_cardinals;  // same for the orientation-preserving subgroup
    std::size_t p = 0;
    bool all_preserving = true;
    bool pass = false;
    std::size_t orbits_checked = 0;
};

// Generators of the orientation-preserving subgroup, from the transversal
// {id, r} with r the first reversing generator.
inline GroupAction preserving_subgroup(const GroupAction& a) {
    std::optional<std::size_t> r;
    for (std::size_t i = 0; i < a.generator_count() && !r; ++i)
        if (circle_orientation(a.generator(i)) == Orientation::Reversing) r = i;
    if (!r) return a;
    const PLHomeo& rg = a.generator(*r);
    const PLHomeo rinv = invert(rg);
    std::vector<PLHomeo> gens;
    std::vector<std::string> names;
    const std::string rn = a.name(*r);
    for (std::size_t i = 0; i < a.generator_count(); ++i) {
        const PLHomeo& s = a.generator(i);
        const std::string sn = a.name(i);
        if (circle_orientation(s) == Orientation::Preserving) {
            gens.push_back(s);
            names.push_back(sn);
            gens.push_back(compose(rg, compose(s, rinv)));
            names.push_back(rn + "*" + sn + "*" + rn + "^-1");
        } else {
            gens.push_back(compose(s, rinv));
            names.push_back(sn + "*" + rn + "^-1");
            gens.push_back(compose(rg, s));
            names.push_back(rn + "*" + sn);
        }
    }
    return GroupAction(a.space_ptr(), std::move(gens), std::move(names));
}

inline CircleCensus circle_orbit_cardinal_census(const GroupAction& a, const std::vector<GraphPoint>& seeds,
                                                 std::size_t max_word) {
    if (classify_space(a.space()) != SpaceKind::Circle)
        throw Error(ErrorCode::NotACircle, "census needs a circle");
    CircleCensus c;
    for (const auto& g : a.generators())
        c.all_preserving = c.all_preserving && circle_orientation(g) == Orientation::Preserving;
    const auto orbits = find_finite_orbits(a, seeds, max_word);
    if (orbits.empty()) throw Error(ErrorCode::NoFiniteOrbitFound, "no seed has a certified finite orbit");
    for (const auto& d : orbits) c.cardinals.push_back(*d.cardinality);
    c.orbits_checked = orbits.size();
    const GroupAction plus = preserving_subgroup(a);
    for (const auto& d : find_finite_orbits(plus, seeds, max_word)) c.preserving_cardinals.push_back(*d.cardinality);
    if (c.preserving_cardinals.empty())
        throw Error(ErrorCode::NoFiniteOrbitFound, "orientation-preserving subgroup has no finite orbit");
    c.p = *std::min_element(c.preserving_cardinals.begin(), c.preserving_cardinals.end());
    c.pass = true;
    for (std::size_t k : c.cardinals) {
        if (c.all_preserving ? k != c.p : (k != c.p && k != 2 * c.p)) c.pass = false;
    }
    return c;
}

// ---- saturation ----

struct Translate {
    Subgraph set;
    Word word;  // word(base) = set
    GraphPoint ends[2];
};

struct Pairing {
    std::size_t translate;
    GraphPoint x0;
    GraphPoint x1;
    Word word;
};

struct SaturationStructure {
    std::size_t base_edge = 0;
    std::vector<Translate> translates;
    std::size_t p = 0;
    bool translates_disjoint = true;  // pairwise meeting in at most endpoints
    std::optional<std::vector<GraphPoint>> double_orbit;
    std::vector<Pairing> pairings;
};

namespace detail {

inline bool meet_only_at_ends(const MetricGraph& x, const Translate& a, const Translate& b) {
    // Sample every edge piece of a at its midpoint and every vertex.
    for (std::size_t v : a.set.vertices()) {
        const GraphPoint p = x.vertex_point(v);
        if (b.set.contains(p) && p != b.ends[0] && p != b.ends[1] && p != a.ends[0] && p != a.ends[1])
            return false;
    }
    for (const auto& [e, list] : a.set.intervals())
        for (const auto& iv : list) {
            if (iv.lo == iv.hi) continue;
            if (b.set.contains(x.point(e, (iv.lo + iv.hi) / 2))) return false;
        }
    return true;
}

inline bool in_translate_interior(const Translate& t, const GraphPoint& p) {
    return t.set.contains(p) && p != t.ends[0] && p != t.ends[1];
}

// Word h with h(x0) = x1 and h(x1) = x0, by search over pairs.
inline std::optional<Word> find_swap(const GroupAction& a, const GraphPoint& x0, const GraphPoint& x1,
                                     std::size_t max_word) {
    using State = std::pair<GraphPoint, GraphPoint>;
    std::map<State, std::pair<State, Letter>> parent;
    const State start{x0, x1};
    const State goal{x1, x0};
    std::vector<State> layer{start};
    parent.emplace(start, std::make_pair(start, Letter{}));
    for (std::size_t d = 0; d < max_word && !layer.empty(); ++d) {
        std::vector<State> next;
        for (const auto& st : layer)
            for (std::size_t k = 0; k < a.letter_count(); ++k) {
                const Letter l = a.letter(k);
                State ns{a.apply(l, st.first), a.apply(l, st.second)};
                if (parent.count(ns)) continue;
                parent.emplace(ns, std::make_pair(st, l));
                if (ns == goal) {
                    Word w;
                    for (State cur = ns; cur != start; cur = parent.at(cur).first) w.push_back(parent.at(cur).second);
                    return w;
                }
                next.push_back(ns);
            }
        layer = std::move(next);
    }
    return std::nullopt;
}

}  // namespace detail

// Translates of an edge (a loop edge is a one-vertex circle) and, when a
// finite orbit of cardinal 2p meets the base interior, the pairing words.
inline SaturationStructure saturation_structure(const GroupAction& a, std::size_t base_edge, std::size_t max_word,
                                                const std::vector<GraphPoint>& seeds = {}) {
    const MetricGraph& x = a.space();
    if (base_edge >= x.edge_count()) throw Error(ErrorCode::InvalidArgument, "base edge out of range");
    SaturationStructure out;
    out.base_edge = base_edge;
    const Edge& be = x.edge(base_edge);
    Subgraph base;
    base.add_edge(x, base_edge);
    Translate first{base, {}, {x.vertex_point(be.tail), x.vertex_point(be.head)}};
    out.translates.push_back(first);
    std::vector<std::size_t> layer{0};
    for (std::size_t d = 1;; ++d) {
        std::vector<std::size_t> next;
        for (std::size_t i : layer)
            for (std::size_t k = 0; k < a.letter_count(); ++k) {
                const Letter l = a.letter(k);
                const PLHomeo& h = a.map(l);
                Subgraph img = h.image(out.translates[i].set);
                bool known = false;
                for (const auto& t : out.translates) known = known || t.set == img;
                if (known) continue;
                if (d > max_word)
                    throw Error(ErrorCode::TranslateEnumerationOpen,
                                "new translates still appear at word length " + std::to_string(max_word));
                Translate t;
                t.set = std::move(img);
                t.word = out.translates[i].word;
                t.word.insert(t.word.begin(), l);
                t.ends[0] = h.apply(out.translates[i].ends[0]);
                t.ends[1] = h.apply(out.translates[i].ends[1]);
                next.push_back(out.translates.size());
                out.translates.push_back(std::move(t));
            }
        if (next.empty()) break;
        layer = std::move(next);
    }
    out.p = out.translates.size();
    for (std::size_t i = 0; i < out.p; ++i)
        for (std::size_t j = i + 1; j < out.p; ++j)
            out.translates_disjoint =
                out.translates_disjoint && detail::meet_only_at_ends(x, out.translates[i], out.translates[j]);

    std::vector<GraphPoint> probe = seeds;
    if (probe.empty())
        for (int k = 1; k < 16; ++k) probe.push_back(x.point(base_edge, be.length * k / 16));
    for (const auto& s : probe) {
        if (!detail::in_translate_interior(out.translates[0], s)) continue;
        OrbitResult o = orbit_bfs(a, s, max_word);
        if (!o.finite() || o.points.size() != 2 * out.p) continue;
        std::vector<Pairing> pairs;
        bool ok = true;
        for (std::size_t i = 0; i < out.p && ok; ++i) {
            std::vector<GraphPoint> inside;
            for (const auto& q : o.sorted())
                if (detail::in_translate_interior(out.translates[i], q)) inside.push_back(q);
            if (inside.size() != 2) {
                ok = false;
                break;
            }
            auto w = detail::find_swap(a, inside[0], inside[1], max_word);
            if (!w) {
                ok = false;
                break;
            }
            pairs.push_back({i, inside[0], inside[1], *w});
        }
        if (!ok) continue;
        out.double_orbit = o.sorted();
        out.pairings = std::move(pairs);
        break;
    }
    return out;
}

// ---- rotation number ----

struct RationalInterval {
    Rational lo;
    Rational hi;
    bool contains(const Rational& q) const { return lo <= q && q <= hi; }
};

// Rotation number (in turns) of an orientation-preserving circle map, from N
// exact iterations of the lift F with F(0) in [0, L).
inline RationalInterval rotation_number_bounds(const PLHomeo& h, std::size_t n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "need at least one iteration");
    if (circle_orientation(h) != Orientation::Preserving)
        throw Error(ErrorCode::NotPreserving, "rotation number needs an orientation-preserving map");
    const CircleChart chart(*h.space());
    const Rational& len = chart.length();
    const Rational y0 = chart.coordinate(h.apply(chart.point_at(0)));
    auto lift = [&](const Rational& t) {
        const Integer q = floor_of(t / len);
        const Rational r = t - Rational(q) * len;
        return Rational(q) * len + y0 + mod_positive(chart.coordinate(h.apply(chart.point_at(r))) - y0, len);
    };
    Rational t = 0;
    for (std::size_t i = 0; i < n; ++i) t = lift(t);
    const Rational disp = t / len;
    return {(disp - 1) / n, (disp + 1) / n};
}

}  // namespace dendrodyn

#endif  // DENDRODYN_MINIMAL_HPP
