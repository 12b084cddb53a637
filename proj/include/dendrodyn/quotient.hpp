#ifndef DENDRODYN_QUOTIENT_HPP
#define DENDRODYN_QUOTIENT_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dendrodyn/action.hpp"
#include "dendrodyn/minimal.hpp"
#include "dendrodyn/subgraph.hpp"

namespace dendrodyn {

// X with its invariant graph Y collapsed to the vertex gamma.
struct QuotientDendrite {
    SpacePtr source;
    SpacePtr space;  // a tree
    GraphPoint gamma;
    Subgraph y;
    std::vector<ComplementComponent> components;  // components of X \ Y
    std::vector<AttachmentCluster> clusters;       // C^k with attachment z_k
    std::vector<std::size_t> vertex_map;           // X vertex -> quotient vertex
    std::vector<std::size_t> edge_map;             // X edge -> quotient edge, npos inside Y

    GraphPoint project(const GraphPoint& p) const {
        if (p.is_vertex()) return space->vertex_point(vertex_map[p.index]);
        if (edge_map[p.index] == npos) return gamma;
        return space->point(edge_map[p.index], p.pos);
    }

    // Index of the component of X \ Y containing p, if any.
    std::optional<std::size_t> component_of(const GraphPoint& p) const {
        if (y.contains(p)) return std::nullopt;
        for (std::size_t i = 0; i < components.size(); ++i)
            if (components[i].contains(y, p)) return i;
        return std::nullopt;
    }

    std::optional<std::size_t> cluster_of_component(std::size_t c) const {
        for (std::size_t k = 0; k < clusters.size(); ++k)
            for (std::size_t i : clusters[k].components)
                if (i == c) return k;
        return std::nullopt;
    }
};

inline QuotientDendrite collapse_Y(SpacePtr x_ptr) {
    const MetricGraph& x = *x_ptr;
    QuotientDendrite q;
    q.source = x_ptr;
    q.y = invariant_graph_Y(x);
    q.components = complement_components(x, q.y);
    q.clusters = group_by_attachment(q.components);

    std::string gamma_name = "gamma";
    while (x.find_vertex(gamma_name)) gamma_name += "'";
    GraphDescription d;
    d.vertices.push_back(gamma_name);
    q.vertex_map.assign(x.vertex_count(), 0);
    for (std::size_t v = 0; v < x.vertex_count(); ++v) {
        if (q.y.contains(x.vertex_point(v))) continue;
        q.vertex_map[v] = d.vertices.size();
        d.vertices.push_back(x.vertex_name(v));
    }
    q.edge_map.assign(x.edge_count(), npos);
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        if (q.y.contains_edge(x, e)) continue;
        const Edge& ed = x.edge(e);
        q.edge_map[e] = d.edges.size();
        d.edges.push_back({ed.id, d.vertices[q.vertex_map[ed.tail]], d.vertices[q.vertex_map[ed.head]], ed.length});
    }
    q.space = make_space(d);
    q.gamma = q.space->vertex_point(0);
    return q;
}

// Distance to Y in X; Y is a union of full edges, so it is reached at a vertex.
inline Rational distance_to_Y(const QuotientDendrite& q, const GraphPoint& p) {
    if (q.y.contains(p)) return 0;
    const auto dv = q.source->distances_to_vertices(p);
    std::optional<Rational> best;
    for (std::size_t v : q.y.vertices())
        if (!best || dv[v] < *best) best = dv[v];
    return *best;
}

// Quotient metric written on X: same component d(x,y); otherwise the route
// through gamma, d(x,Y) + d(y,Y).
inline Rational quotient_distance(const QuotientDendrite& q, const GraphPoint& a, const GraphPoint& b) {
    const auto ca = q.component_of(a);
    const auto cb = q.component_of(b);
    if (ca && cb && *ca == *cb) return distance(*q.source, a, b);
    return distance_to_Y(q, a) + distance_to_Y(q, b);
}

// Induced generators on the quotient tree. Requires g(Y) = Y.
inline GroupAction project_action(const GroupAction& a, const QuotientDendrite& q) {
    const MetricGraph& x = a.space();
    std::vector<PLHomeo> gens;
    for (std::size_t i = 0; i < a.generator_count(); ++i) {
        const PLHomeo& g = a.generator(i);
        if (g.image(q.y) != q.y)
            throw Error(ErrorCode::YNotInvariant, "generator '" + a.name(i) + "' does not preserve Y");
        std::vector<std::vector<AffinePiece>> pieces(q.space->edge_count());
        for (std::size_t e = 0; e < x.edge_count(); ++e) {
            if (q.edge_map[e] == npos) continue;
            for (const auto& p : g.pieces(e)) {
                if (q.edge_map[p.target] == npos)
                    throw Error(ErrorCode::YNotInvariant,
                                "generator '" + a.name(i) + "' moves part of X \\ Y into Y");
                pieces[q.edge_map[e]].push_back({p.lo, p.hi, q.edge_map[p.target], p.image_lo, p.image_hi});
            }
        }
        gens.push_back(PLHomeo::from_pieces(q.space, std::move(pieces)));
    }
    return GroupAction(q.space, std::move(gens), a.names());
}

struct Crossing {
    std::size_t from_cluster;
    std::size_t to_cluster;
    Word word;
    std::size_t occurrences = 0;
};

struct CrossingReport {
    bool pass = true;
    std::vector<Crossing> crossings;  // one entry per (k, i) pair, first word found
    std::size_t words_explored = 0;
    std::size_t samples = 0;
    bool truncated = false;
    std::optional<Crossing> violation;
};

// For words up to max_word and sampled x in C^k with w(x) in C^i, checks
// w(z_k) = z_i. Words are explored breadth first over the joint images of
// all samples and attachment points, so equivalent words are visited once.
inline CrossingReport attachment_crossing_check(const GroupAction& a, const QuotientDendrite& q,
                                                std::size_t max_word, std::size_t state_cap = 20000) {
    const MetricGraph& x = a.space();
    CrossingReport rep;
    std::vector<GraphPoint> samples;
    std::vector<std::size_t> sample_cluster;
    for (std::size_t k = 0; k < q.clusters.size(); ++k)
        for (std::size_t c : q.clusters[k].components)
            for (std::size_t e : q.components[c].closure.full_edges(x)) {
                samples.push_back(x.point(e, x.edge(e).length / 2));
                sample_cluster.push_back(k);
            }
    rep.samples = samples.size();
    if (samples.empty()) return rep;
    std::vector<GraphPoint> state = samples;
    for (const auto& cl : q.clusters) state.push_back(cl.attachment);
    const std::size_t ns = samples.size();

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
    auto visit = [&](const std::vector<GraphPoint>& st, const Word& w) {
        for (std::size_t s = 0; s < ns; ++s) {
            const std::size_t k = sample_cluster[s];
            const auto comp = q.component_of(st[s]);
            if (!comp) continue;
            const auto i = q.cluster_of_component(*comp);
            if (!i) continue;
            const GraphPoint wz = st[ns + k];
            if (wz != q.clusters[*i].attachment) {
                rep.pass = false;
                if (!rep.violation) rep.violation = Crossing{k, *i, w, 1};
                continue;
            }
            auto [it, fresh] = index.emplace(std::make_pair(k, *i), rep.crossings.size());
            if (fresh) rep.crossings.push_back({k, *i, w, 0});
            ++rep.crossings[it->second].occurrences;
        }
    };
    std::map<std::vector<GraphPoint>, bool> seen;
    std::vector<std::pair<std::vector<GraphPoint>, Word>> layer{{state, {}}};
    seen.emplace(state, true);
    visit(state, {});
    for (std::size_t d = 1; d <= max_word && !layer.empty(); ++d) {
        std::vector<std::pair<std::vector<GraphPoint>, Word>> next;
        for (const auto& [st, w] : layer)
            for (std::size_t k = 0; k < a.letter_count(); ++k) {
                const Letter l = a.letter(k);
                std::vector<GraphPoint> ns_state(st.size());
                for (std::size_t j = 0; j < st.size(); ++j) ns_state[j] = a.apply(l, st[j]);
                if (seen.count(ns_state)) continue;
                if (seen.size() >= state_cap) {
                    rep.truncated = true;
                    continue;
                }
                seen.emplace(ns_state, true);
                Word nw = w;
                nw.insert(nw.begin(), l);
                visit(ns_state, nw);
                next.push_back({std::move(ns_state), std::move(nw)});
            }
        layer = std::move(next);
    }
    rep.words_explored = seen.size();
    std::sort(rep.crossings.begin(), rep.crossings.end(), [](const Crossing& l, const Crossing& r) {
        return std::make_pair(l.from_cluster, l.to_cluster) < std::make_pair(r.from_cluster, r.to_cluster);
    });
    return rep;
}

struct FiniteOrbitInY {
    OrbitResult orbit;  // certified finite orbit inside Y
    bool transferred = false;
    std::optional<GraphPoint> source;        // seed of the finite orbit found in X
    std::optional<std::size_t> cluster;      // k when transferred to z_k
};

// A finite orbit in Y: either a finite orbit through a seed already meets Y,
// or a finite orbit in C^k is transferred to z_k by applying the words that
// reach each of its points.
inline FiniteOrbitInY finite_orbit_in_Y(const GroupAction& a, const QuotientDendrite& q,
                                        const std::vector<GraphPoint>& seeds, std::size_t max_word) {
    std::optional<OrbitResult> outside;
    for (const auto& s : seeds) {
        OrbitResult o = orbit_bfs(a, s, max_word);
        if (!o.finite()) continue;
        for (const auto& p : o.points)
            if (q.y.contains(p)) {
                FiniteOrbitInY r;
                r.source = s;
                r.orbit = orbit_bfs(a, p, max_word);
                return r;
            }
        if (!outside) outside = std::move(o);
    }
    if (!outside) throw Error(ErrorCode::NoFiniteOrbitKnown, "no seed has a certified finite orbit");
    const GraphPoint x0 = outside->points.front();
    const auto comp = q.component_of(x0);
    const auto k = comp ? q.cluster_of_component(*comp) : std::nullopt;
    if (!k) throw Error(ErrorCode::NoFiniteOrbitKnown, "finite orbit is not attached to Y");
    const GraphPoint z = q.clusters[*k].attachment;
    std::vector<GraphPoint> images;
    for (std::size_t j = 0; j < outside->points.size(); ++j) images.push_back(a.apply(outside->word_to(j), z));
    std::sort(images.begin(), images.end());
    images.erase(std::unique(images.begin(), images.end()), images.end());
    if (!is_invariant(a, images))
        throw Error(ErrorCode::CrossingViolation, "transferred attachment points are not invariant");
    FiniteOrbitInY r;
    r.transferred = true;
    r.source = x0;
    r.cluster = *k;
    r.orbit = orbit_bfs(a, z, std::max<std::size_t>(max_word, images.size()));
    if (!r.orbit.finite() || r.orbit.sorted() != images)
        throw Error(ErrorCode::CrossingViolation, "orbit of z_k differs from the transferred set");
    return r;
}

}  // namespace dendrodyn

#endif  // DENDRODYN_QUOTIENT_HPP
