#ifndef DENDRODYN_SCENARIO_HPP
#define DENDRODYN_SCENARIO_HPP

#include <chrono>
#include <fstream>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dendrodyn/action.hpp"
#include "dendrodyn/geodesic.hpp"
#include "dendrodyn/homeo.hpp"
#include "dendrodyn/hyperspace.hpp"
#include "dendrodyn/minimal.hpp"
#include "dendrodyn/orbit_structure.hpp"
#include "dendrodyn/quotient.hpp"

namespace dendrodyn {

using Json = nlohmann::ordered_json;

// ---- scenario model ----

// Either a partial traversal {edge, from, to} or a full one {edge, reverse}.
struct RawSegment {
    std::string edge;
    std::optional<Rational> from;
    std::optional<Rational> to;
    bool reverse = false;

    friend bool operator==(const RawSegment&, const RawSegment&) = default;
};

struct RawEdgeMap {
    std::string edge;
    std::vector<Rational> cuts;
    std::vector<std::vector<RawSegment>> routes;

    friend bool operator==(const RawEdgeMap&, const RawEdgeMap&) = default;
};

struct GeneratorSpec {
    std::string name;
    std::vector<RawEdgeMap> map;  // edges left out are fixed pointwise

    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct TaskSpec {
    std::string name;
    Json params = Json::object();

    friend bool operator==(const TaskSpec& a, const TaskSpec& b) { return a.name == b.name && a.params == b.params; }
};

struct Scenario {
    std::string title;
    GraphDescription space;
    std::vector<GeneratorSpec> generators;
    std::vector<TaskSpec> tasks;
    std::vector<std::pair<std::string, std::string>> expected;  // task -> PASS/FAIL

    friend bool operator==(const Scenario& a, const Scenario& b) {
        return a.title == b.title && a.space == b.space && a.generators == b.generators && a.tasks == b.tasks &&
               a.expected == b.expected;
    }
};

namespace detail {

inline std::string json_where(const std::string& where) { return where.empty() ? "" : " at " + where; }

inline const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::ValidationError, std::string("missing field '") + key + "'" + json_where(where));
    return j.at(key);
}

inline std::string require_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = require(j, key, where);
    if (!v.is_string())
        throw Error(ErrorCode::ValidationError, std::string("field '") + key + "' must be a string" + json_where(where));
    return v.get<std::string>();
}

inline Rational rational_value(const Json& v, const std::string& where) {
    if (!v.is_string())
        throw Error(ErrorCode::ValidationError, "rationals are written as \"num/den\" strings" + json_where(where));
    try {
        return parse_rational(v.get<std::string>());
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string(e.what()) + json_where(where));
    }
}

}  // namespace detail

inline Scenario scenario_from_json(const Json& j) {
    using namespace detail;
    Scenario s;
    if (!j.is_object()) throw Error(ErrorCode::ValidationError, "scenario must be a JSON object");
    s.title = j.contains("title") ? require_string(j, "title", "") : "";
    const Json& space = require(j, "space", "");
    const Json& verts = require(space, "vertices", "space");
    if (!verts.is_array()) throw Error(ErrorCode::ValidationError, "space.vertices must be an array");
    for (const auto& v : verts) {
        if (!v.is_string()) throw Error(ErrorCode::ValidationError, "vertex ids are strings");
        s.space.vertices.push_back(v.get<std::string>());
    }
    const Json& edges = require(space, "edges", "space");
    if (!edges.is_array()) throw Error(ErrorCode::ValidationError, "space.edges must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string where = "space.edges[" + std::to_string(i) + "]";
        const Json& e = edges[i];
        s.space.edges.push_back({require_string(e, "id", where), require_string(e, "from", where),
                                 require_string(e, "to", where), rational_value(require(e, "length", where), where)});
    }
    const Json& gens = require(j, "generators", "");
    if (!gens.is_array() || gens.empty()) throw Error(ErrorCode::ValidationError, "generators must be a nonempty array");
    for (std::size_t g = 0; g < gens.size(); ++g) {
        const std::string gw = "generators[" + std::to_string(g) + "]";
        GeneratorSpec spec;
        spec.name = require_string(gens[g], "name", gw);
        const Json& map = require(gens[g], "map", gw);
        if (!map.is_array()) throw Error(ErrorCode::ValidationError, "map must be an array" + json_where(gw));
        for (std::size_t m = 0; m < map.size(); ++m) {
            const std::string mw = gw + ".map[" + std::to_string(m) + "]";
            RawEdgeMap em;
            em.edge = require_string(map[m], "edge", mw);
            if (map[m].contains("cuts")) {
                if (!map[m]["cuts"].is_array()) throw Error(ErrorCode::ValidationError, "cuts must be an array" + json_where(mw));
                for (const auto& c : map[m]["cuts"]) em.cuts.push_back(rational_value(c, mw));
            }
            const Json& routes = require(map[m], "routes", mw);
            if (!routes.is_array()) throw Error(ErrorCode::ValidationError, "routes must be an array" + json_where(mw));
            for (std::size_t r = 0; r < routes.size(); ++r) {
                const std::string rw = mw + ".routes[" + std::to_string(r) + "]";
                if (!routes[r].is_array()) throw Error(ErrorCode::ValidationError, "a route is an array" + json_where(rw));
                std::vector<RawSegment> route;
                for (const auto& seg : routes[r]) {
                    RawSegment rs;
                    rs.edge = require_string(seg, "edge", rw);
                    if (seg.contains("from") || seg.contains("to")) {
                        rs.from = rational_value(require(seg, "from", rw), rw);
                        rs.to = rational_value(require(seg, "to", rw), rw);
                    } else if (seg.contains("reverse")) {
                        if (!seg["reverse"].is_boolean())
                            throw Error(ErrorCode::ValidationError, "reverse must be a boolean" + json_where(rw));
                        rs.reverse = seg["reverse"].get<bool>();
                    }
                    route.push_back(std::move(rs));
                }
                em.routes.push_back(std::move(route));
            }
            spec.map.push_back(std::move(em));
        }
        s.generators.push_back(std::move(spec));
    }
    if (j.contains("tasks")) {
        if (!j["tasks"].is_array()) throw Error(ErrorCode::ValidationError, "tasks must be an array");
        for (std::size_t t = 0; t < j["tasks"].size(); ++t) {
            const Json& tj = j["tasks"][t];
            TaskSpec ts;
            if (tj.is_string()) {
                ts.name = tj.get<std::string>();
            } else {
                ts.name = require_string(tj, "name", "tasks[" + std::to_string(t) + "]");
                if (tj.contains("params")) ts.params = tj["params"];
            }
            s.tasks.push_back(std::move(ts));
        }
    }
    if (j.contains("expected")) {
        if (!j["expected"].is_object()) throw Error(ErrorCode::ValidationError, "expected must be an object");
        for (const auto& [k, v] : j["expected"].items()) {
            if (!v.is_string() || (v != "PASS" && v != "FAIL"))
                throw Error(ErrorCode::ValidationError, "expected verdicts are PASS or FAIL");
            s.expected.push_back({k, v.get<std::string>()});
        }
    }
    return s;
}

inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["title"] = s.title;
    Json verts = Json::array();
    for (const auto& v : s.space.vertices) verts.push_back(v);
    Json edges = Json::array();
    for (const auto& e : s.space.edges)
        edges.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", format_rational(e.length)}});
    j["space"] = {{"vertices", verts}, {"edges", edges}};
    Json gens = Json::array();
    for (const auto& g : s.generators) {
        Json map = Json::array();
        for (const auto& em : g.map) {
            Json cuts = Json::array();
            for (const auto& c : em.cuts) cuts.push_back(format_rational(c));
            Json routes = Json::array();
            for (const auto& route : em.routes) {
                Json r = Json::array();
                for (const auto& seg : route) {
                    Json sj;
                    sj["edge"] = seg.edge;
                    if (seg.from) {
                        sj["from"] = format_rational(*seg.from);
                        sj["to"] = format_rational(*seg.to);
                    } else {
                        sj["reverse"] = seg.reverse;
                    }
                    r.push_back(sj);
                }
                routes.push_back(r);
            }
            map.push_back({{"edge", em.edge}, {"cuts", cuts}, {"routes", routes}});
        }
        gens.push_back({{"name", g.name}, {"map", map}});
    }
    j["generators"] = gens;
    Json tasks = Json::array();
    for (const auto& t : s.tasks) tasks.push_back({{"name", t.name}, {"params", t.params}});
    j["tasks"] = tasks;
    Json expected = Json::object();
    for (const auto& [k, v] : s.expected) expected[k] = v;
    j["expected"] = expected;
    return j;
}

inline Scenario parse_scenario(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return scenario_from_json(j);
}

// Homeomorphism from its raw description. Full traversals span the edge.
inline PLHomeo build_generator(const SpacePtr& space, const GeneratorSpec& g) {
    const MetricGraph& x = *space;
    HomeoSpec spec;
    spec.edges.resize(x.edge_count());
    std::vector<bool> listed(x.edge_count(), false);
    auto edge_index = [&](const std::string& id) {
        auto e = x.find_edge(id);
        if (!e) throw Error(ErrorCode::ValidationError, "generator '" + g.name + "' names unknown edge '" + id + "'");
        return *e;
    };
    for (const auto& em : g.map) {
        const std::size_t e = edge_index(em.edge);
        if (listed[e]) throw Error(ErrorCode::ValidationError, "generator '" + g.name + "' maps edge '" + em.edge + "' twice");
        listed[e] = true;
        spec.edges[e].cuts = em.cuts;
        for (const auto& route : em.routes) {
            std::vector<RouteSegment> r;
            for (const auto& seg : route) {
                const std::size_t f = edge_index(seg.edge);
                const Rational& len = x.edge(f).length;
                if (seg.from)
                    r.push_back({f, *seg.from, *seg.to});
                else if (seg.reverse)
                    r.push_back({f, len, Rational(0)});
                else
                    r.push_back({f, Rational(0), len});
            }
            spec.edges[e].routes.push_back(std::move(r));
        }
    }
    for (std::size_t e = 0; e < x.edge_count(); ++e)
        if (!listed[e]) spec.edges[e].routes = {{{e, Rational(0), x.edge(e).length}}};
    try {
        return validate_homeo(space, spec);
    } catch (const Error& err) {
        throw Error(ErrorCode::ValidationError, "generator '" + g.name + "': " + err.what());
    }
}

struct LoadedScenario {
    Scenario spec;
    SpacePtr space;
    GroupAction action;
};

inline LoadedScenario instantiate(const Scenario& s) {
    SpacePtr space;
    try {
        space = make_space(s.space);
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string("space: ") + e.what());
    }
    if (s.generators.empty()) throw Error(ErrorCode::ValidationError, "scenario has no generators");
    std::vector<PLHomeo> gens;
    std::vector<std::string> names;
    for (const auto& g : s.generators) {
        gens.push_back(build_generator(space, g));
        names.push_back(g.name);
    }
    return LoadedScenario{s, space, GroupAction(space, std::move(gens), std::move(names))};
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LoadedScenario load_scenario(const std::string& path) { return instantiate(parse_scenario(read_file(path))); }

// ---- tasks ----

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{
        "classify", "orbits",   "minimal-census",    "circle-census", "saturation",   "collapse",   "hausdorff",
        "limit-check", "periodic", "almost-periodic", "relation",      "hausdorff-quotient", "class-report", "verify-all"};
    return names;
}

struct RunOptions {
    std::optional<Rational> epsilon;
    std::optional<std::size_t> max_word;
};

namespace detail {

inline std::string point_name(const MetricGraph& x, const GraphPoint& p) { return describe_point(x, p); }

inline Json points_json(const MetricGraph& x, const std::vector<GraphPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(point_name(x, p));
    return a;
}

inline const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

// Task parameters with CLI overrides applied.
class Params {
public:
    Params(const LoadedScenario& s, const Json& j, const RunOptions& opts) : s_(&s), j_(j), opts_(opts) {
        if (!j_.is_object()) throw Error(ErrorCode::ParameterError, "params must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    Rational rational(const char* key, const Rational& fallback) const {
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_string()) throw Error(ErrorCode::ParameterError, std::string(key) + " must be a \"num/den\" string");
        try {
            return parse_rational(v.get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorCode::ParameterError, std::string(key) + ": " + e.what());
        }
    }

    Rational epsilon() const {
        if (opts_.epsilon) return *opts_.epsilon;
        Rational eps = rational("epsilon", diameter(*s_->space) / 128);
        if (eps <= 0) throw Error(ErrorCode::ParameterError, "epsilon must be positive");
        return eps;
    }

    std::size_t max_word() const {
        if (opts_.max_word) return *opts_.max_word;
        if (!has("max_word")) return 64;
        const Json& v = j_.at("max_word");
        if (!v.is_number_integer() || v.get<long long>() < 1)
            throw Error(ErrorCode::ParameterError, "max_word must be a positive integer");
        return v.get<std::size_t>();
    }

    std::vector<GraphPoint> point_list(const char* key) const {
        const Json& v = j_.at(key);
        if (!v.is_array()) throw Error(ErrorCode::ParameterError, std::string(key) + " must be an array of points");
        std::vector<GraphPoint> out;
        for (const auto& p : v) {
            if (!p.is_string()) throw Error(ErrorCode::ParameterError, "points are written as strings");
            try {
                out.push_back(parse_point(*s_->space, p.get<std::string>()));
            } catch (const Error& e) {
                throw Error(ErrorCode::ParameterError, std::string(key) + ": " + e.what());
            }
        }
        return out;
    }

    std::vector<GraphPoint> required_points(const char* key) const {
        if (!has(key)) throw Error(ErrorCode::ParameterError, std::string("missing parameter '") + key + "'");
        auto pts = point_list(key);
        if (pts.empty()) throw Error(ErrorCode::ParameterError, std::string("parameter '") + key + "' is empty");
        return pts;
    }

    std::vector<GraphPoint> seeds() const {
        if (has("seeds")) return required_points("seeds");
        return default_seeds(*s_->space, epsilon());
    }

    std::vector<Rational> schedule() const {
        if (has("schedule")) {
            const Json& v = j_.at("schedule");
            if (!v.is_array() || v.empty()) throw Error(ErrorCode::ParameterError, "schedule must be a nonempty array");
            std::vector<Rational> out;
            for (const auto& q : v) {
                if (!q.is_string()) throw Error(ErrorCode::ParameterError, "schedule entries are \"num/den\" strings");
                out.push_back(parse_rational(q.get<std::string>()));
            }
            return out;
        }
        const Rational d = diameter(*s_->space);
        if (opts_.epsilon) return {*opts_.epsilon * 16, *opts_.epsilon * 4, *opts_.epsilon};
        return {d / 8, d / 32, d / 128};
    }

    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_string()) throw Error(ErrorCode::ParameterError, std::string(key) + " must be a string");
        return j_.at(key).get<std::string>();
    }

    std::size_t count(const char* key, std::size_t fallback) const {
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw Error(ErrorCode::ParameterError, std::string(key) + " must be a nonnegative integer");
        return v.get<std::size_t>();
    }

    Json resolution_json() const {
        return {{"epsilon", format_rational(epsilon())}, {"max_word", max_word()}};
    }

private:
    const LoadedScenario* s_;
    Json j_;
    RunOptions opts_;
};

inline Json descriptor_json(const GroupAction& a, const MinimalSetDescriptor& d) {
    const MetricGraph& x = a.space();
    Json j;
    j["kind"] = minimal_kind_name(d.kind);
    if (d.cardinality) j["cardinality"] = *d.cardinality;
    j["support_size"] = d.support.size();
    if (d.support.size() <= 16) j["support"] = points_json(x, d.support);
    j["word_bound"] = d.certificate.word_bound;
    if (d.certificate.epsilon) j["epsilon"] = format_rational(*d.certificate.epsilon);
    j["notes"] = d.certificate.notes;
    return j;
}

inline Json orbit_json(const GroupAction& a, const OrbitResult& o) {
    const MetricGraph& x = a.space();
    Json j;
    j["seed"] = point_name(x, o.points.front());
    j["status"] = orbit_status_name(o.status);
    j["size"] = o.points.size();
    j["word_bound"] = o.word_bound;
    if (o.points.size() <= 64) j["points"] = points_json(x, o.sorted());
    return j;
}

inline Json word_json(const GroupAction& a, const Word& w) { return a.word_to_string(w); }

inline Json task_classify(const LoadedScenario& s, const Params& p) {
    const MetricGraph& x = *s.space;
    Json j;
    const SpaceKind kind = classify_space(x);
    j["kind"] = space_kind_name(kind);
    j["betti"] = x.betti();
    const auto sp = special_points(x);
    j["endpoints"] = points_json(x, sp.endpoints);
    j["branch_points"] = points_json(x, sp.branch_points);
    j["diameter"] = format_rational(diameter(x));
    if (x.betti() > 0) j["Y_edges"] = [&] {
        Json a = Json::array();
        const Subgraph y = invariant_graph_Y(x);
        for (std::size_t e : y.full_edges(x)) a.push_back(x.edge(e).id);
        return a;
    }();
    bool pass = true;
    if (p.has("expect_kind")) {
        j["expected_kind"] = p.string("expect_kind", "");
        pass = j["expected_kind"] == j["kind"];
    }
    j["verdict"] = verdict(pass);
    return j;
}

inline Json task_orbits(const LoadedScenario& s, const Params& p) {
    const auto seeds = p.required_points("seeds");
    const std::size_t mw = p.max_word();
    Json j;
    j["resolution"] = {{"max_word", mw}};
    Json list = Json::array();
    for (const auto& seed : seeds) list.push_back(orbit_json(s.action, orbit_bfs(s.action, seed, mw)));
    j["orbits"] = list;
    j["verdict"] = "PASS";
    return j;
}

inline Json task_minimal_census(const LoadedScenario& s, const Params& p) {
    const GroupAction& a = s.action;
    const MetricGraph& x = a.space();
    Resolution res(a, p.epsilon(), p.max_word());
    const auto seeds = p.seeds();
    Json j;
    j["resolution"] = p.resolution_json();
    j["seeds"] = seeds.size();
    std::vector<MinimalSetDescriptor> found;
    std::set<std::vector<GraphPoint>> supports;
    std::size_t not_minimal = 0;
    for (const auto& seed : seeds) {
        ApproxMinimalResult r = approx_minimal(res, seed);
        if (!r.minimal) {
            ++not_minimal;
            continue;
        }
        if (supports.insert(r.descriptor->support).second) found.push_back(*r.descriptor);
    }
    Json ds = Json::array();
    std::map<std::string, std::size_t> kinds;
    std::vector<std::size_t> finite_cards;
    for (const auto& d : found) {
        ds.push_back(descriptor_json(a, d));
        ++kinds[minimal_kind_name(d.kind)];
        if (d.cardinality) finite_cards.push_back(*d.cardinality);
    }
    j["minimal_sets"] = ds;
    j["seeds_not_minimal"] = not_minimal;
    Json kj = Json::object();
    for (const auto& [k, n] : kinds) kj[k] = n;
    j["kinds"] = kj;
    bool pass = true;
    const SpaceKind sk = classify_space(x);
    if (sk != SpaceKind::Circle) {
        bool graph_ok = true;
        for (const auto& d : found) graph_ok = graph_ok && d.kind == MinimalKind::FiniteOrbit;
        j["graph_theorem"] = {{"statement", "on a graph other than a circle every minimal set is a finite orbit"},
                              {"verdict", verdict(graph_ok)}};
        pass = pass && graph_ok;
    }
    if (sk == SpaceKind::Arc) {
        bool arc_ok = true;
        for (std::size_t c : finite_cards) arc_ok = arc_ok && (c == 1 || c == 2);
        j["interval_lemma"] = {{"statement", "on an arc every finite minimal orbit has one or two points"},
                               {"verdict", verdict(arc_ok)}};
        pass = pass && arc_ok;
    }
    const UnionClosedCheck u = union_minimal_closed_check(res, seeds);
    Json uj{{"statement", "the union of all minimal sets is closed"},
            {"verdict", verdict(u.pass)},
            {"union_size", u.union_size},
            {"orbits", u.orbits},
            {"accumulation_points", u.accumulation_points}};
    if (u.witness) uj["witness"] = point_name(x, *u.witness);
    j["union_closed"] = uj;
    pass = pass && u.pass;
    j["verdict"] = verdict(pass);
    return j;
}

inline Json task_circle_census(const LoadedScenario& s, const Params& p) {
    const auto c = circle_orbit_cardinal_census(s.action, p.seeds(), p.max_word());
    Json j;
    j["resolution"] = p.resolution_json();
    std::set<std::size_t> distinct(c.cardinals.begin(), c.cardinals.end());
    j["cardinals"] = Json(std::vector<std::size_t>(distinct.begin(), distinct.end()));
    std::map<std::size_t, std::size_t> mult;
    for (std::size_t k : c.cardinals) ++mult[k];
    Json mj = Json::object();
    for (const auto& [k, n] : mult) mj[std::to_string(k)] = n;
    j["orbit_counts"] = mj;
    j["p"] = c.p;
    j["orbits_checked"] = c.orbits_checked;
    j["all_preserving"] = c.all_preserving;
    j["statement"] = "all finite orbits have cardinal p, or p and 2p when orientation is reversed";
    j["verdict"] = verdict(c.pass);
    return j;
}

inline Json task_saturation(const LoadedScenario& s, const Params& p) {
    const GroupAction& a = s.action;
    const MetricGraph& x = a.space();
    std::size_t base = 0;
    if (p.has("base")) {
        auto e = x.find_edge(p.string("base", ""));
        if (!e) throw Error(ErrorCode::ParameterError, "unknown base edge");
        base = *e;
    }
    std::vector<GraphPoint> seeds;
    if (p.has("seeds")) seeds = p.required_points("seeds");
    const auto st = saturation_structure(a, base, p.max_word(), seeds);
    Json j;
    j["base"] = x.edge(base).id;
    j["p"] = st.p;
    Json ts = Json::array();
    for (const auto& t : st.translates) {
        Json edges = Json::array();
        for (std::size_t e : t.set.full_edges(x)) edges.push_back(x.edge(e).id);
        ts.push_back({{"word", word_json(a, t.word)}, {"edges", edges}});
    }
    j["translates"] = ts;
    j["translates_disjoint"] = st.translates_disjoint;
    bool pass = st.translates_disjoint;
    if (st.double_orbit) {
        j["double_orbit"] = points_json(x, *st.double_orbit);
        Json ps = Json::array();
        for (const auto& pr : st.pairings) {
            const bool ok = a.apply(pr.word, pr.x0) == pr.x1 && a.apply(pr.word, pr.x1) == pr.x0;
            pass = pass && ok;
            ps.push_back({{"translate", pr.translate},
                          {"x0", point_name(x, pr.x0)},
                          {"x1", point_name(x, pr.x1)},
                          {"word", word_json(a, pr.word)},
                          {"swaps", ok}});
        }
        j["pairings"] = ps;
    }
    j["statement"] = "a finite orbit meeting the saturation of an edge has cardinal p or 2p";
    j["verdict"] = verdict(pass);
    return j;
}

inline Json task_collapse(const LoadedScenario& s, const Params& p) {
    const GroupAction& a = s.action;
    const MetricGraph& x = a.space();
    const QuotientDendrite q = collapse_Y(s.space);
    const MetricGraph& qs = *q.space;
    Json j;
    Json qd;
    qd["vertices"] = qs.description().vertices;
    Json qe = Json::array();
    for (const auto& e : qs.description().edges)
        qe.push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", format_rational(e.length)}});
    qd["edges"] = qe;
    qd["gamma"] = qs.vertex_name(q.gamma.index);
    j["quotient"] = qd;
    Json yj = Json::array();
    for (std::size_t e : q.y.full_edges(x)) yj.push_back(x.edge(e).id);
    j["Y_edges"] = yj;
    Json cl = Json::array();
    for (std::size_t k = 0; k < q.clusters.size(); ++k) {
        Json comps = Json::array();
        for (std::size_t c : q.clusters[k].components) {
            Json edges = Json::array();
            for (std::size_t e : q.components[c].closure.full_edges(x)) edges.push_back(x.edge(e).id);
            comps.push_back(edges);
        }
        cl.push_back({{"k", k}, {"z", point_name(x, q.clusters[k].attachment)}, {"components", comps}});
    }
    j["clusters"] = cl;
    const bool tree = qs.betti() == 0;
    j["quotient_betti"] = qs.betti();
    j["metric_note"] =
        "quotient distance is the path metric of the collapsed tree: d(x,y) within a component, d(x,Y)+d(y,Y) across";
    bool pass = tree;

    // pi is 1-Lipschitz and the tree metric matches the formula on X.
    const std::size_t pairs = p.count("samples", 200);
    const auto net = epsilon_net(x, p.epsilon());
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_int_distribution<std::size_t> pick(0, net.size() - 1);
    std::size_t lipschitz_bad = 0;
    std::size_t formula_bad = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const GraphPoint& u = net[pick(rng)];
        const GraphPoint& v = net[pick(rng)];
        const Rational dq = distance(qs, q.project(u), q.project(v));
        if (dq > distance(x, u, v)) ++lipschitz_bad;
        if (dq != quotient_distance(q, u, v)) ++formula_bad;
    }
    j["pi_lipschitz"] = {{"pairs", pairs}, {"violations", lipschitz_bad}};
    j["metric_formula_mismatches"] = formula_bad;
    pass = pass && lipschitz_bad == 0 && formula_bad == 0;

    try {
        const GroupAction induced = project_action(a, q);
        bool gamma_fixed = true;
        for (const auto& g : induced.generators()) gamma_fixed = gamma_fixed && g.apply(q.gamma) == q.gamma;
        j["gamma_fixed"] = gamma_fixed;
        std::size_t commute_bad = 0;
        for (std::size_t gi = 0; gi < a.generator_count(); ++gi)
            for (const auto& u : net)
                if (induced.generator(gi).apply(q.project(u)) != q.project(a.generator(gi).apply(u))) ++commute_bad;
        j["projection_commutes_violations"] = commute_bad;
        pass = pass && gamma_fixed && commute_bad == 0;
        const CrossingReport cr = attachment_crossing_check(a, q, p.max_word());
        Json cj = Json::array();
        for (const auto& c : cr.crossings)
            cj.push_back({{"k", c.from_cluster}, {"i", c.to_cluster}, {"word", word_json(a, c.word)},
                          {"occurrences", c.occurrences}});
        Json crj{{"verdict", verdict(cr.pass)},
                 {"statement", "a word carrying a point of C^k into C^i carries z_k to z_i"},
                 {"crossings", cj},
                 {"states", cr.words_explored},
                 {"truncated", cr.truncated}};
        if (cr.violation)
            crj["violation"] = {{"k", cr.violation->from_cluster}, {"i", cr.violation->to_cluster},
                                {"word", word_json(a, cr.violation->word)}};
        j["attachment_crossings"] = crj;
        pass = pass && cr.pass;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::YNotInvariant) throw;
        j["induced_action"] = e.what();
        pass = false;
    }
    try {
        const auto fo = finite_orbit_in_Y(a, q, default_seeds(x, p.epsilon()), p.max_word());
        j["finite_orbit_in_Y"] = {{"orbit", points_json(x, fo.orbit.sorted())}, {"transferred", fo.transferred}};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFiniteOrbitKnown) throw;
        j["finite_orbit_in_Y"] = e.what();
    }
    j["verdict"] = verdict(pass);
    return j;
}

inline Json task_hausdorff(const LoadedScenario& s, const Params& p) {
    const auto a = p.required_points("a");
    const auto b = p.required_points("b");
    Json j;
    j["distance"] = format_rational(hausdorff_distance(*s.space, a, b));
    j["verdict"] = "PASS";
    return j;
}

inline Json task_limit_check(const LoadedScenario& s, const Params& p) {
    const GroupAction& a = s.action;
    const auto seeds = p.required_points("seeds");
    const Rational tol = p.rational("tol", Rational(1, 100));
    std::vector<std::vector<GraphPoint>> family;
    for (const auto& seed : seeds) {
        OrbitResult o = orbit_bfs(a, seed, p.max_word());
        if (!o.finite()) throw Error(ErrorCode::ParameterError, "family seed " + point_name(*s.space, seed) + " has no finite orbit");
        family.push_back(o.sorted());
    }
    const auto r = minimal_family_limit_check(a, family, tol, p.max_word());
    Json j;
    j["tol"] = format_rational(tol);
    j["family_size"] = family.size();
    if (r.limit) j["limit"] = points_json(*s.space, r.limit->points);
    j["distance_to_last"] = format_rational(r.distance_to_last);
    j["limit_source"] = r.limit_source;
    if (!r.note.empty()) j["note"] = r.note;
    j["statement"] = "the family of minimal sets is compact in the Hausdorff metric";
    j["verdict"] = verdict(r.pass);
    return j;
}

inline Json task_periodic(const LoadedScenario& s, const Params& p) {
    Resolution res(s.action, p.epsilon(), p.max_word());
    const auto v = pointwise_periodic_test(res, p.seeds());
    Json j;
    j["resolution"] = p.resolution_json();
    j["checked"] = v.checked;
    if (v.witness) j["witness"] = {{"point", point_name(*s.space, *v.witness)}, {"explored_orbit_size", v.witness_orbit_size}};
    j["verdict"] = verdict(v.pass);
    return j;
}

inline Json task_almost_periodic(const LoadedScenario& s, const Params& p) {
    const MetricGraph& x = *s.space;
    Resolution res(s.action, p.epsilon(), p.max_word());
    const auto seeds = p.seeds();
    const auto v = pointwise_ap_test(res, seeds);
    Json j;
    j["resolution"] = p.resolution_json();
    j["checked"] = v.checked;
    j["criterion"] = "x is almost periodic iff the closure of its orbit is minimal";
    if (v.witness) {
        Json w{{"point", point_name(x, *v.witness)}};
        if (v.closure_witness) w["closure_point"] = point_name(x, *v.closure_witness);
        if (v.missed) w["missed"] = point_name(x, *v.missed);
        j["witness"] = w;
    }
    if (classify_space(x) != SpaceKind::Circle) {
        const auto ne = non_endpoint_orbit_test(res, seeds);
        Json nj{{"statement", kCiteNonEndpoint}, {"verdict", verdict(ne.pass)}, {"checked", ne.checked}};
        if (ne.witness) nj["witness"] = point_name(x, *ne.witness);
        j["non_endpoint"] = nj;
    } else {
        j["non_endpoint"] = "not applicable on a circle";
    }
    j["verdict"] = verdict(v.pass);
    return j;
}

inline Json relation_json(const MetricGraph& x, const GroupAction& a, const RelationVerdict& v) {
    Json j;
    Json sched = Json::array();
    for (const auto& e : v.schedule) sched.push_back(format_rational(e));
    j["schedule"] = sched;
    j["violations_per_scale"] = v.violations_per_scale;
    if (v.witness) {
        Json seq = Json::array();
        for (const auto& [xn, yn] : v.witness->sequence) seq.push_back({point_name(x, xn), point_name(x, yn)});
        j["witness"] = {{"x", point_name(x, v.witness->x)},
                        {"y", point_name(x, v.witness->y)},
                        {"ray", word_json(a, v.witness->ray)},
                        {"gap", format_rational(v.witness->gap)},
                        {"epsilon", format_rational(v.witness->epsilon)},
                        {"sequence", seq}};
    }
    return j;
}

inline Json task_relation(const LoadedScenario& s, const Params& p) {
    const auto v = relation_closedness_test(s.action, p.schedule(), p.max_word());
    Json j = relation_json(*s.space, s.action, v);
    j["statement"] = kCiteRelation;
    j["verdict"] = verdict(v.pass);
    return j;
}

inline Json task_hausdorff_quotient(const LoadedScenario& s, const Params& p) {
    const MetricGraph& x = *s.space;
    Resolution res(s.action, p.epsilon(), p.max_word());
    const auto r = orbit_space_hausdorff_verdict(res, p.seeds(), p.schedule());
    Json j;
    j["resolution"] = p.resolution_json();
    Json pp{{"verdict", verdict(r.periodic.pass)}};
    if (r.periodic.witness) pp["witness"] = point_name(x, *r.periodic.witness);
    j["pointwise_periodic"] = pp;
    Json rel = relation_json(x, s.action, r.relation);
    rel["verdict"] = verdict(r.relation.pass);
    j["relation_closed"] = rel;
    Json ap{{"verdict", verdict(r.almost_periodic.pass)}};
    if (r.almost_periodic.witness) ap["witness"] = point_name(x, *r.almost_periodic.witness);
    j["pointwise_almost_periodic"] = ap;
    j["orbit_space"] = {{"verdict", verdict(r.orbit_space_hausdorff)},
                        {"statement", kCitePeriodicHausdorff},
                        {"also", kCiteCountableHausdorff}};
    j["orbit_class_space"] = {{"verdict", verdict(r.orbit_class_space_hausdorff)}, {"statement", kCiteClassHausdorff}};
    j["consistent"] = r.consistent;
    j["verdict"] = verdict(r.orbit_space_hausdorff && r.orbit_class_space_hausdorff && r.consistent);
    return j;
}

inline Json task_class_report(const LoadedScenario& s, const Params& p) {
    const MetricGraph& x = *s.space;
    Resolution res(s.action, p.epsilon(), p.max_word());
    const auto rep = orbit_class_report(res, p.seeds());
    Json j;
    j["resolution"] = p.resolution_json();
    Json cls = Json::array();
    bool pass = true;
    for (const auto& c : rep.classes) {
        Json cj{{"representative", point_name(x, c.representative)},
                {"members", c.members.size()},
                {"exact", c.exact},
                {"closure_size", c.closure.size()},
                {"orbits", c.orbits.size()}};
        if (c.closure.size() <= 16) cj["closure"] = points_json(x, c.closure);
        // a closed orbit is its own class
        if (c.exact && c.orbits.size() != 1) pass = false;
        cls.push_back(cj);
    }
    j["class_count"] = rep.classes.size();
    j["classes"] = cls;
    j["all_orbits_closed"] = rep.all_orbits_closed;
    j["relation_closed"] = rep.relation_closed;
    j["verdict"] = verdict(pass);
    return j;
}

}  // namespace detail

inline Json run_single_task(const LoadedScenario& s, const TaskSpec& t, const RunOptions& opts) {
    const detail::Params p(s, t.params, opts);
    Json body;
    if (t.name == "classify") body = detail::task_classify(s, p);
    else if (t.name == "orbits") body = detail::task_orbits(s, p);
    else if (t.name == "minimal-census") body = detail::task_minimal_census(s, p);
    else if (t.name == "circle-census") body = detail::task_circle_census(s, p);
    else if (t.name == "saturation") body = detail::task_saturation(s, p);
    else if (t.name == "collapse") body = detail::task_collapse(s, p);
    else if (t.name == "hausdorff") body = detail::task_hausdorff(s, p);
    else if (t.name == "limit-check") body = detail::task_limit_check(s, p);
    else if (t.name == "periodic") body = detail::task_periodic(s, p);
    else if (t.name == "almost-periodic") body = detail::task_almost_periodic(s, p);
    else if (t.name == "relation") body = detail::task_relation(s, p);
    else if (t.name == "hausdorff-quotient") body = detail::task_hausdorff_quotient(s, p);
    else if (t.name == "class-report") body = detail::task_class_report(s, p);
    else throw Error(ErrorCode::UnknownTask, "unknown task '" + t.name + "'");
    Json j;
    j["task"] = t.name;
    j["verdict"] = body["verdict"];
    body.erase("verdict");
    for (auto& [k, v] : body.items()) j[k] = v;
    return j;
}

// Tasks making up verify-all for this space.
inline std::vector<TaskSpec> verify_all_tasks(const LoadedScenario& s, const Json& params) {
    const SpaceKind kind = classify_space(*s.space);
    std::vector<std::string> names{"classify", "minimal-census"};
    if (kind == SpaceKind::Circle) names.push_back("circle-census");
    if (s.space->betti() > 0 && kind != SpaceKind::Circle) names.push_back("collapse");
    for (const char* n : {"periodic", "almost-periodic", "relation", "hausdorff-quotient", "class-report"})
        names.push_back(n);
    std::vector<TaskSpec> out;
    for (const auto& n : names) out.push_back({n, params});
    return out;
}

// Fragments for one task; verify-all expands into several. Errors become
// fragments with verdict ERROR.
inline std::vector<Json> run_task(const LoadedScenario& s, const TaskSpec& t, const RunOptions& opts) {
    std::vector<TaskSpec> expanded;
    if (t.name == "verify-all")
        expanded = verify_all_tasks(s, t.params);
    else
        expanded.push_back(t);
    std::vector<Json> out;
    for (const auto& ts : expanded) {
        try {
            out.push_back(run_single_task(s, ts, opts));
        } catch (const Error& e) {
            Json j;
            j["task"] = ts.name;
            j["verdict"] = "ERROR";
            j["error"] = error_code_name(e.code());
            j["message"] = e.what();
            out.push_back(j);
        }
    }
    return out;
}

struct Report {
    std::string title;
    std::vector<Json> fragments;
    double elapsed_ms = 0;

    std::size_t count(const char* verdict) const {
        std::size_t n = 0;
        for (const auto& f : fragments) n += f["verdict"] == verdict;
        return n;
    }

    // 0 all PASS, 1 any FAIL, 2 any error.
    int exit_code() const {
        if (count("ERROR") > 0) return 2;
        return count("FAIL") > 0 ? 1 : 0;
    }
};

inline Report run_scenario(const LoadedScenario& s, const std::vector<TaskSpec>& tasks, const RunOptions& opts,
                           bool parallel = false) {
    const auto start = std::chrono::steady_clock::now();
    Report r;
    r.title = s.spec.title;
    std::vector<std::vector<Json>> parts(tasks.size());
    if (parallel) {
        std::vector<std::future<std::vector<Json>>> futures;
        for (const auto& t : tasks)
            futures.push_back(std::async(std::launch::async, [&s, t, opts] { return run_task(s, t, opts); }));
        for (std::size_t i = 0; i < tasks.size(); ++i) parts[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) parts[i] = run_task(s, tasks[i], opts);
    }
    for (auto& part : parts)
        for (auto& f : part) r.fragments.push_back(std::move(f));
    r.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

// ---- output ----

inline Json report_json(const Report& r, bool with_timing = true) {
    Json j;
    j["scenario"] = r.title;
    j["fragments"] = r.fragments;
    j["summary"] = {{"pass", r.count("PASS")}, {"fail", r.count("FAIL")}, {"error", r.count("ERROR")}};
    if (with_timing) j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

inline std::string report_text(const Report& r) {
    std::ostringstream out;
    out << "scenario: " << r.title << "\n";
    for (const auto& f : r.fragments) {
        std::string task = f["task"].get<std::string>();
        out << "  " << task << std::string(task.size() < 20 ? 20 - task.size() : 1, ' ')
            << f["verdict"].get<std::string>();
        if (f.contains("witness")) {
            const Json& w = f["witness"];
            out << "  witness " << (w.is_object() && w.contains("point") ? w["point"].dump() : w.dump());
        }
        if (f.contains("message")) out << "  " << f["message"].get<std::string>();
        out << "\n";
    }
    out << "PASS " << r.count("PASS") << "  FAIL " << r.count("FAIL") << "  ERROR " << r.count("ERROR") << "\n";
    return out.str();
}

// Graphviz export: Y edges bold, orbit points listed on their edges and
// vertices, and the quotient tree (gamma as a double circle) when a collapse
// fragment is present.
inline std::string report_dot(const LoadedScenario& s, const Report& r) {
    const MetricGraph& x = *s.space;
    std::optional<Subgraph> y;
    if (x.betti() > 0) y = invariant_graph_Y(x);
    std::map<std::string, std::vector<std::string>> marks;  // vertex name or edge id -> labels
    for (const auto& f : r.fragments) {
        if (f["task"] != "orbits" || !f.contains("orbits")) continue;
        for (const auto& o : f["orbits"]) {
            if (!o.contains("points")) continue;
            for (const auto& pt : o["points"]) {
                const std::string ps = pt.get<std::string>();
                const auto at = ps.find('@');
                if (at == std::string::npos)
                    marks[ps].push_back("*");
                else
                    marks[ps.substr(0, at)].push_back(ps.substr(at + 1));
            }
        }
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    };
    std::ostringstream out;
    out << "graph \"" << s.spec.title << "\" {\n";
    for (std::size_t v = 0; v < x.vertex_count(); ++v) {
        const std::string& n = x.vertex_name(v);
        out << "  \"" << n << "\"";
        if (marks.count(n)) out << " [xlabel=\"orbit\"]";
        out << ";\n";
    }
    for (std::size_t e = 0; e < x.edge_count(); ++e) {
        const Edge& ed = x.edge(e);
        std::string label = ed.id + " (" + format_rational(ed.length) + ")";
        if (marks.count(ed.id)) label += " orbit: " + join(marks[ed.id]);
        out << "  \"" << x.vertex_name(ed.tail) << "\" -- \"" << x.vertex_name(ed.head) << "\" [label=\"" << label
            << "\"";
        if (y && y->contains_edge(x, e)) out << ", color=red, penwidth=3";
        out << "];\n";
    }
    for (const auto& f : r.fragments) {
        if (f["task"] != "collapse" || !f.contains("quotient")) continue;
        const Json& q = f["quotient"];
        out << "  subgraph cluster_quotient {\n    label=\"quotient\";\n";
        for (const auto& v : q["vertices"]) {
            out << "    \"q:" << v.get<std::string>() << "\"";
            if (v == q["gamma"]) out << " [shape=doublecircle]";
            out << ";\n";
        }
        for (const auto& e : q["edges"])
            out << "    \"q:" << e["from"].get<std::string>() << "\" -- \"q:" << e["to"].get<std::string>()
                << "\" [label=\"" << e["id"].get<std::string>() << "\"];\n";
        out << "  }\n";
        break;
    }
    out << "}\n";
    return out.str();
}

// Report JSON without the timing field, for byte comparisons.
inline std::string deterministic_dump(const Report& r) { return report_json(r, false).dump(2); }

}  // namespace dendrodyn

#endif  // DENDRODYN_SCENARIO_HPP
