#ifndef DENDRODYN_TEST_FIXTURES_HPP
#define DENDRODYN_TEST_FIXTURES_HPP

#include <string>
#include <tuple>
#include <vector>

#include "dendrodyn/scenario.hpp"

namespace fixtures {

using namespace dendrodyn;

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"interval-flip",   "push-map",          "reflection-circle",
                                                "rotation-third",  "dihedral-6",        "theta-swap",
                                                "lollipop-collapse", "two-loops-bridge", "star-rotation"};
    return names;
}

inline std::string scenario_path(const std::string& name) {
    return std::string(DENDRODYN_SCENARIO_DIR) + "/" + name + ".json";
}

inline LoadedScenario load(const std::string& name) { return load_scenario(scenario_path(name)); }

inline Rational q(const char* s) { return parse_rational(s); }

// Edges given as (id, from, to, length).
inline GraphDescription graph(std::vector<std::string> vertices,
                              std::vector<std::tuple<std::string, std::string, std::string, const char*>> edges) {
    GraphDescription d;
    d.vertices = std::move(vertices);
    for (auto& [id, from, to, len] : edges) d.edges.push_back({id, from, to, parse_rational(len)});
    return d;
}

inline GraphDescription unit_interval() { return graph({"a", "b"}, {{"e", "a", "b", "1"}}); }

inline GraphDescription unit_loop() { return graph({"o"}, {{"c", "o", "o", "1"}}); }

inline GraphDescription theta() {
    return graph({"p", "q"}, {{"e0", "p", "q", "1"}, {"e1", "p", "q", "1"}, {"e2", "p", "q", "2"}});
}

inline GraphDescription lollipop() {
    return graph({"v0", "v1"}, {{"loop", "v0", "v0", "1"}, {"stick", "v0", "v1", "1"}});
}

// Circle made of four unit edges.
inline GraphDescription square() {
    return graph({"a", "b", "c", "d"},
                 {{"ab", "a", "b", "1"}, {"bc", "b", "c", "1"}, {"cd", "c", "d", "1"}, {"da", "d", "a", "1"}});
}

inline GraphDescription star3() {
    return graph({"c", "x", "y", "z"}, {{"cx", "c", "x", "1"}, {"cy", "c", "y", "1"}, {"cz", "c", "z", "1"}});
}

// Rotation of a single loop of length 1 by alpha in (0, 1).
inline PLHomeo loop_rotation(const SpacePtr& s, const Rational& alpha) {
    HomeoSpec spec;
    EdgeMapSpec m;
    m.cuts = {1 - alpha};
    m.routes = {{{0, alpha, Rational(1)}}, {{0, Rational(0), alpha}}};
    spec.edges.push_back(m);
    return PLHomeo::from_spec(s, spec);
}

}  // namespace fixtures

#endif  // DENDRODYN_TEST_FIXTURES_HPP
