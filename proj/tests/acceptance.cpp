// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "dendrodyn/hyperspace.hpp"
#include "dendrodyn/orbit_structure.hpp"
#include "dendrodyn/quotient.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dendrodyn;
using fixtures::q;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [" << what << "]";
        }
    }
};

using Check = std::function<void(Outcome&)>;

void c1(Outcome& o) {
    const auto sc = fixtures::load("reflection-circle");
    const auto c = circle_orbit_cardinal_census(sc.action, default_seeds(*sc.space, q("1/32")), 64);
    const std::set<std::size_t> cards(c.cardinals.begin(), c.cardinals.end());
    o.require(cards == std::set<std::size_t>{1, 2}, "cardinals are not {1,2}");
    o.require(c.p == 1, "p != 1");
    o.require(c.pass, "census verdict");
    o.detail << " orbits=" << c.orbits_checked;
}

void c2(Outcome& o) {
    const auto sc = fixtures::load("dihedral-6");
    const auto c = circle_orbit_cardinal_census(sc.action, default_seeds(*sc.space, q("1/64")), 64);
    bool ok = true;
    for (std::size_t k : c.cardinals) ok = ok && (k == 3 || k == 6);
    o.require(ok, "cardinal outside {3,6}");
    o.require(c.p == 3, "p != 3");
    o.require(c.orbits_checked >= 20, "fewer than 20 orbits");
    o.require(c.pass, "census verdict");
    o.detail << " orbits=" << c.orbits_checked;
}

void c3(Outcome& o) {
    for (const char* name : {"theta-swap", "star-rotation"}) {
        const auto sc = fixtures::load(name);
        const Rational eps = diameter(*sc.space) / 128;
        Resolution res(sc.action, eps, 64);
        const auto seeds = default_seeds(*sc.space, eps);
        o.require(seeds.size() >= 30, std::string(name) + ": fewer than 30 seeds");
        std::size_t finite = 0;
        for (const auto& s : seeds) {
            const auto r = approx_minimal(res, s);
            o.require(r.minimal && r.descriptor->kind == MinimalKind::FiniteOrbit,
                      std::string(name) + ": " + describe_point(*sc.space, s));
            finite += r.minimal && r.descriptor->kind == MinimalKind::FiniteOrbit;
        }
        o.detail << " " << name << "=" << finite << "/" << seeds.size();
    }
}

void c4(Outcome& o) {
    const auto sc = fixtures::load("interval-flip");
    const auto orbits = find_finite_orbits(sc.action, default_seeds(*sc.space, q("1/128")), 64);
    std::set<std::size_t> cards;
    for (const auto& d : orbits) cards.insert(*d.cardinality);
    o.require(cards == std::set<std::size_t>{1, 2}, "cardinals are not {1,2}");
    o.detail << " orbits=" << orbits.size();
}

void c5(Outcome& o) {
    for (const char* name : {"lollipop-collapse", "two-loops-bridge"}) {
        const auto sc = fixtures::load(name);
        const MetricGraph& x = *sc.space;
        const QuotientDendrite qd = collapse_Y(sc.space);
        const MetricGraph& t = *qd.space;
        o.require(oracle::betti(t) == 0, std::string(name) + ": quotient has a cycle");
        const GroupAction b = project_action(sc.action, qd);
        for (const auto& g : b.generators()) o.require(g.apply(qd.gamma) == qd.gamma, "gamma moved");
        std::mt19937_64 rng(0xC5);
        std::size_t lip = 0, tri = 0;
        for (int i = 0; i < 1000; ++i) {
            const GraphPoint u = oracle::random_point(x, rng);
            const GraphPoint v = oracle::random_point(x, rng);
            const GraphPoint w = oracle::random_point(x, rng);
            if (quotient_distance(qd, u, v) > oracle::distance(x, u, v)) ++lip;
            const Rational uv = distance(t, qd.project(u), qd.project(v));
            const Rational vw = distance(t, qd.project(v), qd.project(w));
            const Rational uw = distance(t, qd.project(u), qd.project(w));
            if (uw > uv + vw || uv != distance(t, qd.project(v), qd.project(u)) || uv != quotient_distance(qd, u, v))
                ++tri;
        }
        o.require(lip == 0, std::string(name) + ": Lipschitz violations");
        o.require(tri == 0, std::string(name) + ": metric violations");
        o.detail << " " << name << ":lip=" << lip << ",metric=" << tri;
    }
}

void c6(Outcome& o) {
    const auto sc = fixtures::load("reflection-circle");
    const MetricGraph& x = *sc.space;
    const std::vector<GraphPoint> limit{x.vertex_point(*x.find_vertex("one"))};
    std::vector<std::vector<GraphPoint>> family;
    std::size_t exact = 0;
    for (int n = 1; n <= 200; ++n) {
        const OrbitResult orb = orbit_bfs(sc.action, x.point(0, Rational(1, n)), 16);
        family.push_back(orb.sorted());
        exact += orb.finite() && hausdorff_distance(x, family.back(), limit) == Rational(1, n);
    }
    o.require(exact == 200, "d_H(M_n, limit) != 1/n");
    const auto r = minimal_family_limit_check(sc.action, family, q("1/100"), 64);
    o.require(r.pass, "limit check");
    o.require(r.limit && r.limit->points == limit, "limit is not the fixed point");
    o.detail << " exact=" << exact << "/200";
}

void c7(Outcome& o) {
    for (const auto& name : fixtures::scenario_names()) {
        const auto sc = fixtures::load(name);
        const Rational eps = diameter(*sc.space) / 128;
        Resolution res(sc.action, eps, 64);
        const auto u = union_minimal_closed_check(res, default_seeds(*sc.space, eps));
        o.require(u.pass, name);
    }
}

void c8(Outcome& o) {
    for (const auto& name : fixtures::scenario_names()) {
        const auto sc = fixtures::load(name);
        const MetricGraph& x = *sc.space;
        if (classify_space(x) == SpaceKind::Circle) continue;
        const Rational d = diameter(x);
        Resolution res(sc.action, d / 128, 64);
        const auto seeds = default_seeds(x, d / 128);
        const bool rel = relation_closedness_test(sc.action, {d / 8, d / 32, d / 128}, 64).pass;
        const bool ap = pointwise_ap_test(res, seeds).pass;
        const bool ne = non_endpoint_orbit_test(res, seeds).pass;
        o.require(rel == ap && ap == ne, name + ": verdicts disagree");
        if (name == "push-map") {
            const auto v = relation_closedness_test(sc.action, {d / 8, d / 32, d / 128}, 64);
            o.require(!v.pass && v.witness && !v.witness->sequence.empty(), "push-map relation witness");
        }
    }
}

void c9(Outcome& o) {
    std::size_t dist = 0, haus = 0, words = 0;
    for (const auto& name : fixtures::scenario_names()) {
        const auto sc = fixtures::load(name);
        const MetricGraph& x = *sc.space;
        std::mt19937_64 rng(0xC9);
        for (int i = 0; i < 500; ++i) {
            const GraphPoint a = oracle::random_point(x, rng);
            const GraphPoint b = oracle::random_point(x, rng);
            dist += distance(x, a, b) == oracle::distance(x, a, b);
        }
    }
    o.require(dist == 500 * fixtures::scenario_names().size(), "distance mismatch");
    {
        std::mt19937_64 rng(0xC9A);
        std::uniform_int_distribution<std::size_t> pick(0, fixtures::scenario_names().size() - 1);
        std::uniform_int_distribution<int> size(1, 4);
        std::vector<LoadedScenario> all;
        for (const auto& name : fixtures::scenario_names()) all.push_back(fixtures::load(name));
        for (int i = 0; i < 200; ++i) {
            const MetricGraph& x = *all[pick(rng)].space;
            std::vector<GraphPoint> a, b;
            for (int k = size(rng); k > 0; --k) a.push_back(oracle::random_point(x, rng));
            for (int k = size(rng); k > 0; --k) b.push_back(oracle::random_point(x, rng));
            haus += hausdorff_distance(x, a, b) == oracle::hausdorff(x, a, b);
        }
    }
    o.require(haus == 200, "Hausdorff mismatch");
    {
        std::mt19937_64 rng(0xC9B);
        const std::vector<std::string> names{"dihedral-6", "push-map", "two-loops-bridge", "star-rotation",
                                             "reflection-circle"};
        for (int i = 0; i < 50; ++i) {
            const auto sc = fixtures::load(names[i % names.size()]);
            const GraphPoint p = oracle::random_point(*sc.space, rng);
            const OrbitResult orb = orbit_bfs(sc.action, p, 6);
            words += std::set<GraphPoint>(orb.points.begin(), orb.points.end()) == oracle::word_images(sc.action, p, 6);
        }
    }
    o.require(words == 50, "orbit/word mismatch");
    o.detail << " distance=" << dist << " hausdorff=" << haus << " orbits=" << words;
}

void c10(Outcome& o) {
    for (const auto& name : fixtures::scenario_names()) {
        const auto sc = fixtures::load(name);
        const std::vector<TaskSpec> all{{"verify-all", Json::object()}};
        const std::string first = deterministic_dump(run_scenario(sc, all, {}));
        const std::string second = deterministic_dump(run_scenario(sc, all, {}));
        o.require(first == second, name + ": output differs");
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Check>> criteria{
        {"C1 reflection census is {1,2} with p=1", c1},
        {"C2 dihedral orbits have 3 or 6 points", c2},
        {"C3 theta and star minimal sets are finite orbits", c3},
        {"C4 interval flip orbits have 1 or 2 points", c4},
        {"C5 collapsed quotients are trees with gamma fixed", c5},
        {"C6 shrinking minimal sets converge to a minimal set", c6},
        {"C7 union of minimal sets is closed", c7},
        {"C8 orbit-structure verdicts agree", c8},
        {"C9 oracle agreement", c9},
        {"C10 verify-all is deterministic", c10},
    };
    bool all = true;
    for (const auto& [label, check] : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            check(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > 10) o.require(false, "took longer than 10 s");
        all = all && o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << label << " (" << secs << " s)" << o.detail.str() << "\n";
    }
    return all ? 0 : 1;
}
