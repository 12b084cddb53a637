#include <gtest/gtest.h>

#include <random>

#include "dendrodyn/action.hpp"
#include "dendrodyn/homeo.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace dendrodyn;
using fixtures::q;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

// Interval [0, 1] mapped by the given cut list and routes.
PLHomeo interval_map(const SpacePtr& s, std::vector<Rational> cuts, std::vector<std::vector<RouteSegment>> routes) {
    HomeoSpec spec;
    spec.edges.push_back({std::move(cuts), std::move(routes)});
    return PLHomeo::from_spec(s, spec);
}

}  // namespace

TEST(Homeo, IdentityAndFlip) {
    const SpacePtr s = make_space(fixtures::unit_interval());
    const PLHomeo id = PLHomeo::identity(s);
    const PLHomeo flip = interval_map(s, {}, {{{0, Rational(1), Rational(0)}}});
    EXPECT_EQ(flip.apply(s->point(0, q("1/3"))), s->point(0, q("2/3")));
    EXPECT_EQ(flip.apply(s->vertex_point(0)), s->vertex_point(1));
    EXPECT_EQ(compose(flip, flip), id);
    EXPECT_EQ(invert(flip), flip);
}

TEST(Homeo, ValidationErrors) {
    const SpacePtr s = make_space(fixtures::unit_interval());
    EXPECT_EQ(code_of([&] { interval_map(s, {q("1/2")}, {{{0, Rational(0), Rational(1)}}}); }),
              ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] {
                  interval_map(s, {q("1/2")}, {{{0, Rational(0), q("1/4")}}, {{0, q("1/2"), Rational(1)}}});
              }),
              ErrorCode::Discontinuous);
    EXPECT_EQ(code_of([&] { interval_map(s, {}, {{{0, q("1/2"), Rational(1)}}}); }),
              ErrorCode::SpecialPointViolation);
    EXPECT_EQ(code_of([&] {
                  interval_map(s, {q("1/2")}, {{{0, Rational(0), Rational(1)}}, {{0, Rational(1), Rational(0)}}});
              }),
              ErrorCode::NotBijective);
}

TEST(Homeo, BranchPointMustStay) {
    // swapping the leaf x with the center c is not a homeomorphism of the star
    const SpacePtr s = make_space(fixtures::star3());
    HomeoSpec spec;
    spec.edges = {{{}, {{{0, Rational(1), Rational(0)}}}},
                  {{}, {{{1, Rational(0), Rational(1)}}}},
                  {{}, {{{2, Rational(0), Rational(1)}}}}};
    EXPECT_THROW(PLHomeo::from_spec(s, spec), Error);
}

TEST(Homeo, ComposeMismatchedSpaces) {
    const SpacePtr a = make_space(fixtures::unit_interval());
    const SpacePtr b = make_space(fixtures::unit_loop());
    EXPECT_EQ(code_of([&] { compose(PLHomeo::identity(a), PLHomeo::identity(b)); }), ErrorCode::SpaceMismatch);
}

TEST(Homeo, RotationComposition) {
    const SpacePtr s = make_space(fixtures::unit_loop());
    const PLHomeo r = fixtures::loop_rotation(s, q("1/3"));
    const PLHomeo r2 = compose(r, r);
    EXPECT_EQ(r2.apply(s->point(0, q("1/2"))), s->point(0, q("1/6")));
    EXPECT_EQ(compose(r2, r), PLHomeo::identity(s));
    EXPECT_EQ(compose(r, invert(r)), PLHomeo::identity(s));
    EXPECT_EQ(circle_orientation(r), Orientation::Preserving);
}

TEST(Homeo, PushMapIsPiecewiseAffine) {
    const auto sc = fixtures::load("push-map");
    const PLHomeo& f = sc.action.generator(0);
    const MetricGraph& x = *sc.space;
    EXPECT_EQ(f.apply(x.point(0, q("1/2"))), x.point(0, q("2/3")));
    EXPECT_EQ(f.apply(x.point(0, q("1/4"))), x.point(0, q("1/3")));
    EXPECT_EQ(f.apply(x.point(0, q("3/4"))), x.point(0, q("5/6")));
    EXPECT_EQ(f.pieces(0).size(), 2u);
}

TEST(Homeo, ImageOfSubgraph) {
    const auto sc = fixtures::load("dihedral-6");
    const MetricGraph& x = *sc.space;
    Subgraph s;
    s.add_edge(x, 0);
    const Subgraph img = sc.action.generator(0).image(s);
    EXPECT_TRUE(img.contains_edge(x, 1));
    EXPECT_FALSE(img.contains_edge(x, 0));
}

TEST(Action, WordSemanticsApplyLastLetterFirst) {
    const auto sc = fixtures::load("dihedral-6");
    const GroupAction& a = sc.action;
    const GraphPoint p = sc.space->point(0, q("1/5"));
    const Word w{{0, false}, {1, false}};  // rot after sigma
    EXPECT_EQ(a.apply(w, p), a.apply(Letter{0, false}, a.apply(Letter{1, false}, p)));
    EXPECT_EQ(a.element(w).apply(p), a.apply(w, p));
    EXPECT_EQ(a.word_to_string(w), "rot*sigma");
    EXPECT_EQ(a.word_to_string({}), "id");
}

TEST(Orbit, RotationByOneThird) {
    const SpacePtr s = make_space(fixtures::unit_loop());
    const GroupAction a(s, {fixtures::loop_rotation(s, q("1/3"))});
    const OrbitResult o = orbit_bfs(a, s->point(0, q("1/7")), 10);
    EXPECT_TRUE(o.finite());
    EXPECT_EQ(o.points.size(), 3u);
    for (std::size_t i = 0; i < o.points.size(); ++i) EXPECT_EQ(a.apply(o.word_to(i), o.points[0]), o.points[i]);
}

TEST(Orbit, BoundIsReported) {
    const auto sc = fixtures::load("push-map");
    const OrbitResult o = orbit_bfs(sc.action, sc.space->point(0, q("1/2")), 5);
    EXPECT_FALSE(o.finite());
    EXPECT_EQ(o.word_bound, 5u);
    EXPECT_EQ(o.points.size(), 11u);
    EXPECT_THROW(orbit_bfs(sc.action, sc.space->vertex_point(0), 0), Error);
    const OrbitResult fixed = orbit_bfs(sc.action, sc.space->vertex_point(0), 5);
    EXPECT_TRUE(fixed.finite());
    EXPECT_EQ(fixed.points.size(), 1u);
}

TEST(Orbit, MatchesModularArithmetic) {
    const SpacePtr s = make_space(fixtures::unit_loop());
    for (const char* alpha : {"1/2", "1/3", "2/5", "3/8", "5/12"}) {
        const GroupAction a(s, {fixtures::loop_rotation(s, q(alpha))});
        const OrbitResult o = orbit_bfs(a, s->point(0, q("1/97")), 32);
        ASSERT_TRUE(o.finite()) << alpha;
        EXPECT_EQ(o.points.size(), oracle::rotation_orbit_size(q(alpha), 1)) << alpha;
    }
}

TEST(Orbit, AgreesWithWordEnumeration) {
    for (const char* name : {"dihedral-6", "push-map", "two-loops-bridge"}) {
        const auto sc = fixtures::load(name);
        std::mt19937_64 rng(17);
        for (int i = 0; i < 10; ++i) {
            const GraphPoint p = oracle::random_point(*sc.space, rng);
            const OrbitResult o = orbit_bfs(sc.action, p, 6);
            const auto words = oracle::word_images(sc.action, p, 6);
            const std::set<GraphPoint> bfs(o.points.begin(), o.points.end());
            ASSERT_EQ(bfs, words) << name << " " << describe_point(*sc.space, p);
        }
    }
}

TEST(Resolution, ShadowIsStrictNeighbourhood) {
    const auto sc = fixtures::load("interval-flip");
    const MetricGraph& x = *sc.space;
    Resolution res(sc.action, q("1/4"), 8);
    const auto& sh = res.shadow(x.point(0, q("1/8")));
    // orbit {1/8, 7/8}; net {0, 1/4, 1/2, 3/4, 1}
    const std::vector<GraphPoint> want{x.vertex_point(0), x.vertex_point(1), x.point(0, q("1/4")),
                                       x.point(0, q("3/4"))};
    EXPECT_EQ(sh, want);
    for (const auto& p : res.net()) {
        bool near = false;
        for (const auto& o : res.orbit(x.point(0, q("1/8"))).points) near = near || oracle::distance(x, p, o) < q("1/4");
        EXPECT_EQ(near, std::binary_search(sh.begin(), sh.end(), p));
    }
}

TEST(Resolution, ShadowMatchesBruteForceOnGraphs) {
    for (const char* name : {"two-loops-bridge", "theta-swap", "lollipop-collapse"}) {
        const auto sc = fixtures::load(name);
        const MetricGraph& x = *sc.space;
        const Rational eps = diameter(x) / 16;
        const auto net = epsilon_net(x, eps);
        std::mt19937_64 rng(23);
        for (int i = 0; i < 5; ++i) {
            std::vector<GraphPoint> pts{oracle::random_point(x, rng), oracle::random_point(x, rng)};
            const auto sh = epsilon_shadow(x, net, pts, eps);
            std::vector<GraphPoint> brute;
            for (const auto& n : net)
                for (const auto& p : pts)
                    if (oracle::distance(x, n, p) < eps) {
                        brute.push_back(n);
                        break;
                    }
            std::sort(brute.begin(), brute.end());
            ASSERT_EQ(sh, brute) << name;
        }
    }
}
