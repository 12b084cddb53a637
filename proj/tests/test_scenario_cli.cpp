#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace dendrodyn;

namespace {

struct CliResult {
    int code;
    std::string out;
};

CliResult cli(const std::string& args) {
    const std::string cmd = std::string(DENDRODYN_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("dendrodyn_test_" + name);
    std::ofstream(p) << content;
    return p;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ScenarioModel, RoundTripThroughJson) {
    for (const auto& name : fixtures::scenario_names()) {
        const Scenario s = parse_scenario(read_file(fixtures::scenario_path(name)));
        const Scenario back = scenario_from_json(scenario_to_json(s));
        EXPECT_EQ(back, s) << name;
        EXPECT_EQ(scenario_to_json(back).dump(), scenario_to_json(s).dump()) << name;
    }
}

TEST(ScenarioModel, ParseErrorsCarryPosition) {
    try {
        parse_scenario("{\"title\": ");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("byte"), std::string::npos) << e.what();
    }
}

TEST(ScenarioModel, ValidationErrors) {
    Json j = scenario_to_json(parse_scenario(read_file(fixtures::scenario_path("interval-flip"))));
    Json bad_len = j;
    bad_len["space"]["edges"][0]["length"] = "1/0";
    EXPECT_EQ(code_of([&] { scenario_from_json(bad_len); }), ErrorCode::ValidationError);
    Json no_gen = j;
    no_gen["generators"] = Json::array();
    EXPECT_EQ(code_of([&] { instantiate(scenario_from_json(no_gen)); }), ErrorCode::ValidationError);
    Json bad_edge = j;
    bad_edge["generators"][0]["map"][0]["edge"] = "nope";
    EXPECT_EQ(code_of([&] { instantiate(scenario_from_json(bad_edge)); }), ErrorCode::ValidationError);
    Json not_homeo = j;
    not_homeo["generators"][0]["map"][0]["routes"][0][0] = {{"edge", "e"}, {"from", "1/2"}, {"to", "1"}};
    EXPECT_EQ(code_of([&] { instantiate(scenario_from_json(not_homeo)); }), ErrorCode::ValidationError);
    Json missing = j;
    missing.erase("space");
    EXPECT_EQ(code_of([&] { scenario_from_json(missing); }), ErrorCode::ValidationError);
}

TEST(Tasks, BundledScenariosMeetExpectations) {
    for (const auto& name : fixtures::scenario_names()) {
        const auto sc = fixtures::load(name);
        const Report r = run_scenario(sc, sc.spec.tasks, {});
        ASSERT_EQ(r.fragments.size(), sc.spec.tasks.size()) << name;
        std::map<std::string, std::string> got;
        for (const auto& f : r.fragments) got[f["task"].get<std::string>()] = f["verdict"].get<std::string>();
        for (const auto& [task, want] : sc.spec.expected) EXPECT_EQ(got[task], want) << name << " " << task;
    }
}

TEST(Tasks, UnknownTaskAndBadParameters) {
    const auto sc = fixtures::load("interval-flip");
    EXPECT_EQ(code_of([&] { run_single_task(sc, {"spin", Json::object()}, {}); }), ErrorCode::UnknownTask);
    const Report r = run_scenario(sc, {{"orbits", Json::object()}}, {});
    ASSERT_EQ(r.fragments.size(), 1u);
    EXPECT_EQ(r.fragments[0]["verdict"], "ERROR");
    EXPECT_EQ(r.exit_code(), 2);
    const Report bad = run_scenario(sc, {{"periodic", Json{{"epsilon", "-1/2"}}}}, {});
    EXPECT_EQ(bad.fragments[0]["verdict"], "ERROR");
}

TEST(Tasks, VerifyAllExpandsPerSpace) {
    const auto circle = fixtures::load("rotation-third");
    const auto tasks = verify_all_tasks(circle, Json::object());
    auto has = [&](const std::vector<TaskSpec>& ts, const char* n) {
        return std::any_of(ts.begin(), ts.end(), [&](const TaskSpec& t) { return t.name == n; });
    };
    EXPECT_TRUE(has(tasks, "circle-census"));
    EXPECT_FALSE(has(tasks, "collapse"));
    const auto lolli = verify_all_tasks(fixtures::load("lollipop-collapse"), Json::object());
    EXPECT_TRUE(has(lolli, "collapse"));
    EXPECT_FALSE(has(lolli, "circle-census"));
}

TEST(Tasks, ParallelMatchesSequential) {
    const auto sc = fixtures::load("dihedral-6");
    const std::vector<TaskSpec> all{{"verify-all", Json::object()}, {"limit-check", sc.spec.tasks.back().params}};
    const Report seq = run_scenario(sc, all, {}, false);
    const Report par = run_scenario(sc, all, {}, true);
    EXPECT_EQ(deterministic_dump(seq), deterministic_dump(par));
}

TEST(Cli, ExitCodes) {
    const std::string dir = DENDRODYN_SCENARIO_DIR;
    EXPECT_EQ(cli("run " + dir + "/interval-flip.json").code, 0);
    EXPECT_EQ(cli("run " + dir + "/push-map.json --task relation").code, 1);
    EXPECT_EQ(cli("run " + dir + "/missing.json").code, 2);
    EXPECT_EQ(cli("run " + dir + "/interval-flip.json --task spin").code, 2);
    EXPECT_EQ(cli("run " + dir + "/interval-flip.json --format yaml").code, 2);
    EXPECT_EQ(cli("").code, 2);
    const auto broken = temp_file("broken.json", "{ not json");
    EXPECT_EQ(cli("run " + broken.string()).code, 2);
}

TEST(Cli, OverridesAndFormats) {
    const std::string dir = DENDRODYN_SCENARIO_DIR;
    const auto r = cli("run " + dir + "/push-map.json --task periodic --epsilon 1/16 --max-word 8");
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["fragments"][0]["resolution"]["epsilon"], "1/16");
    EXPECT_EQ(j["fragments"][0]["resolution"]["max_word"], 8);
    const auto text = cli("run " + dir + "/interval-flip.json --format text").out;
    EXPECT_NE(text.find("PASS"), std::string::npos);
    EXPECT_EQ(cli("run " + dir + "/interval-flip.json --epsilon 0").code, 2);
}

TEST(Cli, DotOutputStructure) {
    const std::string dir = DENDRODYN_SCENARIO_DIR;
    const std::string dot = cli("run " + dir + "/two-loops-bridge.json --task collapse --format dot").out;
    EXPECT_EQ(dot.rfind("graph ", 0), 0u);
    EXPECT_NE(dot.find("color=red"), std::string::npos);
    EXPECT_NE(dot.find("gamma"), std::string::npos);
    EXPECT_NE(dot.find("doublecircle"), std::string::npos);
    EXPECT_EQ(std::count(dot.begin(), dot.end(), '{'), std::count(dot.begin(), dot.end(), '}'));
}

TEST(Cli, OutFileAndDeterminism) {
    const std::string dir = DENDRODYN_SCENARIO_DIR;
    const auto out = std::filesystem::temp_directory_path() / "dendrodyn_test_out.json";
    std::filesystem::remove(out);
    EXPECT_EQ(cli("run " + dir + "/lollipop-collapse.json --out " + out.string()).code, 0);
    const Json j = Json::parse(read_file(out.string()));
    EXPECT_EQ(j["summary"]["fail"], 0);
    const auto sc = fixtures::load("two-loops-bridge");
    const std::vector<TaskSpec> all{{"verify-all", Json::object()}};
    EXPECT_EQ(deterministic_dump(run_scenario(sc, all, {})), deterministic_dump(run_scenario(sc, all, {})));
}
