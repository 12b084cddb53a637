#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dendrodyn/scenario.hpp"

namespace {

int run(const std::string& path, const std::string& task, const std::string& epsilon, long max_word,
        const std::string& format, const std::string& out_path, bool parallel) {
    using namespace dendrodyn;
    const LoadedScenario s = load_scenario(path);
    RunOptions opts;
    if (!epsilon.empty()) {
        opts.epsilon = parse_rational(epsilon);
        if (*opts.epsilon <= 0) throw Error(ErrorCode::ParameterError, "--epsilon must be positive");
    }
    if (max_word > 0) opts.max_word = static_cast<std::size_t>(max_word);

    std::vector<TaskSpec> tasks;
    if (!task.empty()) {
        const auto& known = task_names();
        if (std::find(known.begin(), known.end(), task) == known.end())
            throw Error(ErrorCode::UnknownTask, "unknown task '" + task + "'");
        // reuse parameters declared for this task in the scenario, if any
        TaskSpec t{task, Json::object()};
        for (const auto& st : s.spec.tasks)
            if (st.name == task) t.params = st.params;
        tasks.push_back(t);
    } else {
        tasks = s.spec.tasks;
        if (tasks.empty()) tasks.push_back({"verify-all", Json::object()});
    }

    const Report report = run_scenario(s, tasks, opts, parallel);
    std::string doc;
    if (format == "json")
        doc = report_json(report).dump(2) + "\n";
    else if (format == "text")
        doc = report_text(report);
    else
        doc = report_dot(s, report);

    if (out_path.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + out_path + "'");
        out << doc;
    }
    return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group actions on finite metric graphs: minimal sets, collapse and orbit-space verdicts"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run the tasks of a scenario file");
    std::string path, task, epsilon, format = "json", out;
    long max_word = 0;
    bool parallel = false;
    run_cmd->add_option("scenario", path, "scenario JSON file")->required();
    run_cmd->add_option("--task", task, "run only this task");
    run_cmd->add_option("--epsilon", epsilon, "resolution as num/den (overrides task parameters)");
    run_cmd->add_option("--max-word", max_word, "word length bound (overrides task parameters)")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--format", format, "json, text or dot")->check(CLI::IsMember({"json", "text", "dot"}));
    run_cmd->add_option("--out", out, "write the report here instead of stdout");
    run_cmd->add_flag("--parallel", parallel, "run tasks concurrently");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        return run(path, task, epsilon, max_word, format, out, parallel);
    } catch (const dendrodyn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
