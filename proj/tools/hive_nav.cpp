// hive-nav: run task-family experiments, dump worlds, and inspect memory files.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hivenav/harness.hpp"
#include "hivenav/http_backend.hpp"
#include "hivenav/persistence.hpp"
#include "hivenav/scripted_backend.hpp"

using namespace hivenav;

namespace {

std::vector<std::uint64_t> read_seeds_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open seeds file: " + path);
    std::vector<std::uint64_t> seeds;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        seeds.push_back(std::stoull(line.substr(first)));
    }
    if (seeds.empty()) throw std::runtime_error("seeds file has no seeds: " + path);
    return seeds;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return json::parse(in);
}

// Built-in goal-search scenario used when no --goal/--world files are given.
WorldConfig default_world(TaskFamily family) {
    WorldConfig config;
    config.width = 64;
    config.height = 64;
    config.terrain_count = 4;
    if (family == TaskFamily::BlockSearch) {
        config.width = 128;
        config.height = 128;
        config.layout = WorldLayout::DiamondGrid16;
    } else if (family == TaskFamily::MapExploration) {
        config.width = 128;
        config.height = 128;
    } else {
        GoalPlacement lamp;
        lamp.id = "lamp0";
        lamp.name = "lamp";
        lamp.position = Position{48, 48};
        config.goal_spec = {lamp};
    }
    return config;
}

Goal default_goal() {
    Goal goal;
    goal.kind = GoalKind::Object;
    goal.payload = {"lamp"};
    goal.count = 1;
    return goal;
}

AblationFlags parse_ablation(const std::string& list) {
    AblationFlags flags;
    std::istringstream in(list);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        if (item == "dm")
            flags.no_dynamic_map = true;
        else if (item == "ao")
            flags.no_auto_organize = true;
        else
            throw std::runtime_error("unknown ablation switch: " + item + " (use dm,ao)");
    }
    return flags;
}

struct RunOptions {
    std::string task = "goal-search";
    int agents = 8;
    std::string seeds_file;
    std::uint64_t seed = 1;
    std::string backend = "scripted";
    std::string ablate;
    std::string out_dir;
    std::string goal_file;
    std::string world_file;
    bool log_messages = false;
    bool spread = false;
    int max_iters = 100;
    int trials_per_seed = 1;
    std::string http_host = "127.0.0.1";
    int http_port = 8080;
    std::string prompt_dir;
};

TaskSpec build_spec(const RunOptions& opt) {
    TaskSpec spec;
    if (opt.task == "goal-search")
        spec.family = TaskFamily::GoalSearch;
    else if (opt.task == "block-search")
        spec.family = TaskFamily::BlockSearch;
    else if (opt.task == "map-exploration")
        spec.family = TaskFamily::MapExploration;
    else
        throw std::runtime_error("unknown task: " + opt.task);

    spec.world = opt.world_file.empty() ? default_world(spec.family)
                                        : read_json_file(opt.world_file).get<WorldConfig>();
    if (spec.family == TaskFamily::GoalSearch)
        spec.goal = opt.goal_file.empty() ? default_goal()
                                          : read_json_file(opt.goal_file).get<Goal>();
    spec.n_agents = opt.agents;
    spec.max_iters = opt.max_iters;
    spec.trials_per_seed = opt.trials_per_seed;
    spec.seeds = opt.seeds_file.empty() ? std::vector<std::uint64_t>{opt.seed}
                                        : read_seeds_file(opt.seeds_file);
    spec.ablation = parse_ablation(opt.ablate);
    spec.spawn = opt.spread ? SpawnPlacement::Spread : SpawnPlacement::Clustered;
    spec.validate();
    return spec;
}

BackendBundle build_bundle(const RunOptions& opt) {
    if (opt.backend == "scripted") return make_scripted_bundle();
    if (opt.backend == "http") {
        HttpBackendConfig config;
        config.host = opt.http_host;
        config.port = opt.http_port;
        config.prompt_dir = opt.prompt_dir;
        return make_http_bundle(config);
    }
    throw std::runtime_error("unknown backend: " + opt.backend + " (use scripted|http)");
}

int cmd_run(const RunOptions& opt) {
    const TaskSpec spec = build_spec(opt);
    const BackendBundle bundle = build_bundle(opt);

    std::filesystem::path out = opt.out_dir.empty() ? "." : opt.out_dir;
    std::filesystem::create_directories(out);
    std::ofstream trace(out / "trace.jsonl");
    std::ofstream messages;
    if (opt.log_messages) messages.open(out / "messages.jsonl");

    const RunResult result =
        run_task(spec, bundle, &trace, opt.log_messages ? &messages : nullptr);

    std::ofstream(out / "summary.json") << result.summary.dump(2) << "\n";
    std::ofstream(out / "table.md") << result.table_md;
    std::cout << result.table_md;
    std::cout << "wrote " << (out / "summary.json").string() << ", "
              << (out / "table.md").string() << ", " << (out / "trace.jsonl").string();
    if (opt.log_messages) std::cout << ", " << (out / "messages.jsonl").string();
    std::cout << "\n";
    return result.all_trials_completed ? 0 : 1;
}

int cmd_replay(const RunOptions& opt, const std::string& trace_path) {
    const TaskSpec spec = build_spec(opt);
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error("cannot open trace: " + trace_path);
    std::cout << replay_summary(spec, in).dump(2) << "\n";
    return 0;
}

int cmd_world_dump(const std::string& world_file, std::uint64_t seed) {
    WorldConfig config = world_file.empty() ? default_world(TaskFamily::GoalSearch)
                                            : read_json_file(world_file).get<WorldConfig>();
    if (world_file.empty()) config.seed = seed;
    std::cout << dump_world(generate_world(config));
    return 0;
}

int cmd_memory_inspect(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open memory file: " + file);
    const MemoryStore store = load_memory_jsonl(in);
    std::cout << store.size() << " entries\n";
    for (const auto& entry : store.entries()) {
        std::cout << "entry " << entry.id << " (step " << entry.created_step
                  << "): " << entry.task_text << "\n  observation:";
        for (const auto& tok : entry.obs_descriptor) std::cout << " " << tok;
        std::cout << "\n  plan:";
        for (const auto& sg : entry.plan.subgoals)
            std::cout << " " << subgoal_kind_name(sg.kind) << "@"
                      << to_string(sg.region.center());
        std::cout << "\n";
    }
    return 0;
}

int cmd_memory_query(const std::string& file, const std::string& text, int k) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open memory file: " + file);
    const MemoryStore store = load_memory_jsonl(in);
    for (const auto& [entry, score] : store.retrieve_topk(tokenize(text), k)) {
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(4);
        line << score.score;
        std::cout << "entry " << entry.id << " score " << line.str() << ": " << entry.task_text
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical multi-agent navigation harness"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string trace_path, memory_file, query_text, world_file;
    std::uint64_t dump_seed = 1;
    int query_k = 5;

    CLI::App* run = app.add_subcommand("run", "run trials for one task family");
    run->add_option("--task", opt.task, "goal-search|block-search|map-exploration");
    run->add_option("--agents", opt.agents, "agent budget (1..8)");
    run->add_option("--seeds", opt.seeds_file, "file with one seed per line");
    run->add_option("--seed", opt.seed, "single seed (when no --seeds file)");
    run->add_option("--backend", opt.backend, "scripted|http");
    run->add_option("--ablate", opt.ablate, "comma list of dm,ao");
    run->add_option("--out", opt.out_dir, "output directory");
    run->add_option("--goal", opt.goal_file, "goal JSON file (goal-search)");
    run->add_option("--world", opt.world_file, "world config JSON file");
    run->add_option("--max-iters", opt.max_iters, "iteration cap per trial");
    run->add_option("--trials-per-seed", opt.trials_per_seed, "trials per seed");
    run->add_flag("--log-messages", opt.log_messages, "write messages.jsonl envelope log");
    run->add_flag("--spread", opt.spread, "spread spawn instead of clustered");
    run->add_option("--http-host", opt.http_host, "http backend host");
    run->add_option("--http-port", opt.http_port, "http backend port");
    run->add_option("--prompt-dir", opt.prompt_dir, "prompt template directory");

    CLI::App* replay = app.add_subcommand("replay", "rebuild summary.json from a trace");
    replay->add_option("--trace", trace_path, "trace.jsonl path")->required();
    replay->add_option("--task", opt.task, "task family the trace came from");
    replay->add_option("--agents", opt.agents, "agent budget used for the trace");
    replay->add_option("--world", opt.world_file, "world config JSON file");
    replay->add_option("--goal", opt.goal_file, "goal JSON file");
    replay->add_option("--seed", opt.seed, "seed (metadata only)");
    replay->add_option("--max-iters", opt.max_iters, "iteration cap used for the trace");

    CLI::App* world = app.add_subcommand("world", "world utilities");
    CLI::App* dump = world->add_subcommand("dump", "print the grid as text");
    dump->add_option("--world", world_file, "world config JSON file");
    dump->add_option("--seed", dump_seed, "seed for the built-in default world");

    CLI::App* memory = app.add_subcommand("memory", "memory file utilities");
    CLI::App* inspect = memory->add_subcommand("inspect", "list entries of a memory JSONL file");
    inspect->add_option("file", memory_file, "memory JSONL file")->required();
    CLI::App* query = memory->add_subcommand("query", "top-k retrieval against a memory file");
    query->add_option("file", memory_file, "memory JSONL file")->required();
    query->add_option("--text", query_text, "query text")->required();
    query->add_option("-k", query_k, "number of results");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(opt);
        if (replay->parsed()) return cmd_replay(opt, trace_path);
        if (world->parsed() && dump->parsed()) return cmd_world_dump(world_file, dump_seed);
        if (memory->parsed() && inspect->parsed()) return cmd_memory_inspect(memory_file);
        if (memory->parsed() && query->parsed())
            return cmd_memory_query(memory_file, query_text, query_k);
        std::cerr << "missing subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
