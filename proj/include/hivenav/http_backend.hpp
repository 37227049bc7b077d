#ifndef HIVENAV_HTTP_BACKEND_HPP
#define HIVENAV_HTTP_BACKEND_HPP

#include <condition_variable>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include <httplib.h>

#include "hivenav/backend.hpp"
#include "hivenav/json_io.hpp"

namespace hivenav {

struct HttpBackendConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string path = "/v1/complete";
    int timeout_seconds = 30;
    int max_in_flight = 4;
    std::string prompt_dir;  // optional override for the versioned templates
};

namespace http_detail {

// Built-in v1 templates; a prompt_dir with <role>.v1.txt files overrides them.
inline std::string builtin_template(const std::string& role) {
    if (role == "planner")
        return "You are the manager planner. Goal: {goal}\nMap:\n{map}\nStatus:\n{status}\n"
               "{context}\nReply with JSON {\"subgoals\": [...], \"rationale\": \"...\"}.";
    if (role == "describer")
        return "Summarize the following observation as short tokens.\n{input}\n"
               "Reply with JSON {\"text\": \"...\"}.";
    if (role == "deployer_manager")
        return "Deploy a subtask for this subgoal.\nInfo: {info}\nSubgoal: {subgoal}\n"
               "Strategy hint: {strategy}\nReply with JSON "
               "{\"strategy\": \"...\", \"map_excerpt\": \"...\", \"quantity\": 1}.";
    if (role == "deployer_conductor")
        return "Turn this directive into the simplest flat command list for one sub-agent.\n"
               "Directive: {directive}\nPosition: {position}\n"
               "Reply with JSON {\"steps\": [...]}.";
    if (role == "critic")
        return "Review these outcome reports for {subject} and accept or revise.\n{reports}\n"
               "Reply with JSON {\"verdict\": \"accept\"|\"revise\", \"reasons\": \"...\"}.";
    if (role == "actor")
        return "Emit the next executable action for this command.\nCommand: {command}\n"
               "Observation: {observation}\nReply with JSON "
               "{\"kind\": \"move_to\", \"target\": {\"x\":0,\"y\":0}, \"note\": \"\"}.";
    if (role == "curriculum")
        return "Propose the next curriculum task.\nHistory: {history}\n"
               "Reply with JSON {\"task\": \"...\"}.";
    return "{input}";
}

inline std::string replace_all_placeholders(std::string text, const std::string& key,
                                            const std::string& value) {
    const std::string needle = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace http_detail

// JSON-over-HTTP client shared by every module: posts {role, prompt,
// schema_hint}, expects a JSON body matching the operation schema, retries
// once on a parse failure and then errors out.
class HttpLlmClient {
public:
    explicit HttpLlmClient(HttpBackendConfig config)
        : config_(std::move(config)), in_flight_(0) {}

    json call(const std::string& role, const std::string& prompt,
              const std::string& schema_hint) {
        const json request{{"role", role}, {"prompt", prompt}, {"schema_hint", schema_hint}};
        for (int attempt = 0; attempt < 2; ++attempt) {
            const std::string body = post(request.dump());
            json parsed = json::parse(body, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_object()) return parsed;
        }
        throw BackendError("backend returned unparseable response for role " + role);
    }

    std::string render_prompt(const std::string& role,
                              const std::vector<std::pair<std::string, std::string>>& vars) const {
        std::string tmpl = load_template(role);
        for (const auto& [key, value] : vars)
            tmpl = http_detail::replace_all_placeholders(tmpl, key, value);
        return tmpl;
    }

private:
    std::string post(const std::string& body) {
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [this] { return in_flight_ < config_.max_in_flight; });
            ++in_flight_;
        }
        httplib::Client client(config_.host, config_.port);
        client.set_connection_timeout(config_.timeout_seconds);
        client.set_read_timeout(config_.timeout_seconds);
        auto result = client.Post(config_.path, body, "application/json");
        {
            std::lock_guard lock(mutex_);
            --in_flight_;
        }
        cv_.notify_one();
        if (!result) throw BackendError("backend unreachable: " + to_string(result.error()));
        if (result->status != 200)
            throw BackendError("backend returned status " + std::to_string(result->status));
        return result->body;
    }

    std::string load_template(const std::string& role) const {
        if (!config_.prompt_dir.empty()) {
            std::ifstream in(config_.prompt_dir + "/" + role + ".v1.txt");
            if (in) {
                std::ostringstream buf;
                buf << in.rdbuf();
                return buf.str();
            }
        }
        return http_detail::builtin_template(role);
    }

    HttpBackendConfig config_;
    std::mutex mutex_;
    std::condition_variable cv_;
    int in_flight_;
};

class HttpDescriber final : public Describer {
public:
    explicit HttpDescriber(std::shared_ptr<HttpLlmClient> client) : client_(std::move(client)) {}

    std::string describe_observation(const Observation& obs) override {
        std::ostringstream input;
        input << "agent at " << to_string(obs.position) << " sees " << obs.vision.size()
              << " cells, hears " << obs.audio.size() << " sources";
        return text_call(input.str());
    }

    std::string describe_map(const MapImage& map) override { return text_call(map.text); }

    std::vector<std::string> describe_tokens(const std::vector<std::string>& visual) override {
        std::string joined;
        for (const auto& v : visual) joined += v + " ";
        return tokenize(text_call(joined));
    }

    std::string summarize(const std::string& text) override { return text_call(text); }

private:
    std::string text_call(const std::string& input) {
        const std::string prompt = client_->render_prompt("describer", {{"input", input}});
        const json response = client_->call("describer", prompt, "{\"text\": string}");
        if (!response.contains("text")) throw BackendError("describer response missing text");
        return response.at("text").get<std::string>();
    }

    std::shared_ptr<HttpLlmClient> client_;
};

class HttpPlanner final : public Planner {
public:
    explicit HttpPlanner(std::shared_ptr<HttpLlmClient> client) : client_(std::move(client)) {}

    Plan plan_subgoals(const Goal& goal, const MapImage& map, const std::string& status,
                       const std::string& memory_context) override {
        const std::string prompt = client_->render_prompt(
            "planner", {{"goal", json(goal).dump()},
                        {"map", map.text},
                        {"status", status},
                        {"context", memory_context}});
        const json response =
            client_->call("planner", prompt, "{\"subgoals\": SubGoal[], \"rationale\": string}");
        Plan plan = response.get<Plan>();
        if (plan.subgoals.empty()) throw BackendError("planner returned no subgoals");
        if (plan.subgoals.size() > 8) plan.subgoals.resize(8);
        return plan;
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

class HttpManagerDeployer final : public ManagerDeployer {
public:
    explicit HttpManagerDeployer(std::shared_ptr<HttpLlmClient> client)
        : client_(std::move(client)) {}

    SubtaskDirective deploy_subtask(const std::string& multimodal_info, const MapImage& map,
                                    const SubGoal& subgoal, const std::string& strategy) override {
        (void)map;
        const std::string prompt = client_->render_prompt(
            "deployer_manager",
            {{"info", multimodal_info}, {"subgoal", json(subgoal).dump()}, {"strategy", strategy}});
        const json response = client_->call(
            "deployer_manager", prompt,
            "{\"strategy\": string, \"map_excerpt\": string, \"quantity\": int}");
        SubtaskDirective directive;
        directive.subgoal = subgoal;
        directive.strategy = response.value("strategy", strategy);
        directive.map_excerpt = response.value("map_excerpt", std::string{});
        directive.quantity = response.value("quantity", subgoal.quantity);
        directive.region = response.contains("region") ? response.at("region").get<Rect>()
                                                       : subgoal.region;
        return directive;
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

class HttpConductorDeployer final : public ConductorDeployer {
public:
    explicit HttpConductorDeployer(std::shared_ptr<HttpLlmClient> client)
        : client_(std::move(client)) {}

    SubCommand deploy_subcommand(const SubtaskDirective& task, Position position_info) override {
        const std::string prompt = client_->render_prompt(
            "deployer_conductor",
            {{"directive", json(task).dump()}, {"position", to_string(position_info)}});
        const json response =
            client_->call("deployer_conductor", prompt, "{\"steps\": ActionStep[]}");
        SubCommand cmd;
        cmd.assigned_target = position_info;
        cmd.steps = response.at("steps").get<std::vector<ActionStep>>();
        if (cmd.steps.empty()) throw BackendError("deployer returned empty command");
        return cmd;
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

class HttpCritic final : public Critic {
public:
    explicit HttpCritic(std::shared_ptr<HttpLlmClient> client) : client_(std::move(client)) {}

    Critique critique(const std::string& subject,
                      const std::vector<std::string>& outcome_reports) override {
        std::string reports;
        for (const auto& r : outcome_reports) reports += r + "\n";
        const std::string prompt =
            client_->render_prompt("critic", {{"subject", subject}, {"reports", reports}});
        const json response = client_->call(
            "critic", prompt, "{\"verdict\": \"accept\"|\"revise\", \"reasons\": string}");
        return response.get<Critique>();
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

class HttpActor final : public Actor {
public:
    explicit HttpActor(std::shared_ptr<HttpLlmClient> client) : client_(std::move(client)) {}

    ActionStep act(SubCommand& command, const Observation& obs,
                   const std::vector<SkillRecord>& skills) override {
        (void)skills;  // skill selection happens server-side on this backend
        if (command.exhausted()) throw CommandExhausted{};
        std::ostringstream observation;
        observation << "at " << to_string(obs.position);
        const std::string prompt = client_->render_prompt(
            "actor",
            {{"command", json(command).dump()}, {"observation", observation.str()}});
        const json response = client_->call(
            "actor", prompt, "{\"kind\": ActionKind, \"target\": Position, \"note\": string}");
        return response.get<ActionStep>();
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

class HttpCurriculum final : public Curriculum {
public:
    explicit HttpCurriculum(std::shared_ptr<HttpLlmClient> client) : client_(std::move(client)) {}

    std::string propose_next_task(const CurriculumLog& log, const MapImage& map) override {
        (void)map;
        std::string history;
        for (const auto& ep : log.episodes)
            history += ep.proposed_task + (ep.succeeded ? " (ok); " : " (failed); ");
        const std::string prompt = client_->render_prompt("curriculum", {{"history", history}});
        const json response = client_->call("curriculum", prompt, "{\"task\": string}");
        if (!response.contains("task")) throw BackendError("curriculum response missing task");
        return response.at("task").get<std::string>();
    }

private:
    std::shared_ptr<HttpLlmClient> client_;
};

// Skill lookup is a local database scan on every backend.
class LocalSkillResolver final : public SkillResolver {
public:
    explicit LocalSkillResolver(std::shared_ptr<SkillLibrary> library)
        : library_(std::move(library)) {}

    std::vector<SkillRecord> lookup(const std::vector<std::string>& query, int k) override {
        std::vector<SkillRecord> out;
        if (!library_) return out;
        for (auto& [skill, score] : library_->lookup(query, k)) out.push_back(skill);
        return out;
    }

private:
    std::shared_ptr<SkillLibrary> library_;
};

inline BackendBundle make_http_bundle(const HttpBackendConfig& config,
                                      std::shared_ptr<SkillLibrary> skills = nullptr) {
    auto client = std::make_shared<HttpLlmClient>(config);
    BackendBundle bundle;
    bundle.kind = BackendKind::HttpLlm;
    bundle.planner = std::make_shared<HttpPlanner>(client);
    bundle.describer = std::make_shared<HttpDescriber>(client);
    bundle.deployer = std::make_shared<HttpManagerDeployer>(client);
    bundle.critic_manager = std::make_shared<HttpCritic>(client);
    bundle.actor = std::make_shared<HttpActor>(client);
    bundle.curriculum = std::make_shared<HttpCurriculum>(client);
    bundle.critic_conductor = std::make_shared<HttpCritic>(client);
    bundle.deployer_conductor = std::make_shared<HttpConductorDeployer>(client);
    bundle.skill_resolver = std::make_shared<LocalSkillResolver>(std::move(skills));
    return bundle;
}

}  // namespace hivenav

#endif
