#ifndef HIVENAV_COMMS_HPP
#define HIVENAV_COMMS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hivenav/backend.hpp"
#include "hivenav/directives.hpp"
#include "hivenav/dynamic_map.hpp"
#include "hivenav/ids.hpp"
#include "hivenav/json_io.hpp"

namespace hivenav {

enum class MsgKind { SubtaskDirective, StatusReport, SubCommand, MemberReport, Critique, MapDelta };

inline const char* msg_kind_name(MsgKind k) {
    switch (k) {
        case MsgKind::SubtaskDirective: return "subtask_directive";
        case MsgKind::StatusReport: return "status_report";
        case MsgKind::SubCommand: return "sub_command";
        case MsgKind::MemberReport: return "member_report";
        case MsgKind::Critique: return "critique";
        case MsgKind::MapDelta: return "map_delta";
    }
    return "?";
}

using Payload = std::variant<std::string, SubtaskDirective, SubCommand, Critique, ReportEntry>;

struct Envelope {
    std::uint64_t msg_id = 0;
    AgentId from;
    AgentId to;
    MsgKind kind = MsgKind::StatusReport;
    Payload payload;
    int round = 0;
};

// Dual-layer protocol: manager <-> conductor is bidirectional, conductors
// command sub-agents, sub-agents only report upward. Everything else is
// structurally forbidden.
inline bool route_allowed(Tier from, Tier to, MsgKind kind) {
    if (from == Tier::Manager && to == Tier::Conductor)
        return kind == MsgKind::SubtaskDirective || kind == MsgKind::Critique;
    if (from == Tier::Conductor && to == Tier::Manager)
        return kind == MsgKind::StatusReport || kind == MsgKind::MapDelta;
    if (from == Tier::Conductor && to == Tier::SubAgent) return kind == MsgKind::SubCommand;
    if (from == Tier::SubAgent && to == Tier::Conductor) return kind == MsgKind::MemberReport;
    return false;
}

enum class RouteStatus { Delivered, ForbiddenRoute, UnknownRecipient };

struct RouteResult {
    RouteStatus status = RouteStatus::Delivered;
    std::string detail;

    bool delivered() const { return status == RouteStatus::Delivered; }
};

class Router {
public:
    void register_agent(AgentId id) { inboxes_[id]; }
    bool known(AgentId id) const { return inboxes_.count(id) != 0; }

    RouteResult route(Envelope envelope) {
        envelope.msg_id = next_msg_id_++;
        if (!route_allowed(envelope.from.tier, envelope.to.tier, envelope.kind)) {
            return {RouteStatus::ForbiddenRoute,
                    std::string(tier_name(envelope.from.tier)) + "->" +
                        tier_name(envelope.to.tier) + " " + msg_kind_name(envelope.kind) +
                        " violates the routing matrix"};
        }
        auto it = inboxes_.find(envelope.to);
        if (it == inboxes_.end())
            return {RouteStatus::UnknownRecipient, "unknown recipient " + to_string(envelope.to)};
        it->second.push_back(envelope);
        delivered_log_.push_back(std::move(envelope));
        return {RouteStatus::Delivered, ""};
    }

    // FIFO per sender by construction: msg_ids are assigned at enqueue time
    // and inboxes hold envelopes in msg_id order.
    std::vector<Envelope> drain_inbox(AgentId agent) {
        auto it = inboxes_.find(agent);
        if (it == inboxes_.end()) return {};
        std::vector<Envelope> out;
        out.swap(it->second);
        return out;
    }

    const std::vector<Envelope>& delivered_log() const { return delivered_log_; }
    void clear_log() { delivered_log_.clear(); }

private:
    std::map<AgentId, std::vector<Envelope>> inboxes_;
    std::vector<Envelope> delivered_log_;
    std::uint64_t next_msg_id_ = 0;
};

inline json envelope_to_json(const Envelope& e) {
    json payload;
    std::visit(
        [&payload](const auto& value) {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, std::string>)
                payload = value;
            else
                payload = json(value);
        },
        e.payload);
    return json{{"msg_id", e.msg_id}, {"from", e.from},       {"to", e.to},
                {"kind", msg_kind_name(e.kind)}, {"payload", payload}, {"round", e.round}};
}

// The conductor's per-round fan-out: summarize member reports with the
// describer, then send one SubCommand per body with pairwise-distinct P_k.
inline std::vector<Envelope> summarize_and_distribute(
    Router& router, AgentId conductor, const std::vector<Envelope>& member_reports,
    const SubtaskDirective& directive, const std::vector<AgentId>& bodies,
    const BackendBundle& bundle, Rect world_bounds, int round) {
    if (bodies.empty()) throw std::invalid_argument("empty group");
    std::string combined;
    for (const auto& env : member_reports) {
        if (const auto* text = std::get_if<std::string>(&env.payload)) {
            combined += *text;
            combined += "\n";
        }
    }
    bundle.describer->summarize(combined);  // group digest, kept for schedule alignment

    const std::vector<Position> targets =
        spread_targets(directive, static_cast<int>(bodies.size()), world_bounds);
    std::vector<Envelope> sent;
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        SubCommand cmd = bundle.deployer_conductor->deploy_subcommand(directive, targets[i]);
        Envelope env;
        env.from = conductor;
        env.to = bodies[i];
        env.kind = MsgKind::SubCommand;
        env.payload = cmd;
        env.round = round;
        if (bodies[i] != conductor) {
            RouteResult result = router.route(env);
            if (!result.delivered()) throw std::runtime_error(result.detail);
        }
        sent.push_back(std::move(env));
    }
    return sent;
}

}  // namespace hivenav

#endif
