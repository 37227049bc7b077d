#ifndef HIVENAV_MEMORY_HPP
#define HIVENAV_MEMORY_HPP

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivenav/directives.hpp"
#include "hivenav/tokens.hpp"

namespace hivenav {

struct MemoryEntry {
    int id = 0;
    std::string task_text;
    std::vector<std::string> obs_descriptor;
    Plan plan;  // only successfully executed plans are stored
    int created_step = 0;
};

struct RetrievalScore {
    int entry_id = 0;
    double score = 0.0;
};

class MemoryStore {
public:
    int store_success(const std::string& task_text, const std::vector<std::string>& obs_descriptor,
                      const Plan& plan, int created_step = 0) {
        if (plan.subgoals.empty()) throw std::invalid_argument("cannot store empty plan");
        MemoryEntry entry{next_id_++, task_text, obs_descriptor, plan, created_step};
        entries_.push_back(std::move(entry));
        return entries_.back().id;
    }

    const std::vector<MemoryEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    // Rebuilds a store from persisted entries; ids are preserved.
    void restore(MemoryEntry entry) {
        next_id_ = std::max(next_id_, entry.id + 1);
        entries_.push_back(std::move(entry));
    }

    // Exhaustive scan; store sizes here are small by construction.
    std::vector<std::pair<MemoryEntry, RetrievalScore>> retrieve_topk(
        const std::vector<std::string>& query_key, int k) const {
        if (k < 0) throw std::invalid_argument("k must be >= 0");
        const TokenCounts query = token_counts(query_key);
        std::vector<std::pair<MemoryEntry, RetrievalScore>> scored;
        scored.reserve(entries_.size());
        for (const auto& entry : entries_) {
            std::vector<std::string> key = tokenize(entry.task_text);
            key.insert(key.end(), entry.obs_descriptor.begin(), entry.obs_descriptor.end());
            const double score = cosine_similarity(query, token_counts(key));
            scored.emplace_back(entry, RetrievalScore{entry.id, score});
        }
        std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.second.score != b.second.score) return a.second.score > b.second.score;
            return a.second.entry_id < b.second.entry_id;  // older memories first
        });
        if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<std::size_t>(k));
        return scored;
    }

private:
    std::vector<MemoryEntry> entries_;
    int next_id_ = 0;
};

inline double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return cosine_similarity(token_counts(a), token_counts(b));
}

// Multi-modal retrieval: the visual side of the query goes through the
// describer first, then both halves score as one text key.
inline std::vector<std::pair<MemoryEntry, RetrievalScore>> retrieve_topk(
    const MemoryStore& store, const std::vector<std::string>& query_text,
    const std::vector<std::string>& query_visual_described, int k) {
    std::vector<std::string> key = query_text;
    key.insert(key.end(), query_visual_described.begin(), query_visual_described.end());
    return store.retrieve_topk(key, k);
}

// Renders the retrieved demonstrations into the planning prompt, rank order.
inline std::string augment_plan_context(
    const std::vector<std::pair<MemoryEntry, RetrievalScore>>& retrieved,
    const std::string& instruction) {
    std::ostringstream out;
    out << "instruction: " << instruction << "\n";
    int rank = 1;
    for (const auto& [entry, score] : retrieved) {
        out << "demonstration " << rank << " (entry " << entry.id << "):\n";
        out << "  task: " << entry.task_text << "\n";
        out << "  observation:";
        for (const auto& tok : entry.obs_descriptor) out << " " << tok;
        out << "\n  plan:";
        for (const auto& sg : entry.plan.subgoals)
            out << " " << subgoal_kind_name(sg.kind) << "@" << to_string(sg.region.center());
        out << "\n";
        ++rank;
    }
    return out.str();
}

struct SkillRecord {
    std::string name;
    std::vector<std::string> parameters;
    std::vector<ActionStep> body;          // action macro
    std::vector<std::string> description;  // retrieval key
    std::vector<std::string> trigger_tokens;
};

class SkillLibrary {
public:
    void add(SkillRecord skill) {
        if (skill.body.empty()) throw std::invalid_argument("skill body empty");
        for (const auto& s : skills_)
            if (s.name == skill.name) throw std::invalid_argument("duplicate skill: " + skill.name);
        skills_.push_back(std::move(skill));
    }

    const std::vector<SkillRecord>& skills() const { return skills_; }

    std::vector<std::pair<SkillRecord, double>> lookup(const std::vector<std::string>& query,
                                                       int k) const {
        if (k < 0) throw std::invalid_argument("k must be >= 0");
        const TokenCounts q = token_counts(query);
        std::vector<std::pair<SkillRecord, double>> scored;
        for (const auto& skill : skills_)
            scored.emplace_back(skill, cosine_similarity(q, token_counts(skill.description)));
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<std::size_t>(k));
        return scored;
    }

private:
    std::vector<SkillRecord> skills_;
};

struct Episode {
    std::string proposed_task;
    bool succeeded = false;
    std::string summary_text;

    bool operator==(const Episode&) const = default;
};

struct CurriculumLog {
    std::string head_summary;  // rolled-up digest of folded episodes
    std::vector<Episode> episodes;
    int token_budget = 256;
};

inline int summary_token_count(const CurriculumLog& log) {
    int total = 0;
    for (const auto& ep : log.episodes)
        total += static_cast<int>(tokenize(ep.summary_text).size());
    return total;
}

// Folds oldest episodes into the head summary until episode summaries fit the
// budget. The summarizer is the backend's describer-style hook.
inline CurriculumLog compact_log(
    CurriculumLog log, const std::function<std::string(const std::string&)>& summarize) {
    while (summary_token_count(log) > log.token_budget && !log.episodes.empty()) {
        const Episode& oldest = log.episodes.front();
        std::string folded = log.head_summary;
        if (!folded.empty()) folded += "; ";
        folded += oldest.proposed_task + ": " + (oldest.succeeded ? "success" : "failure") + " " +
                  oldest.summary_text;
        log.head_summary = summarize(folded);
        log.episodes.erase(log.episodes.begin());
    }
    return log;
}

}  // namespace hivenav

#endif
