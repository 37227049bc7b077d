#ifndef HIVENAV_PERSISTENCE_HPP
#define HIVENAV_PERSISTENCE_HPP

#include <istream>
#include <ostream>
#include <string>

#include "hivenav/json_io.hpp"

namespace hivenav {

// Memory file format: JSONL, one entry per line, append-only.
inline void save_memory_jsonl(const MemoryStore& store, std::ostream& out) {
    for (const auto& entry : store.entries()) out << json(entry).dump() << "\n";
}

inline MemoryStore load_memory_jsonl(std::istream& in) {
    MemoryStore store;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        store.restore(json::parse(line).get<MemoryEntry>());
    }
    return store;
}

// Skill library format: a single JSON array of records.
inline void save_skills_json(const SkillLibrary& library, std::ostream& out) {
    out << json(library.skills()).dump(2) << "\n";
}

inline SkillLibrary load_skills_json(std::istream& in) {
    SkillLibrary library;
    json parsed;
    in >> parsed;
    for (const auto& record : parsed) library.add(record.get<SkillRecord>());
    return library;
}

}  // namespace hivenav

#endif
