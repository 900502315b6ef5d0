#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "slogic/util.hpp"

namespace slogic {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const {
        std::uint64_t h = static_cast<std::uint32_t>(t.head);
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.relation);
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.tail);
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

// Dense-id tables for entity and relation names, first-seen order.
// Relation ids cover originals only; inverse relation ids live in
// [num_relations, 2*num_relations) and their names are derived.
class Vocabulary {
public:
    static constexpr const char* kInverseSuffix = "__inv";

    EntityId add_entity(const std::string& name) {
        auto it = entity_ids_.find(name);
        if (it != entity_ids_.end()) return it->second;
        const auto id = static_cast<EntityId>(entity_names_.size());
        entity_names_.push_back(name);
        entity_ids_.emplace(name, id);
        return id;
    }

    RelationId add_relation(const std::string& name) {
        auto it = relation_ids_.find(name);
        if (it != relation_ids_.end()) return it->second;
        const auto id = static_cast<RelationId>(relation_names_.size());
        relation_names_.push_back(name);
        relation_ids_.emplace(name, id);
        return id;
    }

    std::optional<EntityId> entity_id(const std::string& name) const {
        auto it = entity_ids_.find(name);
        if (it == entity_ids_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<RelationId> relation_id(const std::string& name) const {
        auto it = relation_ids_.find(name);
        if (it == relation_ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& entity_name(EntityId id) const { return entity_names_.at(static_cast<std::size_t>(id)); }

    // Accepts augmented ids: inverse relations render as "<name>__inv".
    std::string relation_name(RelationId id) const {
        const auto n = static_cast<RelationId>(relation_names_.size());
        if (id < n) return relation_names_.at(static_cast<std::size_t>(id));
        return relation_names_.at(static_cast<std::size_t>(id - n)) + kInverseSuffix;
    }

    // Inverse of relation_name; understands the derived "__inv" form.
    std::optional<RelationId> parse_relation(const std::string& name) const {
        if (auto id = relation_id(name)) return id;
        const std::string suffix = kInverseSuffix;
        if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
            if (auto id = relation_id(name.substr(0, name.size() - suffix.size()))) {
                return static_cast<RelationId>(*id + relation_names_.size());
            }
        }
        return std::nullopt;
    }

    std::size_t num_entities() const { return entity_names_.size(); }
    std::size_t num_relations() const { return relation_names_.size(); }

    const std::vector<std::string>& entity_names() const { return entity_names_; }
    const std::vector<std::string>& relation_names() const { return relation_names_; }

private:
    std::vector<std::string> entity_names_;
    std::vector<std::string> relation_names_;
    std::unordered_map<std::string, EntityId> entity_ids_;
    std::unordered_map<std::string, RelationId> relation_ids_;
};

}  // namespace slogic
