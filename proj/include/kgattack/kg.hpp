#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kgattack/types.hpp"

namespace kgattack {

// Bijective surface string <-> dense id table. Ids are contiguous from zero
// in insertion order.
class Vocab {
public:
    std::int32_t intern(std::string_view s);
    std::int32_t id_of(std::string_view s) const; // -1 when absent
    const std::string& name(std::int32_t id) const;
    std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }
    bool contains(std::string_view s) const { return id_of(s) >= 0; }
    const std::vector<std::string>& names() const { return names_; }
    // Order-sensitive FNV-1a over all surface forms.
    std::uint64_t content_hash() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::int32_t> ids_;
};

struct PerturbationPlan;

// Immutable indexed triple store. Safe to share read-only across threads;
// every mutation constructs a new graph.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    // Deduplicates the triple list and builds all indexes. Triple ids must be
    // valid for the given vocabularies.
    static KnowledgeGraph from_triples(Vocab entities, Vocab relations,
                                       std::vector<Triple> triples);

    const Vocab& entities() const { return entities_; }
    const Vocab& relations() const { return relations_; }

    // Canonical order: sorted by (head, relation, tail).
    const std::vector<Triple>& triples() const { return triples_; }
    std::int64_t num_triples() const { return static_cast<std::int64_t>(triples_.size()); }
    bool contains(const Triple& t) const { return triple_set_.count(t) > 0; }

    const std::vector<std::pair<RelationId, EntityId>>& out_edges(EntityId e) const;
    const std::vector<std::pair<RelationId, EntityId>>& in_edges(EntityId e) const;
    const std::vector<Triple>& triples_of(RelationId r) const;

    // Successors of e through r; predecessors when inverted. Sorted, empty
    // when no such edge exists.
    const std::vector<EntityId>& neighbors(EntityId e, RelationId r, bool inverted) const;

    // Entities carrying at least one edge of r, ascending.
    const std::vector<EntityId>& entities_of(RelationId r) const;

    // Relations on any edge incident to e (either direction), sorted.
    // Errors on unknown or isolated entities.
    std::vector<RelationId> relation_neighborhood(EntityId e) const;

    // Triple count per relation id; sums to num_triples().
    std::vector<std::int64_t> relation_distribution() const;

    std::string surface(const Triple& t) const;
    bool surface_less(const Triple& a, const Triple& b) const;

    KnowledgeGraph apply_plan(const PerturbationPlan& plan) const;

    void check_triple_ids(const Triple& t) const; // throws on out-of-range ids

private:
    struct RelationAdjacency {
        // (entity, sorted neighbor list), sorted by entity; map gives O(1) lookup.
        std::vector<std::pair<EntityId, std::vector<EntityId>>> buckets;
        std::unordered_map<EntityId, std::size_t> index;
    };

    void build_indexes();

    Vocab entities_;
    Vocab relations_;
    std::vector<Triple> triples_;
    std::unordered_set<Triple, TripleHash> triple_set_;
    std::vector<std::vector<std::pair<RelationId, EntityId>>> out_index_;
    std::vector<std::vector<std::pair<RelationId, EntityId>>> in_index_;
    std::vector<std::vector<Triple>> rel_index_;
    std::vector<std::vector<RelationId>> incident_relations_;
    std::vector<RelationAdjacency> rel_out_;
    std::vector<RelationAdjacency> rel_in_;
    std::vector<std::vector<EntityId>> rel_entities_;
};

// One triple per line, head<TAB>relation<TAB>tail. Errors carry line numbers.
KnowledgeGraph load_tsv(const std::filesystem::path& path);
void save_tsv(const KnowledgeGraph& kg, const std::filesystem::path& path);

// Parses an auxiliary triple file (validation/test split) against an existing
// vocabulary. Lines whose symbols are unknown are counted, not loaded.
struct AuxTriples {
    std::vector<Triple> triples;
    std::int64_t skipped_unknown = 0;
};
AuxTriples load_aux_tsv(const std::filesystem::path& path, const KnowledgeGraph& kg);

} // namespace kgattack
