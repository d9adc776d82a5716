#pragma once

#include <cstdint>
#include <vector>

#include "kgattack/kg.hpp"
#include "kgattack/rules.hpp"

namespace kgattack {

struct MinerConfig {
    std::int32_t max_len = 2;
    std::int32_t walks_per_entity = 200;
    std::int32_t top_k_per_head = 64;
    std::int32_t min_body_support = 2;
    std::uint64_t seed = 1;
    std::int32_t workers = 1;
    GroundingOptions grounding;

    void validate() const;
};

struct MineResult {
    RuleSet rules;
    // Relations that have triples but no surviving rule.
    std::vector<RelationId> uncovered_heads;
    std::int64_t candidate_bodies = 0;
    std::int64_t truncated_rules = 0;
};

// Path-sampling miner: seeded random walks propose (head, body) candidates,
// exact counting assigns standard confidence, per-head top-k keeps the best.
// Deterministic for a fixed seed regardless of worker count.
MineResult mine_rules(const KnowledgeGraph& kg, const MinerConfig& cfg);

} // namespace kgattack
