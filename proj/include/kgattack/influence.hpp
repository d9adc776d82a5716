#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgattack/kg.hpp"
#include "kgattack/plan.hpp"
#include "kgattack/rules.hpp"

namespace kgattack {

enum class PoolKind { Mean, Max };

const char* to_string(PoolKind pool);
PoolKind pool_from_string(std::string_view s);

// Mean-pool denominator: contributing rules only (default reading), or all of
// Psi_m with absent contributions as zeros (sensitivity knob).
enum class MeanDenominator { Contributing, AllRules };

struct InfluenceOptions {
    PoolKind pool = PoolKind::Mean;
    MeanDenominator denominator = MeanDenominator::Contributing;
    GroundingOptions grounding;
    std::int32_t workers = 1;
};

struct InfluenceTable {
    // Triples absent from the map have influence 0.
    std::unordered_map<Triple, double, TripleHash> scores;
    // Highest-confidence contributing rule per triple (index into the source
    // rule set); drives plan provenance.
    std::unordered_map<Triple, std::int32_t, TripleHash> best_rule;
    PoolKind pool = PoolKind::Mean;
    std::uint64_t source_fingerprint = 0;

    double score_of(const Triple& t) const {
        auto it = scores.find(t);
        return it == scores.end() ? 0.0 : it->second;
    }
};

// F(t) = Pool over rules in psi_m whose groundings have t as a head triple,
// each contributing its confidence once.
InfluenceTable influence_scores(const KnowledgeGraph& kg, const RuleSet& psi_m,
                                const InfluenceOptions& opts = {});

// The delta highest-influence triples; ties broken by sorted surface form.
// When fewer than delta triples score positive, the remainder is drawn
// uniformly from zero-influence triples and tagged "random-fill".
PerturbationPlan plan_deletion(const KnowledgeGraph& kg, const RuleSet& psi_m, std::int64_t delta,
                               const InfluenceOptions& opts, std::uint64_t seed);

} // namespace kgattack
