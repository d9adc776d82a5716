#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "kgattack/kg.hpp"
#include "kgattack/plan.hpp"
#include "kgattack/random.hpp"
#include "kgattack/rules.hpp"

namespace kgattack {

// cor(r -> r_i): fraction of entities incident to r that are also incident
// to r_i. Asymmetric; diagonal is 1 by construction.
class CorrelationTable {
public:
    static CorrelationTable from_graph(const KnowledgeGraph& kg);

    double cor(RelationId from, RelationId to) const;
    std::int64_t incident_entity_count(RelationId r) const;
    // argmax over r' != original of cor(original -> r'); ties broken by
    // lexicographic relation name. Throws when no other relation exists.
    RelationId best_replacement(RelationId original) const;
    const Eigen::MatrixXd& values() const { return cor_; }
    std::int32_t size() const { return static_cast<std::int32_t>(cor_.rows()); }

private:
    Eigen::MatrixXd cor_;
    std::vector<std::int64_t> denominators_;
    std::vector<std::string> names_;
};

struct NegativeRule {
    Rule base;
    std::int32_t rewritten_position = -1;
    RelationId replacement = -1;
    Rule rule; // rewritten body, confidence carried from base
};

// Rewrites one uniformly chosen body predicate with its most correlated
// replacement; the atom's inversion flag is preserved.
NegativeRule corrupt_rule(const Rule& rule, const CorrelationTable& table, Rng& rng);

// Random-replacement variant used by the rewriting ablation.
NegativeRule corrupt_rule_random(const Rule& rule, std::int32_t num_relations, Rng& rng);

struct AdditionCandidate {
    Triple triple;
    std::vector<std::int32_t> sources; // indices into the negative-rule list
};

// Union of infer_heads over all negative rules, deduplicated and sorted by
// surface form; every candidate is absent from the graph.
std::vector<AdditionCandidate> generate_candidates(const KnowledgeGraph& kg,
                                                   const std::vector<NegativeRule>& negatives,
                                                   const GroundingOptions& opts = {},
                                                   std::int32_t workers = 1);

enum class RewriteStrategy { Correlation, RandomPredicate };

const char* to_string(RewriteStrategy s);
RewriteStrategy rewrite_from_string(std::string_view s);

struct AdditionOptions {
    RewriteStrategy rewrite = RewriteStrategy::Correlation;
    GroundingOptions grounding;
    std::int32_t workers = 1;
};

struct AdditionPlanResult {
    PerturbationPlan plan;
    std::vector<NegativeRule> negatives;
    std::int64_t candidate_count = 0;
    std::int64_t random_fill = 0;
};

// Corrupts every rule of psi_n, grounds the negatives, and samples delta
// candidates with per-head-relation quotas proportional to the training
// relation distribution (largest-remainder apportionment). Shortfall is
// filled by random head/tail corruption and recorded.
AdditionPlanResult plan_addition(const KnowledgeGraph& kg, const RuleSet& psi_n,
                                 std::int64_t delta, std::uint64_t seed,
                                 const AdditionOptions& opts = {});

} // namespace kgattack
