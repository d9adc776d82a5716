#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgattack/kg.hpp"
#include "kgattack/types.hpp"

namespace kgattack {

// One body atom of a chain rule. Non-inverted atoms traverse head->tail,
// inverted atoms traverse tail->head.
struct Atom {
    RelationId relation = -1;
    bool inverted = false;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using Body = std::vector<Atom>;

struct Rule {
    RelationId head = -1;
    Body body;
    double confidence = 0.0;

    bool same_shape(const Rule& other) const {
        return head == other.head && body == other.body;
    }
};

std::string body_key(const Body& body); // canonical text, e.g. "12 inv:3"

class RuleSet {
public:
    void add(Rule rule); // throws on duplicate (head, body)
    const std::vector<Rule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }
    const std::vector<std::size_t>& rules_for_head(RelationId head) const;
    std::vector<RelationId> heads() const; // sorted, distinct
    std::uint64_t fingerprint(const KnowledgeGraph& kg) const;

private:
    std::vector<Rule> rules_;
    std::unordered_map<RelationId, std::vector<std::size_t>> by_head_;
};

// One variable assignment realizing a rule body.
struct Grounding {
    std::vector<EntityId> bindings; // X, Z1..Z_{n-1}, Y
    std::vector<Triple> body_triples;
    Triple head_triple;
    bool head_in_kg = false;
};

struct GroundingOptions {
    // Upper bound on enumerated bindings / frontier entries per rule; work
    // beyond the cap is dropped and reported as truncation.
    std::size_t max_bindings = 1'000'000;
};

// Distinct (X, Y) endpoint pairs realized by a rule body.
struct BodySupport {
    std::vector<std::pair<EntityId, EntityId>> pairs; // sorted
    std::vector<char> head_in_kg;                     // parallel to pairs
    std::int64_t supported = 0;                       // pairs whose head triple exists
    bool truncated = false;

    std::int64_t total() const { return static_cast<std::int64_t>(pairs.size()); }
};

BodySupport body_support(const KnowledgeGraph& kg, const Rule& rule,
                         const GroundingOptions& opts = {});

// Standard confidence: supported pairs / body pairs. Throws when the body has
// no groundings at all.
double rule_confidence(const KnowledgeGraph& kg, const Rule& rule,
                       const GroundingOptions& opts = {});

struct GroundingStats {
    std::size_t emitted = 0;
    bool truncated = false;
};

// Visits every full binding in deterministic order (ascending X, then
// depth-first over sorted neighbor lists).
GroundingStats ground_rule(const KnowledgeGraph& kg, const Rule& rule,
                           const std::function<void(const Grounding&)>& visit,
                           const GroundingOptions& opts = {});

std::vector<Grounding> ground_rule_all(const KnowledgeGraph& kg, const Rule& rule,
                                       const GroundingOptions& opts = {});

// Head triples implied by body groundings but absent from the graph; sorted.
std::vector<Triple> infer_heads(const KnowledgeGraph& kg, const Rule& rule,
                                const GroundingOptions& opts = {});

enum class SelectDirection { Highest, Lowest };

// Up to per_head rules per head relation, ordered by confidence in the
// requested direction; ties broken by lexicographic body.
RuleSet select_rules(const RuleSet& rules, std::int64_t per_head, SelectDirection direction);

bool rule_order_less(const Rule& a, const Rule& b, SelectDirection direction);

// Rule files: one JSON object per line, {"head": str, "body": [str...],
// "confidence": number}; body entries may carry the "inv:" prefix. The loader
// validates every symbol against the graph vocabulary.
RuleSet load_rules_jsonl(const std::filesystem::path& path, const KnowledgeGraph& kg);
void save_rules_jsonl(const RuleSet& rules, const KnowledgeGraph& kg,
                      const std::filesystem::path& path);
std::string rules_to_jsonl(const RuleSet& rules, const KnowledgeGraph& kg);

std::string rule_to_string(const Rule& rule, const KnowledgeGraph& kg);

} // namespace kgattack
