#include "kgattack/addition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "kgattack/baselines.hpp"
#include "kgattack/util.hpp"

namespace kgattack {

const char* to_string(RewriteStrategy s) {
    return s == RewriteStrategy::Correlation ? "correlation" : "random";
}

RewriteStrategy rewrite_from_string(std::string_view s) {
    if (s == "correlation") {
        return RewriteStrategy::Correlation;
    }
    if (s == "random") {
        return RewriteStrategy::RandomPredicate;
    }
    throw std::invalid_argument("unknown rewrite strategy: " + std::string(s));
}

CorrelationTable CorrelationTable::from_graph(const KnowledgeGraph& kg) {
    const auto nr = kg.relations().size();
    CorrelationTable table;
    table.names_ = kg.relations().names();
    table.denominators_.assign(static_cast<std::size_t>(nr), 0);
    table.cor_ = Eigen::MatrixXd::Zero(nr, nr);

    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(nr, nr);
    for (RelationId r = 0; r < nr; ++r) {
        const auto& ents = kg.entities_of(r);
        if (ents.empty()) {
            throw std::runtime_error("correlation_table: relation '" + kg.relations().name(r) +
                                     "' has no incident entities");
        }
        table.denominators_[static_cast<std::size_t>(r)] = static_cast<std::int64_t>(ents.size());
        for (EntityId e : ents) {
            for (RelationId other : kg.relation_neighborhood(e)) {
                joint(r, other) += 1.0;
            }
        }
    }
    for (RelationId r = 0; r < nr; ++r) {
        table.cor_.row(r) =
            joint.row(r) / static_cast<double>(table.denominators_[static_cast<std::size_t>(r)]);
    }
    return table;
}

double CorrelationTable::cor(RelationId from, RelationId to) const {
    if (from < 0 || from >= size() || to < 0 || to >= size()) {
        throw std::out_of_range("CorrelationTable::cor: relation id out of range");
    }
    return cor_(from, to);
}

std::int64_t CorrelationTable::incident_entity_count(RelationId r) const {
    if (r < 0 || r >= size()) {
        throw std::out_of_range("CorrelationTable::incident_entity_count: id out of range");
    }
    return denominators_[static_cast<std::size_t>(r)];
}

RelationId CorrelationTable::best_replacement(RelationId original) const {
    if (original < 0 || original >= size()) {
        throw std::out_of_range("CorrelationTable::best_replacement: id out of range");
    }
    if (size() < 2) {
        throw std::runtime_error(
            "best_replacement: vocabulary has a single relation, nothing to rewrite with");
    }
    RelationId best = -1;
    for (RelationId r = 0; r < size(); ++r) {
        if (r == original) {
            continue;
        }
        if (best < 0 || cor_(original, r) > cor_(original, best) ||
            (cor_(original, r) == cor_(original, best) &&
             names_[static_cast<std::size_t>(r)] < names_[static_cast<std::size_t>(best)])) {
            best = r;
        }
    }
    return best;
}

NegativeRule corrupt_rule(const Rule& rule, const CorrelationTable& table, Rng& rng) {
    if (rule.body.empty()) {
        throw std::invalid_argument("corrupt_rule: empty body");
    }
    const auto pos = static_cast<std::int32_t>(uniform_below(rng, rule.body.size()));
    const auto original = rule.body[static_cast<std::size_t>(pos)].relation;
    const auto replacement = table.best_replacement(original);

    NegativeRule out;
    out.base = rule;
    out.rewritten_position = pos;
    out.replacement = replacement;
    out.rule = rule;
    out.rule.body[static_cast<std::size_t>(pos)].relation = replacement;
    return out;
}

NegativeRule corrupt_rule_random(const Rule& rule, std::int32_t num_relations, Rng& rng) {
    if (rule.body.empty()) {
        throw std::invalid_argument("corrupt_rule_random: empty body");
    }
    if (num_relations < 2) {
        throw std::runtime_error(
            "corrupt_rule_random: vocabulary has a single relation, nothing to rewrite with");
    }
    const auto pos = static_cast<std::int32_t>(uniform_below(rng, rule.body.size()));
    const auto original = rule.body[static_cast<std::size_t>(pos)].relation;
    auto replacement =
        static_cast<RelationId>(uniform_below(rng, static_cast<std::uint64_t>(num_relations - 1)));
    if (replacement >= original) {
        ++replacement; // keeps the draw uniform over relations != original
    }

    NegativeRule out;
    out.base = rule;
    out.rewritten_position = pos;
    out.replacement = replacement;
    out.rule = rule;
    out.rule.body[static_cast<std::size_t>(pos)].relation = replacement;
    return out;
}

std::vector<AdditionCandidate> generate_candidates(const KnowledgeGraph& kg,
                                                   const std::vector<NegativeRule>& negatives,
                                                   const GroundingOptions& opts,
                                                   std::int32_t workers) {
    if (negatives.empty()) {
        throw std::invalid_argument("generate_candidates: no negative rules");
    }
    std::vector<std::vector<Triple>> per_rule(negatives.size());
    parallel_chunks(negatives.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            per_rule[i] = infer_heads(kg, negatives[i].rule, opts);
        }
    });

    std::unordered_map<Triple, std::vector<std::int32_t>, TripleHash> merged;
    for (std::size_t i = 0; i < per_rule.size(); ++i) {
        for (const auto& t : per_rule[i]) {
            merged[t].push_back(static_cast<std::int32_t>(i));
        }
    }
    std::vector<AdditionCandidate> out;
    out.reserve(merged.size());
    for (auto& [t, sources] : merged) {
        out.push_back(AdditionCandidate{t, std::move(sources)});
    }
    std::sort(out.begin(), out.end(), [&](const AdditionCandidate& a, const AdditionCandidate& b) {
        return kg.surface_less(a.triple, b.triple);
    });
    return out;
}

namespace {

// Largest-remainder apportionment of `budget` over integer weights. Exact
// integer arithmetic; remainder ties go to the lower index.
std::vector<std::int64_t> apportion(std::int64_t budget, const std::vector<std::int64_t>& weights) {
    const std::int64_t total_weight =
        std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
    std::vector<std::int64_t> quota(weights.size(), 0);
    if (budget <= 0 || total_weight <= 0) {
        return quota;
    }
    std::vector<std::pair<std::int64_t, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const std::int64_t numer = budget * weights[i];
        quota[i] = numer / total_weight;
        assigned += quota[i];
        remainders.emplace_back(numer % total_weight, i);
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    for (std::int64_t extra = budget - assigned, i = 0; extra > 0; --extra, ++i) {
        quota[remainders[static_cast<std::size_t>(i)].second] += 1;
    }
    return quota;
}

} // namespace

AdditionPlanResult plan_addition(const KnowledgeGraph& kg, const RuleSet& psi_n,
                                 std::int64_t delta, std::uint64_t seed,
                                 const AdditionOptions& opts) {
    if (delta < 0) {
        throw std::invalid_argument("plan_addition: negative budget");
    }
    if (psi_n.empty()) {
        throw std::invalid_argument("plan_addition: rule set is empty");
    }

    Rng rng(seed);
    AdditionPlanResult result;
    result.plan.mode = PlanMode::Add;
    result.plan.budget = delta;

    std::optional<CorrelationTable> table;
    if (opts.rewrite == RewriteStrategy::Correlation) {
        table = CorrelationTable::from_graph(kg);
    }
    for (const auto& rule : psi_n.rules()) {
        result.negatives.push_back(table ? corrupt_rule(rule, *table, rng)
                                         : corrupt_rule_random(rule, kg.relations().size(), rng));
    }

    const auto candidates = generate_candidates(kg, result.negatives, opts.grounding, opts.workers);
    result.candidate_count = static_cast<std::int64_t>(candidates.size());
    if (delta == 0) {
        result.plan.validate(kg);
        return result;
    }

    // Candidate indices by head relation, preserving surface order.
    std::map<RelationId, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        groups[candidates[i].triple.relation].push_back(i);
    }
    const auto distribution = kg.relation_distribution();

    std::vector<RelationId> active;
    std::map<RelationId, std::int64_t> taken;
    for (const auto& [r, idxs] : groups) {
        active.push_back(r);
        taken[r] = 0;
    }

    std::int64_t remaining = std::min<std::int64_t>(delta, result.candidate_count);
    while (remaining > 0 && !active.empty()) {
        std::vector<std::int64_t> weights;
        weights.reserve(active.size());
        for (RelationId r : active) {
            weights.push_back(distribution[static_cast<std::size_t>(r)]);
        }
        const auto quotas = apportion(remaining, weights);
        std::vector<RelationId> still_active;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const RelationId r = active[i];
            const auto capacity = static_cast<std::int64_t>(groups[r].size()) - taken[r];
            const auto take = std::min(quotas[i], capacity);
            taken[r] += take;
            remaining -= take;
            if (taken[r] < static_cast<std::int64_t>(groups[r].size())) {
                still_active.push_back(r);
            }
        }
        active.swap(still_active);
    }

    // Seeded single-threaded sampling pass, relations in ascending id order.
    std::unordered_set<Triple, TripleHash> chosen;
    for (const auto& [r, idxs] : groups) {
        const auto want = taken[r];
        if (want <= 0) {
            continue;
        }
        for (auto pick :
             sample_without_replacement(idxs.size(), static_cast<std::uint64_t>(want), rng)) {
            const auto& cand = candidates[idxs[pick]];
            double score = 0.0;
            std::string provenance;
            for (auto src : cand.sources) {
                score = std::max(score,
                                 result.negatives[static_cast<std::size_t>(src)].base.confidence);
                if (!provenance.empty()) {
                    provenance += ',';
                }
                provenance += "negrule#" + std::to_string(src);
            }
            result.plan.entries.push_back(PlanEntry{cand.triple, score, provenance});
            chosen.insert(cand.triple);
        }
    }

    // Shortfall: random corruption keeps the budget exact and is recorded.
    while (static_cast<std::int64_t>(result.plan.entries.size()) < delta) {
        const Triple t = sample_novel_corruption(kg, rng, chosen);
        chosen.insert(t);
        result.plan.entries.push_back(PlanEntry{t, 0.0, "random-fill"});
        ++result.random_fill;
    }

    result.plan.validate(kg);
    return result;
}

} // namespace kgattack
