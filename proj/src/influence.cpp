#include "kgattack/influence.hpp"

#include <algorithm>
#include <stdexcept>

#include "kgattack/random.hpp"
#include "kgattack/util.hpp"

namespace kgattack {

const char* to_string(PoolKind pool) {
    return pool == PoolKind::Mean ? "mean" : "max";
}

PoolKind pool_from_string(std::string_view s) {
    if (s == "mean") {
        return PoolKind::Mean;
    }
    if (s == "max") {
        return PoolKind::Max;
    }
    throw std::invalid_argument("unknown pool kind: " + std::string(s));
}

InfluenceTable influence_scores(const KnowledgeGraph& kg, const RuleSet& psi_m,
                                const InfluenceOptions& opts) {
    if (psi_m.empty()) {
        throw std::invalid_argument("influence_scores: rule set is empty");
    }

    const auto& rules = psi_m.rules();
    // Supported head triples per rule, computed independently; merge order is
    // fixed by rule index, so parallel and serial runs agree.
    std::vector<std::vector<Triple>> heads_per_rule(rules.size());
    parallel_chunks(rules.size(), opts.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto support = body_support(kg, rules[i], opts.grounding);
            auto& sink = heads_per_rule[i];
            for (std::size_t p = 0; p < support.pairs.size(); ++p) {
                if (support.head_in_kg[p]) {
                    sink.push_back(
                        Triple{support.pairs[p].first, rules[i].head, support.pairs[p].second});
                }
            }
        }
    });

    struct Accum {
        double sum = 0.0;
        double max = 0.0;
        std::int64_t count = 0;
        std::int32_t best_rule = -1;
        double best_conf = -1.0;
    };
    std::unordered_map<Triple, Accum, TripleHash> acc;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const double alpha = rules[i].confidence;
        for (const auto& t : heads_per_rule[i]) {
            auto& a = acc[t];
            a.sum += alpha;
            a.max = std::max(a.max, alpha);
            a.count += 1;
            if (alpha > a.best_conf) {
                a.best_conf = alpha;
                a.best_rule = static_cast<std::int32_t>(i);
            }
        }
    }

    InfluenceTable table;
    table.pool = opts.pool;
    table.source_fingerprint = psi_m.fingerprint(kg);
    table.scores.reserve(acc.size());
    const auto all_rules = static_cast<double>(rules.size());
    for (const auto& [t, a] : acc) {
        double f = 0.0;
        if (opts.pool == PoolKind::Max) {
            f = a.max;
        } else if (opts.denominator == MeanDenominator::Contributing) {
            f = a.sum / static_cast<double>(a.count);
        } else {
            f = a.sum / all_rules;
        }
        table.scores.emplace(t, f);
        table.best_rule.emplace(t, a.best_rule);
    }
    return table;
}

PerturbationPlan plan_deletion(const KnowledgeGraph& kg, const RuleSet& psi_m, std::int64_t delta,
                               const InfluenceOptions& opts, std::uint64_t seed) {
    if (delta < 0) {
        throw std::invalid_argument("plan_deletion: negative budget");
    }
    if (delta > kg.num_triples()) {
        throw std::invalid_argument("plan_deletion: budget " + std::to_string(delta) +
                                    " exceeds graph size " + std::to_string(kg.num_triples()));
    }
    const auto table = influence_scores(kg, psi_m, opts);

    std::vector<Triple> positive;
    std::vector<Triple> zero;
    for (const auto& t : kg.triples()) {
        (table.score_of(t) > 0.0 ? positive : zero).push_back(t);
    }
    std::sort(positive.begin(), positive.end(), [&](const Triple& a, const Triple& b) {
        const double fa = table.score_of(a);
        const double fb = table.score_of(b);
        if (fa != fb) {
            return fa > fb;
        }
        return kg.surface_less(a, b);
    });

    PerturbationPlan plan;
    plan.mode = PlanMode::Delete;
    plan.budget = delta;
    const auto scored_take = std::min<std::int64_t>(delta, static_cast<std::int64_t>(positive.size()));
    for (std::int64_t i = 0; i < scored_take; ++i) {
        const auto& t = positive[static_cast<std::size_t>(i)];
        plan.entries.push_back(
            PlanEntry{t, table.score_of(t), "rule#" + std::to_string(table.best_rule.at(t))});
    }
    const auto fill = delta - scored_take;
    if (fill > 0) {
        std::sort(zero.begin(), zero.end(),
                  [&](const Triple& a, const Triple& b) { return kg.surface_less(a, b); });
        Rng rng(seed);
        for (auto idx : sample_without_replacement(zero.size(), static_cast<std::uint64_t>(fill),
                                                   rng)) {
            plan.entries.push_back(PlanEntry{zero[idx], 0.0, "random-fill"});
        }
    }
    plan.validate(kg);
    return plan;
}

} // namespace kgattack
