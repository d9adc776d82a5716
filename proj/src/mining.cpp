#include "kgattack/mining.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>

#include "kgattack/random.hpp"
#include "kgattack/util.hpp"

namespace kgattack {

void MinerConfig::validate() const {
    if (max_len < 1 || walks_per_entity < 1 || top_k_per_head < 1 || min_body_support < 1) {
        throw std::invalid_argument("miner config: all counts must be >= 1");
    }
}

namespace {

using Candidate = std::pair<RelationId, Body>; // (head, body)

// Walks emit every body prefix; each prefix whose endpoint closes a triple
// (start, r, endpoint) proposes the candidate (r, prefix).
void propose_from_entity(const KnowledgeGraph& kg, EntityId start, const MinerConfig& cfg,
                         std::set<Candidate>& sink) {
    Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(start)));
    const auto& out = kg.out_edges(start);
    const auto& in = kg.in_edges(start);
    if (out.empty() && in.empty()) {
        return;
    }
    Body body;
    for (std::int32_t w = 0; w < cfg.walks_per_entity; ++w) {
        EntityId cur = start;
        body.clear();
        for (std::int32_t step = 0; step < cfg.max_len; ++step) {
            const auto& cur_out = kg.out_edges(cur);
            const auto& cur_in = kg.in_edges(cur);
            const auto total = cur_out.size() + cur_in.size();
            if (total == 0) {
                break;
            }
            const auto pick = uniform_below(rng, total);
            Atom atom;
            if (pick < cur_out.size()) {
                atom = Atom{cur_out[pick].first, false};
                cur = cur_out[pick].second;
            } else {
                const auto& edge = cur_in[pick - cur_out.size()];
                atom = Atom{edge.first, true};
                cur = edge.second;
            }
            body.push_back(atom);
            for (const auto& [rel, tail] : out) {
                if (tail != cur) {
                    continue;
                }
                // The identity body r(X,Y) => r(X,Y) carries no structure.
                if (body.size() == 1 && body.front() == Atom{rel, false}) {
                    continue;
                }
                sink.emplace(rel, body);
            }
        }
    }
}

} // namespace

MineResult mine_rules(const KnowledgeGraph& kg, const MinerConfig& cfg) {
    cfg.validate();
    if (kg.num_triples() == 0) {
        throw std::invalid_argument("mine_rules: graph is empty");
    }

    const auto num_entities = static_cast<std::size_t>(kg.entities().size());
    const int workers = std::max(1, cfg.workers);

    // Per-chunk candidate sets merge by set union, so worker count cannot
    // change the outcome.
    std::set<Candidate> candidates;
    std::mutex merge_mutex;
    parallel_chunks(num_entities, workers, [&](std::size_t begin, std::size_t end) {
        std::set<Candidate> local;
        for (std::size_t e = begin; e < end; ++e) {
            propose_from_entity(kg, static_cast<EntityId>(e), cfg, local);
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        candidates.merge(local);
    });

    MineResult result;
    result.candidate_bodies = static_cast<std::int64_t>(candidates.size());

    std::vector<Candidate> ordered(candidates.begin(), candidates.end());
    std::vector<Rule> scored(ordered.size());
    std::vector<char> keep(ordered.size(), 0);
    std::vector<char> truncated(ordered.size(), 0);
    parallel_chunks(ordered.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rule rule{ordered[i].first, ordered[i].second, 0.0};
            const auto support = body_support(kg, rule, cfg.grounding);
            truncated[i] = support.truncated ? 1 : 0;
            if (support.truncated) {
                continue; // counts would be unreliable
            }
            if (support.total() < cfg.min_body_support || support.supported == 0) {
                continue;
            }
            rule.confidence =
                static_cast<double>(support.supported) / static_cast<double>(support.total());
            scored[i] = std::move(rule);
            keep[i] = 1;
        }
    });

    std::map<RelationId, std::vector<Rule>> per_head;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        if (keep[i]) {
            per_head[scored[i].head].push_back(scored[i]);
        }
        result.truncated_rules += truncated[i];
    }

    for (auto& [head, bucket] : per_head) {
        std::sort(bucket.begin(), bucket.end(), [](const Rule& a, const Rule& b) {
            return rule_order_less(a, b, SelectDirection::Highest);
        });
        const auto take =
            std::min<std::size_t>(bucket.size(), static_cast<std::size_t>(cfg.top_k_per_head));
        for (std::size_t i = 0; i < take; ++i) {
            result.rules.add(bucket[i]);
        }
    }

    for (RelationId r = 0; r < kg.relations().size(); ++r) {
        if (!kg.triples_of(r).empty() && result.rules.rules_for_head(r).empty()) {
            result.uncovered_heads.push_back(r);
        }
    }
    return result;
}

} // namespace kgattack
