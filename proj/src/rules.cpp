#include "kgattack/rules.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kgattack/util.hpp"

namespace kgattack {

namespace {

void check_rule(const KnowledgeGraph& kg, const Rule& rule) {
    if (rule.head < 0 || rule.head >= kg.relations().size()) {
        throw std::invalid_argument("rule head relation id out of range");
    }
    if (rule.body.empty()) {
        throw std::invalid_argument("rule body must not be empty");
    }
    for (const auto& atom : rule.body) {
        if (atom.relation < 0 || atom.relation >= kg.relations().size()) {
            throw std::invalid_argument("rule body relation id out of range");
        }
    }
}

} // namespace

std::string body_key(const Body& body) {
    std::string out;
    for (const auto& atom : body) {
        if (!out.empty()) {
            out += ' ';
        }
        if (atom.inverted) {
            out += "inv:";
        }
        out += std::to_string(atom.relation);
    }
    return out;
}

void RuleSet::add(Rule rule) {
    for (auto idx : rules_for_head(rule.head)) {
        if (rules_[idx].body == rule.body) {
            throw std::invalid_argument("duplicate rule for head " + std::to_string(rule.head) +
                                        " with body [" + body_key(rule.body) + "]");
        }
    }
    by_head_[rule.head].push_back(rules_.size());
    rules_.push_back(std::move(rule));
}

const std::vector<std::size_t>& RuleSet::rules_for_head(RelationId head) const {
    static const std::vector<std::size_t> kEmpty;
    auto it = by_head_.find(head);
    return it == by_head_.end() ? kEmpty : it->second;
}

std::vector<RelationId> RuleSet::heads() const {
    std::vector<RelationId> out;
    out.reserve(by_head_.size());
    for (const auto& [head, _] : by_head_) {
        out.push_back(head);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t RuleSet::fingerprint(const KnowledgeGraph& kg) const {
    return fnv1a64(rules_to_jsonl(*this, kg));
}

BodySupport body_support(const KnowledgeGraph& kg, const Rule& rule,
                         const GroundingOptions& opts) {
    check_rule(kg, rule);
    BodySupport out;
    std::size_t work = 0;

    const auto& first = rule.body.front();
    const auto& starts = kg.entities_of(first.relation);
    std::vector<EntityId> frontier;
    std::vector<EntityId> next;
    for (EntityId x : starts) {
        // Only entities with an edge in the atom's traversal direction start
        // a chain; entities_of covers both endpoints.
        if (kg.neighbors(x, first.relation, first.inverted).empty()) {
            continue;
        }
        frontier.assign(1, x);
        for (const auto& atom : rule.body) {
            next.clear();
            for (EntityId z : frontier) {
                const auto& succ = kg.neighbors(z, atom.relation, atom.inverted);
                next.insert(next.end(), succ.begin(), succ.end());
                work += succ.size();
                if (work > opts.max_bindings) {
                    out.truncated = true;
                    break;
                }
            }
            if (out.truncated) {
                break;
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            frontier.swap(next);
            if (frontier.empty()) {
                break;
            }
        }
        if (out.truncated) {
            break;
        }
        for (EntityId y : frontier) {
            out.pairs.emplace_back(x, y);
        }
    }

    std::sort(out.pairs.begin(), out.pairs.end());
    out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()), out.pairs.end());
    out.head_in_kg.resize(out.pairs.size(), 0);
    for (std::size_t i = 0; i < out.pairs.size(); ++i) {
        const Triple head{out.pairs[i].first, rule.head, out.pairs[i].second};
        if (kg.contains(head)) {
            out.head_in_kg[i] = 1;
            ++out.supported;
        }
    }
    return out;
}

double rule_confidence(const KnowledgeGraph& kg, const Rule& rule, const GroundingOptions& opts) {
    const auto support = body_support(kg, rule, opts);
    if (support.pairs.empty()) {
        throw std::runtime_error("rule_confidence: body of [" + body_key(rule.body) + " => " +
                                 std::to_string(rule.head) + "] has no groundings");
    }
    return static_cast<double>(support.supported) / static_cast<double>(support.total());
}

GroundingStats ground_rule(const KnowledgeGraph& kg, const Rule& rule,
                           const std::function<void(const Grounding&)>& visit,
                           const GroundingOptions& opts) {
    check_rule(kg, rule);
    GroundingStats stats;
    const auto depth = rule.body.size();

    Grounding g;
    g.bindings.resize(depth + 1);
    g.body_triples.resize(depth);

    // Depth-first over sorted neighbor lists; bindings are emitted in
    // lexicographic order, so no two emitted bindings coincide.
    std::function<bool(std::size_t)> descend = [&](std::size_t level) -> bool {
        if (level == depth) {
            g.head_triple = Triple{g.bindings.front(), rule.head, g.bindings.back()};
            g.head_in_kg = kg.contains(g.head_triple);
            visit(g);
            ++stats.emitted;
            return stats.emitted < opts.max_bindings;
        }
        const auto& atom = rule.body[level];
        const EntityId from = g.bindings[level];
        for (EntityId to : kg.neighbors(from, atom.relation, atom.inverted)) {
            g.bindings[level + 1] = to;
            g.body_triples[level] =
                atom.inverted ? Triple{to, atom.relation, from} : Triple{from, atom.relation, to};
            if (!descend(level + 1)) {
                return false;
            }
        }
        return true;
    };

    for (EntityId x : kg.entities_of(rule.body.front().relation)) {
        g.bindings[0] = x;
        if (!descend(0)) {
            stats.truncated = true;
            break;
        }
    }
    return stats;
}

std::vector<Grounding> ground_rule_all(const KnowledgeGraph& kg, const Rule& rule,
                                       const GroundingOptions& opts) {
    std::vector<Grounding> out;
    ground_rule(kg, rule, [&](const Grounding& g) { out.push_back(g); }, opts);
    return out;
}

std::vector<Triple> infer_heads(const KnowledgeGraph& kg, const Rule& rule,
                                const GroundingOptions& opts) {
    const auto support = body_support(kg, rule, opts);
    std::vector<Triple> out;
    for (std::size_t i = 0; i < support.pairs.size(); ++i) {
        if (!support.head_in_kg[i]) {
            out.push_back(Triple{support.pairs[i].first, rule.head, support.pairs[i].second});
        }
    }
    return out; // pairs are sorted, so heads are too
}

bool rule_order_less(const Rule& a, const Rule& b, SelectDirection direction) {
    if (a.confidence != b.confidence) {
        return direction == SelectDirection::Highest ? a.confidence > b.confidence
                                                     : a.confidence < b.confidence;
    }
    return a.body < b.body;
}

RuleSet select_rules(const RuleSet& rules, std::int64_t per_head, SelectDirection direction) {
    if (per_head < 1) {
        throw std::invalid_argument("select_rules: per_head must be >= 1");
    }
    RuleSet out;
    for (RelationId head : rules.heads()) {
        std::vector<Rule> bucket;
        for (auto idx : rules.rules_for_head(head)) {
            bucket.push_back(rules.rules()[idx]);
        }
        std::sort(bucket.begin(), bucket.end(),
                  [&](const Rule& a, const Rule& b) { return rule_order_less(a, b, direction); });
        const auto take = std::min<std::size_t>(bucket.size(), static_cast<std::size_t>(per_head));
        for (std::size_t i = 0; i < take; ++i) {
            out.add(bucket[i]);
        }
    }
    return out;
}

namespace {

constexpr std::string_view kInvPrefix = "inv:";

nlohmann::json rule_to_json(const Rule& rule, const KnowledgeGraph& kg) {
    nlohmann::json body = nlohmann::json::array();
    for (const auto& atom : rule.body) {
        const auto& name = kg.relations().name(atom.relation);
        body.push_back(atom.inverted ? std::string(kInvPrefix) + name : name);
    }
    return nlohmann::json{{"head", kg.relations().name(rule.head)},
                          {"body", std::move(body)},
                          {"confidence", rule.confidence}};
}

} // namespace

std::string rules_to_jsonl(const RuleSet& rules, const KnowledgeGraph& kg) {
    std::string out;
    for (const auto& rule : rules.rules()) {
        out += rule_to_json(rule, kg).dump();
        out += '\n';
    }
    return out;
}

void save_rules_jsonl(const RuleSet& rules, const KnowledgeGraph& kg,
                      const std::filesystem::path& path) {
    write_file(path, rules_to_jsonl(rules, kg));
}

RuleSet load_rules_jsonl(const std::filesystem::path& path, const KnowledgeGraph& kg) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_rules_jsonl: cannot open " + path.string());
    }
    RuleSet out;
    std::set<std::string> unknown;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("load_rules_jsonl: line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
        if (!obj.is_object() || !obj.contains("head") || !obj.contains("body") ||
            !obj.contains("confidence")) {
            throw std::runtime_error("load_rules_jsonl: line " + std::to_string(lineno) +
                                     ": expected {head, body, confidence}");
        }
        Rule rule;
        const auto head_name = obj.at("head").get<std::string>();
        rule.head = kg.relations().id_of(head_name);
        if (rule.head < 0) {
            unknown.insert(head_name);
        }
        for (const auto& item : obj.at("body")) {
            auto name = item.get<std::string>();
            Atom atom;
            if (name.starts_with(kInvPrefix)) {
                atom.inverted = true;
                name = name.substr(kInvPrefix.size());
            }
            atom.relation = kg.relations().id_of(name);
            if (atom.relation < 0) {
                unknown.insert(name);
            }
            rule.body.push_back(atom);
        }
        rule.confidence = obj.at("confidence").get<double>();
        if (rule.confidence < 0.0 || rule.confidence > 1.0) {
            throw std::runtime_error("load_rules_jsonl: line " + std::to_string(lineno) +
                                     ": confidence outside [0,1]");
        }
        if (rule.body.empty()) {
            throw std::runtime_error("load_rules_jsonl: line " + std::to_string(lineno) +
                                     ": empty body");
        }
        if (unknown.empty()) {
            out.add(std::move(rule));
        }
    }
    if (!unknown.empty()) {
        std::string msg = "load_rules_jsonl: unknown relation symbols:";
        for (const auto& s : unknown) {
            msg += ' ';
            msg += s;
        }
        throw std::runtime_error(msg);
    }
    return out;
}

std::string rule_to_string(const Rule& rule, const KnowledgeGraph& kg) {
    std::string out;
    for (std::size_t i = 0; i < rule.body.size(); ++i) {
        if (i > 0) {
            out += " & ";
        }
        if (rule.body[i].inverted) {
            out += "inv:";
        }
        out += kg.relations().name(rule.body[i].relation);
    }
    out += " => ";
    out += kg.relations().name(rule.head);
    return out;
}

} // namespace kgattack
