#include "kgattack/kg.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "kgattack/plan.hpp"
#include "kgattack/util.hpp"

namespace kgattack {

std::int32_t Vocab::intern(std::string_view s) {
    auto it = ids_.find(std::string(s));
    if (it != ids_.end()) {
        return it->second;
    }
    const auto id = static_cast<std::int32_t>(names_.size());
    names_.emplace_back(s);
    ids_.emplace(names_.back(), id);
    return id;
}

std::int32_t Vocab::id_of(std::string_view s) const {
    auto it = ids_.find(std::string(s));
    return it == ids_.end() ? -1 : it->second;
}

const std::string& Vocab::name(std::int32_t id) const {
    if (id < 0 || id >= size()) {
        throw std::out_of_range("Vocab::name: id " + std::to_string(id) + " out of range");
    }
    return names_[static_cast<std::size_t>(id)];
}

std::uint64_t Vocab::content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& n : names_) {
        h = fnv1a64(n, h);
        h = fnv1a64(std::string_view("\n", 1), h);
    }
    return h;
}

KnowledgeGraph KnowledgeGraph::from_triples(Vocab entities, Vocab relations,
                                            std::vector<Triple> triples) {
    KnowledgeGraph kg;
    kg.entities_ = std::move(entities);
    kg.relations_ = std::move(relations);
    std::sort(triples.begin(), triples.end());
    triples.erase(std::unique(triples.begin(), triples.end()), triples.end());
    for (const auto& t : triples) {
        kg.check_triple_ids(t);
    }
    kg.triples_ = std::move(triples);
    kg.build_indexes();
    return kg;
}

void KnowledgeGraph::check_triple_ids(const Triple& t) const {
    if (t.head < 0 || t.head >= entities_.size() || t.tail < 0 || t.tail >= entities_.size()) {
        throw std::out_of_range("triple references unknown entity id");
    }
    if (t.relation < 0 || t.relation >= relations_.size()) {
        throw std::out_of_range("triple references unknown relation id");
    }
}

void KnowledgeGraph::build_indexes() {
    const auto ne = static_cast<std::size_t>(entities_.size());
    const auto nr = static_cast<std::size_t>(relations_.size());
    triple_set_.reserve(triples_.size() * 2);
    out_index_.assign(ne, {});
    in_index_.assign(ne, {});
    rel_index_.assign(nr, {});
    incident_relations_.assign(ne, {});
    rel_out_.assign(nr, {});
    rel_in_.assign(nr, {});
    rel_entities_.assign(nr, {});

    for (const auto& t : triples_) {
        triple_set_.insert(t);
        out_index_[static_cast<std::size_t>(t.head)].emplace_back(t.relation, t.tail);
        in_index_[static_cast<std::size_t>(t.tail)].emplace_back(t.relation, t.head);
        rel_index_[static_cast<std::size_t>(t.relation)].push_back(t);
        incident_relations_[static_cast<std::size_t>(t.head)].push_back(t.relation);
        incident_relations_[static_cast<std::size_t>(t.tail)].push_back(t.relation);
    }
    for (auto& rels : incident_relations_) {
        std::sort(rels.begin(), rels.end());
        rels.erase(std::unique(rels.begin(), rels.end()), rels.end());
    }

    auto fill_adjacency = [](RelationAdjacency& adj, std::vector<std::pair<EntityId, EntityId>> edges) {
        std::sort(edges.begin(), edges.end());
        for (const auto& [from, to] : edges) {
            if (adj.buckets.empty() || adj.buckets.back().first != from) {
                adj.index.emplace(from, adj.buckets.size());
                adj.buckets.emplace_back(from, std::vector<EntityId>{});
            }
            adj.buckets.back().second.push_back(to);
        }
    };
    for (std::size_t r = 0; r < nr; ++r) {
        std::vector<std::pair<EntityId, EntityId>> fwd;
        std::vector<std::pair<EntityId, EntityId>> bwd;
        fwd.reserve(rel_index_[r].size());
        bwd.reserve(rel_index_[r].size());
        for (const auto& t : rel_index_[r]) {
            fwd.emplace_back(t.head, t.tail);
            bwd.emplace_back(t.tail, t.head);
        }
        fill_adjacency(rel_out_[r], std::move(fwd));
        fill_adjacency(rel_in_[r], std::move(bwd));

        std::vector<EntityId> ents;
        for (const auto& t : rel_index_[r]) {
            ents.push_back(t.head);
            ents.push_back(t.tail);
        }
        std::sort(ents.begin(), ents.end());
        ents.erase(std::unique(ents.begin(), ents.end()), ents.end());
        rel_entities_[r] = std::move(ents);
    }
}

namespace {
template <typename T>
const T& checked_at(const std::vector<T>& v, std::int32_t id, const char* what) {
    if (id < 0 || static_cast<std::size_t>(id) >= v.size()) {
        throw std::out_of_range(std::string(what) + ": id " + std::to_string(id) + " out of range");
    }
    return v[static_cast<std::size_t>(id)];
}
} // namespace

const std::vector<std::pair<RelationId, EntityId>>& KnowledgeGraph::out_edges(EntityId e) const {
    return checked_at(out_index_, e, "out_edges");
}

const std::vector<std::pair<RelationId, EntityId>>& KnowledgeGraph::in_edges(EntityId e) const {
    return checked_at(in_index_, e, "in_edges");
}

const std::vector<Triple>& KnowledgeGraph::triples_of(RelationId r) const {
    return checked_at(rel_index_, r, "triples_of");
}

const std::vector<EntityId>& KnowledgeGraph::entities_of(RelationId r) const {
    return checked_at(rel_entities_, r, "entities_of");
}

const std::vector<EntityId>& KnowledgeGraph::neighbors(EntityId e, RelationId r,
                                                       bool inverted) const {
    static const std::vector<EntityId> kEmpty;
    const auto& adj = inverted ? checked_at(rel_in_, r, "neighbors")
                               : checked_at(rel_out_, r, "neighbors");
    auto it = adj.index.find(e);
    if (it == adj.index.end()) {
        return kEmpty;
    }
    return adj.buckets[it->second].second;
}

std::vector<RelationId> KnowledgeGraph::relation_neighborhood(EntityId e) const {
    const auto& rels = checked_at(incident_relations_, e, "relation_neighborhood");
    if (rels.empty()) {
        throw std::invalid_argument("relation_neighborhood: entity '" + entities_.name(e) +
                                    "' has no incident edges");
    }
    return rels;
}

std::vector<std::int64_t> KnowledgeGraph::relation_distribution() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(relations_.size()), 0);
    for (std::size_t r = 0; r < counts.size(); ++r) {
        counts[r] = static_cast<std::int64_t>(rel_index_[r].size());
    }
    return counts;
}

std::string KnowledgeGraph::surface(const Triple& t) const {
    return entities_.name(t.head) + '\t' + relations_.name(t.relation) + '\t' +
           entities_.name(t.tail);
}

bool KnowledgeGraph::surface_less(const Triple& a, const Triple& b) const {
    if (int c = entities_.name(a.head).compare(entities_.name(b.head)); c != 0) {
        return c < 0;
    }
    if (int c = relations_.name(a.relation).compare(relations_.name(b.relation)); c != 0) {
        return c < 0;
    }
    return entities_.name(a.tail) < entities_.name(b.tail);
}

KnowledgeGraph KnowledgeGraph::apply_plan(const PerturbationPlan& plan) const {
    plan.validate(*this);
    std::vector<Triple> next = triples_;
    if (plan.mode == PlanMode::Delete) {
        std::unordered_set<Triple, TripleHash> doomed;
        for (const auto& e : plan.entries) {
            doomed.insert(e.triple);
        }
        next.erase(std::remove_if(next.begin(), next.end(),
                                  [&](const Triple& t) { return doomed.count(t) > 0; }),
                   next.end());
    } else {
        for (const auto& e : plan.entries) {
            next.push_back(e.triple);
        }
    }
    return from_triples(entities_, relations_, std::move(next));
}

KnowledgeGraph load_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_tsv: cannot open " + path.string());
    }
    Vocab entities;
    Vocab relations;
    std::vector<Triple> triples;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        const auto tab3 = tab2 == std::string::npos ? std::string::npos : line.find('\t', tab2 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab3 != std::string::npos ||
            tab1 == 0 || tab2 == tab1 + 1 || tab2 + 1 == line.size()) {
            throw std::runtime_error("load_tsv: malformed line " + std::to_string(lineno) +
                                     " in " + path.string() + " (expected head<TAB>relation<TAB>tail)");
        }
        Triple t;
        t.head = entities.intern(std::string_view(line).substr(0, tab1));
        t.relation = relations.intern(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
        t.tail = entities.intern(std::string_view(line).substr(tab2 + 1));
        triples.push_back(t);
    }
    if (triples.empty()) {
        throw std::runtime_error("load_tsv: no triples in " + path.string());
    }
    return KnowledgeGraph::from_triples(std::move(entities), std::move(relations),
                                        std::move(triples));
}

void save_tsv(const KnowledgeGraph& kg, const std::filesystem::path& path) {
    if (kg.num_triples() == 0) {
        throw std::runtime_error("save_tsv: refusing to write an empty graph");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("save_tsv: cannot open " + path.string());
    }
    for (const auto& t : kg.triples()) {
        out << kg.surface(t) << '\n';
    }
    if (!out) {
        throw std::runtime_error("save_tsv: write failed for " + path.string());
    }
}

AuxTriples load_aux_tsv(const std::filesystem::path& path, const KnowledgeGraph& kg) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_aux_tsv: cannot open " + path.string());
    }
    AuxTriples out;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        const auto tab3 = tab2 == std::string::npos ? std::string::npos : line.find('\t', tab2 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos || tab3 != std::string::npos) {
            throw std::runtime_error("load_aux_tsv: malformed line " + std::to_string(lineno) +
                                     " in " + path.string());
        }
        const auto h = kg.entities().id_of(std::string_view(line).substr(0, tab1));
        const auto r = kg.relations().id_of(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
        const auto t = kg.entities().id_of(std::string_view(line).substr(tab2 + 1));
        if (h < 0 || r < 0 || t < 0) {
            ++out.skipped_unknown;
            continue;
        }
        out.triples.push_back(Triple{h, r, t});
    }
    return out;
}

} // namespace kgattack
