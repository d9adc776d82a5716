#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgattack/kg.hpp"
#include "kgattack/types.hpp"

namespace kgattack {

enum class PlanMode { Delete, Add };

const char* to_string(PlanMode mode);
PlanMode plan_mode_from_string(std::string_view s);

struct PlanEntry {
    Triple triple;
    double score = 0.0;
    std::string provenance;
};

// Ordered perturbation with budget metadata. `budget` always equals
// entries.size(); `ratio` is zero when the plan came from an absolute budget.
struct PerturbationPlan {
    PlanMode mode = PlanMode::Delete;
    std::vector<PlanEntry> entries;
    std::int64_t budget = 0;
    double ratio = 0.0;

    // Throws unless: |entries| == budget, no duplicates, delete-mode triples
    // all present in kg, add-mode triples all absent, all ids valid.
    void validate(const KnowledgeGraph& kg) const;

    std::vector<Triple> triples() const;
};

// delta = floor(gamma * num_triples). gamma must lie in (0, 1).
std::int64_t budget_from_ratio(double gamma, std::int64_t num_triples);

// Plan files: op<TAB>head<TAB>relation<TAB>tail<TAB>score<TAB>provenance.
void save_plan(const PerturbationPlan& plan, const KnowledgeGraph& kg,
               const std::filesystem::path& path);
PerturbationPlan load_plan(const std::filesystem::path& path, const KnowledgeGraph& kg);

} // namespace kgattack
