#include "kgattack/plan.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "kgattack/util.hpp"

namespace kgattack {

const char* to_string(PlanMode mode) {
    return mode == PlanMode::Delete ? "delete" : "add";
}

PlanMode plan_mode_from_string(std::string_view s) {
    if (s == "delete") {
        return PlanMode::Delete;
    }
    if (s == "add") {
        return PlanMode::Add;
    }
    throw std::invalid_argument("unknown plan mode: " + std::string(s));
}

void PerturbationPlan::validate(const KnowledgeGraph& kg) const {
    if (static_cast<std::int64_t>(entries.size()) != budget) {
        throw std::runtime_error("plan violation: " + std::to_string(entries.size()) +
                                 " entries vs budget " + std::to_string(budget));
    }
    std::unordered_set<Triple, TripleHash> seen;
    seen.reserve(entries.size() * 2);
    for (const auto& e : entries) {
        kg.check_triple_ids(e.triple);
        if (!seen.insert(e.triple).second) {
            throw std::runtime_error("plan violation: duplicate triple " + kg.surface(e.triple));
        }
        const bool in_kg = kg.contains(e.triple);
        if (mode == PlanMode::Delete && !in_kg) {
            throw std::runtime_error("plan violation: delete of absent triple " +
                                     kg.surface(e.triple));
        }
        if (mode == PlanMode::Add && in_kg) {
            throw std::runtime_error("plan violation: addition of existing triple " +
                                     kg.surface(e.triple));
        }
    }
}

std::vector<Triple> PerturbationPlan::triples() const {
    std::vector<Triple> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.triple);
    }
    return out;
}

std::int64_t budget_from_ratio(double gamma, std::int64_t num_triples) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("perturbation ratio must lie in (0,1), got " +
                                    format_double(gamma));
    }
    // The small slack keeps binary-decimal noise from flipping exact products
    // (0.3 * 10) below the integer they represent.
    return static_cast<std::int64_t>(std::floor(gamma * static_cast<double>(num_triples) + 1e-9));
}

void save_plan(const PerturbationPlan& plan, const KnowledgeGraph& kg,
               const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("save_plan: cannot open " + path.string());
    }
    for (const auto& e : plan.entries) {
        out << to_string(plan.mode) << '\t' << kg.surface(e.triple) << '\t'
            << format_double(e.score) << '\t' << e.provenance << '\n';
    }
    if (!out) {
        throw std::runtime_error("save_plan: write failed for " + path.string());
    }
}

PerturbationPlan load_plan(const std::filesystem::path& path, const KnowledgeGraph& kg) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_plan: cannot open " + path.string());
    }
    PerturbationPlan plan;
    bool mode_set = false;
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
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        const std::string_view view(line);
        while (true) {
            const auto pos = view.find('\t', start);
            if (pos == std::string_view::npos) {
                fields.push_back(view.substr(start));
                break;
            }
            fields.push_back(view.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 6) {
            throw std::runtime_error("load_plan: malformed line " + std::to_string(lineno) +
                                     " in " + path.string());
        }
        const PlanMode mode = plan_mode_from_string(fields[0]);
        if (!mode_set) {
            plan.mode = mode;
            mode_set = true;
        } else if (mode != plan.mode) {
            throw std::runtime_error("load_plan: mixed op values at line " +
                                     std::to_string(lineno));
        }
        PlanEntry entry;
        const auto h = kg.entities().id_of(fields[1]);
        const auto r = kg.relations().id_of(fields[2]);
        const auto t = kg.entities().id_of(fields[3]);
        if (h < 0 || r < 0 || t < 0) {
            throw std::runtime_error("load_plan: unknown symbol at line " + std::to_string(lineno));
        }
        entry.triple = Triple{h, r, t};
        double score = 0.0;
        const auto* first = fields[4].data();
        const auto* last = first + fields[4].size();
        auto res = std::from_chars(first, last, score);
        if (res.ec != std::errc() || res.ptr != last) {
            throw std::runtime_error("load_plan: bad score at line " + std::to_string(lineno));
        }
        entry.score = score;
        entry.provenance = std::string(fields[5]);
        plan.entries.push_back(std::move(entry));
    }
    plan.budget = static_cast<std::int64_t>(plan.entries.size());
    return plan;
}

} // namespace kgattack
