#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>

namespace kgattack {

// Dense handles into the interning tables of the owning graph.
using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
    EntityId head = -1;
    RelationId relation = -1;
    EntityId tail = -1;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t x = static_cast<std::uint32_t>(t.head);
        x = x * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.relation);
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = x * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(t.tail);
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<std::size_t>(x ^ (x >> 31));
    }
};

} // namespace kgattack
