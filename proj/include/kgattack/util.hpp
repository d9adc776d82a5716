#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kgattack {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value);

// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);
std::uint64_t hash_file(const std::filesystem::path& path);

// Threaded index-range helper. Runs fn(begin, end) on disjoint chunks of
// [0, n); with workers <= 1 it runs inline. fn must only write to
// index-addressed slots so the result is independent of scheduling.
void parallel_chunks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace kgattack
