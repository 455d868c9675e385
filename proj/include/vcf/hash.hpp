#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace vcf::hash {

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view data,
                              std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64 finalizer; used to derive independent hash functions from seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string hex64(std::uint64_t value);

// Content-addressed file key: "f" + 16 hex digits + "-" + byte size.
std::string content_id(std::string_view content);

}  // namespace vcf::hash
