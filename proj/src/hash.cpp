#include "vcf/hash.hpp"

#include <array>

namespace vcf::hash {

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string content_id(std::string_view content) {
    return "f" + hex64(fnv1a(content)) + "-" + std::to_string(content.size());
}

}  // namespace vcf::hash
