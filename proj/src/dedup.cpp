#include "vcf/dedup.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "vcf/hash.hpp"

namespace vcf::dedup {
namespace {

// Union-find over entry indices.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void merge(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Highest stars, then lexicographically smallest (repo_id, relative_path),
// then file_id as the final tie-break.
bool better_representative(const DedupEntry& a, const DedupEntry& b) {
    if (a.stars != b.stars) return a.stars > b.stars;
    if (a.repo_id != b.repo_id) return a.repo_id < b.repo_id;
    if (a.relative_path != b.relative_path)
        return a.relative_path < b.relative_path;
    return a.file_id < b.file_id;
}

DedupResult collect_clusters(const std::vector<DedupEntry>& entries,
                             UnionFind& uf) {
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i)
        groups[uf.find(i)].push_back(i);

    DedupResult result;
    for (auto& [root, members] : groups) {
        std::size_t rep = members.front();
        for (std::size_t m : members)
            if (better_representative(entries[m], entries[rep])) rep = m;
        DupCluster cluster;
        for (std::size_t m : members)
            cluster.member_ids.push_back(entries[m].file_id);
        std::sort(cluster.member_ids.begin(), cluster.member_ids.end());
        cluster.representative_id = entries[rep].file_id;
        result.kept_ids.push_back(cluster.representative_id);
        result.clusters.push_back(std::move(cluster));
    }
    std::sort(result.kept_ids.begin(), result.kept_ids.end());
    std::sort(result.clusters.begin(), result.clusters.end(),
              [](const DupCluster& a, const DupCluster& b) {
                  return a.representative_id < b.representative_id;
              });
    return result;
}

}  // namespace

std::string normalize_newlines(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    std::size_t inter = 0;
    for (const std::string& t : small)
        if (large.contains(t)) ++inter;
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

MinHashSignature minhash(const std::unordered_set<std::string>& tokens,
                         int hash_count, std::uint64_t seed) {
    if (hash_count < 1)
        throw std::invalid_argument("minhash: hash_count must be >= 1");
    MinHashSignature sig;
    sig.hash_count = hash_count;
    sig.values.assign(static_cast<std::size_t>(hash_count),
                      std::numeric_limits<std::uint64_t>::max());
    if (tokens.empty()) {
        sig.empty_set = true;
        return sig;
    }
    for (const std::string& tok : tokens) {
        std::uint64_t base = hash::fnv1a(tok);
        for (int h = 0; h < hash_count; ++h) {
            std::uint64_t v = hash::mix64(
                base ^ hash::mix64(seed + static_cast<std::uint64_t>(h)));
            auto idx = static_cast<std::size_t>(h);
            if (v < sig.values[idx]) sig.values[idx] = v;
        }
    }
    return sig;
}

DedupResult exact_dedup(const std::vector<DedupEntry>& entries) {
    std::unordered_map<std::string, std::vector<std::size_t>> by_content;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].content)
            throw std::invalid_argument("exact_dedup: entry without content");
        by_content[normalize_newlines(*entries[i].content)].push_back(i);
    }
    UnionFind uf(entries.size());
    for (const auto& [content, members] : by_content)
        for (std::size_t k = 1; k < members.size(); ++k)
            uf.merge(members[0], members[k]);
    return collect_clusters(entries, uf);
}

DedupResult near_dedup(const std::vector<DedupEntry>& entries,
                       double threshold, NearDedupMode mode,
                       const MinHashParams& params) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("near_dedup: threshold must be in (0, 1]");

    UnionFind uf(entries.size());
    const std::size_t n = entries.size();

    if (mode == NearDedupMode::Exact) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (jaccard(entries[i].tokens, entries[j].tokens) >= threshold)
                    uf.merge(i, j);
        return collect_clusters(entries, uf);
    }

    if (params.bands < 1 || params.hash_count % params.bands != 0)
        throw std::invalid_argument("near_dedup: bands must divide hash_count");
    const int rows = params.hash_count / params.bands;

    std::vector<MinHashSignature> sigs;
    sigs.reserve(n);
    for (const DedupEntry& e : entries)
        sigs.push_back(minhash(e.tokens, params.hash_count, params.seed));

    // Band buckets -> candidate pairs, each verified with the exact Jaccard.
    std::unordered_set<std::uint64_t> checked;  // packed (i, j) pairs
    for (int band = 0; band < params.bands; ++band) {
        std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
        for (std::size_t i = 0; i < n; ++i) {
            if (sigs[i].empty_set) continue;
            std::uint64_t key = 0xcbf29ce484222325ULL ^
                                static_cast<std::uint64_t>(band);
            for (int r = 0; r < rows; ++r)
                key = hash::mix64(
                    key ^ sigs[i].values[static_cast<std::size_t>(band * rows + r)]);
            buckets[key].push_back(i);
        }
        for (const auto& [key, members] : buckets) {
            for (std::size_t a = 0; a < members.size(); ++a) {
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    std::size_t i = members[a], j = members[b];
                    std::uint64_t packed =
                        (static_cast<std::uint64_t>(i) << 32) | j;
                    if (!checked.insert(packed).second) continue;
                    if (jaccard(entries[i].tokens, entries[j].tokens) >=
                        threshold)
                        uf.merge(i, j);
                }
            }
        }
    }
    return collect_clusters(entries, uf);
}

}  // namespace vcf::dedup
