// Exact duplicate removal by content equality and near-duplicate removal by
// token-set Jaccard similarity. Clusters are connected components of the
// similarity graph; one representative is kept per cluster. Accelerated mode
// proposes candidate pairs via MinHash/LSH banding and verifies each with
// the exact Jaccard, so it never adds a false edge.

#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "vcf/ingest.hpp"

namespace vcf::dedup {

struct DupCluster {
    std::vector<std::string> member_ids;  // sorted
    std::string representative_id;
};

struct MinHashSignature {
    int hash_count = 0;
    std::vector<std::uint64_t> values;
    bool empty_set = false;  // sentinel: never a candidate
};

struct MinHashParams {
    int hash_count = 128;
    int bands = 32;  // rows = hash_count / bands
    std::uint64_t seed = 1;
};

enum class NearDedupMode { Exact, Accelerated };

// Per-file view the dedup stage needs; stars drive representative choice.
struct DedupEntry {
    std::string file_id;
    std::string repo_id;
    std::string relative_path;
    long stars = 0;
    std::unordered_set<std::string> tokens;  // near stage
    const std::string* content = nullptr;    // exact stage
};

// |a ∩ b| / |a ∪ b|; 1.0 when both empty.
double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b);

MinHashSignature minhash(const std::unordered_set<std::string>& tokens,
                         int hash_count, std::uint64_t seed);

struct DedupResult {
    std::vector<std::string> kept_ids;      // sorted
    std::vector<DupCluster> clusters;       // sorted by representative_id
};

// Groups by content equality after newline normalization to \n.
DedupResult exact_dedup(const std::vector<DedupEntry>& entries);

// Threshold clustering on token-set Jaccard. Throws std::invalid_argument
// for threshold outside (0, 1].
DedupResult near_dedup(const std::vector<DedupEntry>& entries,
                       double threshold, NearDedupMode mode,
                       const MinHashParams& params = {});

std::string normalize_newlines(const std::string& text);

}  // namespace vcf::dedup
