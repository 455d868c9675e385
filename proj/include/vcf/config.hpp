// Declarative pipeline configuration. One JSON file drives every stage; a
// fingerprint of the canonical serialized form is embedded in every output
// artifact so stages refuse to mix results from different configurations.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "vcf/filters.hpp"

namespace vcf::config {

struct PipelineConfig {
    // ingest
    std::vector<std::string> languages{"Verilog", "SystemVerilog"};
    std::size_t repo_cap = 1000;
    bool exclude_forks = true;
    std::set<std::string> extensions{"v", "sv", "vh", "svh"};
    std::set<std::string> license_allowlist{"mit", "apache-2.0",
                                            "bsd-2-clause", "bsd-3-clause",
                                            "isc", "unlicense", "cc0-1.0"};
    std::string offline_root;  // offline corpus: snapshots + repos.jsonl

    filters::FilterConfig filter;

    // dedup
    double dedup_threshold = 0.8;
    std::string dedup_mode = "exact";  // "exact" | "accelerated"
    int minhash_count = 128;
    int minhash_bands = 32;

    // split
    std::uint64_t seed = 42;
    double val_frac = 0.15;
    double test_frac = 0.35;
    bool split_by_repo = false;

    std::vector<std::string> parser_commands;
    bool internal_parsable_fallback = true;

    // lm
    int lm_order = 4;
    long lm_min_count = 2;
    double lm_backoff_alpha = 0.4;
    int lm_max_tokens = 256;

    // metrics
    int bleu_max_n = 4;
    int chrf_n_max = 6;
    double chrf_beta = 2.0;
};

std::string to_json(const PipelineConfig& cfg);
PipelineConfig from_json(const std::string& text);

PipelineConfig load(const std::string& path);
void save(const PipelineConfig& cfg, const std::string& path);

// FNV-1a of the canonical serialized form.
std::string fingerprint(const PipelineConfig& cfg);

// Human-readable list of keys whose values differ between two configs.
std::vector<std::string> diff_keys(const PipelineConfig& a,
                                   const PipelineConfig& b);

}  // namespace vcf::config
