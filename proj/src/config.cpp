#include "vcf/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "vcf/hash.hpp"

using nlohmann::json;

namespace vcf::config {
namespace {

json to_tree(const PipelineConfig& c) {
    // json objects are key-sorted, so dump() is canonical.
    return json{
        {"ingest",
         {{"languages", c.languages},
          {"repo_cap", c.repo_cap},
          {"exclude_forks", c.exclude_forks},
          {"extensions", c.extensions},
          {"license_allowlist", c.license_allowlist},
          {"offline_root", c.offline_root}}},
        {"filter",
         {{"autogen_keywords", c.filter.autogen_keywords},
          {"license_blacklist", c.filter.license_blacklist},
          {"license_whitelist", c.filter.license_whitelist},
          {"max_lines", c.filter.max_lines},
          {"max_line_length", c.filter.max_line_length},
          {"min_code_chars", c.filter.min_code_chars}}},
        {"dedup",
         {{"threshold", c.dedup_threshold},
          {"mode", c.dedup_mode},
          {"minhash_count", c.minhash_count},
          {"minhash_bands", c.minhash_bands}}},
        {"split",
         {{"seed", c.seed},
          {"val_frac", c.val_frac},
          {"test_frac", c.test_frac},
          {"split_by_repo", c.split_by_repo},
          {"parser_commands", c.parser_commands},
          {"internal_parsable_fallback", c.internal_parsable_fallback}}},
        {"lm",
         {{"order", c.lm_order},
          {"min_count", c.lm_min_count},
          {"backoff_alpha", c.lm_backoff_alpha},
          {"max_tokens", c.lm_max_tokens}}},
        {"metrics",
         {{"bleu_max_n", c.bleu_max_n},
          {"chrf_n_max", c.chrf_n_max},
          {"chrf_beta", c.chrf_beta}}},
    };
}

PipelineConfig from_tree(const json& j) {
    PipelineConfig c;
    if (j.contains("ingest")) {
        const json& g = j["ingest"];
        c.languages = g.value("languages", c.languages);
        c.repo_cap = g.value("repo_cap", c.repo_cap);
        c.exclude_forks = g.value("exclude_forks", c.exclude_forks);
        c.extensions = g.value("extensions", c.extensions);
        c.license_allowlist =
            g.value("license_allowlist", c.license_allowlist);
        c.offline_root = g.value("offline_root", c.offline_root);
    }
    if (j.contains("filter")) {
        const json& g = j["filter"];
        c.filter.autogen_keywords =
            g.value("autogen_keywords", c.filter.autogen_keywords);
        c.filter.license_blacklist =
            g.value("license_blacklist", c.filter.license_blacklist);
        c.filter.license_whitelist =
            g.value("license_whitelist", c.filter.license_whitelist);
        c.filter.max_lines = g.value("max_lines", c.filter.max_lines);
        c.filter.max_line_length =
            g.value("max_line_length", c.filter.max_line_length);
        c.filter.min_code_chars =
            g.value("min_code_chars", c.filter.min_code_chars);
    }
    if (j.contains("dedup")) {
        const json& g = j["dedup"];
        c.dedup_threshold = g.value("threshold", c.dedup_threshold);
        c.dedup_mode = g.value("mode", c.dedup_mode);
        c.minhash_count = g.value("minhash_count", c.minhash_count);
        c.minhash_bands = g.value("minhash_bands", c.minhash_bands);
    }
    if (j.contains("split")) {
        const json& g = j["split"];
        c.seed = g.value("seed", c.seed);
        c.val_frac = g.value("val_frac", c.val_frac);
        c.test_frac = g.value("test_frac", c.test_frac);
        c.split_by_repo = g.value("split_by_repo", c.split_by_repo);
        c.parser_commands = g.value("parser_commands", c.parser_commands);
        c.internal_parsable_fallback =
            g.value("internal_parsable_fallback", c.internal_parsable_fallback);
    }
    if (j.contains("lm")) {
        const json& g = j["lm"];
        c.lm_order = g.value("order", c.lm_order);
        c.lm_min_count = g.value("min_count", c.lm_min_count);
        c.lm_backoff_alpha = g.value("backoff_alpha", c.lm_backoff_alpha);
        c.lm_max_tokens = g.value("max_tokens", c.lm_max_tokens);
    }
    if (j.contains("metrics")) {
        const json& g = j["metrics"];
        c.bleu_max_n = g.value("bleu_max_n", c.bleu_max_n);
        c.chrf_n_max = g.value("chrf_n_max", c.chrf_n_max);
        c.chrf_beta = g.value("chrf_beta", c.chrf_beta);
    }
    return c;
}

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items())
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    } else {
        out.emplace_back(prefix, j.dump());
    }
}

}  // namespace

std::string to_json(const PipelineConfig& cfg) { return to_tree(cfg).dump(2); }

PipelineConfig from_json(const std::string& text) {
    return from_tree(json::parse(text));
}

PipelineConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return from_tree(json::parse(in));
}

void save(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config " + path);
    out << to_json(cfg) << "\n";
}

std::string fingerprint(const PipelineConfig& cfg) {
    return hash::hex64(hash::fnv1a(to_tree(cfg).dump()));
}

std::vector<std::string> diff_keys(const PipelineConfig& a,
                                   const PipelineConfig& b) {
    std::vector<std::pair<std::string, std::string>> fa, fb;
    flatten(to_tree(a), "", fa);
    flatten(to_tree(b), "", fb);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < fa.size() && i < fb.size(); ++i)
        if (fa[i] != fb[i]) out.push_back(fa[i].first);
    return out;
}

}  // namespace vcf::config
