// Repository discovery and candidate-file collection.
//
// Online mode talks to a GitHub-style search API through an injectable HTTP
// client (so tests can mock it); offline mode reads a directory of repo
// snapshots plus a repos.jsonl metadata file and produces identical
// SourceFiles for identical content.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vcf::ingest {

struct RepoRecord {
    std::string repo_id;  // host/owner/name
    std::string url;
    std::string license_id;  // normalized, lowercase; "none" if absent
    long stars = 0;
    std::string snapshot_path;
};

struct SourceFile {
    std::string file_id;  // content-addressed
    std::string repo_id;
    std::string relative_path;
    std::string content;
    std::size_t byte_size = 0;
    std::string extension;  // lowercase, no dot
};

struct DiscoverQuery {
    std::vector<std::string> languages{"Verilog", "SystemVerilog"};
    std::size_t cap = 0;         // 0 = no results requested
    bool exclude_forks = true;
    std::size_t per_page = 100;
};

// Minimal HTTP surface needed by discovery. The production client wraps
// the GitHub REST API; tests supply a canned one.
struct HttpResponse {
    int status = 0;
    std::string body;
};
using HttpFetch = std::function<HttpResponse(const std::string& path)>;

struct PartialResultError : std::runtime_error {
    std::vector<RepoRecord> fetched;
    PartialResultError(std::string msg, std::vector<RepoRecord> got)
        : std::runtime_error(std::move(msg)), fetched(std::move(got)) {}
};

struct AuthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Paginates the search endpoint per language tag, dedups by repo_id, and
// fills license + stars from the search payload. Retries transient failures
// with exponential backoff (max_retries per request).
std::vector<RepoRecord> discover_repos(const DiscoverQuery& query,
                                       const HttpFetch& fetch,
                                       int max_retries = 3);

// Production fetcher for api.github.com; token from VCF_API_TOKEN.
HttpFetch github_fetch(const std::string& host = "api.github.com");

std::vector<RepoRecord> filter_permissive(
    const std::vector<RepoRecord>& repos,
    const std::set<std::string>& allowlist);

// Recursive, symlink-free, case-insensitive extension match, sorted by
// relative_path. Unreadable files are skipped and reported via `audit`.
std::vector<SourceFile> collect_files(
    const std::string& snapshot_path, const std::string& repo_id,
    const std::set<std::string>& extensions,
    const std::function<void(const std::string&)>& audit = nullptr);

// Offline corpus: <root>/<owner>__<name>/ dirs plus repos.jsonl.
std::vector<RepoRecord> load_repos_jsonl(const std::string& path);
void save_repos_jsonl(const std::string& path,
                      const std::vector<RepoRecord>& repos);

inline const std::set<std::string> kDefaultExtensions = {"v", "sv", "vh",
                                                         "svh"};

}  // namespace vcf::ingest
