#include "vcf/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "vcf/hash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vcf::ingest {
namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

RepoRecord repo_from_item(const json& item) {
    RepoRecord rec;
    rec.repo_id = "github.com/" + item.at("full_name").get<std::string>();
    rec.url = item.value("html_url", "");
    rec.stars = item.value("stargazers_count", 0L);
    if (item.contains("license") && item["license"].is_object() &&
        item["license"].contains("key") && item["license"]["key"].is_string()) {
        rec.license_id = lower(item["license"]["key"].get<std::string>());
    } else {
        rec.license_id = "none";
    }
    return rec;
}

}  // namespace

std::vector<RepoRecord> discover_repos(const DiscoverQuery& query,
                                       const HttpFetch& fetch,
                                       int max_retries) {
    std::vector<RepoRecord> out;
    if (query.cap == 0) return out;
    std::map<std::string, std::size_t> seen;  // repo_id -> index in out

    for (const std::string& language : query.languages) {
        for (int page = 1;; ++page) {
            std::ostringstream path;
            path << "/search/repositories?q=language:" << language
                 << (query.exclude_forks ? "+fork:false" : "")
                 << "&per_page=" << query.per_page << "&page=" << page;

            HttpResponse resp;
            int attempt = 0;
            for (;;) {
                resp = fetch(path.str());
                if (resp.status == 401 || resp.status == 403)
                    throw AuthError("authentication failure (HTTP " +
                                    std::to_string(resp.status) + ")");
                if (resp.status == 200) break;
                if (++attempt > max_retries)
                    throw PartialResultError(
                        "network failure after " + std::to_string(attempt) +
                            " attempts on " + path.str(),
                        out);
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(100LL << attempt));
            }

            json body = json::parse(resp.body, nullptr, false);
            if (body.is_discarded() || !body.contains("items"))
                throw PartialResultError("malformed response on " + path.str(),
                                         out);
            const json& items = body["items"];
            for (const json& item : items) {
                RepoRecord rec = repo_from_item(item);
                if (!seen.contains(rec.repo_id)) {
                    seen.emplace(rec.repo_id, out.size());
                    out.push_back(std::move(rec));
                    if (out.size() >= query.cap) return out;
                }
            }
            if (items.size() < query.per_page) break;  // exhausted
        }
    }
    return out;
}

// Implemented in http_client.cpp; only that TU includes httplib.
HttpResponse github_http_get(const std::string& host, const std::string& path);

HttpFetch github_fetch(const std::string& host) {
    return [host](const std::string& path) {
        return github_http_get(host, path);
    };
}

std::vector<RepoRecord> filter_permissive(
    const std::vector<RepoRecord>& repos,
    const std::set<std::string>& allowlist) {
    std::vector<RepoRecord> out;
    for (const RepoRecord& r : repos)
        if (r.license_id != "none" && allowlist.contains(r.license_id))
            out.push_back(r);
    return out;
}

std::vector<SourceFile> collect_files(
    const std::string& snapshot_path, const std::string& repo_id,
    const std::set<std::string>& extensions,
    const std::function<void(const std::string&)>& audit) {
    std::vector<SourceFile> out;
    std::vector<fs::path> candidates;

    fs::recursive_directory_iterator it(
        snapshot_path, fs::directory_options::skip_permission_denied);
    for (const fs::directory_entry& entry : it) {
        if (entry.is_symlink()) {
            if (entry.is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (!entry.is_regular_file()) continue;
        std::string ext = lower(entry.path().extension().string());
        if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
        if (extensions.contains(ext)) candidates.push_back(entry.path());
    }

    std::sort(candidates.begin(), candidates.end(),
              [&](const fs::path& a, const fs::path& b) {
                  return a.lexically_relative(snapshot_path).generic_string() <
                         b.lexically_relative(snapshot_path).generic_string();
              });

    for (const fs::path& p : candidates) {
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            if (audit) audit("unreadable: " + p.string());
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        SourceFile f;
        f.content = buf.str();
        f.byte_size = f.content.size();
        f.file_id = hash::content_id(f.content);
        f.repo_id = repo_id;
        f.relative_path = p.lexically_relative(snapshot_path).generic_string();
        std::string ext = lower(p.extension().string());
        if (!ext.empty() && ext.front() == '.') ext.erase(0, 1);
        f.extension = ext;
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<RepoRecord> load_repos_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<RepoRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        RepoRecord r;
        r.repo_id = j.at("repo_id").get<std::string>();
        r.url = j.value("url", "");
        r.license_id = j.value("license_id", "none");
        r.stars = j.value("stars", 0L);
        r.snapshot_path = j.value("snapshot_path", "");
        out.push_back(std::move(r));
    }
    return out;
}

void save_repos_jsonl(const std::string& path,
                      const std::vector<RepoRecord>& repos) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const RepoRecord& r : repos) {
        json j{{"repo_id", r.repo_id},
               {"url", r.url},
               {"license_id", r.license_id},
               {"stars", r.stars},
               {"snapshot_path", r.snapshot_path}};
        out << j.dump() << "\n";
    }
}

}  // namespace vcf::ingest
