// Stage orchestration over an artifact directory. Every stage reads its
// predecessor's artifact, checks that the artifact's config fingerprint
// matches the active config, and writes its own fingerprinted artifact, so
// a run-all is exactly the composition of the individual stages.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vcf/config.hpp"
#include "vcf/dataset.hpp"
#include "vcf/metrics.hpp"

namespace vcf::pipeline {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Context {
    config::PipelineConfig cfg;
    std::string out_dir;
    bool force = false;
    std::string fingerprint;  // derived from cfg

    static Context make(config::PipelineConfig cfg, std::string out_dir,
                        bool force = false);
};

// Artifact file names inside out_dir.
inline const std::string kReposArtifact = "repos.jsonl";
inline const std::string kFilesArtifact = "files.jsonl";
inline const std::string kFilterAudit = "filter_audit.jsonl";
inline const std::string kFilteredArtifact = "files_filtered.jsonl";
inline const std::string kDedupClusters = "dedup_clusters.jsonl";
inline const std::string kDedupedArtifact = "files_deduped.jsonl";
inline const std::string kSnippetsArtifact = "snippets.jsonl";
inline const std::string kManifestArtifact = "manifest.json";

// Offline collect: cfg.offline_root must hold repos.jsonl plus one
// snapshot directory per repo. Writes repos.jsonl and files.jsonl.
void stage_ingest(const Context& ctx);

void stage_filter(const Context& ctx);
void stage_dedup(const Context& ctx);
void stage_extract(const Context& ctx);
void stage_split(const Context& ctx);

void stage_export(const Context& ctx, dataset::SubsetName subset,
                  const std::string& format);  // jsonl | csv | chunks

void stage_train_lm(const Context& ctx, dataset::SubsetName subset);

// Greedy completions for test-split snippets, written as
// completions_<subset>.jsonl with records {snippet_id, completion}.
void stage_complete(const Context& ctx, dataset::SubsetName subset);

metrics::MetricReport stage_evaluate(const Context& ctx,
                                     dataset::SubsetName subset);

std::string stage_stats(const Context& ctx);

void run_all(const Context& ctx);

// RAII artifact-directory lock (fails if another writer holds it).
class DirLock {
public:
    explicit DirLock(const std::string& out_dir);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::string path_;
};

}  // namespace vcf::pipeline
