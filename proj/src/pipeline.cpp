#include "vcf/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vcf/dedup.hpp"
#include "vcf/extract.hpp"
#include "vcf/filters.hpp"
#include "vcf/ingest.hpp"
#include "vcf/lexer.hpp"
#include "vcf/lm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vcf::pipeline {
namespace {

using dataset::ArtifactMeta;
using dataset::ExportRecord;

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

ArtifactMeta meta_for(const Context& ctx, const std::string& stage) {
    return ArtifactMeta{1, ctx.fingerprint, stage};
}

void check_fingerprint(const Context& ctx, const ArtifactMeta& meta,
                       const std::string& artifact) {
    if (ctx.force || meta.fingerprint == ctx.fingerprint) return;
    std::ostringstream msg;
    msg << "config fingerprint mismatch on " << artifact << " (artifact "
        << meta.fingerprint << ", config " << ctx.fingerprint << ")";
    std::string lock = join_path(ctx.out_dir, "config.lock.json");
    if (fs::exists(lock)) {
        auto keys = config::diff_keys(config::load(lock), ctx.cfg);
        if (!keys.empty()) {
            msg << "; changed keys:";
            for (const std::string& k : keys) msg << " " << k;
        }
    }
    throw ValidationError(msg.str());
}

std::vector<ExportRecord> read_checked(const Context& ctx,
                                       const std::string& name) {
    ArtifactMeta meta;
    auto records = dataset::read_jsonl(join_path(ctx.out_dir, name), &meta);
    check_fingerprint(ctx, meta, name);
    return records;
}

ExportRecord file_to_record(const ingest::SourceFile& f) {
    return {{"file_id", f.file_id},
            {"repo_id", f.repo_id},
            {"relative_path", f.relative_path},
            {"extension", f.extension},
            {"byte_size", std::to_string(f.byte_size)},
            {"content", f.content}};
}

ingest::SourceFile record_to_file(const ExportRecord& r) {
    ingest::SourceFile f;
    f.file_id = r.at("file_id");
    f.repo_id = r.at("repo_id");
    f.relative_path = r.at("relative_path");
    f.extension = r.at("extension");
    f.content = r.at("content");
    f.byte_size = f.content.size();
    return f;
}

std::map<std::string, ingest::RepoRecord> load_repo_map(const Context& ctx) {
    std::map<std::string, ingest::RepoRecord> out;
    for (const auto& r :
         ingest::load_repos_jsonl(join_path(ctx.out_dir, kReposArtifact)))
        out.emplace(r.repo_id, r);
    return out;
}

}  // namespace

Context Context::make(config::PipelineConfig cfg, std::string out_dir,
                      bool force) {
    Context ctx;
    ctx.fingerprint = config::fingerprint(cfg);
    ctx.cfg = std::move(cfg);
    ctx.out_dir = std::move(out_dir);
    ctx.force = force;
    return ctx;
}

DirLock::DirLock(const std::string& out_dir)
    : path_(join_path(out_dir, ".vcf.lock")) {
    fs::create_directories(out_dir);
    std::ofstream probe(path_, std::ios::app);
    // Single-writer guard; stale locks from crashed runs are removed by
    // the next run only via --force at the CLI layer.
    if (fs::exists(path_) && fs::file_size(path_) > 0)
        throw ValidationError("artifact directory is locked: " + path_);
    std::ofstream out(path_);
    out << "locked\n";
}

DirLock::~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void stage_ingest(const Context& ctx) {
    const std::string& root = ctx.cfg.offline_root;
    if (root.empty() || !fs::exists(root))
        throw ValidationError("ingest: offline_root missing: " + root);

    auto repos = ingest::load_repos_jsonl(join_path(root, "repos.jsonl"));
    auto permissive = ingest::filter_permissive(repos, ctx.cfg.license_allowlist);
    std::sort(permissive.begin(), permissive.end(),
              [](const auto& a, const auto& b) { return a.repo_id < b.repo_id; });

    fs::create_directories(ctx.out_dir);
    config::save(ctx.cfg, join_path(ctx.out_dir, "config.lock.json"));
    ingest::save_repos_jsonl(join_path(ctx.out_dir, kReposArtifact),
                             permissive);

    std::vector<ExportRecord> records;
    std::set<std::string> seen;
    for (const ingest::RepoRecord& repo : permissive) {
        std::string snap = repo.snapshot_path.empty()
                               ? join_path(root, [&] {
                                     // host/owner/name -> owner__name
                                     std::string d = repo.repo_id;
                                     auto pos = d.find('/');
                                     if (pos != std::string::npos)
                                         d = d.substr(pos + 1);
                                     pos = d.find('/');
                                     if (pos != std::string::npos)
                                         d = d.substr(0, pos) + "__" +
                                             d.substr(pos + 1);
                                     return d;
                                 }())
                               : repo.snapshot_path;
        if (!fs::exists(snap)) continue;
        for (const ingest::SourceFile& f :
             ingest::collect_files(snap, repo.repo_id, ctx.cfg.extensions)) {
            if (!seen.insert(f.file_id).second) continue;  // cross-repo dup
            records.push_back(file_to_record(f));
        }
    }
    dataset::write_jsonl(join_path(ctx.out_dir, kFilesArtifact), records,
                         meta_for(ctx, "ingest"));
}

void stage_filter(const Context& ctx) {
    auto records = read_checked(ctx, kFilesArtifact);
    std::vector<ingest::SourceFile> files;
    for (const ExportRecord& r : records) files.push_back(record_to_file(r));

    filters::FilterResult result = filters::apply_filters(files, ctx.cfg.filter);

    std::vector<ExportRecord> audit;
    for (const filters::FilterDecision& d : result.decisions)
        audit.push_back({{"file_id", d.file_id},
                         {"verdict", d.kept ? "kept" : "dropped"},
                         {"reason", filters::reason_name(d.reason)},
                         {"evidence", d.evidence}});
    dataset::write_jsonl(join_path(ctx.out_dir, kFilterAudit), audit,
                         meta_for(ctx, "filter"));

    std::vector<ExportRecord> kept;
    for (const ingest::SourceFile& f : result.kept)
        kept.push_back(file_to_record(f));
    dataset::write_jsonl(join_path(ctx.out_dir, kFilteredArtifact), kept,
                         meta_for(ctx, "filter"));
}

void stage_dedup(const Context& ctx) {
    auto records = read_checked(ctx, kFilteredArtifact);
    auto repo_map = load_repo_map(ctx);

    std::vector<ingest::SourceFile> files;
    for (const ExportRecord& r : records) files.push_back(record_to_file(r));

    std::vector<dedup::DedupEntry> entries;
    entries.reserve(files.size());
    for (const ingest::SourceFile& f : files) {
        dedup::DedupEntry e;
        e.file_id = f.file_id;
        e.repo_id = f.repo_id;
        e.relative_path = f.relative_path;
        auto it = repo_map.find(f.repo_id);
        e.stars = it == repo_map.end() ? 0 : it->second.stars;
        e.content = &f.content;
        e.tokens = lexer::token_set(lexer::lex(f.content));
        entries.push_back(std::move(e));
    }

    dedup::DedupResult exact = dedup::exact_dedup(entries);
    std::set<std::string> exact_kept(exact.kept_ids.begin(),
                                     exact.kept_ids.end());
    std::vector<dedup::DedupEntry> survivors;
    for (dedup::DedupEntry& e : entries)
        if (exact_kept.contains(e.file_id)) survivors.push_back(std::move(e));

    dedup::MinHashParams params;
    params.hash_count = ctx.cfg.minhash_count;
    params.bands = ctx.cfg.minhash_bands;
    params.seed = ctx.cfg.seed;
    dedup::NearDedupMode mode = ctx.cfg.dedup_mode == "accelerated"
                                    ? dedup::NearDedupMode::Accelerated
                                    : dedup::NearDedupMode::Exact;
    dedup::DedupResult near =
        dedup::near_dedup(survivors, ctx.cfg.dedup_threshold, mode, params);

    std::vector<ExportRecord> clusters;
    auto cluster_record = [](const dedup::DupCluster& c,
                             const std::string& stage) {
        std::string members;
        for (const std::string& id : c.member_ids) {
            if (!members.empty()) members += " ";
            members += id;
        }
        return ExportRecord{{"stage", stage},
                            {"representative_id", c.representative_id},
                            {"member_ids", members}};
    };
    for (const dedup::DupCluster& c : exact.clusters)
        if (c.member_ids.size() > 1)
            clusters.push_back(cluster_record(c, "exact"));
    for (const dedup::DupCluster& c : near.clusters)
        clusters.push_back(cluster_record(c, "near"));
    dataset::write_jsonl(join_path(ctx.out_dir, kDedupClusters), clusters,
                         meta_for(ctx, "dedup"));

    std::set<std::string> near_kept(near.kept_ids.begin(),
                                    near.kept_ids.end());
    std::vector<ExportRecord> kept;
    for (const ingest::SourceFile& f : files)
        if (near_kept.contains(f.file_id)) kept.push_back(file_to_record(f));
    dataset::write_jsonl(join_path(ctx.out_dir, kDedupedArtifact), kept,
                         meta_for(ctx, "dedup"));
}

void stage_extract(const Context& ctx) {
    auto records = read_checked(ctx, kDedupedArtifact);
    std::vector<ExportRecord> out;
    for (const ExportRecord& r : records) {
        ingest::SourceFile f = record_to_file(r);
        lexer::LexOutput lx = lexer::lex(f.content);
        for (const extract::Snippet& s :
             extract::extract_snippets(lx, f.content, f.file_id)) {
            out.push_back({{"snippet_id", s.snippet_id},
                           {"kind", extract::kind_name(s.kind)},
                           {"name", s.name},
                           {"definition", s.definition_text},
                           {"body", s.body_text},
                           {"file_id", s.file_id},
                           {"repo_id", f.repo_id},
                           {"nesting_depth", std::to_string(s.nesting_depth)}});
        }
    }
    dataset::write_jsonl(join_path(ctx.out_dir, kSnippetsArtifact), out,
                         meta_for(ctx, "extract"));
}

void stage_split(const Context& ctx) {
    auto files = read_checked(ctx, kDedupedArtifact);
    auto snippets = read_checked(ctx, kSnippetsArtifact);
    auto repo_map = load_repo_map(ctx);

    std::map<std::string, std::vector<std::string>> snippets_by_file;
    for (const ExportRecord& s : snippets)
        snippets_by_file[s.at("file_id")].push_back(s.at("snippet_id"));

    std::vector<dataset::SplitInput> inputs;
    std::map<std::string, std::string> contents;
    for (const ExportRecord& r : files) {
        dataset::SplitInput in;
        in.file_id = r.at("file_id");
        in.repo_id = r.at("repo_id");
        auto it = repo_map.find(in.repo_id);
        in.stars = it == repo_map.end() ? 0 : it->second.stars;
        if (auto s = snippets_by_file.find(in.file_id);
            s != snippets_by_file.end()) {
            in.snippet_ids = s->second;
            std::sort(in.snippet_ids.begin(), in.snippet_ids.end());
        }
        contents[in.file_id] = r.at("content");
        inputs.push_back(std::move(in));
    }

    dataset::DatasetManifest manifest = dataset::assign_splits(
        inputs, ctx.cfg.seed, ctx.cfg.val_frac, ctx.cfg.test_frac);
    manifest.corpus_id = ctx.fingerprint;
    manifest.fingerprint = ctx.fingerprint;

    dataset::ParsableConfig pcfg;
    pcfg.parser_commands = ctx.cfg.parser_commands;
    pcfg.internal_fallback = ctx.cfg.internal_parsable_fallback;
    pcfg.cache_path = join_path(ctx.out_dir, "parsable_cache.json");
    dataset::tag_parsable(manifest, contents, pcfg);

    dataset::save_manifest(manifest,
                           join_path(ctx.out_dir, kManifestArtifact));
}

namespace {

dataset::DatasetManifest load_checked_manifest(const Context& ctx) {
    auto manifest =
        dataset::load_manifest(join_path(ctx.out_dir, kManifestArtifact));
    ArtifactMeta meta;
    meta.fingerprint = manifest.fingerprint;
    meta.stage = "split";
    check_fingerprint(ctx, meta, kManifestArtifact);
    return manifest;
}

// unit id -> text for the subset's unit kind.
std::map<std::string, std::string> unit_texts(const Context& ctx,
                                              dataset::SubsetName subset) {
    std::map<std::string, std::string> out;
    bool file_units = subset == dataset::SubsetName::FullFiles ||
                      subset == dataset::SubsetName::ParsableFiles;
    if (file_units) {
        for (const ExportRecord& r : read_checked(ctx, kDedupedArtifact))
            out[r.at("file_id")] = r.at("content");
    } else {
        for (const ExportRecord& r : read_checked(ctx, kSnippetsArtifact))
            out[r.at("snippet_id")] = r.at("definition") + "\n" + r.at("body");
    }
    return out;
}

}  // namespace

void stage_export(const Context& ctx, dataset::SubsetName subset,
                  const std::string& format) {
    auto manifest = load_checked_manifest(ctx);
    auto ids = dataset::select_subset(manifest, subset);
    auto texts = unit_texts(ctx, subset);

    std::string base = "export_" + dataset::subset_name(subset);
    if (format == "jsonl" || format == "csv") {
        std::vector<ExportRecord> records;
        for (const std::string& id : ids) {
            auto it = texts.find(id);
            if (it == texts.end()) continue;
            records.push_back({{"unit_id", id}, {"text", it->second}});
        }
        if (format == "jsonl")
            dataset::write_jsonl(join_path(ctx.out_dir, base + ".jsonl"),
                                 records, meta_for(ctx, "export"));
        else
            dataset::write_csv(join_path(ctx.out_dir, base + ".csv"), records,
                               meta_for(ctx, "export"));
    } else if (format == "chunks") {
        std::vector<std::string> unit_list;
        for (const std::string& id : ids)
            if (auto it = texts.find(id); it != texts.end())
                unit_list.push_back(it->second);
        dataset::write_chunks(join_path(ctx.out_dir, base + "_chunks.txt"),
                              unit_list, meta_for(ctx, "export"));
    } else {
        throw ValidationError("export: unknown format " + format);
    }
}

void stage_train_lm(const Context& ctx, dataset::SubsetName subset) {
    auto manifest = load_checked_manifest(ctx);
    auto ids = dataset::select_subset(manifest, subset);
    auto texts = unit_texts(ctx, subset);

    std::vector<std::vector<std::string>> documents;
    for (const std::string& id : ids) {
        auto it = texts.find(id);
        if (it == texts.end()) continue;
        lexer::LexOutput lx = lexer::lex(it->second);
        std::vector<std::string> doc;
        doc.reserve(lx.tokens.size());
        for (const lexer::Token& t : lx.tokens) doc.push_back(t.text);
        if (!doc.empty()) documents.push_back(std::move(doc));
    }
    if (documents.empty())
        throw ValidationError("train-lm: subset has no training documents");

    lm::NGramModel model = lm::train(documents, ctx.cfg.lm_order,
                                     ctx.cfg.lm_min_count,
                                     ctx.cfg.lm_backoff_alpha);
    model.fingerprint = ctx.fingerprint;
    lm::save_model(model,
                   join_path(ctx.out_dir,
                             "model_" + dataset::subset_name(subset) + ".vlm"));
}

void stage_complete(const Context& ctx, dataset::SubsetName subset) {
    auto manifest = load_checked_manifest(ctx);
    lm::NGramModel model = lm::load_model(
        join_path(ctx.out_dir, "model_" + dataset::subset_name(subset) + ".vlm"));
    ArtifactMeta mm;
    mm.fingerprint = model.fingerprint;
    mm.stage = "train-lm";
    check_fingerprint(ctx, mm, "model");

    std::set<std::string> test_snippets;
    for (const dataset::SnippetRecord& s : manifest.snippets)
        if (s.split == dataset::Split::Test) test_snippets.insert(s.snippet_id);

    std::vector<ExportRecord> out;
    for (const ExportRecord& r : read_checked(ctx, kSnippetsArtifact)) {
        if (!test_snippets.contains(r.at("snippet_id"))) continue;
        lm::CompletionResult result = lm::complete_greedy(
            model, r.at("definition"), ctx.cfg.lm_max_tokens);
        out.push_back({{"snippet_id", r.at("snippet_id")},
                       {"completion", result.detokenized_text}});
    }
    dataset::write_jsonl(
        join_path(ctx.out_dir,
                  "completions_" + dataset::subset_name(subset) + ".jsonl"),
        out, meta_for(ctx, "complete"));
}

metrics::MetricReport stage_evaluate(const Context& ctx,
                                     dataset::SubsetName subset) {
    auto manifest = load_checked_manifest(ctx);
    std::string name = dataset::subset_name(subset);

    std::map<std::string, std::string> predictions;
    for (const ExportRecord& r :
         read_checked(ctx, "completions_" + name + ".jsonl"))
        predictions[r.at("snippet_id")] = r.at("completion");

    std::set<std::string> test_snippets;
    for (const dataset::SnippetRecord& s : manifest.snippets)
        if (s.split == dataset::Split::Test) test_snippets.insert(s.snippet_id);
    std::map<std::string, std::string> references;
    for (const ExportRecord& r : read_checked(ctx, kSnippetsArtifact))
        if (test_snippets.contains(r.at("snippet_id")))
            references[r.at("snippet_id")] = r.at("body");

    // Backoff perplexity on the file-level test split.
    lm::NGramModel model =
        lm::load_model(join_path(ctx.out_dir, "model_" + name + ".vlm"));
    std::set<std::string> test_files;
    for (const dataset::FileRecord& f : manifest.files)
        if (f.split == dataset::Split::Test) test_files.insert(f.file_id);
    std::vector<std::vector<std::string>> docs;
    for (const ExportRecord& r : read_checked(ctx, kDedupedArtifact)) {
        if (!test_files.contains(r.at("file_id"))) continue;
        lexer::LexOutput lx = lexer::lex(r.at("content"));
        std::vector<std::string> doc;
        for (const lexer::Token& t : lx.tokens) doc.push_back(t.text);
        if (!doc.empty()) docs.push_back(std::move(doc));
    }
    std::optional<double> ppl;
    if (!docs.empty()) ppl = lm::perplexity(model, docs);

    metrics::MetricReport report = metrics::evaluate_completions(
        predictions, references, ppl, name, "ngram-" + name);

    json per_pair = json::array();
    for (const metrics::PairScores& p : report.per_pair)
        per_pair.push_back({{"snippet_id", p.snippet_id},
                            {"rouge_l", p.rouge_l},
                            {"chrf", p.chrf}});
    json j{{"schema_version", 1},
           {"stage", "evaluate"},
           {"fingerprint", ctx.fingerprint},
           {"subset", report.subset},
           {"model_id", report.model_id},
           {"perplexity", ppl ? json(*ppl) : json(nullptr)},
           {"bleu", report.bleu.value},
           {"bleu_unsmoothed", report.bleu.raw},
           {"bleu_smoothed_flag", report.bleu.smoothed},
           {"rouge_l", report.rouge_l},
           {"chrf", report.chrf},
           {"pair_count", report.pair_count},
           {"tokenization", report.tokenization},
           {"aggregation", report.aggregation},
           {"per_pair", std::move(per_pair)}};
    std::ofstream out(join_path(ctx.out_dir, "report_" + name + ".json"));
    out << j.dump(2) << "\n";
    std::ofstream table(join_path(ctx.out_dir, "report_" + name + ".txt"));
    table << metrics::render_report_table({report});
    return report;
}

std::string stage_stats(const Context& ctx) {
    auto manifest = load_checked_manifest(ctx);
    std::string text = dataset::render_stats(dataset::stats(manifest));
    std::ofstream out(join_path(ctx.out_dir, "stats.txt"));
    out << text;
    return text;
}

void run_all(const Context& ctx) {
    stage_ingest(ctx);
    stage_filter(ctx);
    stage_dedup(ctx);
    stage_extract(ctx);
    stage_split(ctx);
    for (auto subset : {dataset::SubsetName::FullFiles,
                        dataset::SubsetName::ParsableFiles,
                        dataset::SubsetName::Snippets,
                        dataset::SubsetName::ParsableSnippets}) {
        stage_export(ctx, subset, "jsonl");
        stage_export(ctx, subset, "csv");
        stage_export(ctx, subset, "chunks");
    }
    for (auto subset :
         {dataset::SubsetName::FullFiles, dataset::SubsetName::Snippets}) {
        stage_train_lm(ctx, subset);
        stage_complete(ctx, subset);
        stage_evaluate(ctx, subset);
    }
    stage_stats(ctx);
}

}  // namespace vcf::pipeline
