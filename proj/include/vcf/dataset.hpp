// Split assignment, parsability tagging, curated subset selection, export,
// and statistics. The manifest is the authoritative record of every file's
// split, eligibility, and parsability; snippets inherit their file's split,
// so no file's content crosses splits.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vcf::dataset {

enum class Split { Train, Validation, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct FileRecord {
    std::string file_id;
    std::string repo_id;
    long stars = 0;
    Split split = Split::Train;
    bool eligible = false;
    bool parsable = false;
    long snippet_count = 0;
};

struct SnippetRecord {
    std::string snippet_id;
    std::string file_id;
    Split split = Split::Train;
    bool parsable = false;
};

struct DatasetManifest {
    std::string corpus_id;
    std::uint64_t seed = 0;
    std::string fingerprint;
    std::string parsability_checker;  // records which checker ran
    std::vector<FileRecord> files;
    std::vector<SnippetRecord> snippets;
};

struct SplitInput {
    std::string file_id;
    std::string repo_id;
    long stars = 0;
    std::vector<std::string> snippet_ids;
};

// Eligible = stars >= 1 and at least one snippet. Eligible files are
// shuffled by a seeded Fisher-Yates over lexicographically sorted ids;
// the first floor(val_frac*E) go to validation, the next floor(test_frac*E)
// to test, everything else (and all ineligible files) to train.
DatasetManifest assign_splits(const std::vector<SplitInput>& files,
                              std::uint64_t seed, double val_frac = 0.15,
                              double test_frac = 0.35);

struct ParsableConfig {
    std::vector<std::string> parser_commands;  // "{file}" placeholder
    bool internal_fallback = true;
    std::string cache_path;  // empty = no cache
};

// Parsable iff any configured parser exits 0 on the file. Results are
// cached by file_id. With no runnable external parser, the internal
// fallback accepts files that lex cleanly with balanced bracket,
// begin/end, and construct/end-construct pairs.
void tag_parsable(DatasetManifest& manifest,
                  const std::map<std::string, std::string>& contents,
                  const ParsableConfig& cfg,
                  const std::function<void(const std::string&)>& warn = nullptr);

// Internal parsability fallback, exposed for tests.
bool balanced_check(const std::string& content);

enum class SubsetName { FullFiles, ParsableFiles, Snippets, ParsableSnippets };

std::string subset_name(SubsetName s);
SubsetName subset_from_name(const std::string& name);

// Train-split unit ids for the subset, sorted.
std::vector<std::string> select_subset(const DatasetManifest& manifest,
                                       SubsetName name);

// One flat string-valued record per unit; the common currency of the
// jsonl/csv exporters.
using ExportRecord = std::map<std::string, std::string>;

struct ArtifactMeta {
    int schema_version = 1;
    std::string fingerprint;
    std::string stage;
};

void write_jsonl(const std::string& path,
                 const std::vector<ExportRecord>& records,
                 const ArtifactMeta& meta);
std::vector<ExportRecord> read_jsonl(const std::string& path,
                                     ArtifactMeta* meta = nullptr);

void write_csv(const std::string& path,
               const std::vector<ExportRecord>& records,
               const ArtifactMeta& meta);
std::vector<ExportRecord> read_csv(const std::string& path);

struct ChunkStats {
    std::size_t token_count = 0;      // unit tokens, separators excluded
    std::size_t separator_count = 0;  // one per unit
    std::size_t chunk_count = 0;
    std::size_t padding = 0;  // separator tokens padding the final chunk
};

inline constexpr std::size_t kChunkSize = 512;

// Lexes every unit text, appends one separator token per unit, and writes
// newline-delimited chunks of exactly kChunkSize space-joined tokens (final
// chunk padded with separators). Returns the stats, also written to
// `path`.meta.json.
ChunkStats write_chunks(const std::string& path,
                        const std::vector<std::string>& unit_texts,
                        const ArtifactMeta& meta);

// Re-lexes a chunk file; counts unit tokens and separators.
ChunkStats read_chunks(const std::string& path);

struct StatsRow {
    std::string label;
    std::size_t files = 0;
    std::size_t snippets = 0;
};

// Rows: Train (All), Train (Parsable), Validation, Test, Total.
std::vector<StatsRow> stats(const DatasetManifest& manifest);
std::string render_stats(const std::vector<StatsRow>& rows);

void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

}  // namespace vcf::dataset
