#include "vcf/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "vcf/lexer.hpp"
#include "vcf/lm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vcf::dataset {
namespace {

json meta_json(const ArtifactMeta& meta) {
    return json{{"schema_version", meta.schema_version},
                {"fingerprint", meta.fingerprint},
                {"stage", meta.stage}};
}

ArtifactMeta meta_from_json(const json& j) {
    ArtifactMeta meta;
    meta.schema_version = j.value("schema_version", 1);
    meta.fingerprint = j.value("fingerprint", "");
    meta.stage = j.value("stage", "");
    return meta;
}

std::string csv_quote(const std::string& field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// RFC 4180-style parse; handles quoted fields with embedded newlines.
std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else if (c == '\r') {
            // swallowed; paired \n ends the row
        } else {
            field.push_back(c);
        }
    }
    if (any && (!field.empty() || !row.empty())) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Validation: return "validation";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "validation") return Split::Validation;
    if (name == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + name);
}

std::string subset_name(SubsetName s) {
    switch (s) {
        case SubsetName::FullFiles: return "full_files";
        case SubsetName::ParsableFiles: return "parsable_files";
        case SubsetName::Snippets: return "snippets";
        case SubsetName::ParsableSnippets: return "parsable_snippets";
    }
    return "full_files";
}

SubsetName subset_from_name(const std::string& name) {
    if (name == "full_files") return SubsetName::FullFiles;
    if (name == "parsable_files") return SubsetName::ParsableFiles;
    if (name == "snippets") return SubsetName::Snippets;
    if (name == "parsable_snippets") return SubsetName::ParsableSnippets;
    throw std::invalid_argument("unknown subset: " + name);
}

DatasetManifest assign_splits(const std::vector<SplitInput>& files,
                              std::uint64_t seed, double val_frac,
                              double test_frac) {
    if (val_frac < 0 || test_frac < 0 || val_frac + test_frac > 1.0)
        throw std::invalid_argument("assign_splits: bad fractions");

    DatasetManifest manifest;
    manifest.seed = seed;

    std::vector<SplitInput> sorted = files;
    std::sort(sorted.begin(), sorted.end(),
              [](const SplitInput& a, const SplitInput& b) {
                  return a.file_id < b.file_id;
              });

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i].stars >= 1 && !sorted[i].snippet_ids.empty())
            eligible.push_back(i);

    // Fisher-Yates over the id-sorted eligible list; mt19937_64 output is
    // fully specified, so the same seed reproduces the manifest anywhere.
    std::mt19937_64 gen(seed);
    for (std::size_t i = eligible.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen() % i);
        std::swap(eligible[i - 1], eligible[j]);
    }

    std::size_t n_val = static_cast<std::size_t>(
        val_frac * static_cast<double>(eligible.size()));
    std::size_t n_test = static_cast<std::size_t>(
        test_frac * static_cast<double>(eligible.size()));

    std::vector<Split> assigned(sorted.size(), Split::Train);
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        if (k < n_val) assigned[eligible[k]] = Split::Validation;
        else if (k < n_val + n_test) assigned[eligible[k]] = Split::Test;
    }

    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const SplitInput& in = sorted[i];
        FileRecord rec;
        rec.file_id = in.file_id;
        rec.repo_id = in.repo_id;
        rec.stars = in.stars;
        rec.split = assigned[i];
        rec.eligible = in.stars >= 1 && !in.snippet_ids.empty();
        rec.snippet_count = static_cast<long>(in.snippet_ids.size());
        manifest.files.push_back(rec);
        for (const std::string& sid : in.snippet_ids) {
            SnippetRecord s;
            s.snippet_id = sid;
            s.file_id = in.file_id;
            s.split = assigned[i];
            manifest.snippets.push_back(std::move(s));
        }
    }
    return manifest;
}

bool balanced_check(const std::string& content) {
    lexer::LexOutput lx = lexer::lex(content);
    if (lx.unterminated_block_comment) return false;
    long paren = 0, bracket = 0, brace = 0, blocks = 0;
    long modules = 0, functions = 0, tasks = 0, cases = 0;
    for (const lexer::Token& t : lx.tokens) {
        const std::string& s = t.text;
        if (s == "(") ++paren;
        else if (s == ")") --paren;
        else if (s == "[") ++bracket;
        else if (s == "]") --bracket;
        else if (s == "{") ++brace;
        else if (s == "}") --brace;
        else if (t.kind == lexer::TokenKind::Keyword) {
            if (s == "begin") ++blocks;
            else if (s == "end") --blocks;
            else if (s == "module" || s == "macromodule") ++modules;
            else if (s == "endmodule") --modules;
            else if (s == "function") ++functions;
            else if (s == "endfunction") --functions;
            else if (s == "task") ++tasks;
            else if (s == "endtask") --tasks;
            else if (s == "case" || s == "casex" || s == "casez") ++cases;
            else if (s == "endcase") --cases;
        }
        if (paren < 0 || bracket < 0 || brace < 0 || blocks < 0 ||
            modules < 0 || functions < 0 || tasks < 0 || cases < 0)
            return false;
    }
    return paren == 0 && bracket == 0 && brace == 0 && blocks == 0 &&
           modules == 0 && functions == 0 && tasks == 0 && cases == 0;
}

void tag_parsable(DatasetManifest& manifest,
                  const std::map<std::string, std::string>& contents,
                  const ParsableConfig& cfg,
                  const std::function<void(const std::string&)>& warn) {
    json cache = json::object();
    if (!cfg.cache_path.empty() && fs::exists(cfg.cache_path)) {
        std::ifstream in(cfg.cache_path);
        cache = json::parse(in, nullptr, false);
        if (cache.is_discarded()) cache = json::object();
    }

    std::vector<std::string> runnable = cfg.parser_commands;
    bool used_external = false;

    for (FileRecord& file : manifest.files) {
        if (cache.contains(file.file_id)) {
            file.parsable = cache[file.file_id].get<bool>();
            continue;
        }
        auto it = contents.find(file.file_id);
        if (it == contents.end()) {
            file.parsable = false;
            continue;
        }

        bool parsable = false;
        bool checked = false;
        if (!runnable.empty()) {
            fs::path tmp = fs::temp_directory_path() /
                           ("vcf_parse_" + file.file_id + ".sv");
            {
                std::ofstream out(tmp, std::ios::binary);
                out << it->second;
            }
            for (auto cmd_it = runnable.begin(); cmd_it != runnable.end();) {
                std::string cmd = *cmd_it;
                std::size_t pos = cmd.find("{file}");
                if (pos != std::string::npos)
                    cmd.replace(pos, 6, tmp.string());
                cmd += " >/dev/null 2>&1";
                int rc = std::system(cmd.c_str());
                int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
                if (code == 127 || code == 126) {
                    if (warn) warn("parser not runnable, skipping: " + *cmd_it);
                    cmd_it = runnable.erase(cmd_it);
                    continue;
                }
                checked = true;
                used_external = true;
                if (code == 0) {
                    parsable = true;
                    break;  // short-circuit on first accepting parser
                }
                ++cmd_it;
            }
            fs::remove(tmp);
        }
        if (!checked) {
            if (!cfg.internal_fallback)
                throw std::runtime_error(
                    "tag_parsable: no runnable parser and fallback disabled");
            parsable = balanced_check(it->second);
        }
        file.parsable = parsable;
        cache[file.file_id] = parsable;
    }

    manifest.parsability_checker =
        used_external ? "external" : "internal-balanced";

    std::map<std::string, bool> by_file;
    for (const FileRecord& f : manifest.files)
        by_file[f.file_id] = f.parsable;
    for (SnippetRecord& s : manifest.snippets)
        s.parsable = by_file.count(s.file_id) ? by_file[s.file_id] : false;

    if (!cfg.cache_path.empty()) {
        std::ofstream out(cfg.cache_path);
        out << cache.dump() << "\n";
    }
}

std::vector<std::string> select_subset(const DatasetManifest& manifest,
                                       SubsetName name) {
    std::vector<std::string> out;
    switch (name) {
        case SubsetName::FullFiles:
        case SubsetName::ParsableFiles:
            for (const FileRecord& f : manifest.files)
                if (f.split == Split::Train &&
                    (name == SubsetName::FullFiles || f.parsable))
                    out.push_back(f.file_id);
            break;
        case SubsetName::Snippets:
        case SubsetName::ParsableSnippets:
            for (const SnippetRecord& s : manifest.snippets)
                if (s.split == Split::Train &&
                    (name == SubsetName::Snippets || s.parsable))
                    out.push_back(s.snippet_id);
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_jsonl(const std::string& path,
                 const std::vector<ExportRecord>& records,
                 const ArtifactMeta& meta) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    json header = meta_json(meta);
    out << json{{"_meta", header}}.dump() << "\n";
    for (const ExportRecord& rec : records) {
        json j = json::object();
        for (const auto& [key, value] : rec) j[key] = value;
        out << j.dump() << "\n";
    }
    if (!out) {
        out.close();
        fs::remove(path);
        throw std::runtime_error("write failure on " + path);
    }
}

std::vector<ExportRecord> read_jsonl(const std::string& path,
                                     ArtifactMeta* meta) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<ExportRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (first && j.contains("_meta")) {
            if (meta) *meta = meta_from_json(j["_meta"]);
            first = false;
            continue;
        }
        first = false;
        ExportRecord rec;
        for (const auto& [key, value] : j.items())
            rec[key] = value.get<std::string>();
        records.push_back(std::move(rec));
    }
    return records;
}

void write_csv(const std::string& path,
               const std::vector<ExportRecord>& records,
               const ArtifactMeta& meta) {
    std::vector<std::string> columns;
    for (const ExportRecord& rec : records)
        for (const auto& [key, value] : rec)
            if (std::find(columns.begin(), columns.end(), key) ==
                columns.end())
                columns.push_back(key);
    std::sort(columns.begin(), columns.end());

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << (i ? "," : "") << csv_quote(columns[i]);
    out << "\n";
    for (const ExportRecord& rec : records) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            auto it = rec.find(columns[i]);
            out << (i ? "," : "")
                << csv_quote(it == rec.end() ? std::string() : it->second);
        }
        out << "\n";
    }
    if (!out) {
        out.close();
        fs::remove(path);
        throw std::runtime_error("write failure on " + path);
    }

    std::ofstream side(path + ".meta.json");
    side << meta_json(meta).dump() << "\n";
}

std::vector<ExportRecord> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto rows = parse_csv(in);
    std::vector<ExportRecord> records;
    if (rows.empty()) return records;
    const std::vector<std::string>& header = rows.front();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        ExportRecord rec;
        for (std::size_t c = 0; c < header.size() && c < rows[r].size(); ++c)
            rec[header[c]] = rows[r][c];
        records.push_back(std::move(rec));
    }
    return records;
}

ChunkStats write_chunks(const std::string& path,
                        const std::vector<std::string>& unit_texts,
                        const ArtifactMeta& meta) {
    ChunkStats stats;
    std::vector<std::string> tokens;
    for (const std::string& text : unit_texts) {
        lexer::LexOutput lx = lexer::lex(text);
        for (const lexer::Token& t : lx.tokens) tokens.push_back(t.text);
        stats.token_count += lx.tokens.size();
        tokens.push_back(lm::kSep);
        ++stats.separator_count;
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (std::size_t i = 0; i < tokens.size(); i += kChunkSize) {
        std::size_t end = std::min(i + kChunkSize, tokens.size());
        for (std::size_t k = i; k < end; ++k)
            out << (k == i ? "" : " ") << tokens[k];
        for (std::size_t k = end; k < i + kChunkSize; ++k) {
            out << (k == i ? "" : " ") << lm::kSep;
            ++stats.padding;
        }
        out << "\n";
        ++stats.chunk_count;
    }

    json m = meta_json(meta);
    m["token_count"] = stats.token_count;
    m["separator_count"] = stats.separator_count;
    m["chunk_count"] = stats.chunk_count;
    m["padding"] = stats.padding;
    std::ofstream side(path + ".meta.json");
    side << m.dump() << "\n";
    return stats;
}

ChunkStats read_chunks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ChunkStats stats;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++stats.chunk_count;
        // Separators are not lexable Verilog; split on them first, then
        // re-lex each code segment.
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t sep = line.find(lm::kSep, pos);
            std::string segment =
                line.substr(pos, sep == std::string::npos ? std::string::npos
                                                          : sep - pos);
            stats.token_count += lexer::lex(segment).tokens.size();
            if (sep == std::string::npos) break;
            ++stats.separator_count;
            pos = sep + lm::kSep.size();
        }
    }
    return stats;
}

std::vector<StatsRow> stats(const DatasetManifest& manifest) {
    StatsRow train_all{"Train (All)"}, train_parsable{"Train (Parsable)"},
        validation{"Validation"}, test{"Test"}, total{"Total"};
    for (const FileRecord& f : manifest.files) {
        ++total.files;
        switch (f.split) {
            case Split::Train:
                ++train_all.files;
                if (f.parsable) ++train_parsable.files;
                break;
            case Split::Validation: ++validation.files; break;
            case Split::Test: ++test.files; break;
        }
    }
    for (const SnippetRecord& s : manifest.snippets) {
        ++total.snippets;
        switch (s.split) {
            case Split::Train:
                ++train_all.snippets;
                if (s.parsable) ++train_parsable.snippets;
                break;
            case Split::Validation: ++validation.snippets; break;
            case Split::Test: ++test.snippets; break;
        }
    }
    return {train_all, train_parsable, validation, test, total};
}

std::string render_stats(const std::vector<StatsRow>& rows) {
    std::ostringstream out;
    char line[96];
    std::snprintf(line, sizeof(line), "%-18s %10s %10s\n", "Split", "Files",
                  "Snippets");
    out << line;
    for (const StatsRow& row : rows) {
        std::snprintf(line, sizeof(line), "%-18s %10zu %10zu\n",
                      row.label.c_str(), row.files, row.snippets);
        out << line;
    }
    return out.str();
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    json files = json::array();
    for (const FileRecord& f : manifest.files)
        files.push_back({{"file_id", f.file_id},
                         {"repo_id", f.repo_id},
                         {"stars", f.stars},
                         {"split", split_name(f.split)},
                         {"eligible", f.eligible},
                         {"parsable", f.parsable},
                         {"snippet_count", f.snippet_count}});
    json snippets = json::array();
    for (const SnippetRecord& s : manifest.snippets)
        snippets.push_back({{"snippet_id", s.snippet_id},
                            {"file_id", s.file_id},
                            {"split", split_name(s.split)},
                            {"parsable", s.parsable}});
    json j{{"schema_version", 1},
           {"stage", "split"},
           {"corpus_id", manifest.corpus_id},
           {"seed", manifest.seed},
           {"fingerprint", manifest.fingerprint},
           {"parsability_checker", manifest.parsability_checker},
           {"files", std::move(files)},
           {"snippets", std::move(snippets)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in);
    DatasetManifest manifest;
    manifest.corpus_id = j.value("corpus_id", "");
    manifest.seed = j.value("seed", 0ULL);
    manifest.fingerprint = j.value("fingerprint", "");
    manifest.parsability_checker = j.value("parsability_checker", "");
    for (const json& f : j.at("files")) {
        FileRecord rec;
        rec.file_id = f.at("file_id").get<std::string>();
        rec.repo_id = f.value("repo_id", "");
        rec.stars = f.value("stars", 0L);
        rec.split = split_from_name(f.at("split").get<std::string>());
        rec.eligible = f.value("eligible", false);
        rec.parsable = f.value("parsable", false);
        rec.snippet_count = f.value("snippet_count", 0L);
        manifest.files.push_back(std::move(rec));
    }
    for (const json& s : j.at("snippets")) {
        SnippetRecord rec;
        rec.snippet_id = s.at("snippet_id").get<std::string>();
        rec.file_id = s.value("file_id", "");
        rec.split = split_from_name(s.at("split").get<std::string>());
        rec.parsable = s.value("parsable", false);
        manifest.snippets.push_back(std::move(rec));
    }
    return manifest;
}

}  // namespace vcf::dataset
