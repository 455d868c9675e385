#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "vcf/dataset.hpp"
#include "vcf/lexer.hpp"

using namespace vcf::dataset;
namespace fs = std::filesystem;

namespace {

std::vector<SplitInput> synthetic_inputs(std::size_t eligible,
                                         std::size_t ineligible) {
    std::vector<SplitInput> inputs;
    for (std::size_t i = 0; i < eligible; ++i) {
        SplitInput in;
        in.file_id = "e" + std::to_string(10000 + i);
        in.repo_id = "github.com/o/r";
        in.stars = 1 + static_cast<long>(i % 5);
        in.snippet_ids = {in.file_id + ":module:0"};
        inputs.push_back(std::move(in));
    }
    for (std::size_t i = 0; i < ineligible; ++i) {
        SplitInput in;
        in.file_id = "i" + std::to_string(10000 + i);
        in.repo_id = "github.com/o/r";
        // Half lack stars, half lack snippets.
        if (i % 2 == 0) {
            in.stars = 0;
            in.snippet_ids = {in.file_id + ":module:0"};
        } else {
            in.stars = 3;
        }
        inputs.push_back(std::move(in));
    }
    return inputs;
}

fs::path tmp_file(const std::string& name) {
    return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("split fractions with floor rounding") {
    auto manifest = assign_splits(synthetic_inputs(10000, 0), 7);
    std::size_t val = 0, test = 0, train = 0;
    for (const FileRecord& f : manifest.files) {
        switch (f.split) {
            case Split::Validation: ++val; break;
            case Split::Test: ++test; break;
            case Split::Train: ++train; break;
        }
    }
    CHECK(val == 1500);
    CHECK(test == 3500);
    CHECK(train == 5000);
}

TEST_CASE("ineligible files always train") {
    auto manifest = assign_splits(synthetic_inputs(20, 30), 3);
    for (const FileRecord& f : manifest.files) {
        if (!f.eligible) CHECK(f.split == Split::Train);
        if (f.split != Split::Train) {
            CHECK(f.stars >= 1);
            CHECK(f.snippet_count >= 1);
        }
    }
}

TEST_CASE("snippets inherit the file split") {
    auto manifest = assign_splits(synthetic_inputs(50, 10), 11);
    std::map<std::string, Split> file_split;
    for (const FileRecord& f : manifest.files)
        file_split[f.file_id] = f.split;
    CHECK(!manifest.snippets.empty());
    for (const SnippetRecord& s : manifest.snippets)
        CHECK(s.split == file_split.at(s.file_id));
}

TEST_CASE("same seed reproduces splits; input order is irrelevant") {
    auto inputs = synthetic_inputs(200, 40);
    auto a = assign_splits(inputs, 99);
    std::reverse(inputs.begin(), inputs.end());
    auto b = assign_splits(inputs, 99);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].file_id == b.files[i].file_id);
        CHECK(a.files[i].split == b.files[i].split);
    }
    auto c = assign_splits(inputs, 100);
    bool any_differs = false;
    for (std::size_t i = 0; i < a.files.size(); ++i)
        if (a.files[i].split != c.files[i].split) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("bad fractions rejected") {
    CHECK_THROWS(assign_splits({}, 1, 0.7, 0.5));
    CHECK_THROWS(assign_splits({}, 1, -0.1, 0.2));
}

TEST_CASE("balanced_check accepts well-formed and rejects broken files") {
    CHECK(balanced_check("module m; wire w; endmodule\n"));
    CHECK(balanced_check(
        "module m;\nalways begin x <= 1'b0; end\nendmodule\n"));
    CHECK(!balanced_check("module m; wire w;\n"));           // no endmodule
    CHECK(!balanced_check("module m; if (a begin endmodule"));  // paren
    CHECK(!balanced_check("module m; /* oops endmodule"));
    CHECK(!balanced_check("end begin"));  // closes before opening
}

TEST_CASE("tag_parsable: external command short-circuit and cache") {
    DatasetManifest manifest;
    FileRecord good;
    good.file_id = "fgood";
    FileRecord bad;
    bad.file_id = "fbad";
    manifest.files = {good, bad};
    std::map<std::string, std::string> contents = {
        {"fgood", "module m; endmodule\n"}, {"fbad", "module m;\n"}};

    fs::path cache = tmp_file("vcf_parse_cache_test.json");
    fs::remove(cache);
    ParsableConfig cfg;
    // "true" accepts everything regardless of content; the second command
    // failing to exist must be skipped, not fatal.
    cfg.parser_commands = {"true {file}", "definitely_not_a_parser {file}"};
    cfg.cache_path = cache.string();
    tag_parsable(manifest, contents, cfg);
    CHECK(manifest.files[0].parsable);
    CHECK(manifest.files[1].parsable);
    CHECK(manifest.parsability_checker == "external");

    // Warm cache: a command that rejects everything is not even consulted.
    ParsableConfig reject = cfg;
    reject.parser_commands = {"false {file}"};
    tag_parsable(manifest, contents, reject);
    CHECK(manifest.files[0].parsable);
    fs::remove(cache);
}

TEST_CASE("tag_parsable falls back to the internal checker") {
    DatasetManifest manifest;
    FileRecord a;
    a.file_id = "fa";
    FileRecord b;
    b.file_id = "fb";
    manifest.files = {a, b};
    std::map<std::string, std::string> contents = {
        {"fa", "module m; endmodule\n"}, {"fb", "module m; begin\n"}};
    ParsableConfig cfg;  // no external commands
    tag_parsable(manifest, contents, cfg);
    CHECK(manifest.files[0].parsable);
    CHECK(!manifest.files[1].parsable);
    CHECK(manifest.parsability_checker == "internal-balanced");
}

TEST_CASE("subset selection") {
    auto manifest = assign_splits(synthetic_inputs(40, 10), 5);
    // Mark alternating files parsable.
    for (std::size_t i = 0; i < manifest.files.size(); ++i)
        manifest.files[i].parsable = (i % 2 == 0);
    std::map<std::string, bool> parsable;
    for (const FileRecord& f : manifest.files)
        parsable[f.file_id] = f.parsable;
    for (SnippetRecord& s : manifest.snippets)
        s.parsable = parsable.at(s.file_id);

    auto full = select_subset(manifest, SubsetName::FullFiles);
    auto pars = select_subset(manifest, SubsetName::ParsableFiles);
    auto snip = select_subset(manifest, SubsetName::Snippets);
    auto psnip = select_subset(manifest, SubsetName::ParsableSnippets);

    CHECK(std::includes(full.begin(), full.end(), pars.begin(), pars.end()));
    CHECK(std::includes(snip.begin(), snip.end(), psnip.begin(), psnip.end()));

    std::set<std::string> train_files;
    for (const FileRecord& f : manifest.files)
        if (f.split == Split::Train) train_files.insert(f.file_id);
    for (const std::string& id : full) CHECK(train_files.contains(id));
    std::set<std::string> train_snippets;
    for (const SnippetRecord& s : manifest.snippets)
        if (s.split == Split::Train) train_snippets.insert(s.snippet_id);
    for (const std::string& id : snip) CHECK(train_snippets.contains(id));
}

TEST_CASE("jsonl and csv round-trip losslessly") {
    std::vector<ExportRecord> records = {
        {{"unit_id", "u1"}, {"text", "wire w;\n// \"quoted\", comma"}},
        {{"unit_id", "u2"}, {"text", "a,b\n\"c\"\nd\r\ne"}},
        {{"unit_id", "u3"}, {"text", ""}},
    };
    ArtifactMeta meta{1, "fp", "export"};

    fs::path jl = tmp_file("vcf_rt.jsonl");
    write_jsonl(jl.string(), records, meta);
    ArtifactMeta back;
    auto from_jsonl = read_jsonl(jl.string(), &back);
    CHECK(back.fingerprint == "fp");
    CHECK(from_jsonl == records);

    fs::path cv = tmp_file("vcf_rt.csv");
    write_csv(cv.string(), from_jsonl, meta);
    auto from_csv = read_csv(cv.string());
    CHECK(from_csv == records);

    write_jsonl(jl.string(), from_csv, meta);
    CHECK(read_jsonl(jl.string()) == records);
    fs::remove(jl);
    fs::remove(cv);
    fs::remove(cv.string() + ".meta.json");
}

TEST_CASE("empty csv export has header only") {
    fs::path cv = tmp_file("vcf_empty.csv");
    write_csv(cv.string(), {}, {1, "fp", "export"});
    std::ifstream in(cv);
    std::string line;
    std::getline(in, line);
    CHECK(line.empty());  // no records, no columns
    CHECK(read_csv(cv.string()).empty());
    fs::remove(cv);
    fs::remove(cv.string() + ".meta.json");
}

TEST_CASE("chunk writer pads the final chunk and counts exactly") {
    // 2 units of 511 tokens each + 2 separators = 1024 tokens, 2 chunks.
    std::string unit;
    for (int i = 0; i < 511; ++i) unit += "w" + std::to_string(i) + " ";
    fs::path path = tmp_file("vcf_chunks.txt");
    ChunkStats stats = write_chunks(path.string(), {unit, unit},
                                    {1, "fp", "export"});
    CHECK(stats.token_count == 1022);
    CHECK(stats.separator_count == 2);
    CHECK(stats.chunk_count == 2);
    CHECK(stats.padding == 0);

    ChunkStats read = read_chunks(path.string());
    CHECK(read.token_count == stats.token_count);
    CHECK(read.separator_count == stats.separator_count);
    CHECK(read.chunk_count == stats.chunk_count);

    // Non-multiple total gets padded to a full final chunk.
    ChunkStats odd =
        write_chunks(path.string(), {"wire w ;"}, {1, "fp", "export"});
    CHECK(odd.token_count == 3);
    CHECK(odd.separator_count == 1);
    CHECK(odd.chunk_count == 1);
    CHECK(odd.padding == kChunkSize - 4);
    fs::remove(path);
    fs::remove(path.string() + ".meta.json");
}

TEST_CASE("stats reproduce the reference split table") {
    // Manifest crafted to the published split shape.
    DatasetManifest manifest;
    auto add_files = [&](std::size_t n, Split split, bool parsable) {
        for (std::size_t i = 0; i < n; ++i) {
            FileRecord f;
            f.file_id = split_name(split) + std::to_string(i) +
                        (parsable ? "p" : "n");
            f.split = split;
            f.parsable = parsable;
            manifest.files.push_back(std::move(f));
        }
    };
    auto add_snippets = [&](std::size_t n, Split split, bool parsable) {
        for (std::size_t i = 0; i < n; ++i) {
            SnippetRecord s;
            s.snippet_id = "s" + split_name(split) + std::to_string(i) +
                           (parsable ? "p" : "n");
            s.split = split;
            s.parsable = parsable;
            manifest.snippets.push_back(std::move(s));
        }
    };
    add_files(43236, Split::Train, true);
    add_files(71768 - 43236, Split::Train, false);
    add_files(8627, Split::Validation, false);
    add_files(20129, Split::Test, false);
    add_snippets(65414, Split::Train, true);
    add_snippets(102265 - 65414, Split::Train, false);
    add_snippets(11811, Split::Validation, false);
    add_snippets(28207, Split::Test, false);

    auto rows = stats(manifest);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].files == 71768);
    CHECK(rows[0].snippets == 102265);
    CHECK(rows[1].files == 43236);
    CHECK(rows[1].snippets == 65414);
    CHECK(rows[2].files == 8627);
    CHECK(rows[2].snippets == 11811);
    CHECK(rows[3].files == 20129);
    CHECK(rows[3].snippets == 28207);
    CHECK(rows[4].files == 100524);
    CHECK(rows[4].snippets == 142283);
    // Totals row equals column sums.
    CHECK(rows[4].files == rows[0].files + rows[2].files + rows[3].files);
    CHECK(rows[4].snippets ==
          rows[0].snippets + rows[2].snippets + rows[3].snippets);
}

TEST_CASE("stats of an empty manifest are all zeros") {
    auto rows = stats(DatasetManifest{});
    for (const StatsRow& row : rows) {
        CHECK(row.files == 0);
        CHECK(row.snippets == 0);
    }
}

TEST_CASE("manifest round-trips through disk") {
    auto manifest = assign_splits(synthetic_inputs(25, 5), 77);
    manifest.corpus_id = "test";
    manifest.fingerprint = "fp";
    fs::path path = tmp_file("vcf_manifest.json");
    save_manifest(manifest, path.string());
    DatasetManifest loaded = load_manifest(path.string());
    fs::remove(path);
    REQUIRE(loaded.files.size() == manifest.files.size());
    REQUIRE(loaded.snippets.size() == manifest.snippets.size());
    for (std::size_t i = 0; i < manifest.files.size(); ++i) {
        CHECK(loaded.files[i].file_id == manifest.files[i].file_id);
        CHECK(loaded.files[i].split == manifest.files[i].split);
        CHECK(loaded.files[i].eligible == manifest.files[i].eligible);
    }
}
