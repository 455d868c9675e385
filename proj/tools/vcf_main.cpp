// vcf: Verilog corpus curation and autocompletion evaluation pipeline.
//
// Subcommands mirror the pipeline stages; all of them share one config file
// and one artifact directory. Exit codes: 0 success, 1 validation error
// (bad config, fingerprint mismatch), 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vcf/config.hpp"
#include "vcf/dataset.hpp"
#include "vcf/ingest.hpp"
#include "vcf/lm.hpp"
#include "vcf/metrics.hpp"
#include "vcf/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using vcf::pipeline::Context;

namespace {

void log_line(const std::string& level, const std::string& msg) {
    std::cerr << json{{"level", level}, {"msg", msg}}.dump() << "\n";
}

int dispatch(const std::string& command, Context& ctx,
             const std::string& subset_str, const std::string& format) {
    using vcf::dataset::subset_from_name;
    if (command == "mine") {
        vcf::ingest::DiscoverQuery query;
        query.languages = ctx.cfg.languages;
        query.cap = ctx.cfg.repo_cap;
        query.exclude_forks = ctx.cfg.exclude_forks;
        auto repos =
            vcf::ingest::discover_repos(query, vcf::ingest::github_fetch());
        fs::create_directories(ctx.out_dir);
        vcf::ingest::save_repos_jsonl(
            (fs::path(ctx.out_dir) / "repos.jsonl").string(), repos);
        log_line("info",
                 "discovered " + std::to_string(repos.size()) + " repos");
        for (vcf::ingest::RepoRecord& repo : repos) {
            std::string dir = repo.repo_id.substr(repo.repo_id.find('/') + 1);
            auto slash = dir.find('/');
            if (slash != std::string::npos)
                dir = dir.substr(0, slash) + "__" + dir.substr(slash + 1);
            fs::path snap = fs::path(ctx.out_dir) / "snapshots" / dir;
            if (fs::exists(snap)) continue;  // cached snapshot
            std::string cmd = "git clone --depth 1 --quiet " + repo.url + " " +
                              snap.string();
            if (std::system(cmd.c_str()) != 0)
                log_line("warn", "clone failed: " + repo.repo_id);
        }
        return 0;
    }
    if (command == "ingest") { vcf::pipeline::stage_ingest(ctx); return 0; }
    if (command == "filter") { vcf::pipeline::stage_filter(ctx); return 0; }
    if (command == "dedup") { vcf::pipeline::stage_dedup(ctx); return 0; }
    if (command == "extract") { vcf::pipeline::stage_extract(ctx); return 0; }
    if (command == "split") { vcf::pipeline::stage_split(ctx); return 0; }
    if (command == "export") {
        vcf::pipeline::stage_export(ctx, subset_from_name(subset_str), format);
        return 0;
    }
    if (command == "train-lm") {
        vcf::pipeline::stage_train_lm(ctx, subset_from_name(subset_str));
        return 0;
    }
    if (command == "complete") {
        vcf::pipeline::stage_complete(ctx, subset_from_name(subset_str));
        return 0;
    }
    if (command == "evaluate") {
        auto report =
            vcf::pipeline::stage_evaluate(ctx, subset_from_name(subset_str));
        std::cout << vcf::metrics::render_report_table({report});
        return 0;
    }
    if (command == "stats") {
        std::cout << vcf::pipeline::stage_stats(ctx);
        return 0;
    }
    if (command == "run-all") { vcf::pipeline::run_all(ctx); return 0; }
    log_line("error", "unknown subcommand: " + command);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verilog corpus curation and evaluation pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", subset = "full_files",
                format = "jsonl", mode;
    bool force = false;
    int jobs = 1;
    app.add_option("--config", config_path, "pipeline config file (JSON)");
    app.add_option("--out", out_dir, "artifact directory");
    app.add_flag("--force", force,
                 "ignore fingerprint mismatches and stale locks");
    app.add_option("--jobs", jobs, "worker pool bound");

    std::vector<std::string> commands = {
        "mine",    "ingest",   "filter",   "dedup",    "extract", "split",
        "export",  "train-lm", "complete", "evaluate", "stats",   "run-all"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->fallthrough();  // global options may follow the subcommand
        if (name == "export" || name == "train-lm" || name == "complete" ||
            name == "evaluate") {
            sub->add_option("--subset", subset,
                            "full_files | parsable_files | snippets | "
                            "parsable_snippets");
        }
        if (name == "export")
            sub->add_option("--format", format, "jsonl | csv | chunks");
        if (name == "dedup") {
            sub->add_flag_callback("--exact",
                                   [&] { mode = "exact"; });
            sub->add_flag_callback("--accelerated",
                                   [&] { mode = "accelerated"; });
        }
    }

    CLI11_PARSE(app, argc, argv);

    try {
        vcf::config::PipelineConfig cfg;
        if (!config_path.empty()) cfg = vcf::config::load(config_path);
        if (!mode.empty()) cfg.dedup_mode = mode;

        Context ctx = Context::make(std::move(cfg), out_dir, force);
        if (force) {
            std::error_code ec;
            fs::remove(fs::path(out_dir) / ".vcf.lock", ec);
        }
        fs::create_directories(out_dir);
        vcf::pipeline::DirLock lock(out_dir);

        std::string command = app.get_subcommands().front()->get_name();
        return dispatch(command, ctx, subset, format);
    } catch (const vcf::pipeline::ValidationError& e) {
        log_line("error", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        log_line("error", e.what());
        return 1;
    } catch (const std::exception& e) {
        log_line("error", e.what());
        return 2;
    }
}
